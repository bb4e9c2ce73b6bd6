#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sbmkit {

struct KMeansResult {
  std::vector<int> assignment;
  std::vector<double> centers;  // k x dims
  double inertia = 0.0;
};

// Lloyd iterations from k-means++ seeds; best of `restarts` runs by inertia.
// points is row-major n x dims.
KMeansResult kmeans(std::span<const double> points, std::size_t dims, std::size_t k,
                    std::size_t restarts, std::uint64_t seed, std::size_t max_iter = 300);

}  // namespace sbmkit
