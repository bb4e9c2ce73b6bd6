#include "sbmkit/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "sbmkit/errors.hpp"
#include "sbmkit/rng.hpp"

namespace sbmkit {

namespace {

double sq_dist(const double* a, const double* b, std::size_t dims) {
  double s = 0.0;
  for (std::size_t d = 0; d < dims; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

KMeansResult lloyd(std::span<const double> pts, std::size_t n, std::size_t dims, std::size_t k,
                   Rng& rng, std::size_t max_iter) {
  KMeansResult r;
  r.centers.assign(k * dims, 0.0);
  r.assignment.assign(n, 0);
  std::vector<double> best_d(n, std::numeric_limits<double>::infinity());

  // k-means++ seeding.
  std::size_t first = rng.below(n);
  std::copy_n(pts.begin() + static_cast<std::ptrdiff_t>(first * dims), dims, r.centers.begin());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best_d[i] = std::min(best_d[i], sq_dist(&pts[i * dims], &r.centers[(c - 1) * dims], dims));
      total += best_d[i];
    }
    std::size_t pick = rng.below(n);
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        target -= best_d[i];
        if (target <= 0.0) {
          pick = i;
          break;
        }
      }
    }
    std::copy_n(pts.begin() + static_cast<std::ptrdiff_t>(pick * dims), dims,
                r.centers.begin() + static_cast<std::ptrdiff_t>(c * dims));
  }

  std::vector<double> sums(k * dims);
  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sq_dist(&pts[i * dims], &r.centers[c * dims], dims);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(c);
        }
      }
      if (r.assignment[i] != best) {
        r.assignment[i] = best;
        changed = true;
      }
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.assignment[i]);
      ++counts[c];
      for (std::size_t d = 0; d < dims; ++d) sums[c * dims + d] += pts[i * dims + d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its center
      for (std::size_t d = 0; d < dims; ++d) {
        r.centers[c * dims + d] = sums[c * dims + d] / static_cast<double>(counts[c]);
      }
    }
    if (!changed) break;
  }
  r.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.inertia += sq_dist(&pts[i * dims], &r.centers[static_cast<std::size_t>(r.assignment[i]) * dims], dims);
  }
  return r;
}

}  // namespace

KMeansResult kmeans(std::span<const double> points, std::size_t dims, std::size_t k,
                    std::size_t restarts, std::uint64_t seed, std::size_t max_iter) {
  if (dims == 0 || k == 0) throw ParameterError("kmeans needs dims > 0 and k > 0");
  const std::size_t n = points.size() / dims;
  if (n == 0) return {};
  Rng rng(derive_seed(seed, 0x6b6dULL));
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < std::max<std::size_t>(restarts, 1); ++t) {
    KMeansResult r = lloyd(points, n, dims, std::min(k, n), rng, max_iter);
    if (r.inertia < best.inertia) best = std::move(r);
  }
  return best;
}

}  // namespace sbmkit
