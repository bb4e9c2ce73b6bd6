#pragma once

#include <cstdint>

#include "sbmkit/graph.hpp"

namespace sbmkit {

struct Bisection {
  Labels side;  // 0 or 1, exactly n/2 each
  std::size_t cut = 0;
  std::size_t swaps = 0;
};

std::size_t cut_size(const Graph& g, const Labels& side);

// From a uniformly random balanced split, repeatedly swap the pair (one vertex
// per side) with the largest cut reduction until none reduces it. Ties go to
// the lexicographically smallest (min, max) vertex pair. n must be even.
Bisection min_bisection_local_search(const Graph& g, std::uint64_t seed);

}  // namespace sbmkit
