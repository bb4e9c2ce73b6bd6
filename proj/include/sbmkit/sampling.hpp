#pragma once

#include <span>
#include <vector>

#include "sbmkit/graph.hpp"
#include "sbmkit/rng.hpp"

namespace sbmkit::detail {

// Geometric-skip Bernoulli sampling: expected cost O(|block| + edges).

// Every unordered pair inside `block` independently with probability p.
void sample_within_block(std::span<const Vertex> block, double p, Rng& rng,
                         std::vector<Edge>& out);

// Every pair (a, b) in A x B independently with probability p.
void sample_between_blocks(std::span<const Vertex> a, std::span<const Vertex> b, double p,
                           Rng& rng, std::vector<Edge>& out);

}  // namespace sbmkit::detail
