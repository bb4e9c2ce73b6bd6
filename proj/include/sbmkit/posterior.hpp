#pragma once

#include <cstdint>
#include <vector>

#include "sbmkit/bp.hpp"
#include "sbmkit/graph.hpp"
#include "sbmkit/sbm.hpp"

namespace sbmkit {

// Permutation-maximized agreement, rescaled so chance is 0 and perfect is 1.
// Exact over all q! permutations for q <= 6; greedy matching refined by
// pairwise swaps above that. Throws InputError on length mismatch.
double overlap(const Labels& estimate, const Labels& truth, std::size_t q);

// Fraction of vertices with estimate == pi(truth) under the best pi found.
double best_agreement(const Labels& estimate, const Labels& truth, std::size_t q);

// Number of monochromatic edges (the Potts energy with J factored out).
std::size_t hamiltonian_energy(const Labels& labels, const Graph& g);

struct ExactPosteriorOptions {
  // Include the (1 - p_rs) factors of every non-adjacent pair.
  bool non_edges = true;
  // Optional per-vertex weight exp(-h_r) on every vertex (length q).
  std::vector<double> field;
};

struct ExactPosterior {
  MarginalTable marginals;  // vertex marginals and, per edge, two-point marginals
  double log_z = 0.0;       // ln sum_sigma q^-n P(G | sigma) [x field weights]
};

// Brute-force enumeration of all q^n assignments; TooLargeError beyond 1e7.
ExactPosterior exact_posterior_marginals(const Graph& g, const SbmParams& p,
                                         const ExactPosteriorOptions& options = {});

}  // namespace sbmkit
