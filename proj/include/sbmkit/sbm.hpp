#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sbmkit/graph.hpp"

namespace sbmkit {

// Block-model parameters in the sparse scaling p_rs = c_rs / n.
class SbmParams {
 public:
  // Throws ParameterError unless q >= 2, c_in, c_out >= 0 and max(c_in, c_out) < n.
  static SbmParams symmetric(std::size_t q, std::size_t n, double c_in, double c_out);
  // c_in = 0, c_out chosen so the mean degree is c.
  static SbmParams planted_coloring(std::size_t q, std::size_t n, double c);
  // Row-major q x q affinity matrix c_rs; must be symmetric and nonnegative.
  static SbmParams general(std::size_t n, std::size_t q, std::vector<double> affinity);

  std::size_t q() const { return q_; }
  std::size_t n() const { return n_; }
  bool is_symmetric() const { return symmetric_; }

  // Only meaningful in symmetric mode.
  double c_in() const { return c_in_; }
  double c_out() const { return c_out_; }

  double affinity(std::size_t r, std::size_t s) const { return affinity_[r * q_ + s]; }
  const std::vector<double>& affinity_matrix() const { return affinity_; }
  double edge_probability(std::size_t r, std::size_t s) const {
    return affinity(r, s) / static_cast<double>(n_);
  }

  // Expected degree under uniform labels: (1/q^2) sum_rs c_rs.
  double mean_degree() const;

  // Same model on a different vertex count.
  SbmParams with_n(std::size_t n) const;

 private:
  std::size_t q_ = 2;
  std::size_t n_ = 0;
  bool symmetric_ = false;
  double c_in_ = 0.0;
  double c_out_ = 0.0;
  std::vector<double> affinity_;
};

struct DerivedParams {
  double c = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  // ln(c_in / c_out); absent when either is zero.
  std::optional<double> coupling;
  double ks_margin = 0.0;  // c * lambda^2
};

// Requires symmetric mode (ParameterError otherwise).
DerivedParams derive_params(const SbmParams& p);

enum class KsVerdict { above, below, critical };

struct KsCheck {
  KsVerdict verdict = KsVerdict::below;
  double margin = 0.0;  // c * lambda^2 - 1
};

inline constexpr double kCriticalTolerance = 1e-12;

KsCheck ks_check(const SbmParams& p);

enum class ItBoundVerdict { undetectable_by_bound, inconclusive };

// c lambda^2 < 2 ln(q-1)/(q-1). ParameterError for q = 2, where the
// Kesten-Stigum check is already tight.
ItBoundVerdict it_bound_check(const SbmParams& p);
double it_bound(std::size_t q);

struct SbmSample {
  Graph graph;
  Labels labels;
};

// Labels i.i.d. uniform (or, with balanced, a uniformly random assignment
// with exactly n/q per group, requiring q | n); edges independent with
// probability p_{sigma_i sigma_j}.
SbmSample sample_sbm(const SbmParams& p, std::uint64_t seed, bool balanced = false);

// Edges of the graph given fixed labels.
Graph sample_sbm_graph(const SbmParams& p, const Labels& labels, std::uint64_t seed);

// Large-n expected triangle count (c^3/6)(1 + (q-1) lambda^3); symmetric mode.
double expected_triangles_sbm(const SbmParams& p);

}  // namespace sbmkit
