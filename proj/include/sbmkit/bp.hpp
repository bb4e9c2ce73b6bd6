#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbmkit/graph.hpp"
#include "sbmkit/rng.hpp"
#include "sbmkit/sbm.hpp"

namespace sbmkit {

enum class InitMode { random, uniform, planted };

struct InitSpec {
  InitMode mode = InitMode::random;
  // Relative perturbation for random init; mixing weight of the uniform
  // vector for planted init.
  double noise = 1e-3;
  std::uint64_t seed = 0;
  Labels planted;  // required for InitMode::planted
};

// How the non-edges enter the posterior.
//  mean_field: global field h_r = (1/n) sum_k sum_s c_rs psi^k_s, kept in sync
//              with the marginals during sweeps.
//  none:       non-edges ignored (the pure edge model; exact on trees).
//  fixed:      a constant per-vertex weight exp(-h_r) with h supplied.
enum class FieldMode { mean_field, none, fixed };

struct FieldSpec {
  FieldMode mode = FieldMode::mean_field;
  std::vector<double> fixed;  // length q, for FieldMode::fixed
};

enum class SweepOrder { random_permutation, fixed };

// BP state: one q-simplex per directed edge (indexed as in Graph), the
// current vertex marginals and the external field derived from them.
class MessageSet {
 public:
  MessageSet(const Graph& g, SbmParams params, FieldSpec field);

  std::size_t q() const { return q_; }
  const SbmParams& params() const { return params_; }
  const FieldSpec& field_spec() const { return field_spec_; }

  std::span<double> message(EdgeId e) { return {messages_.data() + e * q_, q_}; }
  std::span<const double> message(EdgeId e) const { return {messages_.data() + e * q_, q_}; }
  std::span<const double> marginal(Vertex v) const { return {marginals_.data() + v * q_, q_}; }
  std::span<const double> field() const { return field_; }

  const std::vector<double>& messages() const { return messages_; }
  std::vector<double>& mutable_messages() { return messages_; }
  const std::vector<double>& marginals() const { return marginals_; }

  // Recompute every marginal from the current messages and then the field.
  void refresh_marginals(const Graph& g);

  // Recompute and store vertex v's outgoing messages and marginal; updates
  // the field incrementally. Returns the largest message-component change.
  double update_vertex(const Graph& g, Vertex v);

 private:
  friend double bethe_free_energy(const MessageSet&, const Graph&);

  void recompute_field();
  void set_marginal(Vertex v, std::span<const double> value);
  void vertex_weights(std::span<double> out) const;
  bool update_vertex_linear(const Graph& g, Vertex v, double& max_delta);
  void update_vertex_log(const Graph& g, Vertex v, double& max_delta);
  // Unnormalized factor sum_s c_rs psi_s into out; returns its sum.
  double edge_factor(std::span<const double> psi, std::span<double> out) const;

  std::size_t q_;
  std::size_t n_;
  SbmParams params_;
  FieldSpec field_spec_;
  std::vector<double> messages_;
  std::vector<double> marginals_;
  std::vector<double> marginal_sum_;
  std::vector<double> field_;
  // Scratch for vertex updates, sized on demand.
  std::vector<double> factors_;
  std::vector<double> prefix_;
  std::vector<double> suffix_;
  std::vector<double> scratch_;
};

MessageSet init_messages(const Graph& g, const SbmParams& p, const InitSpec& init,
                         FieldSpec field = {});

// One asynchronous pass over every vertex. Returns the maximum message change.
double bp_sweep(MessageSet& state, const Graph& g, SweepOrder order, Rng& rng);

struct MarginalTable {
  std::size_t q = 0;
  std::vector<double> vertex;     // n x q
  std::vector<double> two_point;  // m x q x q, edge order of Graph::edges(); optional

  std::span<const double> at(Vertex v) const { return {vertex.data() + v * q, q}; }
  std::span<const double> pair(std::size_t edge) const {
    return {two_point.data() + edge * q * q, q * q};
  }
};

MarginalTable compute_marginals(const MessageSet& state, const Graph& g, bool two_point);

// Per-vertex argmax; entries within tie_tol of the maximum tie, and ties go
// to the lowest group index.
Labels hard_labels(const MarginalTable& marginals, double tie_tol = 0.0);

// -(1/n) ln Z_Bethe, with Z on the probability scale p_rs = c_rs / n and the
// uniform prior included. Exact on trees at a fixed point.
double bethe_free_energy(const MessageSet& state, const Graph& g);

struct BpOptions {
  double tol = 1e-6;
  std::size_t max_sweeps = 1000;
  SweepOrder order = SweepOrder::random_permutation;
  std::uint64_t order_seed = 0;
  FieldSpec field;
  bool two_point = false;
  // Marginals are only resolved to about tol, so hard labels treat smaller
  // differences as ties (otherwise a not-quite-uniform fixed point leaks the
  // slowest-decaying mode into the labels).
  double label_tie_tol = 1e-5;
};

struct BpResult {
  MarginalTable marginals;
  Labels hard_labels;
  bool converged = false;
  std::size_t sweeps = 0;
  double bethe_free_energy = 0.0;
  MessageSet messages;
};

BpResult run_bp(const Graph& g, const SbmParams& p, const InitSpec& init,
                const BpOptions& options = {});

}  // namespace sbmkit
