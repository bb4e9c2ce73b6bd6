#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sbmkit/eigensolver.hpp"
#include "sbmkit/graph.hpp"

namespace sbmkit {

// Non-backtracking (Hashimoto) matrix on the 2m directed edges:
// B[(i->j), (k->l)] = 1 iff l == i and k != j.
class NbOperator {
 public:
  explicit NbOperator(Graph g);

  const Graph& graph() const { return graph_; }
  std::size_t dim() const { return graph_.num_directed(); }

  // y = B x, computed as y[i->j] = sum_{k in N(i)} x[k->i] - x[j->i].
  template <class T>
  void apply(std::span<const T> x, std::span<T> y) const {
    std::vector<T> in_sum(graph_.num_vertices(), T{});
    for (Vertex i = 0; i < graph_.num_vertices(); ++i) {
      for (EdgeId e = graph_.out_begin(i); e < graph_.out_end(i); ++e) in_sum[i] += x[graph_.reverse(e)];
    }
    for (EdgeId e = 0; e < dim(); ++e) y[e] = in_sum[graph_.source(e)] - x[graph_.reverse(e)];
  }

  // Column indices of the nonzeros in row e: the edges k->i with k != j.
  std::vector<EdgeId> row(EdgeId e) const;

  LinearOperator as_operator() const;

  // 2n-dimensional linearization [[0, D - I], [-I, A]] acting on
  // (out-sums, in-sums); shares B's spectrum up to multiplicities of +-1.
  LinearOperator companion_operator() const;

  Eigen::MatrixXd dense() const;
  Eigen::MatrixXd dense_companion() const;

 private:
  Graph graph_;
};

enum class SolverPath { automatic, dense, companion, direct };

struct Eigenpair {
  cplx value;
  bool is_real = false;
  // Real eigenvector in directed-edge coordinates, unit norm, largest
  // component positive. Empty for complex values and for theta = +-1 on
  // the companion paths (not recoverable from in/out sums).
  std::vector<double> vector;
  double residual = 0.0;
};

struct Spectrum {
  std::vector<Eigenpair> leading;  // descending modulus
  // Every eigenvalue of B (2m values); filled only by the dense path.
  std::vector<cplx> full;
  double bulk_radius_estimate = 0.0;  // sqrt of the leading modulus
  bool converged = true;
  SolverPath path = SolverPath::automatic;
};

struct SpectrumOptions {
  std::size_t k = 4;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  SolverPath path = SolverPath::automatic;
  // automatic picks dense at or below this vertex count; above it the
  // companion operator when 2n < 2m, else B itself.
  std::size_t dense_max_n = 500;
};

Spectrum leading_spectrum(const NbOperator& op, const SpectrumOptions& options);
Spectrum leading_spectrum(const NbOperator& op, std::size_t k, double tol, std::uint64_t seed);

// Fraction of values with |theta| <= sqrt(c) (1 + eps).
double bulk_fraction(std::span<const cplx> values, double c, double eps);

inline bool is_outlier(cplx value, double c, double eps) {
  return std::abs(value) > (1.0 + eps) * std::sqrt(c);
}

struct NbClusterOptions {
  std::uint64_t seed = 0;
  double outlier_eps = 0.05;
  std::size_t kmeans_restarts = 20;
};

struct NbClustering {
  Labels labels;
  bool low_confidence = false;
  std::size_t dims = 0;
  std::vector<double> embedding;  // n x dims, incoming-edge sums
};

// In-sum embedding of the real outlier eigenvectors among the 2nd..q-th
// leading pairs; sign split for q = 2, k-means otherwise. With fewer than q - 1
// outliers the result is flagged low-confidence (all group 0 when none).
NbClustering nb_cluster(const Graph& g, std::size_t q, const Spectrum& spec,
                        const NbClusterOptions& options = {});

// v_i = sum over incoming edges k->i of x[k->i].
std::vector<double> in_edge_sums(const Graph& g, std::span<const double> x);

}  // namespace sbmkit
