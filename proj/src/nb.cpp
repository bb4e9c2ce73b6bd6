#include "sbmkit/nb.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "sbmkit/errors.hpp"
#include "sbmkit/kmeans.hpp"

namespace sbmkit {

namespace {

constexpr double kRealTol = 1e-7;

bool looks_real(cplx z) { return std::abs(z.imag()) <= kRealTol * std::max(1.0, std::abs(z)); }

// Rotate the phase so the largest-magnitude entry is real positive, then
// drop the imaginary part.
std::vector<double> realify(const Eigen::VectorXcd& z) {
  Eigen::Index big = 0;
  z.cwiseAbs().maxCoeff(&big);
  const cplx phase = std::abs(z(big)) > 0 ? std::conj(z(big)) / std::abs(z(big)) : cplx(1.0);
  std::vector<double> out(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) out[static_cast<std::size_t>(i)] = (z(i) * phase).real();
  return out;
}

void normalize_sign(std::vector<double>& x) {
  double nrm = 0.0;
  std::size_t big = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    nrm += x[i] * x[i];
    if (std::abs(x[i]) > std::abs(x[big])) big = i;
  }
  nrm = std::sqrt(nrm);
  if (nrm == 0.0) return;
  const double s = x[big] < 0 ? -1.0 / nrm : 1.0 / nrm;
  for (double& v : x) v *= s;
}

double edge_residual(const NbOperator& op, const std::vector<double>& x, double theta) {
  std::vector<double> y(x.size());
  op.apply<double>(x, y);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (y[i] - theta * x[i]) * (y[i] - theta * x[i]);
    den += x[i] * x[i];
  }
  return den > 0 ? std::sqrt(num / den) : 0.0;
}

// Edge vector from the in-sum half of a companion eigenvector:
// x[i->j] = (theta v_i - v_j) / (theta^2 - 1).
std::vector<double> edge_vector_from_in_sums(const Graph& g, std::span<const double> v, double theta) {
  std::vector<double> x(g.num_directed());
  const double den = theta * theta - 1.0;
  for (EdgeId e = 0; e < g.num_directed(); ++e) {
    x[e] = (theta * v[g.source(e)] - v[g.target(e)]) / den;
  }
  return x;
}

Eigenpair make_pair_from_companion(const NbOperator& op, cplx theta, const Eigen::VectorXcd& z) {
  Eigenpair ep;
  ep.value = theta;
  ep.is_real = looks_real(theta);
  if (!ep.is_real) {
    ep.residual = 0.0;
    return ep;
  }
  const double th = theta.real();
  ep.value = th;
  if (std::abs(th * th - 1.0) < 1e-8) return ep;
  const std::size_t n = op.graph().num_vertices();
  const std::vector<double> full = realify(z);
  std::vector<double> x = edge_vector_from_in_sums(op.graph(), std::span<const double>(full).subspan(n, n), th);
  normalize_sign(x);
  ep.residual = edge_residual(op, x, th);
  ep.vector = std::move(x);
  return ep;
}

Eigenpair make_pair_direct(const NbOperator& op, cplx theta, const Eigen::VectorXcd& z,
                           double residual) {
  Eigenpair ep;
  ep.value = theta;
  ep.is_real = looks_real(theta);
  ep.residual = residual;
  if (!ep.is_real) return ep;
  ep.value = theta.real();
  std::vector<double> x = realify(z);
  normalize_sign(x);
  ep.residual = edge_residual(op, x, theta.real());
  ep.vector = std::move(x);
  return ep;
}

// Companion eigenvalues -> eigenvalues of B: the characteristic polynomials
// differ by (theta^2 - 1)^(m - n).
std::vector<cplx> adjust_plus_minus_one(std::vector<cplx> values, std::size_t n, std::size_t m) {
  if (m >= n) {
    values.insert(values.end(), m - n, cplx(1.0));
    values.insert(values.end(), m - n, cplx(-1.0));
  } else {
    for (double target : {1.0, -1.0}) {
      for (std::size_t r = 0; r < n - m; ++r) {
        auto it = std::min_element(values.begin(), values.end(), [&](cplx a, cplx b) {
          return std::abs(a - target) < std::abs(b - target);
        });
        values.erase(it);
      }
    }
  }
  sort_by_modulus(values);
  return values;
}

}  // namespace

NbOperator::NbOperator(Graph g) : graph_(std::move(g)) {}

std::vector<EdgeId> NbOperator::row(EdgeId e) const {
  const Vertex i = graph_.source(e);
  const Vertex j = graph_.target(e);
  std::vector<EdgeId> cols;
  for (EdgeId f = graph_.out_begin(i); f < graph_.out_end(i); ++f) {
    if (graph_.target(f) != j) cols.push_back(graph_.reverse(f));
  }
  return cols;
}

LinearOperator NbOperator::as_operator() const {
  return {dim(), [this](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
            y.resize(x.size());
            apply<cplx>(std::span<const cplx>(x.data(), static_cast<std::size_t>(x.size())),
                        std::span<cplx>(y.data(), static_cast<std::size_t>(y.size())));
          }};
}

LinearOperator NbOperator::companion_operator() const {
  const std::size_t n = graph_.num_vertices();
  return {2 * n, [this, n](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
            y.resize(x.size());
            for (Vertex i = 0; i < n; ++i) {
              cplx av = 0.0;
              for (Vertex j : graph_.neighbors(i)) av += x(n + j);
              y(i) = (static_cast<double>(graph_.degree(i)) - 1.0) * x(n + i);
              y(n + i) = -x(i) + av;
            }
          }};
}

Eigen::MatrixXd NbOperator::dense() const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  for (EdgeId e = 0; e < dim(); ++e) {
    for (EdgeId f : row(e)) b(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(f)) = 1.0;
  }
  return b;
}

Eigen::MatrixXd NbOperator::dense_companion() const {
  const auto n = static_cast<Eigen::Index>(graph_.num_vertices());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto v = static_cast<Vertex>(i);
    c(i, n + i) = static_cast<double>(graph_.degree(v)) - 1.0;
    c(n + i, i) = -1.0;
    for (Vertex j : graph_.neighbors(v)) c(n + i, n + static_cast<Eigen::Index>(j)) = 1.0;
  }
  return c;
}

Spectrum leading_spectrum(const NbOperator& op, const SpectrumOptions& options) {
  if (options.k == 0 || options.k > 10) throw ParameterError("leading_spectrum supports 1 <= k <= 10");
  const Graph& g = op.graph();
  const std::size_t n = g.num_vertices();
  const std::size_t m = g.num_edges();
  Spectrum spec;
  SolverPath path = options.path;
  if (path == SolverPath::automatic) {
    if (n <= options.dense_max_n) {
      path = SolverPath::dense;
    } else {
      path = n < m ? SolverPath::companion : SolverPath::direct;
    }
  }
  spec.path = path;
  if (m == 0) {
    spec.bulk_radius_estimate = 0.0;
    return spec;
  }

  if (path == SolverPath::dense) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.dense_companion());
    const auto& vals = es.eigenvalues();
    std::vector<cplx> all(vals.data(), vals.data() + vals.size());
    spec.full = adjust_plus_minus_one(all, n, m);
    // Leading pairs follow B's spectrum; vectors come from matching companion columns.
    std::vector<bool> used(static_cast<std::size_t>(vals.size()), false);
    for (std::size_t t = 0; t < std::min(options.k, spec.full.size()); ++t) {
      const cplx theta = spec.full[t];
      Eigen::Index best = -1;
      for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        if (best < 0 || std::abs(vals(i) - theta) < std::abs(vals(best) - theta)) best = i;
      }
      if (best >= 0 && std::abs(vals(best) - theta) < 1e-9 * std::max(1.0, std::abs(theta))) {
        used[static_cast<std::size_t>(best)] = true;
        Eigen::VectorXcd z = es.eigenvectors().col(best);
        spec.leading.push_back(make_pair_from_companion(op, vals(best), z));
      } else {
        Eigenpair ep;
        ep.value = theta;
        ep.is_real = looks_real(theta);
        spec.leading.push_back(ep);
      }
    }
  } else {
    KrylovOptions ko;
    ko.nev = options.k;
    ko.tol = options.tol;
    ko.seed = options.seed;
    if (path == SolverPath::companion) {
      const KrylovResult kr = krylov_schur(op.companion_operator(), ko);
      spec.converged = kr.converged;
      for (std::size_t i = 0; i < kr.values.size(); ++i) {
        spec.leading.push_back(make_pair_from_companion(op, kr.values[i], kr.vectors[i]));
      }
    } else {
      const KrylovResult kr = krylov_schur(op.as_operator(), ko);
      spec.converged = kr.converged;
      for (std::size_t i = 0; i < kr.values.size(); ++i) {
        spec.leading.push_back(make_pair_direct(op, kr.values[i], kr.vectors[i], kr.residuals[i]));
      }
    }
  }
  spec.bulk_radius_estimate = spec.leading.empty() ? 0.0 : std::sqrt(std::abs(spec.leading[0].value));
  return spec;
}

Spectrum leading_spectrum(const NbOperator& op, std::size_t k, double tol, std::uint64_t seed) {
  SpectrumOptions o;
  o.k = k;
  o.tol = tol;
  o.seed = seed;
  return leading_spectrum(op, o);
}

double bulk_fraction(std::span<const cplx> values, double c, double eps) {
  if (values.empty()) return 1.0;
  const double radius = std::sqrt(c) * (1.0 + eps);
  std::size_t inside = 0;
  for (const cplx& z : values) inside += std::abs(z) <= radius ? 1 : 0;
  return static_cast<double>(inside) / static_cast<double>(values.size());
}

std::vector<double> in_edge_sums(const Graph& g, std::span<const double> x) {
  std::vector<double> v(g.num_vertices(), 0.0);
  for (EdgeId e = 0; e < g.num_directed(); ++e) v[g.target(e)] += x[e];
  return v;
}

NbClustering nb_cluster(const Graph& g, std::size_t q, const Spectrum& spec,
                        const NbClusterOptions& options) {
  if (q < 2) throw ParameterError("nb_cluster needs q >= 2");
  const std::size_t n = g.num_vertices();
  const double c = n > 0 ? 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(n) : 0.0;
  // Bulk eigenvectors carry no community signal, so only real outliers are used.
  std::vector<const Eigenpair*> chosen;
  for (std::size_t i = 1; i < spec.leading.size() && chosen.size() + 1 < q; ++i) {
    const Eigenpair& ep = spec.leading[i];
    if (!ep.is_real || ep.vector.size() != g.num_directed()) continue;
    if (is_outlier(ep.value, c, options.outlier_eps)) chosen.push_back(&ep);
  }

  NbClustering out;
  out.dims = chosen.size();
  out.low_confidence = out.dims + 1 < q;
  out.labels.assign(n, 0);
  out.embedding.assign(n * out.dims, 0.0);
  for (std::size_t d = 0; d < out.dims; ++d) {
    std::vector<double> v = in_edge_sums(g, chosen[d]->vector);
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = nrm > 0 ? std::sqrt(nrm) : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.embedding[i * out.dims + d] = v[i] / nrm;
  }
  if (out.dims == 0 || n == 0) return out;

  if (q == 2) {
    // Entries at roundoff level (tree-like pieces carry no eigenvector mass)
    // go to label 0 so the split does not depend on summation order.
    double scale = 0.0;
    for (double v : out.embedding) scale = std::max(scale, std::abs(v));
    const double floor = 1e-9 * scale;
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = out.embedding[i] < -floor ? 1 : 0;
    return out;
  }
  const KMeansResult km = kmeans(out.embedding, out.dims, q, options.kmeans_restarts, options.seed);
  out.labels = km.assignment;
  return out;
}

}  // namespace sbmkit
