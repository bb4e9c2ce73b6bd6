#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sbmkit/errors.hpp"
#include "sbmkit/nb.hpp"
#include "sbmkit/posterior.hpp"
#include "sbmkit/sbm.hpp"

using namespace sbmkit;

namespace {

std::vector<cplx> dense_oracle_spectrum(const Graph& g) {
  const auto b = oracle::nb_matrix(g);
  const auto d = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = b[i][j];
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<cplx> v(es.eigenvalues().data(), es.eigenvalues().data() + d);
  sort_by_modulus(v);
  return v;
}

// Distance from z to the nearest element of pool.
double nearest(cplx z, const std::vector<cplx>& pool) {
  double best = INFINITY;
  for (cplx w : pool) best = std::min(best, std::abs(z - w));
  return best;
}

Graph two_cliques(std::size_t half) {
  std::vector<Edge> e;
  for (std::size_t side = 0; side < 2; ++side)
    for (std::size_t a = 0; a < half; ++a)
      for (std::size_t b = a + 1; b < half; ++b)
        e.push_back({static_cast<Vertex>(side * half + a), static_cast<Vertex>(side * half + b)});
  e.push_back({0, static_cast<Vertex>(half)});
  return Graph::from_edges(2 * half, e);
}

double empirical_c(const Graph& g) { return 2.0 * g.num_edges() / static_cast<double>(g.num_vertices()); }

}  // namespace

TEST_CASE("rows and products match the definition") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = oracle::random_graph(5 + trial, 0.3, rng);
    const NbOperator op(g);
    const auto b = oracle::nb_matrix(g);
    std::vector<double> x(op.dim());
    std::uniform_real_distribution<double> u(-1, 1);
    for (double& v : x) v = u(rng);
    std::vector<double> y(op.dim());
    op.apply<double>(x, y);
    for (EdgeId e = 0; e < op.dim(); ++e) {
      const auto row = op.row(e);
      CHECK(row.size() == g.degree(g.source(e)) - 1);
      double expect = 0.0;
      std::size_t nnz = 0;
      for (EdgeId f = 0; f < op.dim(); ++f) {
        expect += b[e][f] * x[f];
        nnz += b[e][f];
        if (b[e][f]) CHECK(std::find(row.begin(), row.end(), f) != row.end());
      }
      CHECK(nnz == row.size());
      CHECK(y[e] == doctest::Approx(expect).epsilon(1e-14));
    }
    const Eigen::MatrixXd dense = op.dense();
    for (EdgeId e = 0; e < op.dim(); ++e)
      for (EdgeId f = 0; f < op.dim(); ++f) CHECK(dense(e, f) == b[e][f]);
  }
}

TEST_CASE("trace identities") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 25; ++trial) {
    const Graph g = oracle::random_graph(6 + trial, 0.35, rng);
    const auto b = oracle::nb_matrix(g);
    std::vector<std::vector<long long>> bl(b.size(), std::vector<long long>(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) bl[i][j] = b[i][j];
    const auto b2 = oracle::matmul(bl, bl);
    const auto b3 = oracle::matmul(b2, bl);
    long long t1 = 0;
    long long t2 = 0;
    long long t3 = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      t1 += bl[i][i];
      t2 += b2[i][i];
      t3 += b3[i][i];
    }
    CHECK(t1 == 0);
    CHECK(t2 == 0);
    CHECK(t3 == 6 * static_cast<long long>(count_triangles(g)));
  }
}

TEST_CASE("triangle spectrum") {
  const Graph tri = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}});
  const NbOperator op(tri);
  CHECK(op.dim() == 6);
  SpectrumOptions o;
  o.k = 6;
  o.path = SolverPath::dense;
  const Spectrum s = leading_spectrum(op, o);
  REQUIRE(s.full.size() == 6);
  int ones = 0;
  for (cplx z : s.full) {
    CHECK(std::abs(z) == doctest::Approx(1.0).epsilon(1e-9));
    ones += std::abs(z - 1.0) < 1e-8;
  }
  CHECK(ones == 2);
  const auto oracle_values = dense_oracle_spectrum(tri);
  for (cplx z : s.full) CHECK(nearest(z, oracle_values) < 1e-8);
}

TEST_CASE("path graph is nilpotent") {
  const Graph path = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}});
  const NbOperator op(path);
  const Eigen::MatrixXd b = op.dense();
  CHECK((b * b).isZero());
  SpectrumOptions o;
  o.k = 4;
  const Spectrum s = leading_spectrum(op, o);
  for (cplx z : s.full) CHECK(std::abs(z) < 1e-12);
  CHECK(bulk_fraction(s.full, 4.0 / 3.0, 0.0) == 1.0);
}

TEST_CASE("regular graph leading eigenvalue") {
  for (std::size_t d : {3u, 4u, 5u}) {
    const Graph g = sample_regular(600, d, d);
    const NbOperator op(g);
    const Spectrum s = leading_spectrum(op, 3, 1e-10, 1);
    CHECK(s.path == SolverPath::companion);
    CHECK(s.leading[0].value.real() == doctest::Approx(d - 1.0).epsilon(1e-9));
    CHECK(s.leading[0].residual < 1e-8);
  }
}

TEST_CASE("iterative and dense solvers agree") {
  std::mt19937_64 rng(15);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 12 + rng() % 19;
    const Graph g = oracle::random_graph(n, 4.0 / n, rng);
    if (g.num_edges() < n) {
      --trial;
      continue;
    }
    const NbOperator op(g);
    const auto truth = dense_oracle_spectrum(g);
    for (SolverPath path : {SolverPath::direct, SolverPath::companion}) {
      SpectrumOptions o;
      o.k = 4;
      o.path = path;
      o.seed = trial;
      const Spectrum s = leading_spectrum(op, o);
      CHECK(s.converged);
      for (std::size_t i = 0; i < s.leading.size(); ++i) {
        CHECK(std::abs(std::abs(s.leading[i].value) - std::abs(truth[i])) < 1e-6);
        CHECK(nearest(s.leading[i].value, truth) < 1e-6);
      }
    }
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("companion spectrum equals the full operator spectrum") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 20 + 8 * trial;
    const Graph g = oracle::random_graph(n, 5.0 / n, rng);
    const NbOperator op(g);
    SpectrumOptions o;
    o.path = SolverPath::dense;
    const Spectrum s = leading_spectrum(op, o);
    REQUIRE(s.full.size() == op.dim());
    const auto truth = dense_oracle_spectrum(g);
    for (cplx z : s.full) {
      if (std::abs(z) < 0.05) continue;  // defective zero blocks scatter numerically
      CHECK(nearest(z, truth) < 1e-8 * std::max(1.0, std::abs(z)));
    }
  }
}

TEST_CASE("eigenpair residuals") {
  const SbmSample s = sample_sbm(SbmParams::symmetric(2, 300, 5.0, 1.0), 4);
  const NbOperator op(s.graph);
  for (SolverPath path : {SolverPath::dense, SolverPath::companion, SolverPath::direct}) {
    SpectrumOptions o;
    o.k = 4;
    o.path = path;
    const Spectrum sp = leading_spectrum(op, o);
    for (std::size_t i = 1; i < sp.leading.size(); ++i) {
      CHECK(std::abs(sp.leading[i - 1].value) >= std::abs(sp.leading[i].value) - 1e-12);
    }
    for (const Eigenpair& ep : sp.leading) {
      if (!ep.vector.empty()) CHECK(ep.residual < 1e-7);
    }
  }
}

TEST_CASE("block model outliers") {
  const SbmSample s = sample_sbm(SbmParams::symmetric(2, 4000, 5.0, 1.0), 1);
  const Spectrum sp = leading_spectrum(NbOperator(s.graph), 2, 1e-10, 1);
  CHECK(std::abs(sp.leading[0].value.real() - 3.0) < 0.15);
  CHECK(std::abs(sp.leading[1].value.real() - 2.0) < 0.2);
  CHECK(sp.leading[1].is_real);

  const Graph er = sample_er(4000, 3.0, 2);
  const Spectrum se = leading_spectrum(NbOperator(er), 2, 1e-6, 1);
  CHECK(std::abs(se.leading[1].value) <= std::sqrt(3.0) + 0.15);
}

TEST_CASE("bulk fraction") {
  const Graph er = sample_er(400, 3.0, 3);
  SpectrumOptions o;
  const Spectrum s = leading_spectrum(NbOperator(er), o);
  REQUIRE(s.path == SolverPath::dense);
  CHECK(bulk_fraction(s.full, empirical_c(er), 0.1) >= 0.99);

  const SbmSample sbm = sample_sbm(SbmParams::symmetric(2, 400, 5.0, 1.0), 5);
  const Spectrum ss = leading_spectrum(NbOperator(sbm.graph), o);
  const double c = empirical_c(sbm.graph);
  std::size_t outside = 0;
  for (cplx z : ss.full) outside += std::abs(z) > 1.1 * std::sqrt(c);
  CHECK(outside <= 2);
  CHECK(bulk_fraction(ss.full, c, 0.1) >= 0.99);
}

TEST_CASE("clustering two cliques") {
  const Graph g = two_cliques(10);
  const Spectrum s = leading_spectrum(NbOperator(g), 4, 1e-10, 1);
  const NbClustering cl = nb_cluster(g, 2, s);
  Labels truth(20, 0);
  for (std::size_t i = 10; i < 20; ++i) truth[i] = 1;
  CHECK(overlap(cl.labels, truth, 2) == doctest::Approx(1.0));
  CHECK(cl.dims == 1);
}

TEST_CASE("clustering without signal") {
  const SbmSample s = sample_sbm(SbmParams::symmetric(2, 8000, 3.0, 3.0), 6);
  const Spectrum sp = leading_spectrum(NbOperator(s.graph), 2, 1e-6, 1);
  const NbClustering cl = nb_cluster(s.graph, 2, sp);
  CHECK(std::abs(overlap(cl.labels, s.labels, 2)) < 0.04);
  CHECK(cl.dims == 0);
  CHECK(cl.low_confidence);
}

TEST_CASE("clustering above the threshold") {
  const SbmSample s = sample_sbm(SbmParams::symmetric(3, 6000, 10.0, 1.0), 3);
  const Spectrum sp = leading_spectrum(NbOperator(s.graph), 3, 1e-8, 1);
  const NbClustering cl = nb_cluster(s.graph, 3, sp);
  CHECK_FALSE(cl.low_confidence);
  CHECK(cl.dims == 2);
  CHECK(overlap(cl.labels, s.labels, 3) > 0.3);
}

TEST_CASE("clustering is equivariant under vertex relabeling") {
  const SbmSample s = sample_sbm(SbmParams::symmetric(2, 3000, 6.0, 1.0), 9);
  std::vector<Vertex> perm(3000);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> edges;
  for (const Edge& e : s.graph.edges()) edges.push_back({perm[e.u], perm[e.v]});
  const Graph h = Graph::from_edges(3000, edges);

  const NbClustering a = nb_cluster(s.graph, 2, leading_spectrum(NbOperator(s.graph), 4, 1e-10, 1));
  const NbClustering b = nb_cluster(h, 2, leading_spectrum(NbOperator(h), 4, 1e-10, 2));
  Labels pulled(3000);
  for (Vertex v = 0; v < 3000; ++v) pulled[v] = b.labels[perm[v]];
  CHECK(overlap(pulled, a.labels, 2) == doctest::Approx(1.0));
}

TEST_CASE("argument checks") {
  const Graph g = two_cliques(4);
  CHECK_THROWS_AS(leading_spectrum(NbOperator(g), 11, 1e-10, 0), ParameterError);
  CHECK(is_outlier(cplx(2.0, 0.0), 3.0, 0.05));
  CHECK_FALSE(is_outlier(cplx(1.8, 0.0), 3.0, 0.05));
  CHECK(bulk_fraction(std::vector<cplx>{}, 3.0, 0.1) == 1.0);
}
