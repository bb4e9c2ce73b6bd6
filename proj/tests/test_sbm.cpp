#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sbmkit/errors.hpp"
#include "sbmkit/sbm.hpp"

using namespace sbmkit;

TEST_CASE("derived parameters") {
  const DerivedParams d = derive_params(SbmParams::symmetric(2, 1000, 5.0, 1.0));
  CHECK(d.c == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(d.mu == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(d.lambda == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(d.ks_margin == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  REQUIRE(d.coupling.has_value());
  CHECK(*d.coupling == doctest::Approx(std::log(5.0)));

  for (std::size_t q : {3u, 5u, 7u}) {
    const DerivedParams pc = derive_params(SbmParams::planted_coloring(q, 1000, 6.0));
    CHECK(pc.lambda == doctest::Approx(-1.0 / static_cast<double>(q - 1)).epsilon(1e-14));
    CHECK(pc.c == doctest::Approx(6.0).epsilon(1e-14));
    CHECK_FALSE(pc.coupling.has_value());
  }
}

TEST_CASE("derived parameter identities") {
  for (double cin : {0.0, 1.5, 4.0, 9.0}) {
    for (double cout : {0.5, 2.0, 7.0}) {
      for (std::size_t q : {2u, 3u, 6u}) {
        const DerivedParams d = derive_params(SbmParams::symmetric(q, 500, cin, cout));
        CHECK(d.mu == doctest::Approx(d.c * d.lambda).epsilon(1e-14));
        CHECK(d.c == doctest::Approx((cin + (q - 1.0) * cout) / q).epsilon(1e-14));
        CHECK(std::abs(d.lambda) <= 1.0 + 1e-15);
        const KsCheck ks = ks_check(SbmParams::symmetric(q, 500, cin, cout));
        CHECK((ks.verdict == KsVerdict::above) == (d.ks_margin - 1.0 > kCriticalTolerance));
      }
    }
  }
}

TEST_CASE("Kesten-Stigum check") {
  CHECK(ks_check(SbmParams::symmetric(2, 1000, 5.0, 1.0)).verdict == KsVerdict::above);
  const KsCheck flat = ks_check(SbmParams::symmetric(3, 1000, 2.0, 2.0));
  CHECK(flat.verdict == KsVerdict::below);
  CHECK(flat.margin == doctest::Approx(-1.0));
  CHECK(ks_check(SbmParams::planted_coloring(5, 1000, 16.0)).verdict == KsVerdict::critical);
  CHECK(ks_check(SbmParams::planted_coloring(5, 1000, 15.9)).verdict == KsVerdict::below);
}

TEST_CASE("information-theoretic bound check") {
  // q = 5 with c lambda^2 = 0.5 and 1.0: planted coloring gives c/16.
  CHECK(it_bound_check(SbmParams::planted_coloring(5, 1000, 8.0)) == ItBoundVerdict::undetectable_by_bound);
  CHECK(it_bound_check(SbmParams::planted_coloring(5, 1000, 16.0)) == ItBoundVerdict::inconclusive);
  CHECK(it_bound(5) == doctest::Approx(2.0 * std::log(4.0) / 4.0));
  CHECK_THROWS_AS(it_bound_check(SbmParams::symmetric(2, 100, 3.0, 1.0)), ParameterError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SbmParams::symmetric(1, 100, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(SbmParams::symmetric(2, 100, -1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(SbmParams::symmetric(2, 10, 10.0, 1.0), ParameterError);
  CHECK_THROWS_AS(SbmParams::general(100, 2, {1.0, 2.0, 3.0, 1.0}), ParameterError);
  const SbmParams g = SbmParams::general(100, 2, {4.0, 1.0, 1.0, 2.0});
  CHECK(g.mean_degree() == doctest::Approx(2.0));
  CHECK_THROWS_AS(derive_params(g), ParameterError);
}

TEST_CASE("planted coloring has no monochromatic edges") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SbmSample s = sample_sbm(SbmParams::planted_coloring(4, 3000, 6.0), seed);
    CHECK(s.graph.num_edges() > 0);
    for (const Edge& e : s.graph.edges()) CHECK(s.labels[e.u] != s.labels[e.v]);
  }
}

TEST_CASE("within-group edge fraction") {
  const SbmSample s = sample_sbm(SbmParams::symmetric(2, 10000, 5.0, 1.0), 17);
  std::size_t within = 0;
  for (const Edge& e : s.graph.edges()) within += s.labels[e.u] == s.labels[e.v];
  const double m = static_cast<double>(s.graph.num_edges());
  const double f = 5.0 / 6.0;
  CHECK(std::abs(within / m - f) < 3.0 * std::sqrt(f * (1 - f) / m));
  const DegreeSummary d = degree_stats(s.graph);
  CHECK(std::abs(d.mean - 3.0) < 3.0 * std::sqrt(2.0 * 3.0 / 10000.0));
}

TEST_CASE("small-n edge expectations match exhaustive label enumeration") {
  // n = 6, q = 2: E[within edges] and E[edges] summed over all 2^6 labelings.
  const std::size_t n = 6;
  const SbmParams p = SbmParams::symmetric(2, n, 4.0, 1.0);
  double e_within = 0.0;
  double e_total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool same = ((mask >> i) & 1u) == ((mask >> j) & 1u);
        const double pij = (same ? 4.0 : 1.0) / n;
        e_total += pij / 64.0;
        if (same) e_within += pij / 64.0;
      }
    }
  }
  std::vector<double> within;
  std::vector<double> total;
  for (std::uint64_t seed = 0; seed < 40000; ++seed) {
    const SbmSample s = sample_sbm(p, seed);
    std::size_t w = 0;
    for (const Edge& e : s.graph.edges()) w += s.labels[e.u] == s.labels[e.v];
    within.push_back(static_cast<double>(w));
    total.push_back(static_cast<double>(s.graph.num_edges()));
  }
  const auto mw = oracle::moments(within);
  const auto mt = oracle::moments(total);
  CHECK(std::abs(mw.mean - e_within) < 4 * mw.se);
  CHECK(std::abs(mt.mean - e_total) < 4 * mt.se);
}

TEST_CASE("equal affinities behave like Erdos-Renyi") {
  const SbmSample s = sample_sbm(SbmParams::symmetric(3, 9000, 3.0, 3.0), 4);
  std::size_t within = 0;
  for (const Edge& e : s.graph.edges()) within += s.labels[e.u] == s.labels[e.v];
  const double m = static_cast<double>(s.graph.num_edges());
  CHECK(std::abs(within / m - 1.0 / 3.0) < 4.0 * std::sqrt((2.0 / 9.0) / m));
}

TEST_CASE("group sizes are multinomial") {
  const std::size_t n = 5000;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SbmSample s = sample_sbm(SbmParams::symmetric(4, n, 2.0, 1.0), seed);
    std::vector<std::size_t> sizes(4, 0);
    for (int l : s.labels) ++sizes[static_cast<std::size_t>(l)];
    const double sd = std::sqrt(n * 0.25 * 0.75);
    for (std::size_t k : sizes) CHECK(std::abs(static_cast<double>(k) - n / 4.0) < 5 * sd);
  }
  const SbmSample b = sample_sbm(SbmParams::symmetric(4, 400, 2.0, 1.0), 3, true);
  std::vector<std::size_t> sizes(4, 0);
  for (int l : b.labels) ++sizes[static_cast<std::size_t>(l)];
  CHECK(sizes == std::vector<std::size_t>(4, 100));
}

TEST_CASE("sampling is deterministic per seed") {
  const SbmParams p = SbmParams::symmetric(3, 2000, 6.0, 1.0);
  const SbmSample a = sample_sbm(p, 99);
  const SbmSample b = sample_sbm(p, 99);
  CHECK(a.labels == b.labels);
  CHECK(std::equal(a.graph.edges().begin(), a.graph.edges().end(), b.graph.edges().begin(), b.graph.edges().end()));
  const SbmSample c = sample_sbm(p, 100);
  CHECK(a.labels != c.labels);
}

TEST_CASE("expected triangles") {
  CHECK(expected_triangles_sbm(SbmParams::symmetric(2, 500, 5.0, 1.0)) == doctest::Approx(35.0 / 6.0));
  CHECK(expected_triangles_sbm(SbmParams::symmetric(3, 500, 3.0, 3.0)) == doctest::Approx(4.5));
}
