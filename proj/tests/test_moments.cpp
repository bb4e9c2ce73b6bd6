#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sbmkit/errors.hpp"
#include "sbmkit/moments.hpp"

using namespace sbmkit;

namespace {

// E_Q[P^2 / Q^2] = sum over every graph on n vertices of P(G)^2 / Q(G), with
// P the planted likelihood averaged over all labelings.
double enumerate_graphs(std::size_t n, const SbmParams& params) {
  const std::size_t q = params.q();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
  const double p = params.mean_degree() / static_cast<double>(n);
  std::size_t labelings = 1;
  for (std::size_t i = 0; i < n; ++i) labelings *= q;
  double total = 0.0;
  for (std::size_t g = 0; g < (std::size_t{1} << pairs.size()); ++g) {
    double qg = 1.0;
    for (std::size_t e = 0; e < pairs.size(); ++e) qg *= (g >> e & 1) ? p : 1.0 - p;
    double pg = 0.0;
    std::vector<std::size_t> sigma(n);
    for (std::size_t code = 0; code < labelings; ++code) {
      std::size_t rest = code;
      for (std::size_t i = 0; i < n; ++i) {
        sigma[i] = rest % q;
        rest /= q;
      }
      double w = 1.0;
      for (std::size_t e = 0; e < pairs.size(); ++e) {
        const double pe = params.edge_probability(sigma[pairs[e].first], sigma[pairs[e].second]);
        w *= (g >> e & 1) ? pe : 1.0 - pe;
      }
      pg += w;
    }
    pg /= static_cast<double>(labelings);
    total += pg * pg / qg;
  }
  return total;
}

SbmParams two_group(double c, double lambda, std::size_t n) {
  return SbmParams::symmetric(2, n, c * (1 + lambda), c * (1 - lambda));
}

}  // namespace

TEST_CASE("second moment trivial values") {
  CHECK(second_moment_exact(6, SbmParams::symmetric(3, 6, 2.0, 2.0)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(log_second_moment_exact(1, SbmParams::symmetric(2, 5, 3.0, 1.0)) == 0.0);
}

TEST_CASE("second moment matches graph enumeration") {
  const SbmParams p = SbmParams::symmetric(2, 5, 3.0, 1.0);
  const double exact = second_moment_exact(5, p);
  const double brute = enumerate_graphs(5, p);
  CHECK(std::abs(exact - brute) < 1e-8);

  const SbmParams p3 = SbmParams::symmetric(3, 4, 3.5, 0.5);
  CHECK(std::abs(second_moment_exact(4, p3) - enumerate_graphs(4, p3)) < 1e-8);
}

TEST_CASE("second moment is at least one") {
  for (std::size_t n = 5; n <= 9; ++n)
    for (double cin : {0.0, 1.0, 4.0})
      for (std::size_t q : {2u, 3u}) {
        const SbmParams p = SbmParams::symmetric(q, n, cin, 1.5);
        CHECK(log_second_moment_exact(n, p) >= -1e-12);
      }
}

TEST_CASE("second moment depends on lambda through its square") {
  for (std::size_t n = 4; n <= 8; ++n) {
    const double a = log_second_moment_exact(n, SbmParams::symmetric(2, n, 3.0, 1.0));
    const double b = log_second_moment_exact(n, SbmParams::symmetric(2, n, 1.0, 3.0));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("exact sum approaches the rate maximum") {
  const double c = 5.0;
  const double lambda = 0.9;
  const double f_star = maximize_rate(c, lambda, 2).f_star;
  REQUIRE(f_star > 0.0);
  double prev_gap = INFINITY;
  for (std::size_t n = 10; n <= 13; ++n) {
    const double rate = log_second_moment_exact(n, two_group(c, lambda, n)) / static_cast<double>(n);
    CHECK(rate > f_star);
    CHECK(rate - f_star < prev_gap);
    prev_gap = rate - f_star;
  }
}

TEST_CASE("rate function closed forms") {
  for (std::size_t q : {2u, 3u, 5u}) {
    for (double c : {1.0, 4.0})
      for (double lambda : {0.0, 0.3, -0.2}) {
        CHECK(std::abs(rate_function(OverlapMatrix::flat(q), c, lambda)) < 1e-14);
        const double expect = c * lambda * lambda / 2 * (q - 1.0) - std::log(static_cast<double>(q));
        CHECK(rate_function(OverlapMatrix::identity(q), c, lambda) == doctest::Approx(expect).epsilon(1e-13));
      }
    CHECK(OverlapMatrix::flat(q).frobenius_sq() == doctest::Approx(1.0));
    CHECK(OverlapMatrix::identity(q).frobenius_sq() == doctest::Approx(static_cast<double>(q)));
  }
}

TEST_CASE("q = 2 maximizer against the grid") {
  RateOptions grid;
  grid.method = RateMethod::grid;
  RateOptions ascent;
  ascent.method = RateMethod::ascent;
  for (double x : {0.3, 0.9, 1.1, 1.5, 2.5, 4.0, 7.0}) {
    const RateMax a = maximize_rate(x, 1.0, 2, grid);
    const RateMax b = maximize_rate(x, 1.0, 2, ascent);
    CHECK(std::abs(a.f_star - b.f_star) < 1e-6);
    CHECK(a.f_star >= 0.0);
    CHECK(b.alpha.stochastic_gap() < 1e-9);
  }
}

TEST_CASE("flat below one, exponential above") {
  const RateMax low = maximize_rate(0.5, 1.0, 2);
  CHECK(low.f_star == 0.0);
  CHECK(low.alpha.at(0, 0) == doctest::Approx(0.5));
  CHECK(contiguity_verdict(0.5, 1.0, 2) == ContiguityVerdict::bounded);
  CHECK(contiguity_verdict(3.0, 0.0, 4) == ContiguityVerdict::bounded);

  const RateMax high = maximize_rate(4.0, 1.0, 2);
  CHECK(high.f_star > 0.1);
  CHECK(std::abs(high.alpha.at(0, 0) - 0.5) > 0.3);
  CHECK(contiguity_verdict(high) == ContiguityVerdict::unbounded);

  // Just above one, f* ~ (3/4) eps^2.
  const RateMax near = maximize_rate(1.01, 1.0, 2);
  CHECK(near.f_star == doctest::Approx(0.75e-4).epsilon(0.05));
}

TEST_CASE("two-group onset") {
  CHECK(std::abs(rate_onset(2, 0.5, 2.0) - 1.0) < 1e-3);
}

TEST_CASE("verdict agrees with the maximum for five groups") {
  const double x = 2 * std::log(4.0) / 4 + 0.2;
  const RateMax m = maximize_rate(x, 1.0, 5);
  CHECK(m.alpha.stochastic_gap() < 1e-9);
  const ContiguityVerdict v = contiguity_verdict(m);
  CHECK((v == ContiguityVerdict::unbounded) == (m.f_star > kRateTolerance));
  CHECK(contiguity_verdict(x, 1.0, 5) == v);
}

TEST_CASE("overlap matrix validation") {
  CHECK_NOTHROW(OverlapMatrix::validated(2, {0.3, 0.7, 0.7, 0.3}));
  CHECK_THROWS_AS(OverlapMatrix::validated(2, {1.2, -0.2, -0.2, 1.2}), ValidationError);
  CHECK_THROWS_AS(OverlapMatrix::validated(2, {0.5, 0.6, 0.5, 0.4}), ValidationError);
  CHECK_THROWS_AS(OverlapMatrix::validated(2, {0.5, 0.5, 0.5}), ParameterError);
  const OverlapMatrix off(2, {0.5, 0.6, 0.5, 0.4});
  CHECK(off.stochastic_gap() == doctest::Approx(0.1));
}

TEST_CASE("size limit and scan csv") {
  CHECK_THROWS_AS(second_moment_exact(400, SbmParams::symmetric(5, 400, 3.0, 1.0)), TooLargeError);
  std::vector<RateScanRow> rows(1);
  rows[0].c = 4.0;
  rows[0].lambda = 1.0;
  rows[0].max = maximize_rate(4.0, 1.0, 2);
  rows[0].verdict = contiguity_verdict(rows[0].max);
  std::ostringstream os;
  write_rate_scan_csv(os, rows);
  CHECK(os.str().rfind("c,lambda,q,f_star,alpha_0_0,alpha_0_1,alpha_1_0,alpha_1_1,verdict\n", 0) == 0);
  CHECK(os.str().find("second-moment-unbounded") != std::string::npos);
}
