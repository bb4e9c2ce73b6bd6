#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "sbmkit/errors.hpp"
#include "sbmkit/tree.hpp"

using namespace sbmkit;

namespace {

// Root posterior given generation `depth`, by summing over every coloring of
// the nodes above it.
std::vector<double> brute_posterior(const LabeledTree& t, std::size_t depth) {
  const std::size_t q = t.q;
  const std::size_t interior = t.level_begin[depth];
  const std::size_t leaves_end = t.level_begin[depth + 1];
  const double same = t.lambda + (1.0 - t.lambda) / q;
  const double diff = (1.0 - t.lambda) / q;
  std::vector<int> col(leaves_end);
  for (std::size_t v = interior; v < leaves_end; ++v) col[v] = t.color[v];
  std::vector<double> post(q, 0.0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < interior; ++i) total *= q;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (std::size_t v = 0; v < interior; ++v) {
      col[v] = static_cast<int>(rest % q);
      rest /= q;
    }
    double w = 1.0;
    for (std::size_t v = 1; v < leaves_end; ++v) w *= col[v] == col[t.parent[v]] ? same : diff;
    post[col[0]] += w;
  }
  double z = 0.0;
  for (double p : post) z += p;
  for (double& p : post) p /= z;
  return post;
}

}  // namespace

TEST_CASE("fixed offspring tree shape") {
  const LabeledTree t = broadcast(2, 0.5, 2, 5, Offspring::fixed, 1);
  CHECK(t.size() == 63);
  CHECK(t.level_size(5) == 32);
  CHECK(t.max_depth() == 5);
  for (std::size_t v = 1; v < t.size(); ++v) {
    CHECK(t.depth[v] == t.depth[t.parent[v]] + 1);
    CHECK(t.child_begin[t.parent[v]] <= v);
    CHECK(v < t.child_begin[t.parent[v] + 1]);
  }
  for (std::size_t d = 0; d <= 5; ++d)
    for (std::size_t v = t.level_begin[d]; v < t.level_begin[d + 1]; ++v) CHECK(t.depth[v] == d);
}

TEST_CASE("perfect copying and no copying") {
  const LabeledTree t = broadcast(3, 1.0, 4, 6, Offspring::fixed, 2);
  for (int col : t.color) CHECK(col == t.color[0]);
  for (char f : t.faithful) CHECK(f);
  CHECK(*majority_estimate(t) == t.color[0]);
  CHECK(bp_root_estimate(t) == t.color[0]);

  const LabeledTree u = broadcast(3, 0.0, 4, 3, Offspring::fixed, 3);
  for (double p : bp_root_posterior(u)) CHECK(p == doctest::Approx(0.25).epsilon(1e-14));

  const auto ones = reconstruction_curve(2, 1.0, 3, {4}, 100, 5);
  for (const CurvePoint& pt : ones) CHECK(pt.p_hat == 1.0);
  const auto none = reconstruction_curve(2, 0.0, 3, {4}, 3000, 5);
  for (const CurvePoint& pt : none) CHECK(std::abs(pt.p_hat - 1.0 / 3.0) < 4.0 * pt.std_err + 1e-9);
}

TEST_CASE("faithful nodes carry the root color") {
  double faithful = 0.0;
  double total = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const LabeledTree t = broadcast(3, 0.6, 3, 6, Offspring::fixed, s);
    for (std::size_t v = 0; v < t.size(); ++v) {
      if (t.faithful[v]) CHECK(t.color[v] == t.color[0]);
      if (v > 0 && t.faithful[v]) CHECK(t.faithful[t.parent[v]]);
    }
    for (std::size_t v = t.level_begin[6]; v < t.level_begin[7]; ++v) faithful += t.faithful[v];
    total += t.level_size(6);
  }
  const double p = std::pow(0.6, 6);
  CHECK(std::abs(faithful / total - p) < 4.0 * std::sqrt(p * (1 - p) / total) + 0.01);
}

TEST_CASE("channel statistics") {
  for (double lambda : {0.2, 0.7}) {
    const std::size_t q = 3;
    const LabeledTree t = broadcast(4, lambda, q, 7, Offspring::fixed, 11);
    double same = 0;
    for (std::size_t v = 1; v < t.size(); ++v) same += t.color[v] == t.color[t.parent[v]];
    const double n = static_cast<double>(t.size() - 1);
    const double p = lambda + (1 - lambda) / q;
    CHECK(std::abs(same / n - p) < 5.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("poisson offspring mean") {
  double kids = 0;
  double parents = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const LabeledTree t = broadcast(2.5, 0.5, 2, 5, Offspring::poisson, s);
    parents += t.level_begin[5];
    kids += t.level_begin[6] - 1;
  }
  CHECK(std::abs(kids / parents - 2.5) < 5.0 * std::sqrt(2.5 / parents));
}

TEST_CASE("root posterior matches enumeration") {
  int checked = 0;
  for (std::uint64_t s = 0; checked < 40; ++s) {
    const std::size_t q = 2 + s % 2;
    const LabeledTree t = broadcast(1.6, 0.3 + 0.1 * (s % 5), q, 3, Offspring::poisson, s);
    if (t.level_begin[3] > 11 || t.level_size(3) == 0) continue;
    const auto fast = bp_root_posterior(t);
    const auto slow = brute_posterior(t, 3);
    for (std::size_t r = 0; r < q; ++r) CHECK(fast[r] == doctest::Approx(slow[r]).epsilon(1e-10));
    const auto mid = bp_root_posterior(t, 2);
    const auto mid_slow = brute_posterior(t, 2);
    for (std::size_t r = 0; r < q; ++r) CHECK(mid[r] == doctest::Approx(mid_slow[r]).epsilon(1e-10));
    ++checked;
  }
}

TEST_CASE("single child posterior") {
  for (double lambda : {0.1, 0.5, 0.9}) {
    const LabeledTree t = broadcast(1, lambda, 3, 1, Offspring::fixed, 4);
    const auto post = bp_root_posterior(t);
    const int leaf = t.color[1];
    CHECK(post[leaf] == doctest::Approx(lambda + (1 - lambda) / 3).epsilon(1e-12));
  }
}

TEST_CASE("chain recovery probability") {
  // On a path the estimators coincide and succeed with probability
  // (1 + lambda^d) / 2 for two colors.
  const double lambda = 0.8;
  const std::size_t d = 4;
  const auto curve = reconstruction_curve(1, lambda, 2, {d}, 20000, 6);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].successes == curve[1].successes);
  const double p = (1 + std::pow(lambda, d)) / 2;
  CHECK(std::abs(curve[0].p_hat - p) < 4.0 * curve[0].std_err);
}

TEST_CASE("bp is at least as good as majority") {
  const auto curve = reconstruction_curve(3, 0.45, 3, {2, 4, 6}, 2000, 8);
  for (std::size_t i = 0; i < curve.size(); i += 2) {
    REQUIRE(curve[i].estimator == Estimator::majority);
    REQUIRE(curve[i + 1].estimator == Estimator::bp);
    CHECK(curve[i + 1].p_hat >= curve[i].p_hat - 2.0 * curve[i].std_err);
  }
}

TEST_CASE("extinct trees are excluded") {
  CurveOptions o;
  o.model = Offspring::poisson;
  const auto curve = reconstruction_curve(0.7, 0.9, 2, {3}, 400, 2, o);
  for (const CurvePoint& pt : curve) {
    CHECK(pt.attempted == 400);
    CHECK(pt.trials < pt.attempted);
    CHECK(pt.p_hat == doctest::Approx(static_cast<double>(pt.successes) / pt.trials));
  }
  LabeledTree dead;
  for (std::uint64_t s = 0;; ++s) {
    dead = broadcast(0.5, 0.5, 2, 2, Offspring::poisson, s);
    if (dead.level_size(2) == 0) break;
  }
  CHECK_FALSE(majority_estimate(dead).has_value());
}

TEST_CASE("curve determinism and csv") {
  const auto a = reconstruction_curve(2, 0.5, 2, {1, 3}, 150, 99);
  const auto b = reconstruction_curve(2, 0.5, 2, {1, 3}, 150, 99);
  std::ostringstream sa;
  std::ostringstream sb;
  write_curve_csv(sa, a);
  write_curve_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("depth,estimator,successes,trials,p_hat,std_err\n", 0) == 0);
  CHECK(sa.str().find("\n3,bp,") != std::string::npos);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(reconstruction_curve(2, 0.5, 2, {3}, 99, 1), ParameterError);
  CHECK_THROWS_AS(broadcast(2.5, 0.5, 2, 3, Offspring::fixed, 1), ParameterError);
  CHECK_THROWS_AS(broadcast(2, 1.5, 2, 3, Offspring::fixed, 1), ParameterError);
  CHECK_THROWS_AS(broadcast(2, 0.5, 1, 3, Offspring::fixed, 1), ParameterError);
  CHECK_THROWS_AS(broadcast(10, 0.5, 2, 9, Offspring::fixed, 1), TooLargeError);
  const LabeledTree t = broadcast(2, 0.5, 2, 2, Offspring::fixed, 1);
  CHECK_THROWS_AS(bp_root_posterior(t, 3), ParameterError);
}
