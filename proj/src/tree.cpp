#include "sbmkit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sbmkit/errors.hpp"
#include "sbmkit/io.hpp"
#include "sbmkit/rng.hpp"

namespace sbmkit {

namespace {

constexpr std::size_t kMaxNodes = 50'000'000;

}  // namespace

LabeledTree broadcast(double c, double lambda, std::size_t q, std::size_t depth, Offspring model,
                      std::uint64_t seed) {
  if (q < 2) throw ParameterError("broadcast needs q >= 2");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  if (!(c >= 0.0)) throw ParameterError("offspring parameter must be nonnegative");
  std::size_t fixed_children = 0;
  if (model == Offspring::fixed) {
    if (c != std::floor(c)) throw ParameterError("fixed offspring needs an integer c");
    fixed_children = static_cast<std::size_t>(c);
  }

  Rng rng(seed);
  LabeledTree t;
  t.q = q;
  t.lambda = lambda;
  t.parent.push_back(0);
  t.color.push_back(static_cast<int>(rng.below(q)));
  t.depth.push_back(0);
  t.faithful.push_back(1);
  t.level_begin = {0, 1};

  for (std::size_t d = 0; d < depth; ++d) {
    const std::size_t begin = t.level_begin[d];
    const std::size_t end = t.level_begin[d + 1];
    for (std::size_t u = begin; u < end; ++u) {
      t.child_begin.push_back(static_cast<std::uint32_t>(t.size()));
      const std::size_t kids = model == Offspring::fixed ? fixed_children : rng.poisson(c);
      if (t.size() + kids > kMaxNodes) throw TooLargeError("broadcast tree exceeds node limit");
      for (std::size_t k = 0; k < kids; ++k) {
        const bool copy = rng.uniform() < lambda;
        // Draw the resample color even on copy events so the stream layout
        // does not depend on lambda.
        const int fresh = static_cast<int>(rng.below(q));
        t.parent.push_back(static_cast<std::uint32_t>(u));
        t.color.push_back(copy ? t.color[u] : fresh);
        t.depth.push_back(static_cast<std::uint32_t>(d + 1));
        t.faithful.push_back(copy && t.faithful[u]);
      }
    }
    t.level_begin.push_back(t.size());
  }
  // Deepest generation has no children.
  while (t.child_begin.size() < t.size()) t.child_begin.push_back(static_cast<std::uint32_t>(t.size()));
  t.child_begin.push_back(static_cast<std::uint32_t>(t.size()));
  return t;
}

std::optional<int> majority_estimate(const LabeledTree& t, std::size_t depth) {
  if (depth > t.max_depth()) throw ParameterError("depth exceeds tree depth");
  if (t.level_size(depth) == 0) return std::nullopt;
  std::vector<std::size_t> counts(t.q, 0);
  for (std::size_t u = t.level_begin[depth]; u < t.level_begin[depth + 1]; ++u) {
    ++counts[static_cast<std::size_t>(t.color[u])];
  }
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::optional<int> majority_estimate(const LabeledTree& t) { return majority_estimate(t, t.max_depth()); }

std::vector<double> bp_root_posterior(const LabeledTree& t, std::size_t depth) {
  if (depth > t.max_depth()) throw ParameterError("depth exceeds tree depth");
  const std::size_t q = t.q;
  const double lam = t.lambda;
  const double off = (1.0 - lam) / static_cast<double>(q);
  const std::size_t last = t.level_begin[depth + 1];
  // msg[u] is the normalized likelihood of the observed descendants of u
  // (or u itself at the observed depth) as a function of u's color.
  std::vector<double> msg(last * q, 1.0 / static_cast<double>(q));
  for (std::size_t u = t.level_begin[depth]; u < last; ++u) {
    for (std::size_t r = 0; r < q; ++r) msg[u * q + r] = static_cast<std::size_t>(t.color[u]) == r ? 1.0 : 0.0;
  }
  std::vector<double> acc(q);
  for (std::size_t d = depth; d-- > 0;) {
    for (std::size_t u = t.level_begin[d]; u < t.level_begin[d + 1]; ++u) {
      std::fill(acc.begin(), acc.end(), 1.0);
      for (std::size_t k = t.child_begin[u]; k < t.child_begin[u + 1]; ++k) {
        double sum = 0.0;
        for (std::size_t s = 0; s < q; ++s) sum += msg[k * q + s];
        for (std::size_t r = 0; r < q; ++r) acc[r] *= lam * msg[k * q + r] + off * sum;
        double z = 0.0;
        for (double a : acc) z += a;
        if (z > 0.0) {
          for (double& a : acc) a /= z;
        }
      }
      std::copy(acc.begin(), acc.end(), msg.begin() + static_cast<std::ptrdiff_t>(u * q));
    }
  }
  return {msg.begin(), msg.begin() + static_cast<std::ptrdiff_t>(q)};
}

std::vector<double> bp_root_posterior(const LabeledTree& t) { return bp_root_posterior(t, t.max_depth()); }

int bp_root_estimate(const LabeledTree& t) {
  const std::vector<double> post = bp_root_posterior(t);
  return static_cast<int>(std::max_element(post.begin(), post.end()) - post.begin());
}

std::string to_string(Estimator e) { return e == Estimator::majority ? "majority" : "bp"; }

std::vector<CurvePoint> reconstruction_curve(double c, double lambda, std::size_t q,
                                             const std::vector<std::size_t>& depths,
                                             std::size_t trials, std::uint64_t seed,
                                             const CurveOptions& options) {
  if (trials < 100) throw ParameterError("reconstruction_curve needs at least 100 trials");
  if (depths.empty()) throw ParameterError("no depths given");
  if (options.estimators.empty()) throw ParameterError("no estimators given");
  const std::size_t max_depth = *std::max_element(depths.begin(), depths.end());

  std::vector<CurvePoint> curve;
  for (std::size_t d : depths) {
    for (Estimator e : options.estimators) {
      CurvePoint pt;
      pt.depth = d;
      pt.estimator = e;
      curve.push_back(pt);
    }
  }
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const LabeledTree t = broadcast(c, lambda, q, max_depth, options.model, derive_seed(seed, trial));
    const int root = t.color[0];
    for (CurvePoint& pt : curve) {
      ++pt.attempted;
      if (t.level_size(pt.depth) == 0) continue;
      ++pt.trials;
      int guess = 0;
      if (pt.estimator == Estimator::majority) {
        guess = *majority_estimate(t, pt.depth);
      } else {
        const std::vector<double> post = bp_root_posterior(t, pt.depth);
        guess = static_cast<int>(std::max_element(post.begin(), post.end()) - post.begin());
      }
      if (guess == root) ++pt.successes;
    }
  }
  for (CurvePoint& pt : curve) {
    if (pt.trials == 0) continue;
    pt.p_hat = static_cast<double>(pt.successes) / static_cast<double>(pt.trials);
    pt.std_err = std::sqrt(pt.p_hat * (1.0 - pt.p_hat) / static_cast<double>(pt.trials));
  }
  return curve;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "depth,estimator,successes,trials,p_hat,std_err\n";
  for (const CurvePoint& pt : curve) {
    os << pt.depth << ',' << to_string(pt.estimator) << ',' << pt.successes << ',' << pt.trials << ','
       << format_number(pt.p_hat) << ',' << format_number(pt.std_err) << '\n';
  }
}

}  // namespace sbmkit
