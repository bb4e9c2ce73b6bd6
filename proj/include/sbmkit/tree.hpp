#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sbmkit {

enum class Offspring { fixed, poisson };

// Broadcast tree stored generation by generation: the nodes of depth d are
// [level_begin[d], level_begin[d+1]) and every node's children are contiguous.
struct LabeledTree {
  std::size_t q = 2;
  double lambda = 0.0;
  std::vector<std::uint32_t> parent;  // parent[0] == 0 for the root
  std::vector<int> color;
  std::vector<std::uint32_t> depth;
  std::vector<std::size_t> level_begin;  // size depth + 2
  std::vector<std::uint32_t> child_begin;  // size + 1 entries, CSR over children
  // Whether the node's color arrived by an unbroken chain of copy events.
  std::vector<char> faithful;

  std::size_t size() const { return color.size(); }
  std::size_t max_depth() const { return level_begin.size() - 2; }
  std::size_t level_size(std::size_t d) const { return level_begin[d + 1] - level_begin[d]; }
};

// Each child copies its parent's color with probability lambda and is
// otherwise uniform. Fixed offspring needs an integral c.
LabeledTree broadcast(double c, double lambda, std::size_t q, std::size_t depth, Offspring model,
                      std::uint64_t seed);

// Plurality color of generation `depth` (default: the deepest); ties go to the
// lowest color; nullopt when the generation is empty.
std::optional<int> majority_estimate(const LabeledTree& t);
std::optional<int> majority_estimate(const LabeledTree& t, std::size_t depth);

// Exact posterior of the root color given the colors at generation `depth`,
// by leaf-to-root message passing through T = lambda I + (1 - lambda) J / q.
std::vector<double> bp_root_posterior(const LabeledTree& t);
std::vector<double> bp_root_posterior(const LabeledTree& t, std::size_t depth);
int bp_root_estimate(const LabeledTree& t);

enum class Estimator { majority, bp };

std::string to_string(Estimator e);

struct CurvePoint {
  std::size_t depth = 0;
  Estimator estimator = Estimator::majority;
  std::size_t successes = 0;
  std::size_t trials = 0;     // surviving trials (non-empty generation)
  std::size_t attempted = 0;  // including extinct ones
  double p_hat = 0.0;
  double std_err = 0.0;
};

struct CurveOptions {
  Offspring model = Offspring::fixed;
  std::vector<Estimator> estimators = {Estimator::majority, Estimator::bp};
};

// Monte Carlo Pr[estimate == root color] at each depth. Each trial grows one
// tree to the largest depth and evaluates every depth on it.
std::vector<CurvePoint> reconstruction_curve(double c, double lambda, std::size_t q,
                                             const std::vector<std::size_t>& depths,
                                             std::size_t trials, std::uint64_t seed,
                                             const CurveOptions& options = {});

// depth, estimator, successes, trials, p_hat, std_err
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

}  // namespace sbmkit
