#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sbmkit/sbm.hpp"

namespace sbmkit {

// q x q doubly stochastic matrix; alpha_rs is q times the fraction of
// vertices with sigma = r and tau = s.
class OverlapMatrix {
 public:
  explicit OverlapMatrix(std::size_t q, std::vector<double> entries);
  static OverlapMatrix flat(std::size_t q);
  static OverlapMatrix identity(std::size_t q);
  // Throws ValidationError on negative entries or row/column sums off 1 by more than tol.
  static OverlapMatrix validated(std::size_t q, std::vector<double> entries, double tol = 1e-9);

  std::size_t q() const { return q_; }
  double at(std::size_t r, std::size_t s) const { return a_[r * q_ + s]; }
  const std::vector<double>& entries() const { return a_; }
  double frobenius_sq() const;
  // Max deviation of any row or column sum from 1.
  double stochastic_gap() const;

 private:
  std::size_t q_;
  std::vector<double> a_;
};

// E_Q[P^2 / Q^2] for the planted model against Erdos-Renyi with the same
// mean degree, p_rs = c_rs / n, evaluated exactly over all label pairs
// (grouped by joint-label histogram). The result is ln of the value.
double log_second_moment_exact(std::size_t n, const SbmParams& p);
double second_moment_exact(std::size_t n, const SbmParams& p);

// H(alpha) - 2 ln q + (c lambda^2 / 2)(|alpha|_F^2 - 1).
double rate_function(const OverlapMatrix& alpha, double c, double lambda);

enum class RateMethod { automatic, grid, ascent };

struct RateMax {
  OverlapMatrix alpha = OverlapMatrix::flat(2);
  double f_star = 0.0;
};

struct RateOptions {
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
  // automatic: 1-D grid for q = 2, mirror ascent otherwise.
  RateMethod method = RateMethod::automatic;
  std::size_t max_iter = 20000;
};

RateMax maximize_rate(double c, double lambda, std::size_t q, const RateOptions& options = {});

inline constexpr double kRateTolerance = 1e-9;

enum class ContiguityVerdict { bounded, unbounded };

const char* to_string(ContiguityVerdict v);

ContiguityVerdict contiguity_verdict(double c, double lambda, std::size_t q,
                                     const RateOptions& options = {});
ContiguityVerdict contiguity_verdict(const RateMax& m);

// Smallest c lambda^2 in [lo, hi] where f* exceeds kRateTolerance, by
// bisection down to width tol. Returns hi if the whole range is bounded.
double rate_onset(std::size_t q, double lo, double hi, double tol = 1e-6,
                  const RateOptions& options = {});

struct RateScanRow {
  double c = 0.0;
  double lambda = 0.0;
  std::size_t q = 2;
  RateMax max;
  ContiguityVerdict verdict = ContiguityVerdict::bounded;
};

// c, lambda, q, f_star, alpha_r_s ..., verdict
void write_rate_scan_csv(std::ostream& os, const std::vector<RateScanRow>& rows);

}  // namespace sbmkit
