#include "sbmkit/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "sbmkit/errors.hpp"
#include "sbmkit/io.hpp"
#include "sbmkit/rng.hpp"

namespace sbmkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMaxHistograms = 1e7;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double entropy_term(double a, double q) {
  if (a <= 0.0) return 0.0;
  const double x = a / q;
  return -x * std::log(x);
}

void sinkhorn(std::vector<double>& a, std::size_t q) {
  for (int it = 0; it < 200; ++it) {
    for (std::size_t r = 0; r < q; ++r) {
      double s = 0.0;
      for (std::size_t t = 0; t < q; ++t) s += a[r * q + t];
      for (std::size_t t = 0; t < q; ++t) a[r * q + t] /= s;
    }
    double gap = 0.0;
    for (std::size_t t = 0; t < q; ++t) {
      double s = 0.0;
      for (std::size_t r = 0; r < q; ++r) s += a[r * q + t];
      gap = std::max(gap, std::abs(s - 1.0));
      for (std::size_t r = 0; r < q; ++r) a[r * q + t] /= s;
    }
    if (gap < 1e-12) break;
  }
}

double rate_value(const std::vector<double>& a, std::size_t q, double x) {
  const double qd = static_cast<double>(q);
  double h = 0.0;
  double fro = 0.0;
  for (double v : a) {
    h += entropy_term(v, qd);
    fro += v * v;
  }
  return h - 2.0 * std::log(qd) + 0.5 * x * (fro - 1.0);
}

// f for alpha = [[a, 1-a], [1-a, a]].
double rate_q2(double a, double x) { return rate_value({a, 1.0 - a, 1.0 - a, a}, 2, x); }

RateMax maximize_grid_q2(double x) {
  constexpr std::size_t kPoints = 10000;
  std::size_t best = kPoints / 2;
  double best_f = rate_q2(0.5, x);
  // f is symmetric about a = 1/2, so only the upper half is scanned.
  for (std::size_t i = kPoints / 2; i <= kPoints; ++i) {
    const double f = rate_q2(static_cast<double>(i) / kPoints, x);
    if (f > best_f) {
      best_f = f;
      best = i;
    }
  }
  double lo = std::max(0.5, static_cast<double>(best - 1) / kPoints);
  double hi = std::min(1.0, static_cast<double>(best + 1) / kPoints);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double m1 = hi - g * (hi - lo);
  double m2 = lo + g * (hi - lo);
  double f1 = rate_q2(m1, x);
  double f2 = rate_q2(m2, x);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + g * (hi - lo);
      f2 = rate_q2(m2, x);
    } else {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - g * (hi - lo);
      f1 = rate_q2(m1, x);
    }
  }
  double a = static_cast<double>(best) / kPoints;
  for (double cand : {m1, m2, lo, hi}) {
    if (rate_q2(cand, x) > rate_q2(a, x)) a = cand;
  }
  RateMax out;
  out.f_star = rate_q2(a, x);
  out.alpha = OverlapMatrix(2, {a, 1.0 - a, 1.0 - a, a});
  return out;
}

// Exponentiated-gradient ascent with Sinkhorn re-normalization from start.
std::vector<double> ascend(std::vector<double> a, std::size_t q, double x, std::size_t max_iter) {
  const double qd = static_cast<double>(q);
  double f = rate_value(a, q, x);
  double eta = 1.0;
  std::vector<double> next(a.size());
  for (std::size_t it = 0; it < max_iter && eta > 1e-12; ++it) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double grad = -(std::log(a[k] / qd) + 1.0) / qd + x * a[k];
      next[k] = a[k] * std::exp(eta * grad);
    }
    sinkhorn(next, q);
    const double fn = rate_value(next, q, x);
    if (!(fn >= f)) {
      eta *= 0.5;
      continue;
    }
    double change = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) change = std::max(change, std::abs(next[k] - a[k]));
    a.swap(next);
    const double gain = fn - f;
    f = fn;
    eta = std::min(eta * 1.5, 64.0);
    if (change < 1e-13 || gain < 1e-17) break;
  }
  return a;
}

RateMax maximize_ascent(double x, std::size_t q, const RateOptions& options) {
  const double qd = static_cast<double>(q);
  std::vector<std::vector<double>> starts;
  for (double t : {0.99, 0.9, 0.6, 0.3, 0.1}) {
    std::vector<double> a(q * q, (1.0 - t) / qd);
    for (std::size_t r = 0; r < q; ++r) a[r * q + r] += t;
    starts.push_back(std::move(a));
  }
  Rng rng(derive_seed(options.seed, 0x7a7e));
  for (std::size_t k = 0; k < options.restarts; ++k) {
    std::vector<double> a(q * q);
    for (double& v : a) v = 0.05 + std::pow(rng.uniform(), 3.0);
    sinkhorn(a, q);
    starts.push_back(std::move(a));
  }

  RateMax best;
  best.alpha = OverlapMatrix::flat(q);
  best.f_star = 0.0;
  for (std::vector<double>& s : starts) {
    std::vector<double> a = ascend(std::move(s), q, x, options.max_iter);
    const double f = rate_value(a, q, x);
    if (f > best.f_star) {
      best.f_star = f;
      best.alpha = OverlapMatrix(q, std::move(a));
    }
  }
  return best;
}

}  // namespace

OverlapMatrix::OverlapMatrix(std::size_t q, std::vector<double> entries) : q_(q), a_(std::move(entries)) {
  if (q_ == 0 || a_.size() != q_ * q_) throw ParameterError("overlap matrix must be q x q");
}

OverlapMatrix OverlapMatrix::flat(std::size_t q) {
  return OverlapMatrix(q, std::vector<double>(q * q, 1.0 / static_cast<double>(q)));
}

OverlapMatrix OverlapMatrix::identity(std::size_t q) {
  std::vector<double> a(q * q, 0.0);
  for (std::size_t r = 0; r < q; ++r) a[r * q + r] = 1.0;
  return OverlapMatrix(q, std::move(a));
}

OverlapMatrix OverlapMatrix::validated(std::size_t q, std::vector<double> entries, double tol) {
  OverlapMatrix m(q, std::move(entries));
  for (double v : m.a_) {
    if (!(v >= 0.0)) throw ValidationError("overlap matrix has a negative entry");
  }
  if (m.stochastic_gap() > tol) throw ValidationError("overlap matrix is not doubly stochastic");
  return m;
}

double OverlapMatrix::frobenius_sq() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return s;
}

double OverlapMatrix::stochastic_gap() const {
  double gap = 0.0;
  for (std::size_t r = 0; r < q_; ++r) {
    double row = 0.0;
    double col = 0.0;
    for (std::size_t s = 0; s < q_; ++s) {
      row += at(r, s);
      col += at(s, r);
    }
    gap = std::max({gap, std::abs(row - 1.0), std::abs(col - 1.0)});
  }
  return gap;
}

double log_second_moment_exact(std::size_t n, const SbmParams& params) {
  if (n <= 1) return 0.0;
  const std::size_t q = params.q();
  const std::size_t parts = q * q;
  double count = 1.0;
  for (std::size_t k = 1; k < parts; ++k) {
    count *= static_cast<double>(n + k) / static_cast<double>(k);
  }
  if (count > kMaxHistograms) throw TooLargeError("too many joint-label histograms for exact second moment");

  const double nd = static_cast<double>(n);
  const double p = params.mean_degree() / nd;
  std::vector<double> prs(q * q);
  for (std::size_t k = 0; k < q * q; ++k) {
    prs[k] = params.affinity_matrix()[k] / nd;
    if (prs[k] > 1.0) throw ParameterError("edge probability exceeds 1 at this n");
  }
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("second moment needs 0 < c/n < 1");

  // Joint label z = (sigma, tau) = z / q, z % q.
  std::vector<double> log_f(parts * parts);
  for (std::size_t z = 0; z < parts; ++z) {
    for (std::size_t w = 0; w < parts; ++w) {
      const double a = prs[(z / q) * q + (w / q)];
      const double b = prs[(z % q) * q + (w % q)];
      const double f = a * b / p + (1.0 - a) * (1.0 - b) / (1.0 - p);
      log_f[z * parts + w] = f > 0.0 ? std::log(f) : kNegInf;
    }
  }

  std::vector<std::size_t> counts(parts, 0);
  double total = kNegInf;
  const double base = std::lgamma(nd + 1.0) - 2.0 * nd * std::log(static_cast<double>(q));
  // Depth-first over compositions; partial carries everything that depends
  // only on the parts fixed so far.
  auto recurse = [&](auto& self, std::size_t z, std::size_t left, double partial) -> void {
    if (z == parts) {
      if (left == 0 && !std::isnan(partial)) total = log_add(total, partial);
      return;
    }
    // The last part takes whatever is left.
    for (std::size_t k = z + 1 == parts ? left : 0; k <= left; ++k) {
      const double kd = static_cast<double>(k);
      double term = partial - std::lgamma(kd + 1.0);
      if (k > 1) term += 0.5 * kd * (kd - 1.0) * log_f[z * parts + z];
      if (k > 0) {
        for (std::size_t w = 0; w < z; ++w) {
          if (counts[w] > 0) term += kd * static_cast<double>(counts[w]) * log_f[z * parts + w];
        }
      }
      counts[z] = k;
      self(self, z + 1, left - k, term);
    }
    counts[z] = 0;
  };
  recurse(recurse, 0, n, base);
  return total;
}

double second_moment_exact(std::size_t n, const SbmParams& p) { return std::exp(log_second_moment_exact(n, p)); }

double rate_function(const OverlapMatrix& alpha, double c, double lambda) {
  return rate_value(alpha.entries(), alpha.q(), c * lambda * lambda);
}

RateMax maximize_rate(double c, double lambda, std::size_t q, const RateOptions& options) {
  if (q < 2) throw ParameterError("maximize_rate needs q >= 2");
  const double x = c * lambda * lambda;
  if (!(x >= 0.0)) throw ParameterError("c lambda^2 must be nonnegative");
  RateMethod method = options.method;
  if (method == RateMethod::automatic) method = q == 2 ? RateMethod::grid : RateMethod::ascent;
  if (method == RateMethod::grid && q != 2) throw ParameterError("grid maximization is for q = 2");
  RateMax out = method == RateMethod::grid ? maximize_grid_q2(x) : maximize_ascent(x, q, options);
  // Values at roundoff level are the flat maximum itself.
  if (out.f_star <= 1e-13) {
    out.f_star = 0.0;
    out.alpha = OverlapMatrix::flat(q);
  }
  return out;
}

const char* to_string(ContiguityVerdict v) {
  return v == ContiguityVerdict::bounded ? "second-moment-bounded" : "second-moment-unbounded";
}

ContiguityVerdict contiguity_verdict(const RateMax& m) {
  return m.f_star <= kRateTolerance ? ContiguityVerdict::bounded : ContiguityVerdict::unbounded;
}

ContiguityVerdict contiguity_verdict(double c, double lambda, std::size_t q, const RateOptions& options) {
  return contiguity_verdict(maximize_rate(c, lambda, q, options));
}

double rate_onset(std::size_t q, double lo, double hi, double tol, const RateOptions& options) {
  if (!(lo >= 0.0 && hi > lo)) throw ParameterError("rate_onset needs 0 <= lo < hi");
  auto unbounded = [&](double x) { return maximize_rate(x, 1.0, q, options).f_star > kRateTolerance; };
  if (unbounded(lo)) return lo;
  if (!unbounded(hi)) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (unbounded(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

void write_rate_scan_csv(std::ostream& os, const std::vector<RateScanRow>& rows) {
  const std::size_t q = rows.empty() ? 0 : rows.front().q;
  os << "c,lambda,q,f_star";
  for (std::size_t r = 0; r < q; ++r) {
    for (std::size_t s = 0; s < q; ++s) os << ",alpha_" << r << '_' << s;
  }
  os << ",verdict\n";
  for (const RateScanRow& row : rows) {
    if (row.q != q) throw ParameterError("rate scan rows must share q");
    os << format_number(row.c) << ',' << format_number(row.lambda) << ',' << row.q << ','
       << format_number(row.max.f_star);
    for (double v : row.max.alpha.entries()) os << ',' << format_number(v);
    os << ',' << to_string(row.verdict) << '\n';
  }
}

}  // namespace sbmkit
