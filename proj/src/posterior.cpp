#include "sbmkit/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sbmkit/errors.hpp"

namespace sbmkit {

namespace {

std::vector<std::size_t> confusion(const Labels& est, const Labels& truth, std::size_t q) {
  std::vector<std::size_t> c(q * q, 0);
  for (std::size_t i = 0; i < est.size(); ++i) {
    const auto a = static_cast<std::size_t>(est[i]);
    const auto b = static_cast<std::size_t>(truth[i]);
    if (est[i] < 0 || truth[i] < 0 || a >= q || b >= q) throw InputError("label out of range");
    ++c[a * q + b];
  }
  return c;
}

std::size_t matched(const std::vector<std::size_t>& c, const std::vector<std::size_t>& perm,
                    std::size_t q) {
  std::size_t total = 0;
  for (std::size_t s = 0; s < q; ++s) total += c[perm[s] * q + s];
  return total;
}

std::size_t best_matching(const std::vector<std::size_t>& c, std::size_t q) {
  std::vector<std::size_t> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  if (q <= 6) {
    std::size_t best = 0;
    do {
      best = std::max(best, matched(c, perm, q));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  // Greedy on the largest remaining confusion entry, then pairwise swaps.
  std::vector<bool> row_used(q, false);
  std::vector<bool> col_used(q, false);
  for (std::size_t step = 0; step < q; ++step) {
    std::size_t br = 0;
    std::size_t bs = 0;
    bool found = false;
    for (std::size_t r = 0; r < q; ++r) {
      if (row_used[r]) continue;
      for (std::size_t s = 0; s < q; ++s) {
        if (col_used[s]) continue;
        if (!found || c[r * q + s] > c[br * q + bs]) {
          br = r;
          bs = s;
          found = true;
        }
      }
    }
    row_used[br] = col_used[bs] = true;
    perm[bs] = br;
  }
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t a = 0; a < q; ++a) {
      for (std::size_t b = a + 1; b < q; ++b) {
        const std::size_t now = c[perm[a] * q + a] + c[perm[b] * q + b];
        const std::size_t swapped = c[perm[b] * q + a] + c[perm[a] * q + b];
        if (swapped > now) {
          std::swap(perm[a], perm[b]);
          improved = true;
        }
      }
    }
  }
  return matched(c, perm, q);
}

}  // namespace

double best_agreement(const Labels& estimate, const Labels& truth, std::size_t q) {
  if (estimate.size() != truth.size()) throw InputError("label vectors differ in length");
  if (estimate.empty()) return 0.0;
  const auto c = confusion(estimate, truth, q);
  return static_cast<double>(best_matching(c, q)) / static_cast<double>(estimate.size());
}

double overlap(const Labels& estimate, const Labels& truth, std::size_t q) {
  const double chance = 1.0 / static_cast<double>(q);
  return (best_agreement(estimate, truth, q) - chance) / (1.0 - chance);
}

std::size_t hamiltonian_energy(const Labels& labels, const Graph& g) {
  if (labels.size() != g.num_vertices()) throw InputError("label vector length differs from n");
  std::size_t count = 0;
  for (const Edge& e : g.edges()) count += labels[e.u] == labels[e.v] ? 1 : 0;
  return count;
}

ExactPosterior exact_posterior_marginals(const Graph& g, const SbmParams& p,
                                         const ExactPosteriorOptions& options) {
  const std::size_t n = g.num_vertices();
  const std::size_t q = p.q();
  if (p.n() != n) throw ParameterError("SbmParams n differs from the graph's vertex count");
  if (!options.field.empty() && options.field.size() != q) {
    throw ParameterError("field must have length q");
  }
  const double states = std::pow(static_cast<double>(q), static_cast<double>(n));
  if (states > 1e7) throw TooLargeError("exact posterior: q^n exceeds 1e7");

  std::vector<double> log_edge(q * q);
  std::vector<double> log_non_edge(q * q);
  for (std::size_t r = 0; r < q; ++r) {
    for (std::size_t s = 0; s < q; ++s) {
      const double prob = p.edge_probability(r, s);
      log_edge[r * q + s] = std::log(prob);
      log_non_edge[r * q + s] = std::log1p(-prob);
    }
  }
  std::vector<std::uint8_t> adjacent(n * n, 0);
  for (const Edge& e : g.edges()) adjacent[e.u * n + e.v] = adjacent[e.v * n + e.u] = 1;

  const double log_prior = -static_cast<double>(n) * std::log(static_cast<double>(q));
  const std::size_t m = g.num_edges();
  std::vector<double> acc_vertex(n * q, 0.0);
  std::vector<double> acc_pair(m * q * q, 0.0);
  double max_log = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  std::vector<std::size_t> sigma(n, 0);
  const auto total = static_cast<std::size_t>(states);
  for (std::size_t idx = 0; idx < total; ++idx) {
    double lw = log_prior;
    for (std::size_t i = 0; i < n; ++i) {
      if (!options.field.empty()) lw -= options.field[sigma[i]];
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::size_t rs = sigma[i] * q + sigma[j];
        if (adjacent[i * n + j]) {
          lw += log_edge[rs];
        } else if (options.non_edges) {
          lw += log_non_edge[rs];
        }
      }
    }
    if (lw > max_log) {
      const double rescale = std::isinf(max_log) ? 0.0 : std::exp(max_log - lw);
      sum *= rescale;
      for (double& x : acc_vertex) x *= rescale;
      for (double& x : acc_pair) x *= rescale;
      max_log = lw;
    }
    const double w = std::exp(lw - max_log);
    sum += w;
    for (std::size_t i = 0; i < n; ++i) acc_vertex[i * q + sigma[i]] += w;
    std::size_t k = 0;
    for (const Edge& e : g.edges()) {
      acc_pair[k * q * q + sigma[e.u] * q + sigma[e.v]] += w;
      ++k;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (++sigma[i] < q) break;
      sigma[i] = 0;
    }
  }

  ExactPosterior out;
  out.marginals.q = q;
  out.marginals.vertex.resize(n * q);
  out.marginals.two_point.resize(m * q * q);
  for (std::size_t i = 0; i < n * q; ++i) out.marginals.vertex[i] = acc_vertex[i] / sum;
  for (std::size_t i = 0; i < m * q * q; ++i) out.marginals.two_point[i] = acc_pair[i] / sum;
  out.log_z = max_log + std::log(sum);
  if (n == 0) out.log_z = 0.0;
  return out;
}

}  // namespace sbmkit
