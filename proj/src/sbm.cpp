#include "sbmkit/sbm.hpp"

#include <cmath>
#include <numeric>

#include "sbmkit/errors.hpp"
#include "sbmkit/rng.hpp"
#include "sbmkit/sampling.hpp"

namespace sbmkit {

SbmParams SbmParams::symmetric(std::size_t q, std::size_t n, double c_in, double c_out) {
  if (q < 2) throw ParameterError("q must be at least 2");
  if (!(c_in >= 0.0) || !(c_out >= 0.0)) throw ParameterError("c_in and c_out must be nonnegative");
  if (std::max(c_in, c_out) >= static_cast<double>(n)) {
    throw ParameterError("c_in and c_out must be below n");
  }
  SbmParams p;
  p.q_ = q;
  p.n_ = n;
  p.symmetric_ = true;
  p.c_in_ = c_in;
  p.c_out_ = c_out;
  p.affinity_.assign(q * q, c_out);
  for (std::size_t r = 0; r < q; ++r) p.affinity_[r * q + r] = c_in;
  return p;
}

SbmParams SbmParams::planted_coloring(std::size_t q, std::size_t n, double c) {
  if (q < 2) throw ParameterError("q must be at least 2");
  return symmetric(q, n, 0.0, static_cast<double>(q) * c / static_cast<double>(q - 1));
}

SbmParams SbmParams::general(std::size_t n, std::size_t q, std::vector<double> affinity) {
  if (q < 2) throw ParameterError("q must be at least 2");
  if (affinity.size() != q * q) throw ParameterError("affinity matrix must be q x q");
  for (std::size_t r = 0; r < q; ++r) {
    for (std::size_t s = 0; s < q; ++s) {
      const double x = affinity[r * q + s];
      if (!(x >= 0.0)) throw ParameterError("affinity entries must be nonnegative");
      if (x >= static_cast<double>(n)) throw ParameterError("affinity entries must be below n");
      if (x != affinity[s * q + r]) throw ParameterError("affinity matrix must be symmetric");
    }
  }
  SbmParams p;
  p.q_ = q;
  p.n_ = n;
  p.affinity_ = std::move(affinity);
  return p;
}

double SbmParams::mean_degree() const {
  if (symmetric_) return (c_in_ + static_cast<double>(q_ - 1) * c_out_) / static_cast<double>(q_);
  const double total = std::accumulate(affinity_.begin(), affinity_.end(), 0.0);
  return total / static_cast<double>(q_ * q_);
}

SbmParams SbmParams::with_n(std::size_t n) const {
  if (symmetric_) return symmetric(q_, n, c_in_, c_out_);
  return general(n, q_, affinity_);
}

namespace {
void require_symmetric(const SbmParams& p, const char* what) {
  if (!p.is_symmetric()) throw ParameterError(std::string(what) + " requires symmetric parameters");
}
}  // namespace

DerivedParams derive_params(const SbmParams& p) {
  require_symmetric(p, "derive_params");
  DerivedParams d;
  const double q = static_cast<double>(p.q());
  d.c = p.mean_degree();
  d.mu = (p.c_in() - p.c_out()) / q;
  d.lambda = d.c > 0.0 ? d.mu / d.c : 0.0;
  if (p.c_in() > 0.0 && p.c_out() > 0.0) d.coupling = std::log(p.c_in() / p.c_out());
  d.ks_margin = d.c * d.lambda * d.lambda;
  return d;
}

KsCheck ks_check(const SbmParams& p) {
  const DerivedParams d = derive_params(p);
  KsCheck k;
  k.margin = d.ks_margin - 1.0;
  if (std::abs(k.margin) < kCriticalTolerance) {
    k.verdict = KsVerdict::critical;
  } else {
    k.verdict = k.margin > 0.0 ? KsVerdict::above : KsVerdict::below;
  }
  return k;
}

double it_bound(std::size_t q) {
  const double qm1 = static_cast<double>(q) - 1.0;
  return 2.0 * std::log(qm1) / qm1;
}

ItBoundVerdict it_bound_check(const SbmParams& p) {
  require_symmetric(p, "it_bound_check");
  if (p.q() < 3) {
    throw ParameterError("it_bound_check needs q >= 3; for q = 2 use ks_check");
  }
  return derive_params(p).ks_margin < it_bound(p.q()) ? ItBoundVerdict::undetectable_by_bound
                                                      : ItBoundVerdict::inconclusive;
}

Graph sample_sbm_graph(const SbmParams& p, const Labels& labels, std::uint64_t seed) {
  const std::size_t q = p.q();
  if (labels.size() != p.n()) throw ParameterError("label vector length differs from n");
  std::vector<std::vector<Vertex>> blocks(q);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= q) {
      throw ValidationError("label out of range");
    }
    blocks[static_cast<std::size_t>(labels[i])].push_back(static_cast<Vertex>(i));
  }
  // One sub-stream per block pair keeps each pair's draws independent of the others.
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < q; ++r) {
    for (std::size_t s = r; s < q; ++s) {
      Rng rng(derive_seed(seed, r * q + s));
      const double prob = p.edge_probability(r, s);
      if (r == s) {
        detail::sample_within_block(blocks[r], prob, rng, edges);
      } else {
        detail::sample_between_blocks(blocks[r], blocks[s], prob, rng, edges);
      }
    }
  }
  return Graph::from_edges(p.n(), edges);
}

SbmSample sample_sbm(const SbmParams& p, std::uint64_t seed, bool balanced) {
  const std::size_t n = p.n();
  const std::size_t q = p.q();
  Rng rng(derive_seed(seed, 0xabcdefULL));
  Labels labels(n);
  if (balanced) {
    if (n % q != 0) throw ParameterError("balanced labels require q | n");
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % q);
    rng.shuffle(std::span<int>(labels));
  } else {
    for (auto& x : labels) x = static_cast<int>(rng.below(q));
  }
  Graph g = sample_sbm_graph(p, labels, derive_seed(seed, 0x5eedULL));
  return {std::move(g), std::move(labels)};
}

double expected_triangles_sbm(const SbmParams& p) {
  const DerivedParams d = derive_params(p);
  const double q = static_cast<double>(p.q());
  return d.c * d.c * d.c / 6.0 * (1.0 + (q - 1.0) * d.lambda * d.lambda * d.lambda);
}

}  // namespace sbmkit
