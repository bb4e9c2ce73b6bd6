#include "sbmkit/bp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sbmkit/errors.hpp"

namespace sbmkit {

namespace {

constexpr double kUnderflowGuard = 1e-300;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void normalize(std::span<double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  for (double& v : x) v /= s;
}

// In-place log-sum-exp normalization to a probability vector. All -inf maps
// to uniform.
void normalize_log(std::span<double> x) {
  const double mx = *std::max_element(x.begin(), x.end());
  if (mx == kNegInf) {
    std::fill(x.begin(), x.end(), 1.0 / static_cast<double>(x.size()));
    return;
  }
  double s = 0.0;
  for (double& v : x) {
    v = std::exp(v - mx);
    s += v;
  }
  for (double& v : x) v /= s;
}

double log_sum_exp(std::span<const double> x) {
  const double mx = *std::max_element(x.begin(), x.end());
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

}  // namespace

MessageSet::MessageSet(const Graph& g, SbmParams params, FieldSpec field)
    : q_(params.q()),
      n_(g.num_vertices()),
      params_(std::move(params)),
      field_spec_(std::move(field)),
      messages_(g.num_directed() * q_, 1.0 / static_cast<double>(q_)),
      marginals_(n_ * q_, 1.0 / static_cast<double>(q_)),
      marginal_sum_(q_, static_cast<double>(n_) / static_cast<double>(q_)),
      field_(q_, 0.0) {
  if (params_.n() != n_) throw ParameterError("SbmParams n differs from the graph's vertex count");
  if (field_spec_.mode == FieldMode::fixed && field_spec_.fixed.size() != q_) {
    throw ParameterError("fixed field must have length q");
  }
  recompute_field();
}

void MessageSet::recompute_field() {
  switch (field_spec_.mode) {
    case FieldMode::none:
      std::fill(field_.begin(), field_.end(), 0.0);
      break;
    case FieldMode::fixed:
      std::copy(field_spec_.fixed.begin(), field_spec_.fixed.end(), field_.begin());
      break;
    case FieldMode::mean_field: {
      const double inv_n = n_ > 0 ? 1.0 / static_cast<double>(n_) : 0.0;
      for (std::size_t r = 0; r < q_; ++r) {
        double h = 0.0;
        for (std::size_t s = 0; s < q_; ++s) h += params_.affinity(r, s) * marginal_sum_[s];
        field_[r] = h * inv_n;
      }
      break;
    }
  }
}

// exp(-h_r), shifted by the minimum field so the largest weight is 1.
void MessageSet::vertex_weights(std::span<double> out) const {
  const double lo = *std::min_element(field_.begin(), field_.end());
  for (std::size_t r = 0; r < q_; ++r) out[r] = std::exp(-(field_[r] - lo));
}

double MessageSet::edge_factor(std::span<const double> psi, std::span<double> out) const {
  double total = 0.0;
  if (params_.is_symmetric()) {
    const double base = params_.c_out();
    const double diff = params_.c_in() - params_.c_out();
    for (std::size_t r = 0; r < q_; ++r) {
      out[r] = base + diff * psi[r];
      total += out[r];
    }
  } else {
    for (std::size_t r = 0; r < q_; ++r) {
      double acc = 0.0;
      for (std::size_t s = 0; s < q_; ++s) acc += params_.affinity(r, s) * psi[s];
      out[r] = acc;
      total += acc;
    }
  }
  return total;
}

void MessageSet::set_marginal(Vertex v, std::span<const double> value) {
  double* m = marginals_.data() + static_cast<std::size_t>(v) * q_;
  for (std::size_t r = 0; r < q_; ++r) {
    marginal_sum_[r] += value[r] - m[r];
    m[r] = value[r];
  }
  if (field_spec_.mode == FieldMode::mean_field) recompute_field();
}

void MessageSet::refresh_marginals(const Graph& g) {
  std::vector<double> belief(q_);
  std::vector<double> factor(q_);
  std::vector<double> weights(q_);
  vertex_weights(weights);
  for (Vertex v = 0; v < n_; ++v) {
    std::copy(weights.begin(), weights.end(), belief.begin());
    bool underflow = false;
    for (EdgeId e = g.out_begin(v); e < g.out_end(v); ++e) {
      const double total = edge_factor(message(g.reverse(e)), factor);
      double s = 0.0;
      for (std::size_t r = 0; r < q_; ++r) {
        belief[r] *= factor[r] / total;
        s += belief[r];
      }
      if (!(s >= kUnderflowGuard)) {
        underflow = true;
        break;
      }
    }
    if (underflow) {
      for (std::size_t r = 0; r < q_; ++r) belief[r] = std::log(weights[r]);
      for (EdgeId e = g.out_begin(v); e < g.out_end(v); ++e) {
        edge_factor(message(g.reverse(e)), factor);
        for (std::size_t r = 0; r < q_; ++r) belief[r] += std::log(factor[r]);
      }
      normalize_log(belief);
    } else {
      normalize(belief);
    }
    std::copy(belief.begin(), belief.end(), marginals_.begin() + static_cast<std::ptrdiff_t>(v * q_));
  }
  std::fill(marginal_sum_.begin(), marginal_sum_.end(), 0.0);
  for (Vertex v = 0; v < n_; ++v) {
    for (std::size_t r = 0; r < q_; ++r) marginal_sum_[r] += marginals_[v * q_ + r];
  }
  recompute_field();
}

bool MessageSet::update_vertex_linear(const Graph& g, Vertex v, double& max_delta) {
  const std::size_t d = g.degree(v);
  const EdgeId base = g.out_begin(v);
  factors_.resize(d * q_);
  prefix_.resize((d + 1) * q_);
  suffix_.resize((d + 1) * q_);
  scratch_.resize((d + 2) * q_);
  std::span<double> weights(scratch_.data() + (d + 1) * q_, q_);
  vertex_weights(weights);

  for (std::size_t t = 0; t < d; ++t) {
    std::span<double> f(factors_.data() + t * q_, q_);
    const double total = edge_factor(message(g.reverse(base + t)), f);
    if (!(total > 0.0)) return false;
    for (double& x : f) x /= total;
  }
  std::fill_n(prefix_.begin(), q_, 1.0);
  for (std::size_t t = 0; t < d; ++t) {
    for (std::size_t r = 0; r < q_; ++r) {
      prefix_[(t + 1) * q_ + r] = prefix_[t * q_ + r] * factors_[t * q_ + r];
    }
  }
  std::fill_n(suffix_.begin() + static_cast<std::ptrdiff_t>(d * q_), q_, 1.0);
  for (std::size_t t = d; t-- > 0;) {
    for (std::size_t r = 0; r < q_; ++r) {
      suffix_[t * q_ + r] = factors_[t * q_ + r] * suffix_[(t + 1) * q_ + r];
    }
  }

  // New outgoing messages go to scratch_ first so an underflow leaves the
  // state untouched for the log-space retry.
  for (std::size_t t = 0; t < d; ++t) {
    double s = 0.0;
    for (std::size_t r = 0; r < q_; ++r) {
      const double x = weights[r] * prefix_[t * q_ + r] * suffix_[(t + 1) * q_ + r];
      scratch_[t * q_ + r] = x;
      s += x;
    }
    if (!(s >= kUnderflowGuard)) return false;
    for (std::size_t r = 0; r < q_; ++r) scratch_[t * q_ + r] /= s;
  }
  std::span<double> belief(scratch_.data() + d * q_, q_);
  double s = 0.0;
  for (std::size_t r = 0; r < q_; ++r) {
    belief[r] = weights[r] * prefix_[d * q_ + r];
    s += belief[r];
  }
  if (!(s >= kUnderflowGuard)) return false;
  for (double& x : belief) x /= s;

  for (std::size_t t = 0; t < d; ++t) {
    std::span<double> out = message(base + t);
    for (std::size_t r = 0; r < q_; ++r) {
      max_delta = std::max(max_delta, std::abs(scratch_[t * q_ + r] - out[r]));
      out[r] = scratch_[t * q_ + r];
    }
  }
  set_marginal(v, belief);
  return true;
}

void MessageSet::update_vertex_log(const Graph& g, Vertex v, double& max_delta) {
  const std::size_t d = g.degree(v);
  const EdgeId base = g.out_begin(v);
  std::vector<double> logf(d * q_);
  std::vector<double> pre((d + 1) * q_, 0.0);
  std::vector<double> suf((d + 1) * q_, 0.0);
  std::vector<double> logw(q_);
  vertex_weights(logw);
  for (double& x : logw) x = std::log(x);
  std::vector<double> tmp(q_);
  for (std::size_t t = 0; t < d; ++t) {
    edge_factor(message(g.reverse(base + t)), tmp);
    for (std::size_t r = 0; r < q_; ++r) logf[t * q_ + r] = std::log(tmp[r]);
  }
  for (std::size_t t = 0; t < d; ++t) {
    for (std::size_t r = 0; r < q_; ++r) pre[(t + 1) * q_ + r] = pre[t * q_ + r] + logf[t * q_ + r];
  }
  for (std::size_t t = d; t-- > 0;) {
    for (std::size_t r = 0; r < q_; ++r) suf[t * q_ + r] = logf[t * q_ + r] + suf[(t + 1) * q_ + r];
  }
  for (std::size_t t = 0; t < d; ++t) {
    for (std::size_t r = 0; r < q_; ++r) tmp[r] = logw[r] + pre[t * q_ + r] + suf[(t + 1) * q_ + r];
    normalize_log(tmp);
    std::span<double> out = message(base + t);
    for (std::size_t r = 0; r < q_; ++r) {
      max_delta = std::max(max_delta, std::abs(tmp[r] - out[r]));
      out[r] = tmp[r];
    }
  }
  for (std::size_t r = 0; r < q_; ++r) tmp[r] = logw[r] + pre[d * q_ + r];
  normalize_log(tmp);
  set_marginal(v, tmp);
}

double MessageSet::update_vertex(const Graph& g, Vertex v) {
  double max_delta = 0.0;
  if (!update_vertex_linear(g, v, max_delta)) {
    max_delta = 0.0;
    update_vertex_log(g, v, max_delta);
  }
  return max_delta;
}

MessageSet init_messages(const Graph& g, const SbmParams& p, const InitSpec& init,
                         FieldSpec field) {
  if (!(init.noise >= 0.0 && init.noise <= 1.0)) throw ParameterError("noise must lie in [0, 1]");
  MessageSet state(g, p, std::move(field));
  const std::size_t q = p.q();
  const double uniform = 1.0 / static_cast<double>(q);
  auto& msgs = state.mutable_messages();
  switch (init.mode) {
    case InitMode::uniform:
      std::fill(msgs.begin(), msgs.end(), uniform);
      break;
    case InitMode::random: {
      Rng rng(derive_seed(init.seed, 0x1417ULL));
      for (EdgeId e = 0; e < g.num_directed(); ++e) {
        std::span<double> m = state.message(e);
        for (double& x : m) x = uniform + init.noise * rng.uniform();
        normalize(m);
      }
      break;
    }
    case InitMode::planted: {
      if (init.planted.size() != g.num_vertices()) {
        throw ParameterError("planted init needs one label per vertex");
      }
      for (EdgeId e = 0; e < g.num_directed(); ++e) {
        const int label = init.planted[g.source(e)];
        if (label < 0 || static_cast<std::size_t>(label) >= q) {
          throw ValidationError("planted label out of range");
        }
        std::span<double> m = state.message(e);
        for (std::size_t r = 0; r < q; ++r) {
          m[r] = init.noise * uniform + (static_cast<std::size_t>(label) == r ? 1.0 - init.noise : 0.0);
        }
      }
      break;
    }
  }
  state.refresh_marginals(g);
  return state;
}

double bp_sweep(MessageSet& state, const Graph& g, SweepOrder order, Rng& rng) {
  std::vector<Vertex> perm(g.num_vertices());
  std::iota(perm.begin(), perm.end(), Vertex{0});
  if (order == SweepOrder::random_permutation) rng.shuffle(std::span<Vertex>(perm));
  double max_delta = 0.0;
  for (Vertex v : perm) max_delta = std::max(max_delta, state.update_vertex(g, v));
  return max_delta;
}

namespace {

// Unnormalized log marginal of v: -h_r + sum over incoming messages of
// log(sum_s c_rs psi_s).
void log_belief(const MessageSet& state, const Graph& g, Vertex v, std::span<double> out) {
  const std::size_t q = state.q();
  const SbmParams& p = state.params();
  std::vector<double> f(q);
  const auto field = state.field();
  for (std::size_t r = 0; r < q; ++r) out[r] = -field[r];
  for (EdgeId e = g.out_begin(v); e < g.out_end(v); ++e) {
    const auto psi = state.message(g.reverse(e));
    for (std::size_t r = 0; r < q; ++r) {
      double acc = 0.0;
      for (std::size_t s = 0; s < q; ++s) acc += p.affinity(r, s) * psi[s];
      out[r] += std::log(acc);
    }
  }
}

}  // namespace

MarginalTable compute_marginals(const MessageSet& state, const Graph& g, bool two_point) {
  const std::size_t q = state.q();
  const SbmParams& p = state.params();
  MarginalTable t;
  t.q = q;
  t.vertex.resize(g.num_vertices() * q);
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    std::span<double> out(t.vertex.data() + v * q, q);
    log_belief(state, g, v, out);
    normalize_log(out);
  }
  if (two_point) {
    t.two_point.resize(g.num_edges() * q * q);
    std::size_t idx = 0;
    for (const Edge& e : g.edges()) {
      const EdgeId ij = *g.directed_index(e.u, e.v);
      const auto a = state.message(ij);
      const auto b = state.message(g.reverse(ij));
      std::span<double> out(t.two_point.data() + idx * q * q, q * q);
      for (std::size_t r = 0; r < q; ++r) {
        for (std::size_t s = 0; s < q; ++s) out[r * q + s] = a[r] * b[s] * p.affinity(r, s);
      }
      normalize(out);
      ++idx;
    }
  }
  return t;
}

Labels hard_labels(const MarginalTable& marginals, double tie_tol) {
  const std::size_t q = marginals.q;
  const std::size_t n = q == 0 ? 0 : marginals.vertex.size() / q;
  Labels out(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto m = marginals.at(static_cast<Vertex>(v));
    const double top = *std::max_element(m.begin(), m.end());
    std::size_t r = 0;
    while (m[r] < top - tie_tol) ++r;
    out[v] = static_cast<int>(r);
  }
  return out;
}

double bethe_free_energy(const MessageSet& state, const Graph& g) {
  const std::size_t q = state.q();
  const std::size_t n = g.num_vertices();
  if (n == 0) return 0.0;
  const SbmParams& p = state.params();
  const double log_n = std::log(static_cast<double>(n));
  const double log_q = std::log(static_cast<double>(q));

  double log_z = 0.0;
  std::vector<double> belief(q);
  for (Vertex v = 0; v < n; ++v) {
    log_belief(state, g, v, belief);
    // Affinities are c_rs; each incident edge contributes a factor 1/n.
    log_z += log_sum_exp(belief) - log_q - static_cast<double>(g.degree(v)) * log_n;
  }
  for (const Edge& e : g.edges()) {
    const EdgeId ij = *g.directed_index(e.u, e.v);
    const auto a = state.message(ij);
    const auto b = state.message(g.reverse(ij));
    double z = 0.0;
    for (std::size_t r = 0; r < q; ++r) {
      for (std::size_t s = 0; s < q; ++s) z += p.affinity(r, s) * a[r] * b[s];
    }
    log_z -= std::log(z) - log_n;
  }
  if (state.field_spec().mode == FieldMode::mean_field) {
    // The field charges every non-edge pair to both endpoints; add half back.
    const auto field = state.field();
    double charged = 0.0;
    for (std::size_t i = 0; i < state.marginals().size(); ++i) {
      charged += state.marginals()[i] * field[i % q];
    }
    log_z += 0.5 * charged;
  }
  return -log_z / static_cast<double>(n);
}

BpResult run_bp(const Graph& g, const SbmParams& p, const InitSpec& init,
                const BpOptions& options) {
  if (!(options.tol > 0.0)) throw ParameterError("tol must be positive");
  MessageSet state = init_messages(g, p, init, options.field);
  Rng rng(derive_seed(options.order_seed, 0x0de7ULL));
  bool converged = false;
  std::size_t sweeps = 0;
  while (sweeps < options.max_sweeps) {
    const double delta = bp_sweep(state, g, options.order, rng);
    ++sweeps;
    if (delta < options.tol) {
      converged = true;
      break;
    }
  }
  MarginalTable marginals = compute_marginals(state, g, options.two_point);
  Labels labels = hard_labels(marginals, options.label_tie_tol);
  const double f = bethe_free_energy(state, g);
  return BpResult{std::move(marginals), std::move(labels), converged, sweeps, f, std::move(state)};
}

}  // namespace sbmkit
