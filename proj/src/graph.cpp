#include "sbmkit/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sbmkit/errors.hpp"
#include "sbmkit/rng.hpp"
#include "sbmkit/sampling.hpp"

namespace sbmkit {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> input) {
  Graph g;
  g.n_ = n;
  g.edges_.reserve(input.size());
  for (const Edge& e : input) {
    if (e.u >= n || e.v >= n) {
      throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                       ") has an endpoint outside [0, " + std::to_string(n) + ")");
    }
    if (e.u == e.v) {
      throw ValidationError("self-loop at vertex " + std::to_string(e.u));
    }
    g.edges_.push_back(e.u < e.v ? e : Edge{e.v, e.u});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  const auto dup = std::adjacent_find(g.edges_.begin(), g.edges_.end());
  if (dup != g.edges_.end()) {
    throw ValidationError("duplicate edge (" + std::to_string(dup->u) + ", " +
                          std::to_string(dup->v) + ")");
  }

  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : g.edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.offset_[v + 1] = g.offset_[v] + deg[v];

  const std::size_t nd = 2 * g.edges_.size();
  g.source_.resize(nd);
  g.target_.resize(nd);
  g.reverse_.resize(nd);
  // Edges are sorted by (u, v); filling u's list while scanning in order, and
  // v's list in the same scan, yields sorted adjacency lists because every
  // neighbor w < v of v appears (as edge (w, v)) before any neighbor w' > v
  // (as edge (v, w')), and both groups arrive sorted.
  std::vector<std::size_t> fill(g.offset_.begin(), g.offset_.end() - 1);
  for (const Edge& e : g.edges_) {
    const std::size_t a = fill[e.u]++;
    const std::size_t b = fill[e.v]++;
    g.source_[a] = e.u;
    g.target_[a] = e.v;
    g.source_[b] = e.v;
    g.target_[b] = e.u;
    g.reverse_[a] = b;
    g.reverse_[b] = a;
  }
  return g;
}

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges) {
  std::vector<Edge> es;
  es.reserve(edges.size());
  for (const auto& [u, v] : edges) es.push_back({u, v});
  return from_edges(n, es);
}

std::optional<EdgeId> Graph::directed_index(Vertex i, Vertex j) const {
  if (i >= n_ || j >= n_) return std::nullopt;
  const auto nb = neighbors(i);
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return std::nullopt;
  return offset_[i] + static_cast<std::size_t>(it - nb.begin());
}

DegreeSummary degree_stats(const Graph& g) {
  DegreeSummary s;
  const std::size_t n = g.num_vertices();
  for (Vertex v = 0; v < n; ++v) {
    const std::size_t d = g.degree(v);
    ++s.histogram[d];
    s.max = std::max(s.max, d);
  }
  s.mean = n == 0 ? 0.0 : 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(n);
  return s;
}

std::uint64_t count_triangles(const Graph& g) {
  // Each triangle u < v < w is counted once from its edge (u, v) by merging
  // the upper parts of both sorted neighbor lists.
  std::uint64_t count = 0;
  for (const Edge& e : g.edges()) {
    const auto a = g.neighbors(e.u);
    const auto b = g.neighbors(e.v);
    auto ia = std::upper_bound(a.begin(), a.end(), e.v);
    auto ib = std::upper_bound(b.begin(), b.end(), e.v);
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++count;
        ++ia;
        ++ib;
      }
    }
  }
  return count;
}

Graph sample_er(std::size_t n, double c, std::uint64_t seed) {
  if (!(c >= 0.0) || c >= static_cast<double>(n)) {
    throw ParameterError("sample_er requires 0 <= c < n");
  }
  Rng rng(seed);
  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), Vertex{0});
  std::vector<Edge> edges;
  detail::sample_within_block(all, c / static_cast<double>(n), rng, edges);
  return Graph::from_edges(n, edges);
}

Graph sample_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if ((n * d) % 2 != 0) throw ParameterError("sample_regular requires n*d even");
  if (d >= n && !(n == 0 && d == 0)) throw ParameterError("sample_regular requires d < n");
  Rng rng(seed);
  std::vector<Vertex> stubs(n * d);
  for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<Vertex>(i / d);
  std::vector<Edge> edges;
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt > 100000) throw ParameterError("sample_regular: rejection did not terminate");
    rng.shuffle(std::span<Vertex>(stubs));
    edges.clear();
    bool simple = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      const Vertex a = stubs[i];
      const Vertex b = stubs[i + 1];
      if (a == b) {
        simple = false;
        break;
      }
      edges.push_back(a < b ? Edge{a, b} : Edge{b, a});
    }
    if (!simple) continue;
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
      return x.u != y.u ? x.u < y.u : x.v < y.v;
    });
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
    return Graph::from_edges(n, edges);
  }
}

}  // namespace sbmkit
