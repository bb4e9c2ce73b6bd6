#include "sbmkit/bisection.hpp"

#include <algorithm>
#include <numeric>

#include "sbmkit/errors.hpp"
#include "sbmkit/rng.hpp"

namespace sbmkit {

std::size_t cut_size(const Graph& g, const Labels& side) {
  std::size_t cut = 0;
  for (const Edge& e : g.edges()) cut += side[e.u] != side[e.v] ? 1 : 0;
  return cut;
}

Bisection min_bisection_local_search(const Graph& g, std::uint64_t seed) {
  const std::size_t n = g.num_vertices();
  if (n % 2 != 0) throw ParameterError("bisection needs an even vertex count");
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  Rng rng(seed);
  rng.shuffle(std::span<Vertex>(perm));

  Bisection b;
  b.side.assign(n, 0);
  for (std::size_t i = n / 2; i < n; ++i) b.side[perm[i]] = 1;

  // gain[u] = (external - internal) degree; swapping u and v changes the cut
  // by -(gain[u] + gain[v] - 2 A_uv).
  std::vector<long> gain(n, 0);
  auto refresh = [&](Vertex u) {
    long d = 0;
    for (Vertex w : g.neighbors(u)) d += b.side[w] != b.side[u] ? 1 : -1;
    gain[u] = d;
  };
  for (Vertex u = 0; u < n; ++u) refresh(u);

  while (true) {
    long best = 0;
    Vertex bu = 0;
    Vertex bv = 0;
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        if (b.side[u] == b.side[v]) continue;
        if (gain[u] + gain[v] <= best) continue;
        const long delta = gain[u] + gain[v] - (g.has_edge(u, v) ? 2 : 0);
        if (delta > best) {
          best = delta;
          bu = u;
          bv = v;
        }
      }
    }
    if (best <= 0) break;
    std::swap(b.side[bu], b.side[bv]);
    ++b.swaps;
    refresh(bu);
    refresh(bv);
    for (Vertex w : g.neighbors(bu)) refresh(w);
    for (Vertex w : g.neighbors(bv)) refresh(w);
  }
  b.cut = cut_size(g, b.side);
  return b;
}

}  // namespace sbmkit
