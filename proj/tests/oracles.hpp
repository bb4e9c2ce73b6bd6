// Independent reference implementations used by the tests. They are
// deliberately naive and share no code with the library beyond Graph.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "sbmkit/graph.hpp"

namespace oracle {

inline std::uint64_t triangles(const sbmkit::Graph& g) {
  const auto n = static_cast<sbmkit::Vertex>(g.num_vertices());
  std::uint64_t count = 0;
  for (sbmkit::Vertex a = 0; a < n; ++a)
    for (sbmkit::Vertex b = a + 1; b < n; ++b)
      for (sbmkit::Vertex c = b + 1; c < n; ++c)
        if (g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c)) ++count;
  return count;
}

// Dense non-backtracking matrix straight from the definition, over the
// library's directed-edge numbering.
inline std::vector<std::vector<int>> nb_matrix(const sbmkit::Graph& g) {
  const std::size_t d = g.num_directed();
  std::vector<std::vector<int>> b(d, std::vector<int>(d, 0));
  for (std::size_t e = 0; e < d; ++e) {
    for (std::size_t f = 0; f < d; ++f) {
      // e = (i -> j), f = (k -> l): 1 iff l == i and k != j.
      if (g.target(f) == g.source(e) && g.source(f) != g.target(e)) b[e][f] = 1;
    }
  }
  return b;
}

inline std::vector<std::vector<long long>> matmul(const std::vector<std::vector<long long>>& a,
                                                  const std::vector<std::vector<long long>>& b) {
  const std::size_t n = a.size();
  std::vector<std::vector<long long>> c(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k] != 0)
        for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Uniform random recursive tree (vertex v > 0 attaches to a uniform earlier vertex).
inline sbmkit::Graph random_tree(std::size_t n, std::mt19937_64& rng) {
  std::vector<sbmkit::Edge> edges;
  for (std::size_t v = 1; v < n; ++v) {
    std::uniform_int_distribution<std::size_t> pick(0, v - 1);
    edges.push_back({static_cast<sbmkit::Vertex>(pick(rng)), static_cast<sbmkit::Vertex>(v)});
  }
  return sbmkit::Graph::from_edges(n, edges);
}

inline sbmkit::Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<sbmkit::Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({static_cast<sbmkit::Vertex>(u), static_cast<sbmkit::Vertex>(v)});
  return sbmkit::Graph::from_edges(n, edges);
}

// Mean and standard error of a sample.
struct Moments {
  double mean;
  double se;
};

template <class T>
Moments moments(const std::vector<T>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (T x : xs) mean += static_cast<double>(x);
  mean /= n;
  double var = 0.0;
  for (T x : xs) var += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
  var /= n - 1.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace oracle
