#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sbmkit {

using Vertex = std::uint32_t;
using EdgeId = std::size_t;

struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable simple undirected graph.
//
// Directed edges (i -> j) are numbered lexicographically by (i, j), which is
// the CSR order of the sorted adjacency lists: the out-edges of i occupy
// [out_begin(i), out_end(i)) and out-edge offset_[i] + t points at the t-th
// smallest neighbor of i. Messages and non-backtracking vectors live in this
// coordinate system.
class Graph {
 public:
  Graph() = default;

  // Throws InputError for out-of-range endpoints and ValidationError for
  // self-loops or duplicate pairs. Pairs may be given in either orientation.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);
  static Graph from_edges(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges);

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_directed() const { return target_.size(); }

  // Undirected edges with u < v, sorted.
  std::span<const Edge> edges() const { return edges_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {target_.data() + offset_[v], target_.data() + offset_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offset_[v + 1] - offset_[v]; }

  EdgeId out_begin(Vertex v) const { return offset_[v]; }
  EdgeId out_end(Vertex v) const { return offset_[v + 1]; }
  Vertex source(EdgeId e) const { return source_[e]; }
  Vertex target(EdgeId e) const { return target_[e]; }
  EdgeId reverse(EdgeId e) const { return reverse_[e]; }

  bool has_edge(Vertex i, Vertex j) const { return directed_index(i, j).has_value(); }
  std::optional<EdgeId> directed_index(Vertex i, Vertex j) const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offset_{0};
  std::vector<Vertex> source_;
  std::vector<Vertex> target_;
  std::vector<EdgeId> reverse_;
};

struct DegreeSummary {
  double mean = 0.0;
  std::size_t max = 0;
  std::map<std::size_t, std::size_t> histogram;
};

DegreeSummary degree_stats(const Graph& g);

std::uint64_t count_triangles(const Graph& g);

// G(n, c/n). Throws ParameterError unless 0 <= c < n.
Graph sample_er(std::size_t n, double c, std::uint64_t seed);

// Uniform simple d-regular graph via configuration-model pairing, rejecting
// and resampling the whole pairing on any self-loop or multi-edge.
Graph sample_regular(std::size_t n, std::size_t d, std::uint64_t seed);

// Hard labels in [0, q).
using Labels = std::vector<int>;

}  // namespace sbmkit
