#include "sbmkit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sbmkit/errors.hpp"

namespace sbmkit {

void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) os << e.u << ' ' << e.v << '\n';
}

Graph read_edge_list(std::istream& is) {
  long long n = -1;
  long long m = -1;
  if (!(is >> n >> m) || n < 0 || m < 0) throw InputError("edge list: bad header, expected \"n m\"");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    long long u = -1;
    long long v = -1;
    if (!(is >> u >> v)) throw InputError("edge list: expected " + std::to_string(m) + " edges");
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw InputError("edge list: vertex out of range on edge " + std::to_string(k));
    }
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  return Graph::from_edges(static_cast<std::size_t>(n), edges);
}

void save_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_edge_list(os, g);
  if (!os) throw IoError("write failed: " + path.string());
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_edge_list(is);
}

void write_labels(std::ostream& os, const Labels& labels) {
  for (int x : labels) os << x << '\n';
}

Labels read_labels(std::istream& is, std::size_t q) {
  Labels out;
  long long x = 0;
  while (is >> x) {
    if (x < 0 || (q > 0 && x >= static_cast<long long>(q))) {
      throw InputError("label " + std::to_string(x) + " out of range");
    }
    out.push_back(static_cast<int>(x));
  }
  if (!is.eof()) throw InputError("labels: unparsable entry");
  return out;
}

void save_labels(const std::filesystem::path& path, const Labels& labels) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_labels(os, labels);
  if (!os) throw IoError("write failed: " + path.string());
}

Labels load_labels(const std::filesystem::path& path, std::size_t q) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_labels(is, q);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace sbmkit
