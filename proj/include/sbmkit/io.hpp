#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sbmkit/graph.hpp"

namespace sbmkit {

// Edge-list format: first line "n m", then m lines "u v" with u < v, 0-indexed.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);
void save_edge_list(const std::filesystem::path& path, const Graph& g);
Graph load_edge_list(const std::filesystem::path& path);

// Label format: one integer in [0, q) per line. q = 0 skips the range check.
void write_labels(std::ostream& os, const Labels& labels);
Labels read_labels(std::istream& is, std::size_t q = 0);
void save_labels(const std::filesystem::path& path, const Labels& labels);
Labels load_labels(const std::filesystem::path& path, std::size_t q = 0);

// Shortest round-trip decimal representation; used for every CSV number so
// output bytes depend only on the values.
std::string format_number(double x);

}  // namespace sbmkit
