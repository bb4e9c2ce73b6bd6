#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sbmkit {

// Header plus rows of string cells; every row has the header's width.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // InputError if absent
};

CsvTable read_csv(std::istream& is);
CsvTable load_csv(const std::filesystem::path& path);

enum class PlotKind {
  spectrum,  // re, im, is_outlier: complex-plane scatter
  sweep,     // sweep rows: mean overlap vs c, one series per init
  curve,     // tree curve rows: p_hat vs depth, one series per estimator
};

struct PlotSpec {
  PlotKind kind = PlotKind::spectrum;
  std::string title;
  // Spectrum plots draw a circle of radius sqrt(c) when set.
  std::optional<double> c;
};

std::optional<PlotKind> parse_plot_kind(const std::string& s);

// Throws InputError when the table is empty or lacks the kind's columns.
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

// Reads csv_path, renders, and writes svg_path only if rendering succeeded.
void emit_plot(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path,
               const PlotSpec& spec);

}  // namespace sbmkit
