#include "sbmkit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "sbmkit/errors.hpp"

namespace sbmkit {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string px(double x) { return fmt("%.2f", x); }

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw InputError("not a number: '" + s + "'");
    return x;
  } catch (const std::logic_error&) {
    throw InputError("not a number: '" + s + "'");
  }
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool line = true;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range padded(double lo, double hi) {
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

class Canvas {
 public:
  Canvas(Range x, Range y) : x_(x), y_(y) {}

  double sx(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double sy(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  void axes(const std::string& xlabel, const std::string& ylabel, const std::string& title) {
    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom;
    const double y1 = kTop;
    os_ << "<rect x=\"" << px(x0) << "\" y=\"" << px(y1) << "\" width=\"" << px(x1 - x0) << "\" height=\""
        << px(y0 - y1) << "\" fill=\"none\" stroke=\"#000\"/>\n";
    ticks(x_, true);
    ticks(y_, false);
    os_ << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(kHeight - 12)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xlabel) << "</text>\n";
    os_ << "<text x=\"16\" y=\"" << px((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << px((y0 + y1) / 2) << ")\">" << escape(ylabel) << "</text>\n";
    if (!title.empty()) {
      os_ << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
          << "</text>\n";
    }
  }

  void series(const Series& s, const char* color) {
    if (s.line && s.points.size() > 1) {
      os_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        os_ << (i ? " " : "") << px(sx(s.points[i].first)) << ',' << px(sy(s.points[i].second));
      }
      os_ << "\"/>\n";
    }
    for (const auto& [x, y] : s.points) {
      os_ << "<circle cx=\"" << px(sx(x)) << "\" cy=\"" << px(sy(y)) << "\" r=\"" << (s.line ? "3" : "2")
          << "\" fill=\"" << color << "\"/>\n";
    }
  }

  void circle(double cx, double cy, double r) {
    os_ << "<ellipse cx=\"" << px(sx(cx)) << "\" cy=\"" << px(sy(cy)) << "\" rx=\"" << px(sx(cx + r) - sx(cx))
        << "\" ry=\"" << px(sy(cy) - sy(cy + r)) << "\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"4 3\"/>\n";
  }

  void legend(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      const double y = kTop + 10 + 20 * static_cast<double>(i);
      const double x = kWidth - kRight + 15;
      os_ << "<rect x=\"" << px(x) << "\" y=\"" << px(y - 8) << "\" width=\"10\" height=\"10\" fill=\""
          << kPalette[i % std::size(kPalette)] << "\"/>\n";
      os_ << "<text x=\"" << px(x + 16) << "\" y=\"" << px(y + 1) << "\" font-size=\"12\">" << escape(names[i])
          << "</text>\n";
    }
  }

  std::string finish() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
        << os_.str() << "</svg>\n";
    return out.str();
  }

 private:
  void ticks(Range r, bool horizontal) {
    const double step = nice_step(r.hi - r.lo);
    for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-12 * step; t += step) {
      const double v = std::abs(t) < 1e-12 * step ? 0.0 : t;
      const std::string label = fmt("%g", v);
      if (horizontal) {
        const double x = sx(v);
        const double y = kHeight - kBottom;
        os_ << "<line x1=\"" << px(x) << "\" y1=\"" << px(y) << "\" x2=\"" << px(x) << "\" y2=\"" << px(y + 5)
            << "\" stroke=\"#000\"/>\n<text x=\"" << px(x) << "\" y=\"" << px(y + 18)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << label << "</text>\n";
      } else {
        const double y = sy(v);
        os_ << "<line x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(y) << "\" x2=\"" << px(kLeft) << "\" y2=\""
            << px(y) << "\" stroke=\"#000\"/>\n<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(y + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
      }
    }
  }

  Range x_;
  Range y_;
  std::ostringstream os_;
};

std::string render(const std::vector<Series>& all, Range x, Range y, const std::string& xlabel,
                   const std::string& ylabel, const PlotSpec& spec, std::optional<double> radius) {
  Canvas canvas(x, y);
  canvas.axes(xlabel, ylabel, spec.title);
  if (radius) canvas.circle(0.0, 0.0, *radius);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < all.size(); ++i) {
    canvas.series(all[i], kPalette[i % std::size(kPalette)]);
    names.push_back(all[i].name);
  }
  canvas.legend(names);
  return canvas.finish();
}

Range bounds(const std::vector<Series>& all, bool use_x) {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const Series& s : all) {
    for (const auto& p : s.points) {
      const double v = use_x ? p.first : p.second;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return padded(lo, hi);
}

// Mean of y per (group, x), groups and x in first-appearance / ascending order.
std::vector<Series> grouped_means(const CsvTable& t, std::size_t group_col, std::size_t x_col, std::size_t y_col) {
  std::vector<std::string> order;
  std::vector<std::vector<std::pair<double, std::pair<double, std::size_t>>>> acc;
  for (const auto& row : t.rows) {
    const std::string& g = row[group_col];
    auto it = std::find(order.begin(), order.end(), g);
    std::size_t gi = static_cast<std::size_t>(it - order.begin());
    if (it == order.end()) {
      order.push_back(g);
      acc.emplace_back();
    }
    const double x = to_double(row[x_col]);
    const double y = to_double(row[y_col]);
    auto& pts = acc[gi];
    auto p = std::find_if(pts.begin(), pts.end(), [&](const auto& e) { return e.first == x; });
    if (p == pts.end()) {
      pts.push_back({x, {y, 1}});
    } else {
      p->second.first += y;
      ++p->second.second;
    }
  }
  std::vector<Series> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Series s;
    s.name = order[i];
    std::sort(acc[i].begin(), acc[i].end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [x, sum] : acc[i]) s.points.push_back({x, sum.first / static_cast<double>(sum.second)});
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError("csv: missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.header.size()) throw InputError("csv: row width differs from header");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CsvTable load_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_csv(is);
}

std::optional<PlotKind> parse_plot_kind(const std::string& s) {
  if (s == "spectrum") return PlotKind::spectrum;
  if (s == "sweep") return PlotKind::sweep;
  if (s == "curve") return PlotKind::curve;
  return std::nullopt;
}

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
  if (table.rows.empty()) throw InputError("csv has no data rows");
  switch (spec.kind) {
    case PlotKind::spectrum: {
      const std::size_t re = table.column("re");
      const std::size_t im = table.column("im");
      const std::size_t out = table.column("is_outlier");
      Series bulk{"bulk", {}, false};
      Series outliers{"outlier", {}, false};
      for (const auto& row : table.rows) {
        const std::pair<double, double> p{to_double(row[re]), to_double(row[im])};
        (row[out] == "1" ? outliers : bulk).points.push_back(p);
      }
      std::vector<Series> all;
      if (!bulk.points.empty()) all.push_back(bulk);
      if (!outliers.points.empty()) all.push_back(outliers);
      std::optional<double> radius;
      if (spec.c) radius = std::sqrt(*spec.c);
      Range x = bounds(all, true);
      Range y = bounds(all, false);
      if (radius) {
        x = {std::min(x.lo, -1.1 * *radius), std::max(x.hi, 1.1 * *radius)};
        y = {std::min(y.lo, -1.1 * *radius), std::max(y.hi, 1.1 * *radius)};
      }
      return render(all, x, y, "Re", "Im", spec, radius);
    }
    case PlotKind::sweep: {
      const auto all = grouped_means(table, table.column("init"), table.column("c"), table.column("overlap"));
      return render(all, bounds(all, true), padded(0.0, 1.0), "c", "overlap", spec, std::nullopt);
    }
    case PlotKind::curve: {
      const auto all = grouped_means(table, table.column("estimator"), table.column("depth"), table.column("p_hat"));
      return render(all, bounds(all, true), padded(0.4, 1.0), "depth", "success probability", spec, std::nullopt);
    }
  }
  throw InputError("unknown plot kind");
}

void emit_plot(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path, const PlotSpec& spec) {
  const std::string svg = render_svg(load_csv(csv_path), spec);
  std::ofstream os(svg_path, std::ios::binary);
  if (!os) throw IoError("cannot open " + svg_path.string() + " for writing");
  os << svg;
  if (!os) throw IoError("write failed: " + svg_path.string());
}

}  // namespace sbmkit
