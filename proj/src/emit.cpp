// ============================================================================
// emit.cpp -- deterministic CSV / JSON / SVG writers
// ============================================================================

#include "latenergy/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "latenergy/common.hpp"

namespace laten {

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string cell_to_csv(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, long long>) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%lld", v);
          return buf;
        } else {
          return v;
        }
      },
      cell);
}

std::string cell_to_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return "null";
          return format_double(v);
        } else if constexpr (std::is_same_v<T, long long>) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%lld", v);
          return buf;
        } else {
          return "\"" + json_escape(v) + "\"";
        }
      },
      cell);
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw IoError("row width does not match the column count");
  }
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void emit_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << cell_to_csv(row[i]);
    }
    out << '\n';
  }
}

void emit_json(const Table& table, const RunMeta& meta, std::ostream& out) {
  out << "{\"meta\":{\"version\":\"" << kVersion << "\",\"command\":\""
      << json_escape(meta.command) << "\",\"seed\":" << meta.seed
      << ",\"tolerances\":{";
  bool first = true;
  for (const auto& [k, v] : meta.tolerances) {
    if (!first) out << ',';
    first = false;
    out << '"' << json_escape(k) << "\":" << format_double(v);
  }
  out << "}},\"rows\":[";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r) out << ',';
    out << '{';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out << ',';
      out << '"' << json_escape(table.columns[i])
          << "\":" << cell_to_json(table.rows[r][i]);
    }
    out << '}';
  }
  out << "]}\n";
}

void emit_svg(const std::vector<SvgSeries>& series, const std::string& x_label,
              const std::string& y_label, std::ostream& out) {
  constexpr double W = 800.0, H = 500.0;
  constexpr double ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;

  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool have = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!have) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        have = true;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax - xmin < 1e-300) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-300) ymax = ymin + 1.0;
  const auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  const auto py = [&](double y) {
    return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb);
  };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
      << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    out << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 18.0
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(xv)
        << "</text>\n";
    out << "<text x=\"" << ml - 6.0 << "\" y=\"" << py(yv) + 4.0
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << (ml + W - mr) / 2.0 << "\" y=\"" << H - 10.0
      << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2.0
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 "
         "16 "
      << (mt + H - mb) / 2.0 << ")\">" << y_label << "</text>\n";

  int ci = 0;
  for (const auto& s : series) {
    const char* color = kColors[ci % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << W - mr - 8.0 << "\" y=\"" << mt + 16.0 * (ci + 1)
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << color << "\">"
        << s.name << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
}

}  // namespace laten
