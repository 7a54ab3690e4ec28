#pragma once
// ============================================================================
// emit.hpp -- deterministic CSV / JSON / SVG emission
//
// All numbers are printed with "%.15g", lines end with LF, column order is
// fixed by the caller; reruns with identical inputs produce byte-identical
// output.
// ============================================================================

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace laten {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

// Metadata block for JSON output.
struct RunMeta {
  std::string command;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // ordered => deterministic
};

std::string format_double(double v);  // "%.15g"

void emit_csv(const Table& table, std::ostream& out);
void emit_json(const Table& table, const RunMeta& meta, std::ostream& out);

// Minimal static line/step chart of one numeric column (or the phase label)
// against lambda.  Self-contained SVG, fixed canvas.
struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};
void emit_svg(const std::vector<SvgSeries>& series, const std::string& x_label,
              const std::string& y_label, std::ostream& out);

}  // namespace laten
