#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "biphoton/biphoton.hpp"
#include "biphoton/config.hpp"
#include "biphoton/hom.hpp"

namespace biphoton {

// Column-oriented numeric table written as CSV or as a JSON object
// {"columns": [...], "rows": [[...], ...]}.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_table(std::ostream& out, const Table& table, OutputFormat format);

// Shortest representation that reads back to the same double.
std::string format_number(double value);

// tau_ps, p_coincidence
Table interferogram_table(const Interferogram& interferogram);

// tau_ps, counts[, sigma] or tau_ps, p_coincidence[, sigma]; the second
// column name selects the kind. Errors carry file line numbers.
Interferogram read_interferogram_csv(std::istream& in);

// Header row: a corner label followed by idler wavelengths (nm, increasing);
// then one row per signal wavelength (nm, increasing) with JSI values.
void write_jsi_csv(std::ostream& out, const JsiGrid& grid);
JsiGrid read_jsi_csv(std::istream& in);

}  // namespace biphoton
