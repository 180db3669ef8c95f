#include "biphoton/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "biphoton/units.hpp"

namespace biphoton {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << "line " << line << ": malformed number '" << cell << "'";
    throw Error(ErrorKind::DegenerateInput, msg.str());
  }
  return v;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

std::string format_number(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_table(std::ostream& out, const Table& table, OutputFormat format) {
  if (format == OutputFormat::Json) {
    nlohmann::ordered_json j;
    j["columns"] = table.columns;
    j["rows"] = table.rows;
    out << j.dump(2) << '\n';
    return;
  }
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

Table interferogram_table(const Interferogram& interferogram) {
  Table t;
  t.columns = {"tau_ps", interferogram.kind == InterferogramKind::Counts ? "counts" : "p_coincidence"};
  if (!interferogram.errors.empty()) t.columns.push_back("sigma");
  for (std::size_t i = 0; i < interferogram.size(); ++i) {
    std::vector<double> row = {interferogram.delays[i] / units::ps, interferogram.values[i]};
    if (!interferogram.errors.empty()) row.push_back(interferogram.errors[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Interferogram read_interferogram_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) {
      header = split_csv(line);
      break;
    }
  }
  if (header.size() < 2 || header.size() > 3 || header[0] != "tau_ps") {
    throw Error(ErrorKind::DegenerateInput,
                "interferogram CSV: header must be tau_ps,counts[,sigma] or tau_ps,p_coincidence[,sigma]");
  }
  Interferogram data;
  if (header[1] == "counts") {
    data.kind = InterferogramKind::Counts;
  } else if (header[1] == "p_coincidence") {
    data.kind = InterferogramKind::Probability;
  } else {
    throw Error(ErrorKind::DegenerateInput, "interferogram CSV: second column must be counts or p_coincidence");
  }
  const bool has_sigma = header.size() == 3;
  if (has_sigma && header[2] != "sigma") {
    throw Error(ErrorKind::DegenerateInput, "interferogram CSV: third column must be sigma");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << header.size() << " columns, got " << cells.size();
      throw Error(ErrorKind::DegenerateInput, msg.str());
    }
    data.delays.push_back(parse_cell(cells[0], line_no) * units::ps);
    data.values.push_back(parse_cell(cells[1], line_no));
    if (has_sigma) data.errors.push_back(parse_cell(cells[2], line_no));
  }
  data.validate();
  return data;
}

void write_jsi_csv(std::ostream& out, const JsiGrid& grid) {
  // Increasing wavelength is decreasing frequency.
  const std::size_t ns = grid.omega_s.size();
  const std::size_t ni = grid.omega_i.size();
  out << "lambda_s_nm\\lambda_i_nm";
  for (std::size_t i = ni; i-- > 0;) out << ',' << format_number(wavelength_from_omega(grid.omega_i[i]) / units::nm);
  out << '\n';
  for (std::size_t s = ns; s-- > 0;) {
    out << format_number(wavelength_from_omega(grid.omega_s[s]) / units::nm);
    for (std::size_t i = ni; i-- > 0;) out << ',' << format_number(grid.at(s, i));
    out << '\n';
  }
}

JsiGrid read_jsi_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> lambda_i;
  std::vector<double> lambda_s;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split_csv(line);
    if (lambda_i.empty()) {
      if (cells.size() < 2) throw Error(ErrorKind::DegenerateInput, "JSI CSV: header needs idler wavelengths");
      for (std::size_t c = 1; c < cells.size(); ++c) lambda_i.push_back(parse_cell(cells[c], line_no));
      continue;
    }
    if (cells.size() != lambda_i.size() + 1) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << lambda_i.size() + 1 << " columns, got " << cells.size();
      throw Error(ErrorKind::DegenerateInput, msg.str());
    }
    lambda_s.push_back(parse_cell(cells[0], line_no));
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(parse_cell(cells[c], line_no));
    rows.push_back(std::move(row));
  }
  if (lambda_i.empty() || lambda_s.empty()) throw Error(ErrorKind::DegenerateInput, "JSI CSV: empty grid");

  auto order = [](const std::vector<double>& lambda) {
    std::vector<std::size_t> idx(lambda.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // Increasing frequency.
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return lambda[a] > lambda[b]; });
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (!(lambda[idx[i]] > 0.0)) throw Error(ErrorKind::DegenerateInput, "JSI CSV: wavelengths must be positive");
      if (i > 0 && lambda[idx[i]] == lambda[idx[i - 1]]) {
        throw Error(ErrorKind::DegenerateInput, "JSI CSV: repeated wavelength");
      }
    }
    return idx;
  };
  const auto si = order(lambda_s);
  const auto ii = order(lambda_i);
  JsiGrid grid;
  for (std::size_t s : si) grid.omega_s.push_back(omega_from_wavelength(lambda_s[s] * units::nm));
  for (std::size_t i : ii) grid.omega_i.push_back(omega_from_wavelength(lambda_i[i] * units::nm));
  for (std::size_t s : si) {
    for (std::size_t i : ii) grid.values.push_back(rows[s][i]);
  }
  return grid;
}

}  // namespace biphoton
