#include "biphoton/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "biphoton/units.hpp"

namespace biphoton {

namespace {

struct Location {
  std::size_t line = 0;
  std::size_t key_column = 0;
  std::size_t value_column = 0;
};

enum class ValueKind { Number, Integer, Text };

struct KeySpec {
  const char* section;
  const char* key;
  bool required;
  ValueKind kind;
  // Returns an error message when the value is out of range.
  std::function<std::optional<std::string>(double)> check;
  std::function<void(RunConfig&, double, const std::string&)> apply;
};

std::function<std::optional<std::string>(double)> open_interval(const char* name, double lo, double hi) {
  return [=](double v) -> std::optional<std::string> {
    if (v > lo && v < hi) return std::nullopt;
    std::ostringstream msg;
    msg << name << " = " << v << " must lie in (" << lo << ", " << hi << ")";
    return msg.str();
  };
}

std::function<std::optional<std::string>(double)> at_least(const char* name, double lo) {
  return [=](double v) -> std::optional<std::string> {
    if (v >= lo) return std::nullopt;
    std::ostringstream msg;
    msg << name << " = " << v << " must be at least " << lo;
    return msg.str();
  };
}

std::function<std::optional<std::string>(double)> positive(const char* name) {
  return [=](double v) -> std::optional<std::string> {
    if (v > 0.0) return std::nullopt;
    std::ostringstream msg;
    msg << name << " = " << v << " must be positive";
    return msg.str();
  };
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"pump", "lambda_p_nm", true, ValueKind::Number, open_interval("lambda_p_nm", 500.0, 1500.0),
       [](RunConfig& c, double v, const std::string&) { c.pump.lambda_p = v * units::nm; }},
      {"pump", "pulse_fwhm_ps", true, ValueKind::Number, positive("pulse_fwhm_ps"),
       [](RunConfig& c, double v, const std::string&) { c.pump.pulse_fwhm = v * units::ps; }},
      {"pump", "waist_wz_mm", true, ValueKind::Number, positive("waist_wz_mm"),
       [](RunConfig& c, double v, const std::string&) { c.pump.waist_wz = v * units::mm; }},
      {"pump", "theta_deg", false, ValueKind::Number, open_interval("theta_deg", -90.0, 90.0),
       [](RunConfig& c, double v, const std::string&) { c.pump.theta = v * units::deg; }},
      {"dispersion", "n0_h", true, ValueKind::Number, open_interval("n0_h", 1.0, 10.0),
       [](RunConfig& c, double v, const std::string&) { c.dispersion.n0_h = v; }},
      {"dispersion", "n0_v", true, ValueKind::Number, open_interval("n0_v", 1.0, 10.0),
       [](RunConfig& c, double v, const std::string&) { c.dispersion.n0_v = v; }},
      {"dispersion", "n_group", true, ValueKind::Number, open_interval("n_group", 1.0, 10.0),
       [](RunConfig& c, double v, const std::string&) { c.dispersion.n_group = v; }},
      {"dispersion", "lambda_ref_nm", false, ValueKind::Number, positive("lambda_ref_nm"),
       [](RunConfig& c, double v, const std::string&) { c.dispersion.omega_ref = omega_from_wavelength(v * units::nm); }},
      {"waveguide", "length_l_mm", true, ValueKind::Number, positive("length_L"),
       [](RunConfig& c, double v, const std::string&) { c.waveguide.length_l = v * units::mm; }},
      {"waveguide", "reflectivity_r", true, ValueKind::Number,
       [](double v) -> std::optional<std::string> {
         if (v >= 0.0 && v < 1.0) return std::nullopt;
         std::ostringstream msg;
         msg << "reflectivity_R = " << v << " violates 0 <= reflectivity_R < 1";
         return msg.str();
       },
       [](RunConfig& c, double v, const std::string&) { c.waveguide.reflectivity_r = v; }},
      {"waveguide", "modal_index_n", true, ValueKind::Number, open_interval("modal_index_n", 1.0, 10.0),
       [](RunConfig& c, double v, const std::string&) { c.waveguide.modal_index_n = v; }},
      {"grid", "points", false, ValueKind::Integer, at_least("points", 64.0),
       [](RunConfig& c, double v, const std::string&) { c.grid.points = static_cast<std::size_t>(v); }},
      {"grid", "extent_sigmas", false, ValueKind::Number, at_least("extent_sigmas", 5.0),
       [](RunConfig& c, double v, const std::string&) { c.grid.extent_sigmas = v; }},
      {"grid", "points_per_fsr", false, ValueKind::Number, at_least("points_per_fsr", 8.0),
       [](RunConfig& c, double v, const std::string&) { c.grid.points_per_fsr = v; }},
      {"output", "path", false, ValueKind::Text, nullptr,
       [](RunConfig& c, double, const std::string& s) { c.output.path = s; }},
      {"output", "format", false, ValueKind::Text, nullptr,
       [](RunConfig& c, double, const std::string& s) {
         c.output.format = s == "json" ? OutputFormat::Json : OutputFormat::Csv;
       }},
  };
  return table;
}

bool known_section(std::string_view name) {
  for (const auto& spec : key_table()) {
    if (name == spec.section) return true;
  }
  return false;
}

const KeySpec* find_key(std::string_view section, std::string_view key) {
  for (const auto& spec : key_table()) {
    if (section == spec.section && key == spec.key) return &spec;
  }
  return nullptr;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Offset of the first non-blank character, used for column reporting.
std::size_t leading(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

std::string_view strip_comment(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') && (i == 0 || is_space(s[i - 1]))) return s.substr(0, i);
  }
  return s;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, Location> seen;
  std::string section;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.remove_prefix(3);

    const std::string_view body = strip_comment(raw);
    const std::string_view content = trim(body);
    if (content.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t col = leading(body) + 1;

    if (content.front() == '[') {
      if (content.back() != ']') throw ConfigError("malformed section header", line_no, col);
      const std::string name(trim(content.substr(1, content.size() - 2)));
      if (!known_section(name)) throw ConfigError("unknown section [" + name + "]", line_no, col);
      section = name;
      if (end == text.size()) break;
      continue;
    }

    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no, col);
    const std::string key(trim(body.substr(0, eq)));
    const std::string_view value_part = body.substr(eq + 1);
    const std::string value(trim(value_part));
    const std::size_t value_col = eq + 1 + leading(value_part) + 1;

    if (section.empty()) throw ConfigError("key '" + key + "' appears before any section", line_no, col);
    const KeySpec* spec = find_key(section, key);
    if (!spec) throw ConfigError("unknown key '" + key + "' in section [" + section + "]", line_no, col);
    const std::string qualified = section + "." + key;
    if (seen.count(qualified)) {
      std::ostringstream msg;
      msg << "duplicate key '" << key << "' in section [" << section << "] (first on line "
          << seen[qualified].line << ")";
      throw ConfigError(msg.str(), line_no, col);
    }
    seen[qualified] = Location{line_no, col, value_col};

    double number = 0.0;
    if (spec->kind == ValueKind::Text) {
      if (key == "format" && value != "csv" && value != "json") {
        throw ConfigError("format must be 'csv' or 'json', got '" + value + "'", line_no, value_col);
      }
    } else {
      const char* first = value.data();
      const char* last = value.data() + value.size();
      const auto [ptr, ec] = std::from_chars(first, last, number);
      if (value.empty() || ec != std::errc() || ptr != last || !std::isfinite(number)) {
        throw ConfigError("malformed number '" + value + "' for key '" + key + "'", line_no, value_col);
      }
      if (spec->kind == ValueKind::Integer && number != std::floor(number)) {
        throw ConfigError("key '" + key + "' needs an integer, got '" + value + "'", line_no, value_col);
      }
      if (spec->check) {
        if (auto problem = spec->check(number)) throw ConfigError(*problem, line_no, value_col);
      }
    }
    spec->apply(cfg, number, value);
    if (end == text.size()) break;
  }

  std::vector<std::string> missing;
  for (const auto& spec : key_table()) {
    const std::string qualified = std::string(spec.section) + "." + spec.key;
    if (spec.required && !seen.count(qualified)) missing.push_back(qualified);
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "missing required keys:";
    for (const auto& m : missing) msg << ' ' << m;
    throw ConfigError(msg.str());
  }

  if (!seen.count("dispersion.lambda_ref_nm")) cfg.dispersion.omega_ref = 0.5 * cfg.pump.omega_p();

  // Constraints spanning several keys.
  if (!(std::abs(cfg.dispersion.birefringence()) < 0.1)) {
    const Location& at = seen["dispersion.n0_v"];
    std::ostringstream msg;
    msg << "|n0_h - n0_v| = " << std::abs(cfg.dispersion.birefringence()) << " must be below 0.1";
    throw ConfigError(msg.str(), at.line, at.value_column);
  }
  try {
    cfg.pump.validate();
    cfg.dispersion.validate();
    cfg.waveguide.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string reference_device_config_text() {
  return "# AlGaAs counterpropagating source, 2.6 mm ridge, single-layer facet coating\n"
         "[pump]\n"
         "lambda_p_nm = 773.15\n"
         "pulse_fwhm_ps = 4.5\n"
         "waist_wz_mm = 1.0\n"
         "theta_deg = 0.0\n"
         "\n"
         "[dispersion]\n"
         "n0_h = 3.162\n"
         "n0_v = 3.150\n"
         "n_group = 3.15\n"
         "lambda_ref_nm = 1546.3\n"
         "\n"
         "[waveguide]\n"
         "length_l_mm = 2.6\n"
         "reflectivity_r = 0.10\n"
         "modal_index_n = 3.156\n"
         "\n"
         "[grid]\n"
         "points = 512\n"
         "extent_sigmas = 5.0\n"
         "points_per_fsr = 12\n"
         "\n"
         "[output]\n"
         "format = csv\n";
}

RunConfig reference_device_config() { return parse_config(reference_device_config_text()); }

}  // namespace biphoton
