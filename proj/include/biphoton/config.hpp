#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "biphoton/cavity.hpp"
#include "biphoton/dispersion.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/phasematch.hpp"

namespace biphoton {

struct GridConfig {
  std::size_t points = 512;
  double extent_sigmas = 5.0;
  double points_per_fsr = 12.0;
};

enum class OutputFormat { Csv, Json };

struct OutputConfig {
  std::string path;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
};

struct RunConfig {
  PumpConfig pump;
  DispersionModel dispersion;
  WaveguideConfig waveguide;
  GridConfig grid;
  OutputConfig output;

  GridSpec grid_spec() const { return GridSpec{grid.points, grid.extent_sigmas}; }
};

// line and column are 1-based; 0 when the problem is not tied to a position.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : Error(ErrorKind::Config, message), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// INI-style text with sections [pump] [dispersion] [waveguide] [grid] [output].
// Physical keys carry their unit in the name; values are converted to SI.
// Unknown sections or keys, duplicates, malformed numbers and out-of-range
// values are ConfigErrors. A missing required key reports every missing one.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::string& path);

RunConfig reference_device_config();

// Text of the bundled reference-device configuration.
std::string reference_device_config_text();

}  // namespace biphoton
