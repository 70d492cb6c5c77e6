#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dicke3 {

inline constexpr const char* kVersion = "0.1.0";

// Error categories the CLI maps to exit codes: config 2, io 3, numerical 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Locale-independent scientific formatting with 17 significant digits,
// enough for a lossless double round trip in the emitted tables.
inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

// Uniform sample grid. Angle grids are half-open (stop excluded), time grids
// closed (stop included); pick via the factory helpers.
struct TimeGrid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  static TimeGrid closed(double start, double stop, int count) {
    if (count < 1) throw ConfigError("grid count must be at least 1");
    if (count > 1 && !(stop > start)) throw ConfigError("grid stop must exceed start");
    return TimeGrid{start, stop, count};
  }
  double step() const { return count > 1 ? (stop - start) / (count - 1) : 0.0; }
  std::vector<double> values() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + step() * i;
    if (count > 1) out.back() = stop;
    return out;
  }
};

inline std::vector<double> half_open_grid(double start, double stop, int count) {
  if (count < 1) throw ConfigError("grid count must be at least 1");
  if (!(stop > start)) throw ConfigError("grid stop must exceed start");
  const double step = (stop - start) / count;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + step * i;
  return out;
}

}  // namespace dicke3
