#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dicke3/common.hpp"
#include "dicke3/geometry.hpp"

namespace dicke3 {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_plain_number(const std::string& s, const std::string& field) {
  if (s.empty()) throw ConfigError("field '" + field + "': empty number");
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size())
    throw ConfigError("field '" + field + "': cannot parse number '" + s + "'");
  if (!std::isfinite(v)) throw ConfigError("field '" + field + "': non-finite number '" + s + "'");
  return v;
}

}  // namespace detail

// Numeric literal parser for config values. Accepts plain decimals and
// scientific notation, rationals like "1/3", and rational multiples of pi:
// "pi", "-pi/2", "2pi/3", "2*pi/3", "pi/4.4". Whitespace inside the literal
// is ignored. Fractions with pi keep angle values like 2pi/3 exact.
inline double parse_number_literal(const std::string& text, const std::string& field) {
  std::string s;
  s.reserve(text.size());
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw ConfigError("field '" + field + "': empty value");

  double sign = 1.0;
  if (s.front() == '+' || s.front() == '-') {
    if (s.front() == '-') sign = -1.0;
    s.erase(s.begin());
  }

  const std::size_t pi_pos = s.find("pi");
  double numerator;
  std::string rest;
  if (pi_pos != std::string::npos) {
    std::string coef = s.substr(0, pi_pos);
    if (!coef.empty() && coef.back() == '*') coef.pop_back();
    numerator = (coef.empty() ? 1.0 : detail::parse_plain_number(coef, field)) * std::numbers::pi;
    rest = s.substr(pi_pos + 2);
  } else {
    const std::size_t slash = s.find('/');
    numerator = detail::parse_plain_number(s.substr(0, slash), field);
    rest = slash == std::string::npos ? std::string() : s.substr(slash);
  }
  if (!rest.empty()) {
    if (rest.front() != '/')
      throw ConfigError("field '" + field + "': cannot parse number '" + text + "'");
    const double denom = detail::parse_plain_number(rest.substr(1), field);
    if (denom == 0.0) throw ConfigError("field '" + field + "': division by zero");
    numerator /= denom;
  }
  return sign * numerator;
}

// One experiment: geometry, conditioning detector angles, output grids, fit
// window, and run controls. Angles are radians; positions are in units of the
// transition wavelength; times are in units of 1/gamma. The phi3 grid is
// half-open (stop excluded, natural for a full circle), the t3 grid closed.
struct ExperimentConfig {
  std::vector<Eigen::Vector2d> positions_lambda;
  Eigen::Vector2d dipole{1.0, 0.0};
  double gamma = 1.0;
  bool paper_mode = true;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi3_start = 0.0;
  double phi3_stop = two_pi;
  int phi3_count = 360;
  double t3_start = 0.0;
  double t3_stop = 5.0;
  int t3_count = 201;
  double fit_window = 0.5;
  int fit_samples = 51;
  int workers = 0;  // 0 = use available parallelism
  std::string out_dir = ".";

  AtomEnsemble ensemble() const { return AtomEnsemble(positions_lambda, dipole, gamma); }
  std::vector<double> phi3_grid() const { return half_open_grid(phi3_start, phi3_stop, phi3_count); }
  TimeGrid t3_grid() const { return TimeGrid::closed(t3_start, t3_stop, t3_count); }
};

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.positions_lambda.empty() || cfg.positions_lambda.size() > 3)
    throw ConfigError("field 'r*_lambda': need 1 to 3 atoms");
  if (cfg.dipole.norm() <= 0.0) throw ConfigError("field 'dipole_x/dipole_y': zero dipole axis");
  if (!(cfg.gamma > 0.0)) throw ConfigError("field 'gamma_per_s': must be positive");
  if (cfg.phi3_count < 1) throw ConfigError("field 'phi3_count': must be at least 1");
  if (!(cfg.phi3_stop > cfg.phi3_start))
    throw ConfigError("field 'phi3_stop_rad': must exceed phi3_start_rad");
  if (cfg.t3_count < 1) throw ConfigError("field 't3_count': must be at least 1");
  if (cfg.t3_count > 1 && !(cfg.t3_stop > cfg.t3_start))
    throw ConfigError("field 't3_stop_gamma': must exceed t3_start_gamma");
  if (!(cfg.fit_window > 0.0)) throw ConfigError("field 'fit_window_gamma': must be positive");
  if (cfg.fit_samples < 2) throw ConfigError("field 'fit_samples': must be at least 2");
  if (cfg.workers < 0) throw ConfigError("field 'workers': must be non-negative");
  if (cfg.out_dir.empty()) throw ConfigError("field 'out_dir': must not be empty");
}

// Flat key=value text, one pair per line, full-line '#' comments. Every key
// carries its unit as a suffix. Unknown and duplicate keys are hard errors so
// typos cannot silently fall back to defaults.
inline ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }

  auto take = [&kv](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_number = [&take](const std::string& key, double fallback) {
    const auto v = take(key);
    return v ? parse_number_literal(*v, key) : fallback;
  };
  auto take_int = [&take](const std::string& key, int fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    const double d = parse_number_literal(*v, key);
    const int i = static_cast<int>(std::llround(d));
    if (std::abs(d - i) > 0.0) throw ConfigError("field '" + key + "': expected an integer");
    return i;
  };
  auto take_bool = [&take](const std::string& key, bool fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw ConfigError("field '" + key + "': expected true or false, got '" + *v + "'");
  };

  ExperimentConfig cfg;

  cfg.positions_lambda.clear();
  for (int k = 1; k <= 3; ++k) {
    const std::string xs = "r" + std::to_string(k) + "_x_lambda";
    const std::string ys = "r" + std::to_string(k) + "_y_lambda";
    const bool have = kv.count(xs) > 0 || kv.count(ys) > 0;
    if (!have) {
      // atoms must be listed without gaps
      for (int j = k + 1; j <= 3; ++j)
        for (const std::string& s : {std::string("r") + std::to_string(j) + "_x_lambda",
                                     std::string("r") + std::to_string(j) + "_y_lambda"})
          if (kv.count(s) > 0)
            throw ConfigError("field '" + s + "': atom " + std::to_string(j) +
                              " given but atom " + std::to_string(k) + " missing");
      break;
    }
    cfg.positions_lambda.emplace_back(take_number(xs, 0.0), take_number(ys, 0.0));
  }
  if (cfg.positions_lambda.empty())
    throw ConfigError("field 'r1_x_lambda': at least one atom position is required");

  cfg.dipole = Eigen::Vector2d(take_number("dipole_x", 1.0), take_number("dipole_y", 0.0));
  if (cfg.dipole.norm() <= 0.0) throw ConfigError("field 'dipole_x/dipole_y': zero dipole axis");
  cfg.dipole.normalize();

  cfg.gamma = take_number("gamma_per_s", 1.0);
  cfg.paper_mode = take_bool("paper_mode", true);
  cfg.phi1 = take_number("phi1_rad", 0.0);
  cfg.phi2 = take_number("phi2_rad", 0.0);
  cfg.phi3_start = take_number("phi3_start_rad", 0.0);
  cfg.phi3_stop = take_number("phi3_stop_rad", two_pi);
  cfg.phi3_count = take_int("phi3_count", 360);
  cfg.t3_start = take_number("t3_start_gamma", 0.0);
  cfg.t3_stop = take_number("t3_stop_gamma", 5.0);
  cfg.t3_count = take_int("t3_count", 201);
  cfg.fit_window = take_number("fit_window_gamma", 0.5);
  cfg.fit_samples = take_int("fit_samples", 51);
  cfg.workers = take_int("workers", 0);
  if (const auto v = take("out_dir")) cfg.out_dir = *v;

  if (!kv.empty()) throw ConfigError("unknown key '" + kv.begin()->first + "'");

  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// Canonical normalized form: every key written, numbers in the 17-digit
// wire format, so parse(serialize(cfg)) == cfg field for field.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  for (std::size_t k = 0; k < cfg.positions_lambda.size(); ++k) {
    out << "r" << k + 1 << "_x_lambda = " << fmt17(cfg.positions_lambda[k].x()) << "\n";
    out << "r" << k + 1 << "_y_lambda = " << fmt17(cfg.positions_lambda[k].y()) << "\n";
  }
  out << "dipole_x = " << fmt17(cfg.dipole.x()) << "\n";
  out << "dipole_y = " << fmt17(cfg.dipole.y()) << "\n";
  out << "gamma_per_s = " << fmt17(cfg.gamma) << "\n";
  out << "paper_mode = " << (cfg.paper_mode ? "true" : "false") << "\n";
  out << "phi1_rad = " << fmt17(cfg.phi1) << "\n";
  out << "phi2_rad = " << fmt17(cfg.phi2) << "\n";
  out << "phi3_start_rad = " << fmt17(cfg.phi3_start) << "\n";
  out << "phi3_stop_rad = " << fmt17(cfg.phi3_stop) << "\n";
  out << "phi3_count = " << cfg.phi3_count << "\n";
  out << "t3_start_gamma = " << fmt17(cfg.t3_start) << "\n";
  out << "t3_stop_gamma = " << fmt17(cfg.t3_stop) << "\n";
  out << "t3_count = " << cfg.t3_count << "\n";
  out << "fit_window_gamma = " << fmt17(cfg.fit_window) << "\n";
  out << "fit_samples = " << cfg.fit_samples << "\n";
  out << "workers = " << cfg.workers << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  return out.str();
}

}  // namespace dicke3
