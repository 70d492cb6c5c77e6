#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "dicke3/config.hpp"

using namespace dicke3;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double pi = std::numbers::pi;

const char* kFullConfig = R"(# three atoms on the x axis
r1_x_lambda = 0
r1_y_lambda = 0
r2_x_lambda = 1/3
r2_y_lambda = 0
r3_x_lambda = 4
r3_y_lambda = 0
dipole_x = 1
dipole_y = 0
gamma_per_s = 1
paper_mode = true
phi1_rad = 2pi/3
phi2_rad = pi/4.4
phi3_start_rad = 0
phi3_stop_rad = 2pi
phi3_count = 360
t3_start_gamma = 0
t3_stop_gamma = 5
t3_count = 201
fit_window_gamma = 0.5
fit_samples = 51
workers = 0
out_dir = .
)";
}  // namespace

TEST_CASE("number literals cover decimals, rationals, and pi multiples") {
  REQUIRE(parse_number_literal("pi", "f") == pi);
  REQUIRE(parse_number_literal("-pi/2", "f") == -(pi / 2.0));
  REQUIRE(parse_number_literal("2pi/3", "f") == (2.0 * pi) / 3.0);
  REQUIRE(parse_number_literal("2*pi/3", "f") == (2.0 * pi) / 3.0);
  REQUIRE(parse_number_literal("2 * pi / 3", "f") == (2.0 * pi) / 3.0);
  REQUIRE(parse_number_literal("pi/4.4", "f") == pi / 4.4);
  REQUIRE(parse_number_literal("1/3", "f") == 1.0 / 3.0);
  REQUIRE(parse_number_literal("3/7", "f") == 3.0 / 7.0);
  REQUIRE(parse_number_literal("0.5", "f") == 0.5);
  REQUIRE(parse_number_literal("-2.5e-3", "f") == -2.5e-3);

  REQUIRE_THROWS_AS(parse_number_literal("abc", "f"), ConfigError);
  REQUIRE_THROWS_WITH(parse_number_literal("pi/0", "f"), ContainsSubstring("division by zero"));
  REQUIRE_THROWS_AS(parse_number_literal("", "f"), ConfigError);
  REQUIRE_THROWS_AS(parse_number_literal("1/2/3", "f"), ConfigError);
  REQUIRE_THROWS_AS(parse_number_literal("pip", "f"), ConfigError);
}

TEST_CASE("a full config file parses into every field") {
  const ExperimentConfig cfg = parse_config(kFullConfig);
  REQUIRE(cfg.positions_lambda.size() == 3);
  REQUIRE(cfg.positions_lambda[0] == Eigen::Vector2d(0.0, 0.0));
  REQUIRE(cfg.positions_lambda[1].x() == 1.0 / 3.0);
  REQUIRE(cfg.positions_lambda[2].x() == 4.0);
  REQUIRE(cfg.dipole == Eigen::Vector2d(1.0, 0.0));
  REQUIRE(cfg.gamma == 1.0);
  REQUIRE(cfg.paper_mode);
  REQUIRE(cfg.phi1 == (2.0 * pi) / 3.0);
  REQUIRE(cfg.phi2 == pi / 4.4);
  REQUIRE(cfg.phi3_start == 0.0);
  REQUIRE(cfg.phi3_stop == 2.0 * pi);
  REQUIRE(cfg.phi3_count == 360);
  REQUIRE(cfg.t3_stop == 5.0);
  REQUIRE(cfg.t3_count == 201);
  REQUIRE(cfg.fit_window == 0.5);
  REQUIRE(cfg.fit_samples == 51);
  REQUIRE(cfg.workers == 0);
  REQUIRE(cfg.out_dir == ".");

  REQUIRE(cfg.phi3_grid().size() == 360);
  REQUIRE(cfg.t3_grid().values().back() == 5.0);
}

TEST_CASE("omitted keys fall back to the documented defaults") {
  const ExperimentConfig cfg = parse_config("r1_x_lambda = 0\n");
  REQUIRE(cfg.positions_lambda.size() == 1);
  REQUIRE(cfg.dipole == Eigen::Vector2d(1.0, 0.0));
  REQUIRE(cfg.gamma == 1.0);
  REQUIRE(cfg.paper_mode);
  REQUIRE(cfg.phi1 == 0.0);
  REQUIRE(cfg.phi3_count == 360);
  REQUIRE(cfg.phi3_stop == two_pi);
  REQUIRE(cfg.t3_count == 201);
  REQUIRE(cfg.fit_samples == 51);
  REQUIRE(cfg.out_dir == ".");
}

TEST_CASE("typos and malformed lines are hard errors") {
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\nr1_x_lambda = 1\n"),
                      ContainsSubstring("duplicate key 'r1_x_lambda'"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\nphii_rad = 1\n"),
                      ContainsSubstring("unknown key 'phii_rad'"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda\n"), ContainsSubstring("expected key = value"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\nr3_x_lambda = 4\n"),
                      ContainsSubstring("atom 2 missing"));
  REQUIRE_THROWS_AS(parse_config(""), ConfigError);
}

TEST_CASE("positions and dipole have forgiving partial forms") {
  const ExperimentConfig cfg = parse_config("r1_x_lambda = 0\nr2_y_lambda = 0.25\n");
  REQUIRE(cfg.positions_lambda.size() == 2);
  REQUIRE(cfg.positions_lambda[1] == Eigen::Vector2d(0.0, 0.25));

  const ExperimentConfig d = parse_config("r1_x_lambda = 0\ndipole_x = 3\ndipole_y = 4\n");
  REQUIRE_THAT(d.dipole.x(), WithinAbs(0.6, 1e-15));
  REQUIRE_THAT(d.dipole.y(), WithinAbs(0.8, 1e-15));

  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\ndipole_x = 0\ndipole_y = 0\n"),
                      ContainsSubstring("zero dipole axis"));
}

TEST_CASE("validation names the offending field") {
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\ngamma_per_s = -1\n"),
                      ContainsSubstring("gamma_per_s"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\nt3_count = 0\n"),
                      ContainsSubstring("t3_count"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\nphi3_count = 0\n"),
                      ContainsSubstring("phi3_count"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\nphi3_start_rad = 1\nphi3_stop_rad = 1\n"),
                      ContainsSubstring("phi3_stop_rad"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\nfit_samples = 1\n"),
                      ContainsSubstring("fit_samples"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\nworkers = -1\n"),
                      ContainsSubstring("workers"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\nt3_count = pi\n"),
                      ContainsSubstring("expected an integer"));
  REQUIRE_THROWS_WITH(parse_config("r1_x_lambda = 0\npaper_mode = yes\n"),
                      ContainsSubstring("expected true or false"));
}

TEST_CASE("serialization round trips bit for bit") {
  const ExperimentConfig a = parse_config(kFullConfig);
  const ExperimentConfig b = parse_config(serialize_config(a));
  REQUIRE(a.positions_lambda.size() == b.positions_lambda.size());
  for (std::size_t i = 0; i < a.positions_lambda.size(); ++i)
    REQUIRE(a.positions_lambda[i] == b.positions_lambda[i]);
  REQUIRE(a.dipole == b.dipole);
  REQUIRE(a.gamma == b.gamma);
  REQUIRE(a.paper_mode == b.paper_mode);
  REQUIRE(a.phi1 == b.phi1);
  REQUIRE(a.phi2 == b.phi2);
  REQUIRE(a.phi3_start == b.phi3_start);
  REQUIRE(a.phi3_stop == b.phi3_stop);
  REQUIRE(a.phi3_count == b.phi3_count);
  REQUIRE(a.t3_start == b.t3_start);
  REQUIRE(a.t3_stop == b.t3_stop);
  REQUIRE(a.t3_count == b.t3_count);
  REQUIRE(a.fit_window == b.fit_window);
  REQUIRE(a.fit_samples == b.fit_samples);
  REQUIRE(a.workers == b.workers);
  REQUIRE(a.out_dir == b.out_dir);

  // and the canonical form is a fixed point
  REQUIRE(serialize_config(a) == serialize_config(b));
}

TEST_CASE("config files load from disk or fail with an io error") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dicke3_config_test";
  fs::create_directories(dir);
  const fs::path file = dir / "roundtrip.cfg";
  {
    std::ofstream out(file);
    out << kFullConfig;
  }
  const ExperimentConfig cfg = load_config(file.string());
  REQUIRE(cfg.positions_lambda.size() == 3);
  REQUIRE(cfg.phi2 == pi / 4.4);

  REQUIRE_THROWS_AS(load_config((dir / "missing.cfg").string()), IoError);
  fs::remove_all(dir);
}
