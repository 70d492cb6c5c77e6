#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dicke3/common.hpp"
#include "dicke3/geometry.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;

namespace {

std::string env_or_empty(const char* name) {
  const char* p = std::getenv(name);
  return p ? std::string(p) : std::string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dicke3_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "dicke3_cli_tests";
  fs::create_directories(dir);
  const fs::path of = dir / ("stdout." + std::to_string(counter));
  const fs::path ef = dir / ("stderr." + std::to_string(counter));
  ++counter;
  const std::string cmd = "\"" + env_or_empty("DICKE3_BIN") + "\" " + args + " > \"" +
                          of.string() + "\" 2> \"" + ef.string() + "\"";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
  r.out = slurp(of);
  r.err = slurp(ef);
  return r;
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++n;
  return n;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

double to_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "case.cfg";
  std::ofstream out(p, std::ios::binary);
  out << body;
  return p;
}

const char* kSmallConfig =
    "r1_x_lambda = 0\n"
    "r2_x_lambda = 1/3\n"
    "r3_x_lambda = 4\n"
    "dipole_x = 1\n"
    "phi1_rad = 2pi/3\n"
    "phi2_rad = pi/4.4\n"
    "phi3_count = 24\n"
    "t3_stop_gamma = 2\n"
    "t3_count = 21\n";

}  // namespace

TEST_CASE("the couplings report prints the near pair and flags dropped ones") {
  REQUIRE_FALSE(env_or_empty("DICKE3_BIN").empty());
  REQUIRE_FALSE(env_or_empty("DICKE3_CFG").empty());

  const RunResult r = run_cli("couplings --config \"" + env_or_empty("DICKE3_CFG") + "\"");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("pair (1,2)") != std::string::npos);
  REQUIRE(r.out.find("6.2475680711095") != std::string::npos);   // delta_gamma of the near pair
  REQUIRE(r.out.find("Gamma_s/gamma=3.2495136142219") != std::string::npos);
  REQUIRE(count_occurrences(r.out, "status=zeroed") == 2);
  REQUIRE(count_occurrences(r.out, "status=active") == 1);
}

TEST_CASE("full coupling mode keeps every pair active") {
  const RunResult r = run_cli("couplings --config \"" + env_or_empty("DICKE3_CFG") +
                              "\" --paper-mode false");
  REQUIRE(r.code == 0);
  REQUIRE(count_occurrences(r.out, "status=active") == 3);
  REQUIRE(r.out.find("zeroed") == std::string::npos);
}

TEST_CASE("bad invocations exit with the config code") {
  REQUIRE(run_cli("couplings").code == 2);
  REQUIRE(run_cli("").code == 2);
  REQUIRE(run_cli("frobnicate --config \"" + env_or_empty("DICKE3_CFG") + "\"").code == 2);
  REQUIRE(run_cli("--help").code == 0);

  const fs::path dir = scratch_dir("badcfg");
  const fs::path bad = write_config(dir, "r1_x_lambda = 0\nphii_rad = 1\n");
  REQUIRE(run_cli("couplings --config \"" + bad.string() + "\"").code == 2);

  const fs::path zero = dir / "zero.cfg";
  {
    std::ofstream out(zero);
    out << "r1_x_lambda = 0\nt3_count = 0\n";
  }
  REQUIRE(run_cli("g3-map --config \"" + zero.string() + "\"").code == 2);
}

TEST_CASE("missing files and unwritable directories exit with the io code") {
  const fs::path dir = scratch_dir("io");
  REQUIRE(run_cli("couplings --config \"" + (dir / "missing.cfg").string() + "\"").code == 3);

  // a path through a regular file cannot become a directory
  const fs::path cfg = env_or_empty("DICKE3_CFG");
  const std::string blocked = (cfg / "sub").string();
  const RunResult r =
      run_cli("g1-pattern --config \"" + cfg.string() + "\" --out \"" + blocked + "\"");
  REQUIRE(r.code == 3);
}

TEST_CASE("the radiation pattern table has one row per direction") {
  const fs::path dir = scratch_dir("g1");
  const RunResult r = run_cli("g1-pattern --config \"" + env_or_empty("DICKE3_CFG") +
                              "\" --out \"" + dir.string() + "\"");
  REQUIRE(r.code == 0);
  REQUIRE(fs::exists(dir / "g1_pattern.csv"));
  REQUIRE(fs::exists(dir / "g1_pattern_manifest.json"));
  REQUIRE(slurp(dir / "g1_pattern_manifest.json").find("\"version\": \"0.1.0\"") !=
          std::string::npos);

  const std::vector<std::string> lines = split_lines(slurp(dir / "g1_pattern.csv"));
  REQUIRE(lines.size() == 361);
  REQUIRE(lines[0] == "phi,g1");

  // the fully excited trio radiates 3 sin^2(phi) at t = 0, couplings or not
  double max_v = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    REQUIRE(fields.size() == 2);
    const double phi = to_double(fields[0]);
    const double v = to_double(fields[1]);
    REQUIRE_THAT(v, WithinAbs(3.0 * std::sin(phi) * std::sin(phi), 1e-9));
    max_v = std::max(max_v, v);
  }
  REQUIRE_THAT(max_v, WithinAbs(3.0, 1e-9));
  REQUIRE(to_double(split_fields(lines[1])[1]) == 0.0);  // dead direction along the dipole
}

TEST_CASE("map output is byte identical across workers and reruns") {
  const fs::path dir = scratch_dir("det");
  const fs::path cfg = write_config(dir, kSmallConfig);
  const fs::path a = dir / "a", b = dir / "b", c = dir / "c";

  REQUIRE(run_cli("g3-map --config \"" + cfg.string() + "\" --out \"" + a.string() +
                  "\" --workers 1")
              .code == 0);
  REQUIRE(run_cli("g3-map --config \"" + cfg.string() + "\" --out \"" + b.string() +
                  "\" --workers 4")
              .code == 0);
  REQUIRE(run_cli("g3-map --config \"" + cfg.string() + "\" --out \"" + c.string() +
                  "\" --workers 4")
              .code == 0);

  const std::string map_a = slurp(a / "g3_map.csv");
  REQUIRE_FALSE(map_a.empty());
  REQUIRE(map_a == slurp(b / "g3_map.csv"));
  REQUIRE(map_a == slurp(c / "g3_map.csv"));

  // manifests embed the effective config, so only the out_dir line may differ
  auto strip_out_dir = [](const std::string& text) {
    std::string kept;
    for (const std::string& line : split_lines(text))
      if (line.find("\"out_dir\"") == std::string::npos) kept += line + "\n";
    return kept;
  };
  REQUIRE(strip_out_dir(slurp(b / "g3_map_manifest.json")) ==
          strip_out_dir(slurp(c / "g3_map_manifest.json")));

  // phi-major ordering with the time grid cycling fastest
  const std::vector<std::string> lines = split_lines(map_a);
  REQUIRE(lines.size() == 1 + 24 * 21);
  REQUIRE(lines[0] == "phi3,t3,g3_raw,g3_normalized");
  for (int i = 1; i <= 21; ++i) {
    const auto fields = split_fields(lines[static_cast<std::size_t>(i)]);
    REQUIRE(to_double(fields[0]) == 0.0);
    REQUIRE_THAT(to_double(fields[1]), WithinAbs(0.1 * (i - 1), 1e-12));
    REQUIRE(fields[3] == "nan");  // no emission along the dipole, nothing to normalize by
  }
  REQUIRE(to_double(split_fields(lines[22])[0]) > 0.0);
}

TEST_CASE("the full map decays near the symmetric pair rate along the bright lobe") {
  const fs::path dir = scratch_dir("map");
  const RunResult r = run_cli("g3-map --config \"" + env_or_empty("DICKE3_CFG") + "\" --out \"" +
                              dir.string() + "\"");
  REQUIRE(r.code == 0);

  const std::vector<std::string> lines = split_lines(slurp(dir / "g3_map.csv"));
  REQUIRE(lines.size() == 1 + 360 * 201);
  REQUIRE(lines[0] == "phi3,t3,g3_raw,g3_normalized");

  const double target_phi = (dicke3::two_pi / 360.0) * 89.0;  // grid angle nearest 1.56
  double g3n = -1.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    REQUIRE(to_double(fields[2]) >= -1e-12);
    if (std::abs(to_double(fields[0]) - target_phi) < 1e-12 &&
        std::abs(to_double(fields[1]) - 1.0) < 1e-12)
      g3n = to_double(fields[3]);
  }
  REQUIRE(g3n > 0.0);
  const double expected = std::exp(-3.249513614221911);
  REQUIRE(std::abs(g3n - expected) <= 0.15 * expected);
}

TEST_CASE("rate scan tables carry fits, references, and failure statuses") {
  const fs::path dir = scratch_dir("scan");
  const fs::path cfg = write_config(dir, kSmallConfig);
  const RunResult r =
      run_cli("rate-scan --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\"");
  REQUIRE(r.code == 0);

  const std::vector<std::string> lines = split_lines(slurp(dir / "rate_scan.csv"));
  REQUIRE(lines[0] == "phi3,gamma_eff_3,gamma_eff_1,residual_3,residual_1,status");
  REQUIRE(lines.size() == 1 + 22);  // 24 directions minus the two dead ones
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    REQUIRE(fields.size() == 6);
    REQUIRE(fields[5] == "ok");
    REQUIRE(std::isfinite(to_double(fields[1])));
    REQUIRE(std::isfinite(to_double(fields[2])));
  }

  const std::string manifest = slurp(dir / "rate_scan_manifest.json");
  REQUIRE(manifest.find("gamma_symmetric_over_gamma") != std::string::npos);
  REQUIRE(manifest.find("3.249513614221911") != std::string::npos);
  REQUIRE(manifest.find("0.750486385778089") != std::string::npos);

  // a lone atom has no conditional signal but still an intensity rate
  const fs::path solo_dir = scratch_dir("solo");
  const fs::path solo = solo_dir / "solo.cfg";
  {
    std::ofstream out(solo);
    out << "r1_x_lambda = 0\nphi3_count = 8\n";
  }
  const RunResult rs =
      run_cli("rate-scan --config \"" + solo.string() + "\" --out \"" + solo_dir.string() + "\"");
  REQUIRE(rs.code == 0);
  const std::vector<std::string> solo_lines = split_lines(slurp(solo_dir / "rate_scan.csv"));
  REQUIRE(solo_lines.size() > 1);
  for (std::size_t i = 1; i < solo_lines.size(); ++i) {
    const auto fields = split_fields(solo_lines[i]);
    REQUIRE(fields[1] == "nan");
    REQUIRE_THAT(to_double(fields[2]), WithinAbs(2.0, 1e-9));
    REQUIRE(fields[5] == "g3_failed(requires 3 atoms)");
  }
}
