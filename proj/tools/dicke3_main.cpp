#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "dicke3/dicke3.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  int workers = -1;
  bool paper_mode = true;
};

dicke3::ExperimentConfig effective_config(const CliOptions& opt, const CLI::App& app) {
  dicke3::ExperimentConfig cfg = dicke3::load_config(opt.config_path);
  if (app.count("--out") > 0) cfg.out_dir = opt.out_dir;
  if (app.count("--workers") > 0) cfg.workers = opt.workers;
  if (app.count("--paper-mode") > 0) cfg.paper_mode = opt.paper_mode;
  dicke3::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-atom collective emission maps and rate scans"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOptions opt;
  app.add_option("--config", opt.config_path, "path to the experiment config file")->required();
  app.add_option("--out", opt.out_dir, "output directory (overrides config out_dir)");
  app.add_option("--workers", opt.workers, "worker thread count, 0 = all cores (overrides config)");
  app.add_option("--paper-mode", opt.paper_mode,
                 "keep dipole-dipole coupling only within the near pair (overrides config)");

  CLI::App* cmd_couplings = app.add_subcommand("couplings", "print per-pair coupling rates");
  CLI::App* cmd_g3_map = app.add_subcommand("g3-map", "conditional third-photon map over (phi3, t3)");
  CLI::App* cmd_rate_scan = app.add_subcommand("rate-scan", "directional effective decay rate scan");
  CLI::App* cmd_g1_pattern = app.add_subcommand("g1-pattern", "t=0 radiation pattern table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const dicke3::ExperimentConfig cfg = effective_config(opt, app);
    if (cmd_couplings->parsed()) {
      dicke3::run_couplings(cfg, std::cout);
    } else if (cmd_g3_map->parsed()) {
      dicke3::run_g3_map(cfg);
    } else if (cmd_rate_scan->parsed()) {
      dicke3::run_rate_scan(cfg);
    } else if (cmd_g1_pattern->parsed()) {
      dicke3::run_g1_pattern(cfg);
    }
    return kExitOk;
  } catch (const dicke3::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dicke3::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const dicke3::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
