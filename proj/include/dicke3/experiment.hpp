#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dicke3/analysis.hpp"
#include "dicke3/common.hpp"
#include "dicke3/config.hpp"
#include "dicke3/correlations.hpp"
#include "dicke3/coupling.hpp"
#include "dicke3/geometry.hpp"

namespace dicke3 {

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

inline void write_text_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file '" + path.string() + "'");
  out << body;
  out.flush();
  if (!out) throw IoError("failed writing output file '" + path.string() + "'");
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  for (std::size_t k = 0; k < cfg.positions_lambda.size(); ++k) {
    j["r" + std::to_string(k + 1) + "_x_lambda"] = cfg.positions_lambda[k].x();
    j["r" + std::to_string(k + 1) + "_y_lambda"] = cfg.positions_lambda[k].y();
  }
  j["dipole_x"] = cfg.dipole.x();
  j["dipole_y"] = cfg.dipole.y();
  j["gamma_per_s"] = cfg.gamma;
  j["paper_mode"] = cfg.paper_mode;
  j["phi1_rad"] = cfg.phi1;
  j["phi2_rad"] = cfg.phi2;
  j["phi3_start_rad"] = cfg.phi3_start;
  j["phi3_stop_rad"] = cfg.phi3_stop;
  j["phi3_count"] = cfg.phi3_count;
  j["t3_start_gamma"] = cfg.t3_start;
  j["t3_stop_gamma"] = cfg.t3_stop;
  j["t3_count"] = cfg.t3_count;
  j["fit_window_gamma"] = cfg.fit_window;
  j["fit_samples"] = cfg.fit_samples;
  j["workers"] = cfg.workers;
  j["out_dir"] = cfg.out_dir;
  return j;
}

inline nlohmann::json couplings_json(const std::vector<PairCoupling>& couplings, double gamma) {
  nlohmann::json arr = nlohmann::json::array();
  for (const PairCoupling& c : couplings) {
    nlohmann::json j;
    j["pair"] = {c.pair.first + 1, c.pair.second + 1};
    j["delta_omega_over_gamma"] = c.delta_omega / gamma;
    j["delta_gamma_over_gamma"] = c.delta_gamma / gamma;
    j["k0_r"] = c.k0_r;
    j["psi_rad"] = c.psi;
    j["zeroed"] = c.zeroed;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline nlohmann::json manifest_json(const ExperimentConfig& cfg,
                                    const std::vector<PairCoupling>& couplings) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["config"] = config_json(cfg);
  j["couplings"] = couplings_json(couplings, cfg.gamma);
  return j;
}

inline void require_three_atoms(const ExperimentConfig& cfg, const char* what) {
  if (cfg.positions_lambda.size() != 3)
    throw ConfigError("field 'r3_x_lambda': " + std::string(what) + " requires exactly 3 atoms");
}

}  // namespace detail

// Per-pair coupling report. Values are the ones the dynamics actually uses,
// so pairs dropped by paper_mode print as zero with a marker.
inline void run_couplings(const ExperimentConfig& cfg, std::ostream& out) {
  validate_config(cfg);
  const AtomEnsemble ensemble = cfg.ensemble();
  const std::vector<PairCoupling> couplings = couplings_for(ensemble, cfg.paper_mode);
  out << "# pair couplings, rates in units of gamma\n";
  for (const PairCoupling& c : couplings) {
    const double g = ensemble.gamma;
    out << "pair (" << c.pair.first + 1 << "," << c.pair.second + 1 << ")"
        << " k0R=" << fmt17(c.k0_r) << " psi_rad=" << fmt17(c.psi)
        << " delta_omega/gamma=" << fmt17(c.delta_omega / g)
        << " delta_gamma/gamma=" << fmt17(c.delta_gamma / g)
        << " Gamma_s/gamma=" << fmt17(2.0 * (1.0 + c.delta_gamma / g))
        << " Gamma_a/gamma=" << fmt17(2.0 * (1.0 - c.delta_gamma / g))
        << " status=" << (c.zeroed ? "zeroed" : "active") << "\n";
  }
}

// Conditional third-photon map over the (phi3, t3) grid. Writes g3_map.csv
// (long format, phi3-major row order) and a manifest. The normalized column
// divides each direction's trace by its own t=0 value; directions that start
// at zero signal, or grids that do not start at t=0, get nan there while the
// raw column stays meaningful.
inline void run_g3_map(const ExperimentConfig& cfg) {
  validate_config(cfg);
  detail::require_three_atoms(cfg, "g3 map");
  const AtomEnsemble ensemble = cfg.ensemble();
  const std::vector<PairCoupling> couplings = couplings_for(ensemble, cfg.paper_mode);
  const std::vector<double> angles = cfg.phi3_grid();
  const TimeGrid grid = cfg.t3_grid();

  const std::vector<CorrelationTrace> traces =
      g3_traces(ensemble, couplings, cfg.phi1, cfg.phi2, angles, grid, cfg.workers);

  std::string csv;
  csv.reserve(traces.size() * static_cast<std::size_t>(grid.count) * 100 + 64);
  csv += "phi3,t3,g3_raw,g3_normalized\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const CorrelationTrace& tr : traces) {
    const CorrelationTrace norm = normalize_by_initial(tr);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const double raw = tr.values[i];
      if (!std::isfinite(raw))
        throw NumericalError("non-finite g3 at phi3=" + fmt17(tr.direction) +
                             ", t3=" + fmt17(tr.times[i]));
      const double normalized = norm.normalizable ? norm.values[i] : nan;
      csv += fmt17(tr.direction);
      csv += ',';
      csv += fmt17(tr.times[i]);
      csv += ',';
      csv += fmt17(raw);
      csv += ',';
      csv += fmt17(normalized);
      csv += '\n';
    }
  }

  const std::filesystem::path dir(cfg.out_dir);
  detail::ensure_dir(dir);
  detail::write_text_file(dir / "g3_map.csv", csv);
  detail::write_text_file(dir / "g3_map_manifest.json",
                          detail::manifest_json(cfg, couplings).dump(2) + "\n");
}

// Directional decay-rate scan. One row per scanned direction; directions with
// no dipole emission are dropped by the scan itself. Failed fits keep their
// row with nan rates and a status explaining which side failed and why.
inline void run_rate_scan(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const AtomEnsemble ensemble = cfg.ensemble();
  const std::vector<PairCoupling> couplings = couplings_for(ensemble, cfg.paper_mode);

  const RateScan scan = scan_rates(ensemble, couplings, cfg.phi1, cfg.phi2, cfg.phi3_grid(),
                                   cfg.fit_window, cfg.fit_samples, cfg.workers);

  std::string csv = "phi3,gamma_eff_3,gamma_eff_1,residual_3,residual_1,status\n";
  for (std::size_t i = 0; i < scan.angles.size(); ++i) {
    const DecayFit& f3 = scan.fits3[i];
    const DecayFit& f1 = scan.fits1[i];
    std::string status;
    if (f3.ok && f1.ok) {
      status = "ok";
    } else {
      if (!f3.ok) status += "g3_failed(" + f3.reason + ")";
      if (!f1.ok) {
        if (!status.empty()) status += ";";
        status += "g1_failed(" + f1.reason + ")";
      }
    }
    csv += fmt17(scan.angles[i]);
    csv += ',';
    csv += fmt17(f3.rate);
    csv += ',';
    csv += fmt17(f1.rate);
    csv += ',';
    csv += fmt17(f3.residual);
    csv += ',';
    csv += fmt17(f1.residual);
    csv += ',';
    csv += status;
    csv += '\n';
  }

  nlohmann::json manifest = detail::manifest_json(cfg, couplings);
  manifest["references"] = {{"gamma_total_over_gamma", scan.reference_rate},
                            {"gamma_symmetric_over_gamma", scan.reference_rate_symmetric},
                            {"gamma_antisymmetric_over_gamma", scan.reference_rate_antisymmetric}};

  const std::filesystem::path dir(cfg.out_dir);
  detail::ensure_dir(dir);
  detail::write_text_file(dir / "rate_scan.csv", csv);
  detail::write_text_file(dir / "rate_scan_manifest.json", manifest.dump(2) + "\n");
}

// Instantaneous radiation pattern of the fully excited ensemble: the
// unconditioned intensity at t=0 over the direction grid.
inline void run_g1_pattern(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const AtomEnsemble ensemble = cfg.ensemble();
  const std::vector<PairCoupling> couplings = couplings_for(ensemble, cfg.paper_mode);
  const std::vector<double> angles = cfg.phi3_grid();
  const TimeGrid origin = TimeGrid::closed(0.0, 0.0, 1);

  const std::vector<CorrelationTrace> traces =
      g1_traces(ensemble, couplings, angles, origin, cfg.workers);

  std::string csv = "phi,g1\n";
  for (const CorrelationTrace& tr : traces) {
    const double v = tr.values.front();
    if (!std::isfinite(v)) throw NumericalError("non-finite g1 at phi=" + fmt17(tr.direction));
    csv += fmt17(tr.direction);
    csv += ',';
    csv += fmt17(v);
    csv += '\n';
  }

  const std::filesystem::path dir(cfg.out_dir);
  detail::ensure_dir(dir);
  detail::write_text_file(dir / "g1_pattern.csv", csv);
  detail::write_text_file(dir / "g1_pattern_manifest.json",
                          detail::manifest_json(cfg, couplings).dump(2) + "\n");
}

}  // namespace dicke3
