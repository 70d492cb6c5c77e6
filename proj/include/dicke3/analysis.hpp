#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dicke3/common.hpp"
#include "dicke3/correlations.hpp"
#include "dicke3/parallel.hpp"

namespace dicke3 {

// Result of a log-linear decay fit. rate is in units of gamma because traces
// carry gamma*t. A fit degrades to failed status instead of throwing; callers
// record the reason.
struct DecayFit {
  double rate = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string reason;  // empty when ok
};

inline DecayFit failed_fit(std::string reason) {
  DecayFit f;
  f.ok = false;
  f.reason = std::move(reason);
  return f;
}

// Ordinary least squares on ln(value) over n_samples uniform points across
// [0, window_end] of gamma*t, free intercept. The free intercept absorbs the
// curvature a multi-mode decay shows over a short window, so the slope is a
// well defined effective rate. Samples reuse grid nodes when they coincide
// and interpolate linearly otherwise.
inline DecayFit fit_decay_rate(const CorrelationTrace& trace, double window_end = 0.5,
                               int n_samples = 51) {
  if (!(window_end > 0.0)) throw std::invalid_argument("fit_decay_rate: window must be positive");
  if (n_samples < 2) throw std::invalid_argument("fit_decay_rate: need at least 2 samples");
  if (trace.times.size() < 2 || trace.times.size() != trace.values.size())
    return failed_fit("trace too short");
  if (trace.times.front() > 1e-12 || trace.times.back() < window_end - 1e-12)
    return failed_fit("window not covered");

  std::vector<double> ts(static_cast<std::size_t>(n_samples));
  std::vector<double> ys(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double t = window_end * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    auto it = std::lower_bound(trace.times.begin(), trace.times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - trace.times.begin());
    if (hi >= trace.times.size()) hi = trace.times.size() - 1;
    double v;
    if (std::abs(trace.times[hi] - t) <= 1e-12) {
      v = trace.values[hi];
    } else {
      if (hi == 0) hi = 1;
      const std::size_t lo = hi - 1;
      const double u = (t - trace.times[lo]) / (trace.times[hi] - trace.times[lo]);
      v = (1.0 - u) * trace.values[lo] + u * trace.values[hi];
    }
    if (!(v > 0.0)) return failed_fit("nonpositive");
    ts[static_cast<std::size_t>(i)] = t;
    ys[static_cast<std::size_t>(i)] = std::log(v);
  }

  double mean_t = 0.0, mean_y = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    mean_t += ts[static_cast<std::size_t>(i)];
    mean_y += ys[static_cast<std::size_t>(i)];
  }
  mean_t /= n_samples;
  mean_y /= n_samples;
  double s_tt = 0.0, s_ty = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double dt = ts[static_cast<std::size_t>(i)] - mean_t;
    s_tt += dt * dt;
    s_ty += dt * (ys[static_cast<std::size_t>(i)] - mean_y);
  }
  const double slope = s_ty / s_tt;
  const double intercept = mean_y - slope * mean_t;

  double ss = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double r = ys[static_cast<std::size_t>(i)] - (intercept + slope * ts[static_cast<std::size_t>(i)]);
    ss += r * r;
  }

  DecayFit fit;
  fit.rate = -slope;
  fit.intercept = intercept;
  fit.residual = std::sqrt(ss / n_samples);
  fit.ok = true;
  return fit;
}

// Per-direction normalization by the value at time zero. Traces that do not
// start at zero or start below the noise floor are returned raw and flagged.
inline CorrelationTrace normalize_by_initial(const CorrelationTrace& trace) {
  CorrelationTrace out = trace;
  if (trace.times.empty() || trace.times.front() != 0.0 || trace.values.front() <= 1e-12) {
    out.normalizable = false;
    return out;
  }
  const double v0 = trace.values.front();
  for (double& v : out.values) v /= v0;
  out.normalization = CorrelationTrace::Normalization::by_initial_value;
  out.normalizable = true;
  return out;
}

// Directional rate scan: effective rates of the conditional third-photon
// signal and of the plain intensity, against the pair reference rates.
// Directions whose dipole factor square falls below 1e-10 emit no photons and
// are dropped from the scan entirely.
struct RateScan {
  std::vector<double> angles;
  std::vector<DecayFit> fits3;
  std::vector<DecayFit> fits1;
  double reference_rate = 2.0;  // single-atom intensity rate in units of gamma
  double reference_rate_symmetric = std::numeric_limits<double>::quiet_NaN();
  double reference_rate_antisymmetric = std::numeric_limits<double>::quiet_NaN();
};

inline RateScan scan_rates(const AtomEnsemble& ensemble, const std::vector<PairCoupling>& couplings,
                           double phi1, double phi2, const std::vector<double>& angle_grid,
                           double window_end = 0.5, int n_samples = 51, int workers = 0) {
  RateScan scan;
  for (double a : angle_grid) {
    const double s = make_detector(ensemble, a).dipole_factor;
    if (s * s >= 1e-10) scan.angles.push_back(a);
  }

  for (const PairCoupling& c : couplings) {
    if (c.pair.first == 0 && c.pair.second == 1) {
      scan.reference_rate_symmetric = 2.0 * (1.0 + c.delta_gamma / ensemble.gamma);
      scan.reference_rate_antisymmetric = 2.0 * (1.0 - c.delta_gamma / ensemble.gamma);
    }
  }

  const TimeGrid window = TimeGrid::closed(0.0, window_end, n_samples);

  if (ensemble.size() == 3) {
    const std::vector<CorrelationTrace> traces =
        g3_traces(ensemble, couplings, phi1, phi2, scan.angles, window, workers);
    scan.fits3.resize(traces.size());
    parallel_for(traces.size(), workers, [&](std::size_t i) {
      scan.fits3[i] = fit_decay_rate(normalize_by_initial(traces[i]), window_end, n_samples);
    });
  } else {
    scan.fits3.assign(scan.angles.size(), failed_fit("requires 3 atoms"));
  }

  const std::vector<CorrelationTrace> traces1 =
      g1_traces(ensemble, couplings, scan.angles, window, workers);
  scan.fits1.resize(traces1.size());
  parallel_for(traces1.size(), workers, [&](std::size_t i) {
    scan.fits1[i] = fit_decay_rate(normalize_by_initial(traces1[i]), window_end, n_samples);
  });

  return scan;
}

}  // namespace dicke3
