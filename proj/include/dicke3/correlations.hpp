#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "dicke3/common.hpp"
#include "dicke3/coupling.hpp"
#include "dicke3/dynamics.hpp"
#include "dicke3/geometry.hpp"
#include "dicke3/hilbert.hpp"
#include "dicke3/parallel.hpp"

namespace dicke3 {

// Amplitudes of the three states reachable after the two conditioning clicks
// from the fully excited trio: far atom still excited (c_Ge), near pair left
// symmetric (c_Sg) or antisymmetric (c_Ag). phi_Sg and phi_Ag are the phases
// relative to c_Ge and are undefined when |c_Ge| vanishes. front_weight
// carries the squared dipole factors of the two conditioning detectors so the
// closed form reproduces raw master-equation values without fitted constants.
struct DetectionCoefficients {
  std::complex<double> c_Ge{0.0, 0.0};
  std::complex<double> c_Sg{0.0, 0.0};
  std::complex<double> c_Ag{0.0, 0.0};
  double phi_Sg = 0.0;
  double phi_Ag = 0.0;
  bool phases_defined = false;
  double front_weight = 1.0;
};

inline DetectionCoefficients detection_coefficients(const AtomEnsemble& ensemble, double phi1,
                                                    double phi2) {
  if (ensemble.size() != 3)
    throw std::invalid_argument("detection_coefficients: requires exactly 3 atoms");
  // phases are taken relative to atom 1, so shift it to the origin first
  const AtomEnsemble at_origin = translated(ensemble, -ensemble.positions[0]);
  const double d21 = geometric_phase(at_origin, 1, phi1);
  const double d22 = geometric_phase(at_origin, 1, phi2);
  const double d31 = geometric_phase(at_origin, 2, phi1);
  const double d32 = geometric_phase(at_origin, 2, phi2);
  auto ei = [](double x) { return std::polar(1.0, x); };
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  DetectionCoefficients out;
  out.c_Ge = ei(d21) + ei(d22);
  out.c_Sg = (ei(d31 + d22) + ei(d21 + d32) + ei(d31) + ei(d32)) * inv_sqrt2;
  out.c_Ag = (ei(d31 + d22) + ei(d21 + d32) - ei(d31) - ei(d32)) * inv_sqrt2;
  if (std::abs(out.c_Ge) > 0.0) {
    out.phases_defined = true;
    out.phi_Sg = std::arg(out.c_Sg / out.c_Ge);
    out.phi_Ag = std::arg(out.c_Ag / out.c_Ge);
  }
  const double s1 = make_detector(ensemble, phi1).dipole_factor;
  const double s2 = make_detector(ensemble, phi2).dipole_factor;
  out.front_weight = (s1 * s2) * (s1 * s2);
  return out;
}

// Closed-form conditional third-photon rate: three decay modes (single-atom,
// symmetric pair, antisymmetric pair) plus their pairwise beats at the
// coherent coupling frequency. Detector phases enter only through differences
// to atom 1, keeping the expression translation invariant. Phases of the
// coefficient ratios are computed from the complex products directly so the
// beat terms stay well defined when individual reference phases are not.
inline double g3_analytical(const DetectionCoefficients& coeffs, const PairCoupling& coupling,
                            const DetectorRay& detector3, double t3) {
  if (t3 < 0.0) throw std::domain_error("g3_analytical: negative time");
  if (detector3.phases.size() != 3)
    throw std::invalid_argument("g3_analytical: detector must cover 3 atoms");

  const double g = coupling.gamma;
  const double dg = coupling.delta_gamma;
  const double dO = coupling.delta_omega;
  const double d23 = detector3.phases[1] - detector3.phases[0];
  const double d33 = detector3.phases[2] - detector3.phases[0];

  const double a_ge = std::abs(coeffs.c_Ge);
  const double a_sg = std::abs(coeffs.c_Sg);
  const double a_ag = std::abs(coeffs.c_Ag);
  const double phi_sg = (a_ge > 0.0 && a_sg > 0.0) ? std::arg(coeffs.c_Sg * std::conj(coeffs.c_Ge)) : 0.0;
  const double phi_ag = (a_ge > 0.0 && a_ag > 0.0) ? std::arg(coeffs.c_Ag * std::conj(coeffs.c_Ge)) : 0.0;
  const double phi_ag_minus_sg =
      (a_sg > 0.0 && a_ag > 0.0) ? std::arg(coeffs.c_Ag * std::conj(coeffs.c_Sg)) : 0.0;

  const double e_single = std::exp(-2.0 * g * t3);
  const double e_sym = std::exp(-2.0 * (g + dg) * t3);
  const double e_asym = std::exp(-2.0 * (g - dg) * t3);
  const double e_single_sym = std::exp(-(2.0 * g + dg) * t3);
  const double e_single_asym = std::exp(-(2.0 * g - dg) * t3);
  const double c = std::cos(0.5 * d23);
  const double s = std::sin(0.5 * d23);
  const double sqrt2 = std::sqrt(2.0);

  const double sum =
      a_ge * a_ge * e_single + 2.0 * a_sg * a_sg * e_sym * c * c +
      2.0 * a_ag * a_ag * e_asym * s * s +
      2.0 * a_sg * a_ag * e_single * std::sin(d23) * std::sin(phi_ag_minus_sg - 2.0 * dO * t3) +
      2.0 * sqrt2 * a_sg * a_ge * e_single_sym * c * std::cos(phi_sg + 0.5 * d23 - d33 + dO * t3) +
      2.0 * sqrt2 * a_ag * a_ge * e_single_asym * s * std::sin(phi_ag + 0.5 * d23 - d33 - dO * t3);

  const double s3 = detector3.dipole_factor;
  return coeffs.front_weight * s3 * s3 * sum;
}

// Positive-frequency far-field operator of one detector: phased sum of the
// atomic lowering operators, weighted by the ray's dipole factor.
inline Eigen::MatrixXcd field_operator(const HilbertSpace& h, const DetectorRay& detector) {
  if (detector.phases.size() != static_cast<std::size_t>(h.n_atoms()))
    throw std::invalid_argument("field_operator: detector does not match atom count");
  Eigen::MatrixXcd e_plus = Eigen::MatrixXcd::Zero(h.dim(), h.dim());
  for (int mu = 0; mu < h.n_atoms(); ++mu)
    e_plus += std::polar(1.0, detector.phases[static_cast<std::size_t>(mu)]) * h.lower(mu);
  return detector.dipole_factor * e_plus;
}

// Unnormalized state after the listed detectors click simultaneously at t=0.
// A zero result is legal: it means no photon amplitude in those directions.
inline DensityOperator conditional_state(const DensityOperator& rho0,
                                         const std::vector<DetectorRay>& detectors) {
  int n = 0;
  for (int k = 1; k <= 3; ++k)
    if ((1 << k) == rho0.matrix.rows()) n = k;
  const HilbertSpace h(n);
  Eigen::MatrixXcd m = rho0.matrix;
  for (const DetectorRay& det : detectors) {
    const Eigen::MatrixXcd e_plus = field_operator(h, det);
    m = e_plus * m * e_plus.adjoint();
  }
  return DensityOperator(std::move(m));
}

// Master-equation path for the conditional third-photon rate: condition the
// fully excited trio on the two clicks, evolve the unnormalized state, then
// take the third detector's intensity expectation.
inline double g3_numerical(const AtomEnsemble& ensemble, const std::vector<PairCoupling>& couplings,
                           double phi1, double phi2, const DetectorRay& detector3, double t3) {
  if (ensemble.size() != 3) throw std::invalid_argument("g3_numerical: requires exactly 3 atoms");
  if (t3 < 0.0) throw std::domain_error("g3_numerical: negative time");
  const HilbertSpace h(3);
  const DensityOperator rho0 = DensityOperator::pure(fully_excited(h));
  const DensityOperator conditioned = conditional_state(
      rho0, {make_detector(ensemble, phi1), make_detector(ensemble, phi2)});
  const Liouvillian liouville = build_liouvillian(ensemble, couplings);
  const DensityOperator evolved = evolve(liouville, conditioned, t3);
  const Eigen::MatrixXcd e3 = field_operator(h, detector3);
  return expectation(evolved, e3.adjoint() * e3).real();
}

// Unconditioned intensity at one detector after free decay from the fully
// excited state.
inline double g1(const AtomEnsemble& ensemble, const std::vector<PairCoupling>& couplings,
                 const DetectorRay& detector, double t) {
  if (t < 0.0) throw std::domain_error("g1: negative time");
  const HilbertSpace h(static_cast<int>(ensemble.size()));
  const DensityOperator rho0 = DensityOperator::pure(fully_excited(h));
  const Liouvillian liouville = build_liouvillian(ensemble, couplings);
  const DensityOperator evolved = evolve(liouville, rho0, t);
  const Eigen::MatrixXcd e_op = field_operator(h, detector);
  return expectation(evolved, e_op.adjoint() * e_op).real();
}

// Sampled correlation values over a time grid for one direction. Times are
// gamma*t, so every trace is dimensionless regardless of the configured rate.
struct CorrelationTrace {
  enum class Normalization { raw, by_initial_value };

  double direction = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  Normalization normalization = Normalization::raw;
  bool normalizable = true;
};

// Batch G3 traces for many third-detector directions over one gamma*t grid.
// The conditioned trajectory is computed once and shared read-only; each
// direction reads it through its own detector operator. Work is partitioned
// over workers but every direction's arithmetic is self-contained, so results
// are identical for any worker count.
inline std::vector<CorrelationTrace> g3_traces(const AtomEnsemble& ensemble,
                                               const std::vector<PairCoupling>& couplings,
                                               double phi1, double phi2,
                                               const std::vector<double>& directions,
                                               const TimeGrid& grid_gamma_t, int workers) {
  if (ensemble.size() != 3) throw std::invalid_argument("g3_traces: requires exactly 3 atoms");
  const HilbertSpace h(3);
  const DensityOperator rho0 = DensityOperator::pure(fully_excited(h));
  const DensityOperator conditioned = conditional_state(
      rho0, {make_detector(ensemble, phi1), make_detector(ensemble, phi2)});
  const Liouvillian liouville = build_liouvillian(ensemble, couplings);
  const std::vector<double> gts = grid_gamma_t.values();
  const std::vector<Eigen::MatrixXcd> trajectory =
      evolve_on_grid(liouville, conditioned.matrix, grid_gamma_t.start / ensemble.gamma,
                     grid_gamma_t.step() / ensemble.gamma, grid_gamma_t.count);

  std::vector<CorrelationTrace> out(directions.size());
  parallel_for(directions.size(), workers, [&](std::size_t i) {
    const DetectorRay det = make_detector(ensemble, directions[i]);
    const Eigen::MatrixXcd e_op = field_operator(h, det);
    const Eigen::MatrixXcd intensity = e_op.adjoint() * e_op;
    CorrelationTrace tr;
    tr.direction = directions[i];
    tr.times = gts;
    tr.values.reserve(trajectory.size());
    for (const Eigen::MatrixXcd& rho : trajectory)
      tr.values.push_back((intensity * rho).trace().real());
    out[i] = std::move(tr);
  });
  return out;
}

// Batch G1 traces from the fully excited state, same sharing scheme.
inline std::vector<CorrelationTrace> g1_traces(const AtomEnsemble& ensemble,
                                               const std::vector<PairCoupling>& couplings,
                                               const std::vector<double>& directions,
                                               const TimeGrid& grid_gamma_t, int workers) {
  const HilbertSpace h(static_cast<int>(ensemble.size()));
  const DensityOperator rho0 = DensityOperator::pure(fully_excited(h));
  const Liouvillian liouville = build_liouvillian(ensemble, couplings);
  const std::vector<double> gts = grid_gamma_t.values();
  const std::vector<Eigen::MatrixXcd> trajectory =
      evolve_on_grid(liouville, rho0.matrix, grid_gamma_t.start / ensemble.gamma,
                     grid_gamma_t.step() / ensemble.gamma, grid_gamma_t.count);

  std::vector<CorrelationTrace> out(directions.size());
  parallel_for(directions.size(), workers, [&](std::size_t i) {
    const DetectorRay det = make_detector(ensemble, directions[i]);
    const Eigen::MatrixXcd e_op = field_operator(h, det);
    const Eigen::MatrixXcd intensity = e_op.adjoint() * e_op;
    CorrelationTrace tr;
    tr.direction = directions[i];
    tr.times = gts;
    tr.values.reserve(trajectory.size());
    for (const Eigen::MatrixXcd& rho : trajectory)
      tr.values.push_back((intensity * rho).trace().real());
    out[i] = std::move(tr);
  });
  return out;
}

}  // namespace dicke3
