#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dicke3/geometry.hpp"

namespace dicke3 {

// Coherent (delta_omega) and dissipative (delta_gamma) parts of the
// vacuum-mediated interaction of one atom pair. Both are rates in the same
// units as gamma; with the shipped gamma = 1 they read directly in units of
// gamma. The pair indices are 0-based; reporting layers print them 1-based.
struct PairCoupling {
  double delta_omega = 0.0;
  double delta_gamma = 0.0;
  std::pair<std::size_t, std::size_t> pair{0, 1};
  double gamma = 1.0;   // single-atom rate the couplings were built against
  double k0_r = 0.0;    // dimensionless pair separation
  double psi = 0.0;     // angle between dipole axis and the pair axis
  bool zeroed = false;  // set when the far-atom reduction drops this pair
};

// Pair coupling kernel: delta_omega - i*delta_gamma =
//   (3/2) gamma e^{-i k0 R} [ (1-cos^2 psi)/(k0 R)
//                             - (1-3cos^2 psi)( i/(k0 R)^2 + 1/(k0 R)^3 ) ]
// with psi the angle between the dipole axis and the pair separation.
// The sign convention is pinned by the superradiant pair test: at
// k0 R = 2pi/3, psi = 0 the symmetric state must decay faster than a single
// atom (delta_gamma > 0).
inline PairCoupling dipole_coupling(double k0_r, double psi, double gamma) {
  if (!(k0_r > 0.0)) throw std::domain_error("dipole_coupling: separation must be positive");
  const double c2 = std::cos(psi) * std::cos(psi);
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> bracket =
      (1.0 - c2) / k0_r - (1.0 - 3.0 * c2) * (i / (k0_r * k0_r) + 1.0 / (k0_r * k0_r * k0_r));
  const std::complex<double> w = 1.5 * gamma * std::exp(-i * k0_r) * bracket;
  PairCoupling out;
  out.delta_omega = w.real();
  out.delta_gamma = -w.imag();
  out.gamma = gamma;
  out.k0_r = k0_r;
  out.psi = psi;
  return out;
}

// Couplings for every unordered pair of the ensemble, psi taken from the
// actual geometry. With paper_mode the pairs touching the third atom are
// returned with zero strength and flagged, which reduces the dynamics to the
// interacting near pair plus an independent far atom.
inline std::vector<PairCoupling> couplings_for(const AtomEnsemble& ensemble, bool paper_mode) {
  std::vector<PairCoupling> out;
  const std::size_t n = ensemble.size();
  for (std::size_t mu = 0; mu + 1 < n; ++mu) {
    for (std::size_t nu = mu + 1; nu < n; ++nu) {
      const Eigen::Vector2d r = ensemble.positions[nu] - ensemble.positions[mu];
      const double dist = r.norm();
      if (!(dist > 0.0)) throw std::domain_error("couplings_for: coincident atoms have no pair coupling");
      const double cospsi = std::clamp(ensemble.dipole_axis.dot(r) / dist, -1.0, 1.0);
      const double psi = std::acos(cospsi);
      PairCoupling pc = dipole_coupling(AtomEnsemble::k0 * dist, psi, ensemble.gamma);
      pc.pair = {mu, nu};
      if (paper_mode && nu == 2) {
        pc.delta_omega = 0.0;
        pc.delta_gamma = 0.0;
        pc.zeroed = true;
      }
      out.push_back(pc);
    }
  }
  return out;
}

}  // namespace dicke3
