#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dicke3 {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Up to three two-level atoms in the xy plane. Lengths are in units of the
// transition wavelength, so the wavenumber is fixed at 2*pi. gamma is the
// amplitude decay rate; the intensity of a single atom decays at 2*gamma.
struct AtomEnsemble {
  std::vector<Eigen::Vector2d> positions;
  Eigen::Vector2d dipole_axis;
  double gamma;

  static constexpr double k0 = two_pi;

  AtomEnsemble(std::vector<Eigen::Vector2d> pos, const Eigen::Vector2d& dipole, double rate)
      : positions(std::move(pos)), dipole_axis(dipole), gamma(rate) {
    if (positions.empty() || positions.size() > 3)
      throw std::invalid_argument("AtomEnsemble: needs 1 to 3 atoms");
    if (std::abs(dipole_axis.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("AtomEnsemble: dipole_axis must be a unit vector");
    if (!(gamma > 0.0)) throw std::invalid_argument("AtomEnsemble: gamma must be positive");
  }

  std::size_t size() const { return positions.size(); }
};

inline AtomEnsemble translated(const AtomEnsemble& ensemble, const Eigen::Vector2d& shift) {
  std::vector<Eigen::Vector2d> pos;
  pos.reserve(ensemble.positions.size());
  for (const auto& p : ensemble.positions) pos.push_back(p + shift);
  return AtomEnsemble(std::move(pos), ensemble.dipole_axis, ensemble.gamma);
}

// Optical path phase, relative to the origin, of a photon from atom
// `atom_index` reaching a far-field detector at azimuth `angle`. The input
// angle is reduced modulo 2*pi so the map is periodic for large arguments;
// the returned phase itself is not reduced.
inline double geometric_phase(const AtomEnsemble& ensemble, std::size_t atom_index, double angle) {
  if (atom_index >= ensemble.size()) throw std::out_of_range("geometric_phase: atom index out of range");
  const double phi = std::remainder(angle, two_pi);
  const Eigen::Vector2d& r = ensemble.positions[atom_index];
  return -AtomEnsemble::k0 * (r.x() * std::cos(phi) + r.y() * std::sin(phi));
}

// One far-field detection direction with everything the correlation kernels
// need: the per-atom path phases and the dipole projection of the ray.
struct DetectorRay {
  double angle = 0.0;
  std::vector<double> phases;
  double dipole_factor = 0.0;  // sine of the angle between ray and dipole axis, signed
};

inline DetectorRay make_detector(const AtomEnsemble& ensemble, double angle) {
  DetectorRay det;
  det.angle = angle;
  det.phases.reserve(ensemble.size());
  for (std::size_t mu = 0; mu < ensemble.size(); ++mu)
    det.phases.push_back(geometric_phase(ensemble, mu, angle));
  const double phi = std::remainder(angle, two_pi);
  // z component of dipole_axis x r_hat; only its square enters any observable
  det.dipole_factor =
      ensemble.dipole_axis.x() * std::sin(phi) - ensemble.dipole_axis.y() * std::cos(phi);
  return det;
}

}  // namespace dicke3
