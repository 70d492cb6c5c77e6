#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <stdexcept>
#include <vector>

#include "dicke3/coupling.hpp"
#include "dicke3/geometry.hpp"
#include "dicke3/hilbert.hpp"

namespace dicke3 {

// Column stacking: vec(A rho B) = (B^T kron A) vec(rho). Eigen stores
// column-major, so Map gives the stacking for free.
inline Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}
inline Eigen::MatrixXcd devectorize(const Eigen::VectorXcd& v, int d) {
  if (v.size() != static_cast<Eigen::Index>(d) * d)
    throw std::invalid_argument("devectorize: size mismatch");
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

// Generator of the dissipative three-atom master equation as a dense matrix
// on column-stacked density operators:
//   L(rho) = i sum_{mu != nu} dOmega [S+_mu S-_nu, rho]
//            - sum_mu gamma (S+S- rho - 2 S- rho S+ + rho S+S-)
//            - sum_{mu != nu} dGamma (S+_mu S-_nu rho - 2 S-_nu rho S+_mu + rho S+_mu S-_nu)
// The free precession term is dropped: everything downstream is a normally
// ordered expectation where it cancels, which a property test verifies.
struct Liouvillian {
  Eigen::MatrixXcd superoperator;
  std::vector<PairCoupling> couplings;
  int dim = 0;
  double gamma = 0.0;
};

inline Liouvillian build_liouvillian(const AtomEnsemble& ensemble,
                                     const std::vector<PairCoupling>& couplings) {
  const HilbertSpace h(static_cast<int>(ensemble.size()));
  const int d = h.dim();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  const std::complex<double> i(0.0, 1.0);

  auto left = [&](const Eigen::MatrixXcd& m) {  // vec(m rho)
    return Eigen::kroneckerProduct(id, m).eval();
  };
  auto right = [&](const Eigen::MatrixXcd& m) {  // vec(rho m)
    return Eigen::kroneckerProduct(m.transpose(), id).eval();
  };
  auto sandwich = [&](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {  // vec(a rho b)
    return Eigen::kroneckerProduct(b.transpose(), a).eval();
  };

  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(d * d, d * d);

  for (int mu = 0; mu < h.n_atoms(); ++mu) {
    const Eigen::MatrixXcd sm = h.lower(mu);
    const Eigen::MatrixXcd sp = h.raise(mu);
    const Eigen::MatrixXcd num = sp * sm;
    L -= ensemble.gamma * (left(num) + right(num) - 2.0 * sandwich(sm, sp));
  }

  for (const PairCoupling& c : couplings) {
    if (c.pair.first >= ensemble.size() || c.pair.second >= ensemble.size() ||
        c.pair.first == c.pair.second)
      throw std::out_of_range("build_liouvillian: coupling pair out of range");
    const std::size_t ordered[2][2] = {{c.pair.first, c.pair.second},
                                       {c.pair.second, c.pair.first}};
    for (const auto& ab : ordered) {
      const Eigen::MatrixXcd sp_a = h.raise(static_cast<int>(ab[0]));
      const Eigen::MatrixXcd sm_b = h.lower(static_cast<int>(ab[1]));
      const Eigen::MatrixXcd k = sp_a * sm_b;
      L += i * c.delta_omega * (left(k) - right(k));
      L -= c.delta_gamma * (left(k) + right(k) - 2.0 * sandwich(sm_b, sp_a));
    }
  }

  return Liouvillian{std::move(L), couplings, d, ensemble.gamma};
}

// Exact propagation by scaling-and-squaring matrix exponential of the dense
// superoperator. No integrator tolerance enters the result.
inline DensityOperator evolve(const Liouvillian& liouville, const DensityOperator& rho, double t) {
  if (t < 0.0) throw std::domain_error("evolve: negative time");
  if (rho.matrix.rows() != liouville.dim) throw std::invalid_argument("evolve: dimension mismatch");
  const Eigen::MatrixXcd propagator = (liouville.superoperator * t).exp();
  const Eigen::VectorXcd v = propagator * vectorize(rho.matrix);
  return DensityOperator(devectorize(v, liouville.dim));
}

// Cached short-step propagator for sampling many times on a uniform grid.
struct Propagator {
  Eigen::MatrixXcd matrix;
  double dt = 0.0;
};

inline Propagator make_propagator(const Liouvillian& liouville, double dt) {
  if (dt < 0.0) throw std::domain_error("make_propagator: negative step");
  return Propagator{(liouville.superoperator * dt).exp(), dt};
}

// Density matrices on a uniform raw-time grid t_start + j*dt, j < count,
// stepping one cached propagator. Pointwise exponentials agree with this
// stepping far below every tolerance used by the correlation pipeline; the
// acceptance gate cross-checks that.
inline std::vector<Eigen::MatrixXcd> evolve_on_grid(const Liouvillian& liouville,
                                                    const Eigen::MatrixXcd& rho0, double t_start,
                                                    double dt, int count) {
  if (count < 1) throw std::invalid_argument("evolve_on_grid: empty grid");
  if (t_start < 0.0) throw std::domain_error("evolve_on_grid: negative start");
  if (rho0.rows() != liouville.dim) throw std::invalid_argument("evolve_on_grid: dimension mismatch");
  Eigen::VectorXcd v = vectorize(rho0);
  if (t_start > 0.0) v = ((liouville.superoperator * t_start).exp() * v).eval();
  const Propagator step = make_propagator(liouville, dt);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    out.push_back(devectorize(v, liouville.dim));
    if (j + 1 < count) v = (step.matrix * v).eval();
  }
  return out;
}

}  // namespace dicke3
