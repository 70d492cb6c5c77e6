#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <complex>
#include <stdexcept>
#include <vector>

namespace dicke3 {

// Tensor-product space of 1 to 3 two-level atoms. Atom 1 is the slowest
// (leftmost) factor; within one atom index 0 is |e> and index 1 is |g>.
class HilbertSpace {
 public:
  explicit HilbertSpace(int n_atoms) : n_(n_atoms) {
    if (n_atoms < 1 || n_atoms > 3) throw std::invalid_argument("HilbertSpace: 1 to 3 atoms");
  }

  int n_atoms() const { return n_; }
  int dim() const { return 1 << n_; }

  // |g><e| acting on one atom, identity elsewhere
  Eigen::MatrixXcd lower(int atom) const {
    Eigen::Matrix2cd sm = Eigen::Matrix2cd::Zero();
    sm(1, 0) = 1.0;
    return embed(sm, atom);
  }
  Eigen::MatrixXcd raise(int atom) const { return lower(atom).adjoint(); }
  Eigen::MatrixXcd excited_population(int atom) const { return raise(atom) * lower(atom); }

  // product basis ket from per-atom levels, 0 = e and 1 = g
  Eigen::VectorXcd product_ket(const std::vector<int>& levels) const {
    if (static_cast<int>(levels.size()) != n_)
      throw std::invalid_argument("product_ket: one level per atom required");
    int idx = 0;
    for (int level : levels) {
      if (level != 0 && level != 1) throw std::invalid_argument("product_ket: levels are 0 or 1");
      idx = (idx << 1) | level;
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
    v(idx) = 1.0;
    return v;
  }

 private:
  Eigen::MatrixXcd embed(const Eigen::Matrix2cd& single, int atom) const {
    if (atom < 0 || atom >= n_) throw std::out_of_range("HilbertSpace: atom index out of range");
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int k = 0; k < n_; ++k) {
      const Eigen::MatrixXcd factor =
          (k == atom) ? Eigen::MatrixXcd(single) : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity());
      out = Eigen::kroneckerProduct(out, factor).eval();
    }
    return out;
  }

  int n_;
};

inline Eigen::VectorXcd fully_excited(const HilbertSpace& h) {
  return h.product_ket(std::vector<int>(static_cast<std::size_t>(h.n_atoms()), 0));
}
inline Eigen::VectorXcd all_ground(const HilbertSpace& h) {
  return h.product_ket(std::vector<int>(static_cast<std::size_t>(h.n_atoms()), 1));
}

// One shared excitation between atoms 1 and 2. For a 3-atom space the third
// atom's level is appended (0 = e, 1 = g).
inline Eigen::VectorXcd pair_symmetric(const HilbertSpace& h, int third_level = 1) {
  if (h.n_atoms() < 2) throw std::invalid_argument("pair_symmetric: needs at least 2 atoms");
  std::vector<int> eg{0, 1}, ge{1, 0};
  if (h.n_atoms() == 3) {
    eg.push_back(third_level);
    ge.push_back(third_level);
  }
  return (h.product_ket(eg) + h.product_ket(ge)) / std::sqrt(2.0);
}
inline Eigen::VectorXcd pair_antisymmetric(const HilbertSpace& h, int third_level = 1) {
  if (h.n_atoms() < 2) throw std::invalid_argument("pair_antisymmetric: needs at least 2 atoms");
  std::vector<int> eg{0, 1}, ge{1, 0};
  if (h.n_atoms() == 3) {
    eg.push_back(third_level);
    ge.push_back(third_level);
  }
  return (h.product_ket(eg) - h.product_ket(ge)) / std::sqrt(2.0);
}

// Density operator, possibly unnormalized: conditional states keep the raw
// detection weight. Construction enforces hermiticity and positivity within
// numerical tolerance and records the trace for later bookkeeping.
class DensityOperator {
 public:
  explicit DensityOperator(Eigen::MatrixXcd m) : matrix(std::move(m)) {
    const auto r = matrix.rows();
    if (r != matrix.cols() || (r != 2 && r != 4 && r != 8))
      throw std::invalid_argument("DensityOperator: matrix must be square with dim 2, 4 or 8");
    const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) throw std::invalid_argument("DensityOperator: not hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (matrix + matrix.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw std::invalid_argument("DensityOperator: negative eigenvalue");
    trace_at_birth = matrix.trace().real();
    if (trace_at_birth < -1e-10) throw std::invalid_argument("DensityOperator: negative trace");
  }

  static DensityOperator pure(const Eigen::VectorXcd& ket) {
    return DensityOperator(ket * ket.adjoint());
  }

  Eigen::MatrixXcd matrix;
  double trace_at_birth = 0.0;
};

inline std::complex<double> expectation(const DensityOperator& rho, const Eigen::MatrixXcd& observable) {
  if (observable.rows() != rho.matrix.rows() || observable.cols() != rho.matrix.cols())
    throw std::invalid_argument("expectation: dimension mismatch");
  return (observable * rho.matrix).trace();
}

}  // namespace dicke3
