#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "gwsteer/numeric.hpp"

namespace gwsteer {

/**
 * @brief Symplectic form in interleaved (x1,p1,...,xN,pN) ordering:
 *        direct sum of N blocks [[0,1],[-1,0]].
 *
 * Satisfies Omega^2 = -I and Omega^T = -Omega.
 */
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) throw std::domain_error("symplectic_form: n_modes must be >= 1");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

/// Smallest eigenvalue of the Hermitian matrix sigma + i*Omega; non-negative
/// (up to tolerance) for bona fide states.
inline double physicality_margin(const Eigen::MatrixXd& sigma) {
  const int n = static_cast<int>(sigma.rows()) / 2;
  const Eigen::MatrixXcd herm =
      sigma.cast<std::complex<double>>() +
      std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/**
 * @brief 2N x 2N real symmetric covariance matrix of an N-mode Gaussian state.
 *
 * Quadrature convention x = a + a^dag, p = (a - a^dag)/i, vacuum variance 1,
 * interleaved ordering (x1,p1,x2,p2,...). Construction validates symmetry,
 * positive definiteness and physicality (sigma + i*Omega >= 0); the stored
 * matrix is exactly symmetrized.
 */
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXd entries) {
    const auto rows = entries.rows();
    if (rows < 2 || rows % 2 != 0 || entries.cols() != rows)
      throw std::invalid_argument("CovarianceMatrix: entries must be 2N x 2N");
    const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
    if (asym > numeric.symmetry_tol)
      throw std::invalid_argument("CovarianceMatrix: not symmetric, max |sigma - sigma^T| = " +
                                  std::to_string(asym));
    entries_ = 0.5 * (entries + entries.transpose());
    n_modes_ = static_cast<int>(rows) / 2;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("CovarianceMatrix: not positive definite");

    const double margin = physicality_margin(entries_);
    if (margin < -numeric.physicality_tol)
      throw std::invalid_argument("CovarianceMatrix: violates sigma + i*Omega >= 0, min eigenvalue = " +
                                  std::to_string(margin));
  }

  int n_modes() const { return n_modes_; }
  const Eigen::MatrixXd& entries() const { return entries_; }

  static CovarianceMatrix vacuum(int n_modes) {
    if (n_modes < 1) throw std::domain_error("CovarianceMatrix::vacuum: n_modes must be >= 1");
    return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

 private:
  Eigen::MatrixXd entries_;
  int n_modes_ = 0;
};

/// N x N complex unitary acting on the column vector of annihilation operators.
class ModeUnitary {
 public:
  explicit ModeUnitary(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.cols() != entries_.rows())
      throw std::invalid_argument("ModeUnitary: entries must be square");
    n_modes_ = static_cast<int>(entries_.rows());
    const double dev = (entries_ * entries_.adjoint() -
                        Eigen::MatrixXcd::Identity(n_modes_, n_modes_))
                           .cwiseAbs()
                           .maxCoeff();
    if (dev > numeric.unitarity_tol)
      throw std::invalid_argument("ModeUnitary: not unitary, max |U U^dag - I| = " +
                                  std::to_string(dev));
  }

  int n_modes() const { return n_modes_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }

 private:
  Eigen::MatrixXcd entries_;
  int n_modes_ = 0;
};

/// 2N x 2N real matrix with S Omega S^T = Omega (validated at construction).
class SymplecticMatrix {
 public:
  explicit SymplecticMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    const auto rows = entries_.rows();
    if (rows < 2 || rows % 2 != 0 || entries_.cols() != rows)
      throw std::invalid_argument("SymplecticMatrix: entries must be 2N x 2N");
    n_modes_ = static_cast<int>(rows) / 2;
    const Eigen::MatrixXd omega = symplectic_form(n_modes_);
    const double dev = (entries_ * omega * entries_.transpose() - omega).cwiseAbs().maxCoeff();
    if (dev > numeric.symplectic_tol)
      throw std::invalid_argument("SymplecticMatrix: S Omega S^T != Omega, max deviation = " +
                                  std::to_string(dev));
  }

  int n_modes() const { return n_modes_; }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
  int n_modes_ = 0;
};

/**
 * @brief Ordered pair of disjoint mode-index sets: the steering party and the
 *        steered party of a bipartition.
 */
class Bipartition {
 public:
  Bipartition(std::vector<int> steering_modes, std::vector<int> steered_modes)
      : steering_(std::move(steering_modes)), steered_(std::move(steered_modes)) {
    if (steering_.empty() || steered_.empty())
      throw std::invalid_argument("Bipartition: both parties must be non-empty");
    auto check_party = [](const std::vector<int>& party) {
      for (int m : party)
        if (m < 0) throw std::invalid_argument("Bipartition: negative mode index");
      auto sorted = party;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("Bipartition: duplicate mode index within a party");
    };
    check_party(steering_);
    check_party(steered_);
    for (int m : steering_)
      if (std::find(steered_.begin(), steered_.end(), m) != steered_.end())
        throw std::invalid_argument("Bipartition: parties overlap on mode " + std::to_string(m));
  }

  const std::vector<int>& steering_modes() const { return steering_; }
  const std::vector<int>& steered_modes() const { return steered_; }

  /// Steering followed by steered, in declaration order.
  std::vector<int> all_modes() const {
    std::vector<int> all = steering_;
    all.insert(all.end(), steered_.begin(), steered_.end());
    return all;
  }

  int max_index() const {
    int mx = 0;
    for (int m : steering_) mx = std::max(mx, m);
    for (int m : steered_) mx = std::max(mx, m);
    return mx;
  }

  Bipartition swapped() const { return Bipartition(steered_, steering_); }

 private:
  std::vector<int> steering_;
  std::vector<int> steered_;
};

namespace detail {

/// Rows/columns of sigma belonging to the listed modes, in the given order.
inline Eigen::MatrixXd select_modes(const Eigen::MatrixXd& sigma, const std::vector<int>& modes) {
  const int n = static_cast<int>(modes.size());
  Eigen::MatrixXd out(2 * n, 2 * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out.block<2, 2>(2 * a, 2 * b) = sigma.block<2, 2>(2 * modes[a], 2 * modes[b]);
  return out;
}

inline void check_mode_indices(const std::vector<int>& modes, int n_modes, const char* who) {
  if (modes.empty()) throw std::invalid_argument(std::string(who) + ": empty mode list");
  for (int m : modes)
    if (m < 0 || m >= n_modes)
      throw std::invalid_argument(std::string(who) + ": mode index " + std::to_string(m) +
                                  " out of range for " + std::to_string(n_modes) + " modes");
}

}  // namespace detail

/**
 * @brief Gaussian partial trace: keep only the listed modes (row/column deletion).
 */
inline CovarianceMatrix reduce(const CovarianceMatrix& sigma, const std::vector<int>& keep_modes) {
  detail::check_mode_indices(keep_modes, sigma.n_modes(), "reduce");
  auto sorted = keep_modes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("reduce: duplicate mode index");
  return CovarianceMatrix(detail::select_modes(sigma.entries(), keep_modes));
}

/**
 * @brief Symplectic eigenvalues of a symmetric positive-definite 2N x 2N matrix.
 *
 * Computes the complex spectrum of Omega*sigma, whose eigenvalues come in pairs
 * +-i*nu_j; takes moduli, pairs adjacent values after a descending sort, and
 * returns the N values sorted ascending. Throws degeneracy_error if any pair
 * disagrees beyond the pairing tolerance.
 */
inline std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& sigma) {
  const auto rows = sigma.rows();
  if (rows < 2 || rows % 2 != 0 || sigma.cols() != rows)
    throw std::invalid_argument("symplectic_eigenvalues: matrix must be 2N x 2N");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > numeric.symmetry_tol * scale)
    throw std::invalid_argument("symplectic_eigenvalues: matrix not symmetric");
  const int n = static_cast<int>(rows) / 2;

  Eigen::EigenSolver<Eigen::MatrixXd> es(symplectic_form(n) * sigma, false);
  std::vector<double> moduli(2 * n);
  for (int k = 0; k < 2 * n; ++k) moduli[k] = std::abs(es.eigenvalues()(k));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());

  std::vector<double> nus(n);
  for (int j = 0; j < n; ++j) {
    const double a = moduli[2 * j], b = moduli[2 * j + 1];
    if (std::abs(a - b) > numeric.eigenvalue_pair_tol * std::max(1.0, a))
      throw degeneracy_error("symplectic_eigenvalues: unpaired spectrum, |" + std::to_string(a) +
                             " - " + std::to_string(b) + "| exceeds pairing tolerance");
    nus[j] = 0.5 * (a + b);
  }
  std::sort(nus.begin(), nus.end());
  return nus;
}

inline std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma) {
  return symplectic_eigenvalues(sigma.entries());
}

/// Schur complement of the steering block, plus a flag set when the inverse
/// had to be regularized.
struct SchurComplement {
  Eigen::MatrixXd matrix;
  bool regularized = false;
};

/**
 * @brief B - C^T A^(-1) C over the bipartition, steering modes first.
 *
 * Modes outside the bipartition are traced out (deleted) before taking the
 * complement. When the steering block's condition number exceeds the policy
 * limit the inverse switches to a spectral pseudo-inverse with relative
 * cutoff, and the result is flagged as regularized. The result is symmetrized.
 */
inline SchurComplement schur_complement(const CovarianceMatrix& sigma, const Bipartition& part) {
  if (part.max_index() >= sigma.n_modes())
    throw std::invalid_argument("schur_complement: bipartition index out of range");
  const Eigen::MatrixXd reordered = detail::select_modes(sigma.entries(), part.all_modes());
  const int na = 2 * static_cast<int>(part.steering_modes().size());
  const int nb = 2 * static_cast<int>(part.steered_modes().size());

  const Eigen::MatrixXd a = reordered.topLeftCorner(na, na);
  const Eigen::MatrixXd b = reordered.bottomRightCorner(nb, nb);
  const Eigen::MatrixXd c = reordered.topRightCorner(na, nb);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Eigen::VectorXd lambda = es.eigenvalues();
  const double lmax = lambda.maxCoeff();
  const double lmin = lambda.minCoeff();

  SchurComplement result;
  result.regularized = (lmin <= 0.0) || (lmax / lmin > numeric.condition_limit);
  const double cutoff = numeric.pinv_relative_cutoff * lmax;
  Eigen::VectorXd inv_lambda(lambda.size());
  for (int k = 0; k < lambda.size(); ++k) {
    if (result.regularized)
      inv_lambda(k) = lambda(k) > cutoff ? 1.0 / lambda(k) : 0.0;
    else
      inv_lambda(k) = 1.0 / lambda(k);
  }
  const Eigen::MatrixXd a_inv =
      es.eigenvectors() * inv_lambda.asDiagonal() * es.eigenvectors().transpose();

  Eigen::MatrixXd schur = b - c.transpose() * a_inv * c;
  result.matrix = 0.5 * (schur + schur.transpose());
  return result;
}

/**
 * @brief Quadrature representation of a mode unitary.
 *
 * With U = X + iY acting on annihilation operators, the (j,k) 2x2 block of S
 * in interleaved ordering is [[X_jk, -Y_jk], [Y_jk, X_jk]].
 */
inline SymplecticMatrix unitary_to_symplectic(const ModeUnitary& u) {
  const int n = u.n_modes();
  Eigen::MatrixXd s(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double x = u.entries()(j, k).real();
      const double y = u.entries()(j, k).imag();
      s(2 * j, 2 * k) = x;
      s(2 * j, 2 * k + 1) = -y;
      s(2 * j + 1, 2 * k) = y;
      s(2 * j + 1, 2 * k + 1) = x;
    }
  }
  return SymplecticMatrix(std::move(s));
}

/// S sigma S^T. Preserves the symplectic spectrum.
inline CovarianceMatrix apply_symplectic(const SymplecticMatrix& s, const CovarianceMatrix& sigma) {
  if (s.n_modes() != sigma.n_modes())
    throw std::invalid_argument("apply_symplectic: dimension mismatch (" +
                                std::to_string(s.n_modes()) + " vs " +
                                std::to_string(sigma.n_modes()) + " modes)");
  Eigen::MatrixXd out = s.entries() * sigma.entries() * s.entries().transpose();
  return CovarianceMatrix(0.5 * (out + out.transpose()));
}

/**
 * @brief Partial transpose on the listed modes: flips the sign of each listed
 *        mode's p row and column. Involution; the result need not be physical.
 */
inline Eigen::MatrixXd partial_transpose(const CovarianceMatrix& sigma,
                                         const std::vector<int>& modes) {
  detail::check_mode_indices(modes, sigma.n_modes(), "partial_transpose");
  Eigen::MatrixXd out = sigma.entries();
  for (int m : modes) {
    out.row(2 * m + 1) *= -1.0;
    out.col(2 * m + 1) *= -1.0;
  }
  return out;
}

}  // namespace gwsteer
