#pragma once

#include <stdexcept>
#include <string>

namespace gwsteer {

/**
 * @brief Central numeric policy: every tolerance used by the library.
 *
 * All covariance matrices are dimensionless, vacuum variance 1, so absolute
 * tolerances are meaningful throughout.
 */
struct NumericPolicy {
  /// Max allowed |sigma - sigma^T| entry at CovarianceMatrix construction.
  double symmetry_tol = 1e-12;
  /// Min allowed eigenvalue of sigma + i*Omega (bona fide state check).
  double physicality_tol = 1e-9;
  /// Max allowed |U U^dag - I| entry for ModeUnitary.
  double unitarity_tol = 1e-12;
  /// Max allowed |S Omega S^T - Omega| entry for SymplecticMatrix.
  double symplectic_tol = 1e-10;
  /// Pairing tolerance when collapsing the 2N moduli of eig(Omega*sigma) to N values.
  double eigenvalue_pair_tol = 1e-8;
  /// Condition-number limit above which the Schur complement switches to a pseudo-inverse.
  double condition_limit = 1e12;
  /// Relative singular-value cutoff for the pseudo-inverse fallback.
  double pinv_relative_cutoff = 1e-12;
  /// A steering or entanglement value above this counts as "present".
  double steering_threshold = 1e-9;
  /// A Schur symplectic eigenvalue contributes to G only if nu < 1 - this cutoff.
  double contribution_cutoff = 1e-12;
  /// Absolute tolerance (in weight units) for boundary bisection.
  double bisection_weight_tol = 1e-4;
};

inline constexpr NumericPolicy numeric{};

/// Raised when an eigenvalue spectrum cannot be paired within tolerance.
class degeneracy_error : public std::runtime_error {
 public:
  explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gwsteer
