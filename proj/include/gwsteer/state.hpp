#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gwsteer/numeric.hpp"
#include "gwsteer/symplectic.hpp"

namespace gwsteer {

enum class Orientation { amplitude_squeezed, phase_squeezed };

/// Single-mode squeezed vacuum input with squeezing parameter r >= 0.
struct SqueezedInput {
  double r = 0.0;
  Orientation orientation = Orientation::amplitude_squeezed;

  SqueezedInput(double r_in, Orientation o) : r(r_in), orientation(o) {
    if (!(r >= 0.0)) throw std::domain_error("SqueezedInput: r must be >= 0");
  }

  /// diag(e^{-2r}, e^{2r}) for amplitude squeezing, swapped for phase squeezing.
  Eigen::Matrix2d covariance() const {
    Eigen::Matrix2d cov;
    if (orientation == Orientation::amplitude_squeezed)
      cov << std::exp(-2.0 * r), 0.0, 0.0, std::exp(2.0 * r);
    else
      cov << std::exp(2.0 * r), 0.0, 0.0, std::exp(-2.0 * r);
    return cov;
  }
};

/// Symmetric weighted adjacency matrix with zero diagonal; entry (j,k) is the
/// interaction strength C_jk between graph vertices j and k.
class GraphWeights {
 public:
  explicit GraphWeights(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
    if (weights_.rows() < 1 || weights_.cols() != weights_.rows())
      throw std::invalid_argument("GraphWeights: matrix must be square");
    if ((weights_ - weights_.transpose()).cwiseAbs().maxCoeff() > numeric.symmetry_tol)
      throw std::invalid_argument("GraphWeights: matrix must be symmetric");
    if (weights_.diagonal().cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument("GraphWeights: diagonal must be zero");
  }

  int n_modes() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& entries() const { return weights_; }
  double weight(int j, int k) const { return weights_(j, k); }

 private:
  Eigen::MatrixXd weights_;
};

enum class FamilyKind { tripartite_linear, fourmode_square };

/**
 * @brief One of the two weighted graph-state families, parameterized by the
 *        free transmittance T2 and the common squeezing parameter r.
 *
 * The remaining transmittances are fixed: T1 = 1/3 for the linear tripartite
 * family; T1 = 1/5, T3 = 1/2 for the four-mode square family. Input squeezing
 * orientations are fixed per family and equal r on every input.
 */
struct StateFamily {
  FamilyKind kind = FamilyKind::tripartite_linear;
  double t2 = 0.5;
  double r = 0.0;

  StateFamily(FamilyKind k, double t2_in, double r_in) : kind(k), t2(t2_in), r(r_in) {
    if (!(t2 > 0.0 && t2 < 1.0))
      throw std::domain_error("StateFamily: t2 must lie strictly inside (0,1)");
    if (!(r >= 0.0)) throw std::domain_error("StateFamily: r must be >= 0");
  }

  int n_modes() const { return kind == FamilyKind::tripartite_linear ? 3 : 4; }

  std::vector<SqueezedInput> inputs() const {
    using O = Orientation;
    if (kind == FamilyKind::tripartite_linear)
      return {{r, O::amplitude_squeezed}, {r, O::phase_squeezed}, {r, O::amplitude_squeezed}};
    return {{r, O::phase_squeezed},
            {r, O::amplitude_squeezed},
            {r, O::amplitude_squeezed},
            {r, O::phase_squeezed}};
  }
};

inline StateFamily tripartite_family(double t2, double r) {
  return StateFamily(FamilyKind::tripartite_linear, t2, r);
}
inline StateFamily fourmode_family(double t2, double r) {
  return StateFamily(FamilyKind::fourmode_square, t2, r);
}

/// "A", "B", ... for mode indices.
inline std::string mode_label(int mode) {
  if (mode < 0 || mode >= 26) throw std::invalid_argument("mode_label: index out of range");
  return std::string(1, static_cast<char>('A' + mode));
}

/**
 * @brief Beam-splitter network unitary of the linear tripartite family
 *        (T1 fixed at 1/3, free transmittance t2).
 */
inline ModeUnitary tripartite_network_unitary(double t2) {
  if (!(t2 > 0.0 && t2 < 1.0))
    throw std::domain_error("tripartite_network_unitary: t2 must lie strictly inside (0,1)");
  const double t1 = 1.0 / 3.0;
  const std::complex<double> i(0.0, 1.0);
  Eigen::MatrixXcd u(3, 3);
  u << -std::sqrt(t1), -std::sqrt(1.0 - t1), 0.0,
      i * std::sqrt((1.0 - t1) * (1.0 - t2)), -i * std::sqrt(t1 * (1.0 - t2)), std::sqrt(t2),
      -std::sqrt((1.0 - t1) * t2), std::sqrt(t1 * t2), -i * std::sqrt(1.0 - t2);
  return ModeUnitary(std::move(u));
}

/**
 * @brief Beam-splitter network unitary of the four-mode square family
 *        (T1 = 1/5, T3 = 1/2 fixed, free transmittance t2).
 */
inline ModeUnitary fourmode_network_unitary(double t2) {
  if (!(t2 > 0.0 && t2 < 1.0))
    throw std::domain_error("fourmode_network_unitary: t2 must lie strictly inside (0,1)");
  const std::complex<double> i(0.0, 1.0);
  Eigen::MatrixXcd u(4, 4);
  u << -std::sqrt(1.0 - t2), -2.0 * std::sqrt(t2 / 5.0), -i * std::sqrt(t2 / 5.0), 0.0,
      std::sqrt(t2), -2.0 * std::sqrt((1.0 - t2) / 5.0), -i * std::sqrt((1.0 - t2) / 5.0), 0.0,
      0.0, i / std::sqrt(10.0), std::sqrt(2.0 / 5.0), -1.0 / std::sqrt(2.0),
      0.0, i / std::sqrt(10.0), std::sqrt(2.0 / 5.0), 1.0 / std::sqrt(2.0);
  return ModeUnitary(std::move(u));
}

/**
 * @brief Generic builder: direct sum of squeezed-input covariances propagated
 *        through an arbitrary passive network.
 */
inline CovarianceMatrix build_from_network(const std::vector<SqueezedInput>& inputs,
                                           const ModeUnitary& network) {
  const int n = network.n_modes();
  if (static_cast<int>(inputs.size()) != n)
    throw std::invalid_argument("build_from_network: input count does not match network size");
  Eigen::MatrixXd sigma_in = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) sigma_in.block<2, 2>(2 * k, 2 * k) = inputs[k].covariance();
  return apply_symplectic(unitary_to_symplectic(network), CovarianceMatrix(std::move(sigma_in)));
}

/// Covariance matrix of a family state by network propagation.
inline CovarianceMatrix build_state(const StateFamily& family) {
  const ModeUnitary network = family.kind == FamilyKind::tripartite_linear
                                  ? tripartite_network_unitary(family.t2)
                                  : fourmode_network_unitary(family.t2);
  return build_from_network(family.inputs(), network);
}

namespace detail {

// Off-diagonal 2x2 coupling shapes of the closed-form covariance matrices.
// swap_coupling is the papers' bold off-diagonal symbol, distinct from the
// symplectic form; parity_coupling is diag(1,-1).
inline Eigen::Matrix2d swap_coupling() {
  Eigen::Matrix2d m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Eigen::Matrix2d parity_coupling() {
  Eigen::Matrix2d m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace detail

/**
 * @brief Closed-form 6x6 covariance matrix of the linear tripartite family.
 */
inline CovarianceMatrix closed_form_tripartite_cov(double t2, double r) {
  if (!(t2 > 0.0 && t2 < 1.0))
    throw std::domain_error("closed_form_tripartite_cov: t2 must lie strictly inside (0,1)");
  if (!(r >= 0.0)) throw std::domain_error("closed_form_tripartite_cov: r must be >= 0");
  const double e2 = std::exp(2.0 * r);
  const double em2 = std::exp(-2.0 * r);

  const double f = std::sqrt(2.0 * (1.0 - t2)) * (e2 - em2) / 3.0;
  const double g = std::sqrt(2.0 * t2) * (em2 - e2) / 3.0;
  const double h = 2.0 * std::sqrt(t2 * (1.0 - t2)) * (e2 - em2) / 3.0;

  Eigen::Matrix2d sig_a, sig_b, sig_c;
  sig_a << (em2 + 2.0 * e2) / 3.0, 0.0, 0.0, (2.0 * em2 + e2) / 3.0;
  sig_b << (2.0 * (1.0 - t2) * e2 + (1.0 + 2.0 * t2) * em2) / 3.0, 0.0, 0.0,
      (2.0 * (1.0 - t2) * em2 + (1.0 + 2.0 * t2) * e2) / 3.0;
  sig_c << (3.0 - 2.0 * t2) / 3.0 * e2 + 2.0 * t2 / 3.0 * em2, 0.0, 0.0,
      (3.0 - 2.0 * t2) / 3.0 * em2 + 2.0 * t2 / 3.0 * e2;

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(6, 6);
  sigma.block<2, 2>(0, 0) = sig_a;
  sigma.block<2, 2>(2, 2) = sig_b;
  sigma.block<2, 2>(4, 4) = sig_c;
  sigma.block<2, 2>(0, 2) = f * detail::swap_coupling();
  sigma.block<2, 2>(2, 0) = f * detail::swap_coupling();
  sigma.block<2, 2>(0, 4) = g * detail::parity_coupling();
  sigma.block<2, 2>(4, 0) = g * detail::parity_coupling();
  sigma.block<2, 2>(2, 4) = h * detail::swap_coupling();
  sigma.block<2, 2>(4, 2) = h * detail::swap_coupling();
  return CovarianceMatrix(std::move(sigma));
}

/**
 * @brief Closed-form 8x8 covariance matrix of the four-mode square family.
 */
inline CovarianceMatrix closed_form_fourmode_cov(double t2, double r) {
  if (!(t2 > 0.0 && t2 < 1.0))
    throw std::domain_error("closed_form_fourmode_cov: t2 must lie strictly inside (0,1)");
  if (!(r >= 0.0)) throw std::domain_error("closed_form_fourmode_cov: r must be >= 0");
  const double e2 = std::exp(2.0 * r);
  const double em2 = std::exp(-2.0 * r);

  const double l = 4.0 * std::sqrt(t2 * (1.0 - t2)) * (em2 - e2) / 5.0;
  const double m = std::sqrt(2.0 * t2) * (e2 - em2) / 5.0;
  const double n = std::sqrt(2.0 * (1.0 - t2)) * (e2 - em2) / 5.0;
  const double s = std::sqrt(2.0 * t2) * (e2 - em2) / 5.0;
  const double v = std::sqrt(2.0 * (1.0 - t2)) * (e2 - em2) / 5.0;
  const double w = 2.0 * (em2 - e2) / 5.0;

  Eigen::Matrix2d sig_a, sig_b, sig_c;
  sig_a << (5.0 - 4.0 * t2) / 5.0 * e2 + 4.0 * t2 / 5.0 * em2, 0.0, 0.0,
      (5.0 - 4.0 * t2) / 5.0 * em2 + 4.0 * t2 / 5.0 * e2;
  sig_b << ((1.0 + 4.0 * t2) * e2 + 4.0 * (1.0 - t2) * em2) / 5.0, 0.0, 0.0,
      ((1.0 + 4.0 * t2) * em2 + 4.0 * (1.0 - t2) * e2) / 5.0;
  sig_c << 3.0 / 5.0 * e2 + 2.0 / 5.0 * em2, 0.0, 0.0, 3.0 / 5.0 * em2 + 2.0 / 5.0 * e2;

  const Eigen::Matrix2d swap = detail::swap_coupling();
  const Eigen::Matrix2d parity = detail::parity_coupling();

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(8, 8);
  sigma.block<2, 2>(0, 0) = sig_a;
  sigma.block<2, 2>(2, 2) = sig_b;
  sigma.block<2, 2>(4, 4) = sig_c;
  sigma.block<2, 2>(6, 6) = sig_c;
  auto couple = [&sigma](int mode_j, int mode_k, const Eigen::Matrix2d& block) {
    sigma.block<2, 2>(2 * mode_j, 2 * mode_k) = block;
    sigma.block<2, 2>(2 * mode_k, 2 * mode_j) = block.transpose();
  };
  couple(0, 1, l * parity);
  couple(0, 2, m * swap);
  couple(0, 3, s * swap);
  couple(1, 2, n * swap);
  couple(1, 3, v * swap);
  couple(2, 3, w * parity);
  return CovarianceMatrix(std::move(sigma));
}

/// Closed-form covariance of a family state (independent of build_state's
/// propagation route).
inline CovarianceMatrix closed_form_state(const StateFamily& family) {
  return family.kind == FamilyKind::tripartite_linear
             ? closed_form_tripartite_cov(family.t2, family.r)
             : closed_form_fourmode_cov(family.t2, family.r);
}

/**
 * @brief Weight factors set by the free transmittance.
 *
 * Tripartite: C_AB = 1/sqrt(2(1-T2)) on (A,B), C_BC = sqrt(T2/(1-T2)) on (B,C).
 * Four-mode: C_A = sqrt(2 T2) on (A,C) and (A,D), C_B = sqrt(2(1-T2)) on (B,C)
 * and (B,D), so C_A^2 + C_B^2 = 2.
 */
inline GraphWeights weights_from_transmittance(const StateFamily& family) {
  const double t2 = family.t2;
  if (family.kind == FamilyKind::tripartite_linear) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    const double c_ab = 1.0 / std::sqrt(2.0 * (1.0 - t2));
    const double c_bc = std::sqrt(t2 / (1.0 - t2));
    w(0, 1) = w(1, 0) = c_ab;
    w(1, 2) = w(2, 1) = c_bc;
    return GraphWeights(std::move(w));
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  const double c_a = std::sqrt(2.0 * t2);
  const double c_b = std::sqrt(2.0 * (1.0 - t2));
  w(0, 2) = w(2, 0) = c_a;
  w(0, 3) = w(3, 0) = c_a;
  w(1, 2) = w(2, 1) = c_b;
  w(1, 3) = w(3, 1) = c_b;
  return GraphWeights(std::move(w));
}

/// The sweep weight axis of a family: C_BC for tripartite, C_A for four-mode.
inline double weight_from_transmittance(FamilyKind kind, double t2) {
  if (!(t2 > 0.0 && t2 < 1.0))
    throw std::domain_error("weight_from_transmittance: t2 must lie strictly inside (0,1)");
  return kind == FamilyKind::tripartite_linear ? std::sqrt(t2 / (1.0 - t2))
                                               : std::sqrt(2.0 * t2);
}

/**
 * @brief Exact inverse of the weight/transmittance map.
 *
 * Tripartite: T2 = C_BC^2 / (1 + C_BC^2) for C_BC in (0, inf).
 * Four-mode: T2 = C_A^2 / 2 for C_A in (0, sqrt(2)).
 */
inline double transmittance_from_weight(FamilyKind kind, double weight) {
  if (kind == FamilyKind::tripartite_linear) {
    if (!(weight > 0.0) || !std::isfinite(weight))
      throw std::domain_error("transmittance_from_weight: tripartite weight must be in (0, inf)");
    return weight * weight / (1.0 + weight * weight);
  }
  if (!(weight > 0.0 && weight < std::sqrt(2.0)))
    throw std::domain_error("transmittance_from_weight: four-mode weight must be in (0, sqrt(2))");
  return weight * weight / 2.0;
}

struct NullifierVariance {
  std::string label;  // mode whose nullifier p_a - sum_b C_ab x_b is measured
  double variance = 0.0;
};

/**
 * @brief Analytic nullifier variances of a family state.
 *
 * Tripartite: (3-2T2)/(2-2T2), 3/(2-2T2), 1/(1-T2), all times e^{-2r}.
 * Four-mode: 1+4T2, 5-4T2, 3, 3, all times e^{-2r}. The e^{-2r} scaling is
 * exact because the weight factors cancel the antisqueezed quadratures.
 */
inline std::vector<NullifierVariance> closed_form_nullifier_variances(const StateFamily& family) {
  const double t2 = family.t2;
  const double em2 = std::exp(-2.0 * family.r);
  if (family.kind == FamilyKind::tripartite_linear)
    return {{"A", (3.0 - 2.0 * t2) / (2.0 - 2.0 * t2) * em2},
            {"B", 3.0 / (2.0 - 2.0 * t2) * em2},
            {"C", 1.0 / (1.0 - t2) * em2}};
  return {{"A", (1.0 + 4.0 * t2) * em2},
          {"B", (5.0 - 4.0 * t2) * em2},
          {"C", 3.0 * em2},
          {"D", 3.0 * em2}};
}

/**
 * @brief Variance of every nullifier p_a - sum_b C_ab x_b as a quadratic form
 *        v^T sigma v.
 */
inline std::vector<NullifierVariance> nullifier_variances(const CovarianceMatrix& sigma,
                                                          const GraphWeights& weights) {
  const int n = sigma.n_modes();
  if (weights.n_modes() != n)
    throw std::invalid_argument("nullifier_variances: weights and state mode counts differ");
  std::vector<NullifierVariance> out;
  out.reserve(n);
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n);
    v(2 * a + 1) = 1.0;
    for (int b = 0; b < n; ++b) v(2 * b) -= weights.weight(a, b);
    out.push_back({mode_label(a), v.dot(sigma.entries() * v)});
  }
  return out;
}

}  // namespace gwsteer
