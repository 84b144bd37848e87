#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gwsteer/numeric.hpp"
#include "gwsteer/state.hpp"
#include "gwsteer/symplectic.hpp"

namespace gwsteer {

/**
 * @brief Gaussian steering quantifier G together with the symplectic spectrum
 *        of the Schur complement it was computed from.
 *
 * G = max{0, -sum over nu_j < 1 of ln nu_j}; an eigenvalue contributes only if
 * nu_j < 1 - contribution cutoff.
 */
struct SteeringValue {
  double value = 0.0;
  std::vector<double> schur_eigenvalues;
  bool regularized = false;
};

enum class Directionality { no_steering, one_way_forward, one_way_backward, two_way };

inline std::string to_string(Directionality d) {
  switch (d) {
    case Directionality::no_steering: return "no_steering";
    case Directionality::one_way_forward: return "one_way_forward";
    case Directionality::one_way_backward: return "one_way_backward";
    case Directionality::two_way: return "two_way";
  }
  return "unknown";
}

/**
 * @brief Steerability of the steered party by the steering party.
 *
 * Modes outside the bipartition are traced out first; the Schur complement is
 * taken over the steering party's block and G sums -ln over its sub-unity
 * symplectic eigenvalues. Swapping the parties gives the reverse direction.
 */
inline SteeringValue gaussian_steering(const CovarianceMatrix& sigma, const Bipartition& part) {
  if (part.max_index() >= sigma.n_modes())
    throw std::invalid_argument("gaussian_steering: bipartition index out of range");
  const SchurComplement schur = schur_complement(sigma, part);
  SteeringValue result;
  result.regularized = schur.regularized;
  result.schur_eigenvalues = symplectic_eigenvalues(schur.matrix);
  double sum = 0.0;
  for (double nu : result.schur_eigenvalues)
    if (nu < 1.0 - numeric.contribution_cutoff) sum -= std::log(nu);
  result.value = std::max(0.0, sum);
  return result;
}

inline SteeringValue group_steering(const CovarianceMatrix& sigma,
                                    const std::vector<int>& steering_set,
                                    const std::vector<int>& steered_set) {
  return gaussian_steering(sigma, Bipartition(steering_set, steered_set));
}

/**
 * @brief All ordered single-mode steering values; entry (i,j) steers j by i
 *        with every other mode traced out. Diagonal entries are empty.
 */
inline std::vector<std::vector<SteeringValue>> pairwise_steering_table(
    const CovarianceMatrix& sigma) {
  const int n = sigma.n_modes();
  if (n < 2) throw std::invalid_argument("pairwise_steering_table: need at least two modes");
  std::vector<std::vector<SteeringValue>> table(n, std::vector<SteeringValue>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) table[i][j] = gaussian_steering(sigma, Bipartition({i}, {j}));
  return table;
}

/// One CKW-type inequality instance: the collective steering minus the two
/// individual steerings, which is non-negative when monogamy holds.
struct MonogamyResidual {
  std::string label;
  double residual = 0.0;
  std::array<std::vector<int>, 3> parties;  // k, i, j as used in the label
};

namespace detail {

inline std::string party_label(const std::vector<int>& modes) {
  std::string s;
  for (int m : modes) s += mode_label(m);
  return s;
}

inline std::vector<int> join_parties(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> joined = a;
  joined.insert(joined.end(), b.begin(), b.end());
  return joined;
}

}  // namespace detail

/**
 * @brief Both CKW-type residuals for every choice of pivot among three
 *        disjoint parties (6 residuals).
 *
 * Forward: G(k -> i+j) - G(k -> i) - G(k -> j).
 * Reverse: G(i+j -> k) - G(i -> k) - G(j -> k).
 */
inline std::vector<MonogamyResidual> monogamy_residuals(
    const CovarianceMatrix& sigma, const std::array<std::vector<int>, 3>& parties) {
  // Bipartition construction rejects overlapping parties pairwise.
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) Bipartition check(parties[a], parties[b]);

  auto value = [&sigma](const std::vector<int>& from, const std::vector<int>& to) {
    return gaussian_steering(sigma, Bipartition(from, to)).value;
  };

  std::vector<MonogamyResidual> out;
  out.reserve(6);
  for (int pivot = 0; pivot < 3; ++pivot) {
    const auto& k = parties[pivot];
    const auto& i = parties[(pivot + 1) % 3];
    const auto& j = parties[(pivot + 2) % 3];
    const auto ij = detail::join_parties(i, j);
    const std::string k_l = detail::party_label(k);
    const std::string i_l = detail::party_label(i);
    const std::string j_l = detail::party_label(j);

    MonogamyResidual forward;
    forward.label = "G(" + k_l + "->" + i_l + j_l + ")-G(" + k_l + "->" + i_l + ")-G(" + k_l +
                    "->" + j_l + ")";
    forward.residual = value(k, ij) - value(k, i) - value(k, j);
    forward.parties = {k, i, j};
    out.push_back(std::move(forward));

    MonogamyResidual reverse;
    reverse.label = "G(" + i_l + j_l + "->" + k_l + ")-G(" + i_l + "->" + k_l + ")-G(" + j_l +
                    "->" + k_l + ")";
    reverse.residual = value(ij, k) - value(i, k) - value(j, k);
    reverse.parties = {k, i, j};
    out.push_back(std::move(reverse));
  }
  return out;
}

/// Classifies an ordered pair of steering values for the same unordered party
/// pair. Positivity threshold comes from the numeric policy.
inline Directionality classify_directionality(const SteeringValue& g_forward,
                                              const SteeringValue& g_backward) {
  const bool fwd = g_forward.value > numeric.steering_threshold;
  const bool bwd = g_backward.value > numeric.steering_threshold;
  if (fwd && bwd) return Directionality::two_way;
  if (fwd) return Directionality::one_way_forward;
  if (bwd) return Directionality::one_way_backward;
  return Directionality::no_steering;
}

struct EntanglementValue {
  double log_negativity = 0.0;
  std::vector<double> pt_eigenvalues;  // symplectic spectrum after partial transpose
};

/**
 * @brief Logarithmic negativity across a bipartition: partial-transpose the
 *        steered party, then sum -ln over sub-unity symplectic eigenvalues.
 *
 * Modes outside the bipartition are traced out first.
 */
inline EntanglementValue log_negativity(const CovarianceMatrix& sigma, const Bipartition& part) {
  if (part.max_index() >= sigma.n_modes())
    throw std::invalid_argument("log_negativity: bipartition index out of range");
  const CovarianceMatrix reduced = reduce(sigma, part.all_modes());
  std::vector<int> steered_local(part.steered_modes().size());
  for (std::size_t k = 0; k < steered_local.size(); ++k)
    steered_local[k] = static_cast<int>(part.steering_modes().size() + k);
  const Eigen::MatrixXd pt = partial_transpose(reduced, steered_local);

  EntanglementValue result;
  result.pt_eigenvalues = symplectic_eigenvalues(pt);
  for (double nu : result.pt_eigenvalues)
    if (nu < 1.0 - numeric.contribution_cutoff) result.log_negativity -= std::log(nu);
  return result;
}

/**
 * @brief Weight-axis boundary of a steering quantity's support, located by
 *        bisection on the presence predicate G > threshold.
 *
 * Returns std::nullopt when the predicate does not change across the bracket.
 */
inline std::optional<double> find_zero_crossing(FamilyKind kind, double r,
                                                const std::vector<int>& steering_set,
                                                const std::vector<int>& steered_set,
                                                double weight_lo, double weight_hi) {
  if (!(weight_lo < weight_hi))
    throw std::domain_error("find_zero_crossing: bracket must satisfy lo < hi");
  auto present = [&](double weight) {
    const double t2 = transmittance_from_weight(kind, weight);
    const CovarianceMatrix sigma = build_state(StateFamily(kind, t2, r));
    return group_steering(sigma, steering_set, steered_set).value > numeric.steering_threshold;
  };
  bool lo_present = present(weight_lo);
  if (lo_present == present(weight_hi)) return std::nullopt;
  double lo = weight_lo, hi = weight_hi;
  while (hi - lo > numeric.bisection_weight_tol) {
    const double mid = 0.5 * (lo + hi);
    if (present(mid) == lo_present)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace gwsteer
