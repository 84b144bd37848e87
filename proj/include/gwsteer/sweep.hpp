#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gwsteer/numeric.hpp"
#include "gwsteer/state.hpp"
#include "gwsteer/steering.hpp"
#include "gwsteer/symplectic.hpp"

namespace gwsteer {

/// Invalid user input (bad quantity name, empty range, ...); maps to the CLI
/// usage-error exit status.
class usage_error : public std::runtime_error {
 public:
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

enum class SweepAxis { transmittance, weight };
enum class OutputFormat { csv, json };

inline std::string to_string(FamilyKind kind) {
  return kind == FamilyKind::tripartite_linear ? "tripartite" : "fourmode";
}
inline std::string to_string(SweepAxis axis) {
  return axis == SweepAxis::transmittance ? "t2" : "weight";
}
inline std::string to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

// The CLI clamps sweeps to this transmittance interval; weights diverge or
// vanish at the true endpoints.
inline constexpr double kTransmittanceClampLo = 0.001;
inline constexpr double kTransmittanceClampHi = 0.999;

/// 12-significant-digit, locale-independent decimal formatting.
inline std::string format_double(double value) {
  std::array<char, 40> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 12);
  return std::string(buf.data(), res.ptr);
}

/**
 * @brief One requested sweep column, parsed from the quantity grammar:
 *        G(X->Y), MONO(K|I|J), MONOR(K|I|J), NULL(A), LN(X|Y).
 */
struct Quantity {
  enum class Kind { steering, monogamy_forward, monogamy_reverse, nullifier, log_negativity };
  Kind kind = Kind::steering;
  std::vector<int> party_x;  // steering party / pivot party / nullifier mode
  std::vector<int> party_y;  // steered party / first partner
  std::vector<int> party_z;  // second monogamy partner
  std::string name;          // canonical spelling
};

namespace detail {

inline std::string quantity_grammar_help(int n_modes) {
  std::string modes;
  for (int m = 0; m < n_modes; ++m) modes += mode_label(m);
  return "valid quantity names: G(X->Y) steering of party Y by party X, "
         "MONO(K|I|J) residual G(K->IJ)-G(K->I)-G(K->J), "
         "MONOR(K|I|J) residual G(IJ->K)-G(I->K)-G(J->K), "
         "NULL(A) nullifier variance of one mode, "
         "LN(X|Y) logarithmic negativity across X|Y; "
         "parties are disjoint non-empty strings over the modes {" +
         modes + "}, e.g. G(A->BC), MONO(A|B|C), NULL(B), LN(A|" + modes.substr(1) + ")";
}

inline std::vector<int> parse_party(const std::string& token, int n_modes,
                                    const std::string& full_name) {
  if (token.empty())
    throw usage_error("empty party in quantity '" + full_name + "'; " +
                      quantity_grammar_help(n_modes));
  std::vector<int> modes;
  for (char c : token) {
    const int m = c - 'A';
    if (m < 0 || m >= n_modes)
      throw usage_error("unknown mode '" + std::string(1, c) + "' in quantity '" + full_name +
                        "'; " + quantity_grammar_help(n_modes));
    if (std::find(modes.begin(), modes.end(), m) != modes.end())
      throw usage_error("duplicate mode '" + std::string(1, c) + "' in quantity '" + full_name +
                        "'");
    modes.push_back(m);
  }
  return modes;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline void require_disjoint(const std::vector<std::vector<int>>& parties,
                             const std::string& full_name) {
  std::vector<int> seen;
  for (const auto& party : parties)
    for (int m : party) {
      if (std::find(seen.begin(), seen.end(), m) != seen.end())
        throw usage_error("parties overlap in quantity '" + full_name + "'");
      seen.push_back(m);
    }
}

}  // namespace detail

/**
 * @brief Parses one quantity name against a family's mode count.
 *
 * Throws usage_error (listing the valid names) on anything malformed.
 */
inline Quantity parse_quantity(const std::string& name, int n_modes) {
  auto inner = [&](const std::string& prefix) -> std::optional<std::string> {
    if (name.size() > prefix.size() + 1 && name.compare(0, prefix.size() + 1, prefix + "(") == 0 &&
        name.back() == ')')
      return name.substr(prefix.size() + 1, name.size() - prefix.size() - 2);
    return std::nullopt;
  };

  Quantity q;
  q.name = name;
  if (auto body = inner("G")) {
    const std::size_t arrow = body->find("->");
    if (arrow == std::string::npos)
      throw usage_error("missing '->' in quantity '" + name + "'; " +
                        detail::quantity_grammar_help(n_modes));
    q.kind = Quantity::Kind::steering;
    q.party_x = detail::parse_party(body->substr(0, arrow), n_modes, name);
    q.party_y = detail::parse_party(body->substr(arrow + 2), n_modes, name);
    detail::require_disjoint({q.party_x, q.party_y}, name);
    return q;
  }
  if (auto body = inner("MONOR")) {
    const auto parts = detail::split(*body, '|');
    if (parts.size() != 3)
      throw usage_error("MONOR needs three '|'-separated parties in '" + name + "'; " +
                        detail::quantity_grammar_help(n_modes));
    q.kind = Quantity::Kind::monogamy_reverse;
    q.party_x = detail::parse_party(parts[0], n_modes, name);
    q.party_y = detail::parse_party(parts[1], n_modes, name);
    q.party_z = detail::parse_party(parts[2], n_modes, name);
    detail::require_disjoint({q.party_x, q.party_y, q.party_z}, name);
    return q;
  }
  if (auto body = inner("MONO")) {
    const auto parts = detail::split(*body, '|');
    if (parts.size() != 3)
      throw usage_error("MONO needs three '|'-separated parties in '" + name + "'; " +
                        detail::quantity_grammar_help(n_modes));
    q.kind = Quantity::Kind::monogamy_forward;
    q.party_x = detail::parse_party(parts[0], n_modes, name);
    q.party_y = detail::parse_party(parts[1], n_modes, name);
    q.party_z = detail::parse_party(parts[2], n_modes, name);
    detail::require_disjoint({q.party_x, q.party_y, q.party_z}, name);
    return q;
  }
  if (auto body = inner("NULL")) {
    q.kind = Quantity::Kind::nullifier;
    q.party_x = detail::parse_party(*body, n_modes, name);
    if (q.party_x.size() != 1)
      throw usage_error("NULL takes exactly one mode in '" + name + "'; " +
                        detail::quantity_grammar_help(n_modes));
    return q;
  }
  if (auto body = inner("LN")) {
    const auto parts = detail::split(*body, '|');
    if (parts.size() != 2)
      throw usage_error("LN needs two '|'-separated parties in '" + name + "'; " +
                        detail::quantity_grammar_help(n_modes));
    q.kind = Quantity::Kind::log_negativity;
    q.party_x = detail::parse_party(parts[0], n_modes, name);
    q.party_y = detail::parse_party(parts[1], n_modes, name);
    detail::require_disjoint({q.party_x, q.party_y}, name);
    return q;
  }
  throw usage_error("unrecognized quantity '" + name + "'; " +
                    detail::quantity_grammar_help(n_modes));
}

/// Value of one quantity on one state, plus whether any constituent Schur
/// complement had to be regularized.
struct QuantityValue {
  double value = 0.0;
  bool regularized = false;
};

inline QuantityValue evaluate_quantity(const Quantity& q, const CovarianceMatrix& sigma,
                                       const GraphWeights& weights) {
  QuantityValue out;
  auto steer = [&sigma, &out](const std::vector<int>& from, const std::vector<int>& to) {
    const SteeringValue s = group_steering(sigma, from, to);
    out.regularized = out.regularized || s.regularized;
    return s.value;
  };
  switch (q.kind) {
    case Quantity::Kind::steering:
      out.value = steer(q.party_x, q.party_y);
      return out;
    case Quantity::Kind::monogamy_forward: {
      const auto joined = detail::join_parties(q.party_y, q.party_z);
      out.value = steer(q.party_x, joined) - steer(q.party_x, q.party_y) -
                  steer(q.party_x, q.party_z);
      return out;
    }
    case Quantity::Kind::monogamy_reverse: {
      const auto joined = detail::join_parties(q.party_y, q.party_z);
      out.value = steer(joined, q.party_x) - steer(q.party_y, q.party_x) -
                  steer(q.party_z, q.party_x);
      return out;
    }
    case Quantity::Kind::nullifier: {
      const auto vars = nullifier_variances(sigma, weights);
      out.value = vars[static_cast<std::size_t>(q.party_x.front())].variance;
      return out;
    }
    case Quantity::Kind::log_negativity:
      out.value = log_negativity(sigma, Bipartition(q.party_x, q.party_y)).log_negativity;
      return out;
  }
  throw std::logic_error("evaluate_quantity: unhandled kind");
}

struct SweepConfig {
  FamilyKind family = FamilyKind::tripartite_linear;
  SweepAxis axis = SweepAxis::weight;
  double lo = 0.0;
  double hi = 0.0;
  int points = 201;
  double r = 0.345;
  std::vector<std::string> quantities;
  OutputFormat format = OutputFormat::csv;
  std::string out_path;  // empty means stdout
};

/// One grid point: both parameterizations, the requested columns, and the
/// names of any regularized columns.
struct SweepRecord {
  double t2 = 0.0;
  double weight = 0.0;
  std::vector<double> values;
  std::vector<std::string> flagged;
};

struct SweepResult {
  SweepConfig config;  // effective (post-clamp) configuration
  std::vector<std::string> columns;
  std::vector<SweepRecord> records;
};

namespace detail {

/// Clamp an axis range to the family's valid open interval; returns the
/// effective range in the requested axis units.
inline std::pair<double, double> clamp_axis_range(FamilyKind family, SweepAxis axis, double lo,
                                                  double hi) {
  if (!(lo <= hi)) throw usage_error("range: expected LO <= HI");
  if (axis == SweepAxis::transmittance)
    return {std::clamp(lo, kTransmittanceClampLo, kTransmittanceClampHi),
            std::clamp(hi, kTransmittanceClampLo, kTransmittanceClampHi)};
  const double wlo = weight_from_transmittance(family, kTransmittanceClampLo);
  const double whi = weight_from_transmittance(family, kTransmittanceClampHi);
  return {std::clamp(lo, wlo, whi), std::clamp(hi, wlo, whi)};
}

}  // namespace detail

/**
 * @brief Evaluates every requested quantity over the parameter grid.
 *
 * Grid points are independent and the output order is the grid order, so the
 * result is deterministic for a given config.
 */
inline SweepResult run_sweep(const SweepConfig& config) {
  if (config.points < 2) throw usage_error("points: need at least 2 grid points");
  if (config.quantities.empty()) throw usage_error("quantities: none requested");
  if (!(config.r >= 0.0)) throw usage_error("r: must be >= 0");

  const StateFamily probe(config.family, 0.5, config.r);
  std::vector<Quantity> parsed;
  parsed.reserve(config.quantities.size());
  for (const auto& name : config.quantities)
    parsed.push_back(parse_quantity(name, probe.n_modes()));

  SweepResult result;
  result.config = config;
  std::tie(result.config.lo, result.config.hi) =
      detail::clamp_axis_range(config.family, config.axis, config.lo, config.hi);
  if (!(result.config.lo < result.config.hi))
    throw usage_error("range: empty after clamping to the valid parameter interval");
  result.columns = config.quantities;

  result.records.reserve(static_cast<std::size_t>(config.points));
  for (int k = 0; k < config.points; ++k) {
    const double x = result.config.lo + (result.config.hi - result.config.lo) * k /
                                            (config.points - 1);
    SweepRecord rec;
    if (config.axis == SweepAxis::transmittance) {
      rec.t2 = x;
      rec.weight = weight_from_transmittance(config.family, x);
    } else {
      rec.weight = x;
      rec.t2 = transmittance_from_weight(config.family, x);
    }
    const StateFamily family(config.family, rec.t2, config.r);
    const CovarianceMatrix sigma = build_state(family);
    const GraphWeights weights = weights_from_transmittance(family);
    rec.values.reserve(parsed.size());
    for (const auto& q : parsed) {
      const QuantityValue v = evaluate_quantity(q, sigma, weights);
      rec.values.push_back(v.value);
      if (v.regularized) rec.flagged.push_back(q.name);
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

inline std::string join_flags(const std::vector<std::string>& flagged) {
  std::string s;
  for (std::size_t k = 0; k < flagged.size(); ++k) {
    if (k > 0) s += ';';
    s += "regularized:" + flagged[k];
  }
  return s;
}

/// CSV schema: t2, weight, one column per quantity in declaration order, flags.
inline void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << "t2,weight";
  for (const auto& name : result.columns) os << ',' << name;
  os << ",flags\n";
  for (const auto& rec : result.records) {
    os << format_double(rec.t2) << ',' << format_double(rec.weight);
    for (double v : rec.values) os << ',' << format_double(v);
    os << ',' << join_flags(rec.flagged) << '\n';
  }
}

inline nlohmann::json sweep_to_json(const SweepResult& result) {
  nlohmann::json j;
  j["config"] = {{"family", to_string(result.config.family)},
                 {"axis", to_string(result.config.axis)},
                 {"range", {result.config.lo, result.config.hi}},
                 {"points", result.config.points},
                 {"r", result.config.r},
                 {"quantities", result.config.quantities},
                 {"format", to_string(result.config.format)}};
  nlohmann::json records = nlohmann::json::array();
  for (const auto& rec : result.records) {
    nlohmann::json row;
    row["t2"] = rec.t2;
    row["weight"] = rec.weight;
    for (std::size_t k = 0; k < result.columns.size(); ++k) row[result.columns[k]] = rec.values[k];
    row["flags"] = join_flags(rec.flagged);
    records.push_back(std::move(row));
  }
  j["records"] = std::move(records);
  return j;
}

// ---------------------------------------------------------------------------
// Verification report
// ---------------------------------------------------------------------------

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;       // worst-case margin in the check's own units
  std::string detail;       // where the worst case occurred
};

namespace detail {

inline std::vector<std::array<std::vector<int>, 3>> monogamy_triples(FamilyKind kind) {
  if (kind == FamilyKind::tripartite_linear) return {{{{0}, {1}, {2}}}};
  return {{{{0}, {1}, {2}}},
          {{{0}, {1}, {3}}},
          {{{0}, {2}, {3}}},
          {{{1}, {2}, {3}}},
          {{{0}, {2, 3}, {1}}}};
}

}  // namespace detail

/**
 * @brief Grid verification of the family's structural identities: route
 *        equivalence, nullifier formulas, purity, physicality, monogamy and
 *        the e^{-2r} nullifier scaling.
 */
inline std::vector<VerifyCheck> run_verify(FamilyKind kind, double r, int points) {
  if (points < 2) throw usage_error("points: need at least 2 grid points");
  if (!(r >= 0.0)) throw usage_error("r: must be >= 0");

  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k)
    grid[static_cast<std::size_t>(k)] =
        kTransmittanceClampLo + (kTransmittanceClampHi - kTransmittanceClampLo) * k / (points - 1);

  VerifyCheck equivalence{"closed-form-vs-propagated", true, 0.0, ""};
  VerifyCheck nullifiers{"nullifier-variances", true, 0.0, ""};
  VerifyCheck purity{"purity", true, 0.0, ""};
  VerifyCheck physical{"physicality", true, 1.0, ""};
  VerifyCheck monogamy{"monogamy-residuals", true, 1.0, ""};
  VerifyCheck scaling{"antisqueezing-cancellation", true, 0.0, ""};

  const auto triples = detail::monogamy_triples(kind);
  const std::vector<double> r_grid{0.0, 0.115, 0.345, 0.6, r};

  for (double t2 : grid) {
    const StateFamily family(kind, t2, r);
    const CovarianceMatrix propagated = build_state(family);
    const CovarianceMatrix closed = closed_form_state(family);

    const double diff = (propagated.entries() - closed.entries()).cwiseAbs().maxCoeff();
    if (diff > equivalence.worst) equivalence = {equivalence.name, true, diff, "t2=" + format_double(t2)};

    const GraphWeights weights = weights_from_transmittance(family);
    const auto measured = nullifier_variances(propagated, weights);
    const auto expected = closed_form_nullifier_variances(family);
    for (std::size_t a = 0; a < measured.size(); ++a) {
      const double nd = std::abs(measured[a].variance - expected[a].variance);
      if (nd > nullifiers.worst)
        nullifiers = {nullifiers.name, true, nd,
                      "t2=" + format_double(t2) + " mode " + measured[a].label};
    }

    for (double nu : symplectic_eigenvalues(propagated)) {
      const double pd = std::abs(nu - 1.0);
      if (pd > purity.worst) purity = {purity.name, true, pd, "t2=" + format_double(t2)};
    }

    const double margin = physicality_margin(propagated.entries());
    if (margin < physical.worst) physical = {physical.name, true, margin, "t2=" + format_double(t2)};

    for (const auto& triple : triples)
      for (const auto& res : monogamy_residuals(propagated, triple))
        if (res.residual < monogamy.worst)
          monogamy = {monogamy.name, true, res.residual,
                      "t2=" + format_double(t2) + " " + res.label};

    // Var(r) * e^{2r} must not depend on r.
    const std::size_t n_null = measured.size();
    std::vector<double> scaled_lo(n_null), scaled_hi(n_null);
    bool first = true;
    for (double rr : r_grid) {
      const StateFamily fam_r(kind, t2, rr);
      const auto vars = nullifier_variances(build_state(fam_r), weights_from_transmittance(fam_r));
      for (std::size_t a = 0; a < n_null; ++a) {
        const double scaled = vars[a].variance * std::exp(2.0 * rr);
        if (first) {
          scaled_lo[a] = scaled_hi[a] = scaled;
        } else {
          scaled_lo[a] = std::min(scaled_lo[a], scaled);
          scaled_hi[a] = std::max(scaled_hi[a], scaled);
        }
      }
      first = false;
    }
    for (std::size_t a = 0; a < n_null; ++a)
      if (scaled_hi[a] - scaled_lo[a] > scaling.worst)
        scaling = {scaling.name, true, scaled_hi[a] - scaled_lo[a],
                   "t2=" + format_double(t2) + " mode " + measured[a].label};
  }

  equivalence.passed = equivalence.worst <= 1e-10;
  nullifiers.passed = nullifiers.worst <= 1e-10;
  purity.passed = purity.worst <= numeric.physicality_tol;
  physical.passed = physical.worst >= -numeric.physicality_tol;
  monogamy.passed = monogamy.worst >= -numeric.steering_threshold;
  scaling.passed = scaling.worst <= numeric.physicality_tol;
  return {equivalence, nullifiers, purity, physical, monogamy, scaling};
}

inline void write_verify_report(std::ostream& os, const std::vector<VerifyCheck>& checks) {
  for (const auto& c : checks)
    os << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "  worst=" << format_double(c.worst)
       << (c.detail.empty() ? "" : "  at " + c.detail) << '\n';
}

// ---------------------------------------------------------------------------
// Boundary report
// ---------------------------------------------------------------------------

struct BoundaryRow {
  std::string quantity;
  std::optional<double> weight;  // nullopt when no crossing exists in range
  std::optional<double> t2;
};

namespace detail {

/// Every ordered pairwise and one-vs-two steering quantity of a family.
inline std::vector<Quantity> boundary_quantities(FamilyKind kind) {
  const int n = kind == FamilyKind::tripartite_linear ? 3 : 4;
  std::vector<Quantity> out;
  auto add = [&out](std::vector<int> from, std::vector<int> to) {
    Quantity q;
    q.kind = Quantity::Kind::steering;
    q.party_x = std::move(from);
    q.party_y = std::move(to);
    q.name = "G(" + party_label(q.party_x) + "->" + party_label(q.party_y) + ")";
    out.push_back(std::move(q));
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) add({i}, {j});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        if (i != j && i != k) {
          add({i}, {j, k});
          add({j, k}, {i});
        }
  return out;
}

}  // namespace detail

/**
 * @brief Scans the weight axis and bisects every support boundary of every
 *        pairwise and one-vs-two steering quantity.
 *
 * Quantities without a crossing produce a row with empty boundary fields.
 */
inline std::vector<BoundaryRow> run_boundaries(FamilyKind kind, double r, int scan_points = 201) {
  if (!(r >= 0.0)) throw usage_error("r: must be >= 0");
  const double wlo = weight_from_transmittance(kind, kTransmittanceClampLo);
  const double whi = weight_from_transmittance(kind, kTransmittanceClampHi);

  std::vector<BoundaryRow> rows;
  for (const auto& q : detail::boundary_quantities(kind)) {
    std::vector<bool> present(static_cast<std::size_t>(scan_points));
    std::vector<double> w(static_cast<std::size_t>(scan_points));
    for (int k = 0; k < scan_points; ++k) {
      w[static_cast<std::size_t>(k)] = wlo + (whi - wlo) * k / (scan_points - 1);
      const double t2 = transmittance_from_weight(kind, w[static_cast<std::size_t>(k)]);
      const CovarianceMatrix sigma = build_state(StateFamily(kind, t2, r));
      present[static_cast<std::size_t>(k)] =
          group_steering(sigma, q.party_x, q.party_y).value > numeric.steering_threshold;
    }
    bool any = false;
    for (int k = 0; k + 1 < scan_points; ++k) {
      if (present[static_cast<std::size_t>(k)] == present[static_cast<std::size_t>(k + 1)])
        continue;
      const auto crossing =
          find_zero_crossing(kind, r, q.party_x, q.party_y, w[static_cast<std::size_t>(k)],
                             w[static_cast<std::size_t>(k + 1)]);
      if (crossing) {
        rows.push_back({q.name, *crossing, transmittance_from_weight(kind, *crossing)});
        any = true;
      }
    }
    if (!any) rows.push_back({q.name, std::nullopt, std::nullopt});
  }
  return rows;
}

inline void write_boundaries_csv(std::ostream& os, const std::vector<BoundaryRow>& rows) {
  os << "quantity,boundary_weight,boundary_t2\n";
  for (const auto& row : rows) {
    os << row.quantity << ',';
    if (row.weight)
      os << format_double(*row.weight) << ',' << format_double(*row.t2);
    else
      os << "none,none";
    os << '\n';
  }
}

inline nlohmann::json boundaries_to_json(const std::vector<BoundaryRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json item;
    item["quantity"] = row.quantity;
    if (row.weight) {
      item["boundary_weight"] = *row.weight;
      item["boundary_t2"] = *row.t2;
    } else {
      item["boundary_weight"] = nullptr;
      item["boundary_t2"] = nullptr;
    }
    j.push_back(std::move(item));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Single-state report
// ---------------------------------------------------------------------------

struct StateReport {
  FamilyKind kind = FamilyKind::tripartite_linear;
  double t2 = 0.0;
  double r = 0.0;
  Eigen::MatrixXd sigma_closed;
  Eigen::MatrixXd sigma_propagated;
  double max_difference = 0.0;
  std::vector<std::pair<std::string, double>> weights;
  std::vector<NullifierVariance> nullifiers;
  std::vector<double> symplectic_spectrum;
};

inline StateReport run_state_report(FamilyKind kind, double t2, double r) {
  const StateFamily family(kind, t2, r);
  StateReport report;
  report.kind = kind;
  report.t2 = t2;
  report.r = r;
  report.sigma_closed = closed_form_state(family).entries();
  report.sigma_propagated = build_state(family).entries();
  report.max_difference = (report.sigma_closed - report.sigma_propagated).cwiseAbs().maxCoeff();
  const GraphWeights weights = weights_from_transmittance(family);
  if (kind == FamilyKind::tripartite_linear)
    report.weights = {{"C_AB", weights.weight(0, 1)}, {"C_BC", weights.weight(1, 2)}};
  else
    report.weights = {{"C_A", weights.weight(0, 2)}, {"C_B", weights.weight(1, 2)}};
  report.nullifiers = nullifier_variances(CovarianceMatrix(report.sigma_propagated), weights);
  report.symplectic_spectrum = symplectic_eigenvalues(CovarianceMatrix(report.sigma_propagated));
  return report;
}

/// Long-format CSV: item,row,col,value with empty row/col for scalars.
inline void write_state_csv(std::ostream& os, const StateReport& report) {
  os << "item,row,col,value\n";
  os << "family,,," << to_string(report.kind) << '\n';
  os << "t2,,," << format_double(report.t2) << '\n';
  os << "r,,," << format_double(report.r) << '\n';
  for (const auto& [label, value] : report.weights)
    os << "weight_" << label << ",,," << format_double(value) << '\n';
  auto dump_matrix = [&os](const std::string& name, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        os << name << ',' << i << ',' << j << ',' << format_double(m(i, j)) << '\n';
  };
  dump_matrix("sigma_closed_form", report.sigma_closed);
  dump_matrix("sigma_propagated", report.sigma_propagated);
  os << "max_difference,,," << format_double(report.max_difference) << '\n';
  for (const auto& nv : report.nullifiers)
    os << "nullifier_variance_" << nv.label << ",,," << format_double(nv.variance) << '\n';
  for (std::size_t k = 0; k < report.symplectic_spectrum.size(); ++k)
    os << "symplectic_eigenvalue," << k << ",," << format_double(report.symplectic_spectrum[k])
       << '\n';
}

inline nlohmann::json state_report_to_json(const StateReport& report) {
  auto matrix_to_json = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json j;
  j["family"] = to_string(report.kind);
  j["t2"] = report.t2;
  j["r"] = report.r;
  for (const auto& [label, value] : report.weights) j["weights"][label] = value;
  j["sigma_closed_form"] = matrix_to_json(report.sigma_closed);
  j["sigma_propagated"] = matrix_to_json(report.sigma_propagated);
  j["max_difference"] = report.max_difference;
  for (const auto& nv : report.nullifiers) j["nullifier_variances"][nv.label] = nv.variance;
  j["symplectic_eigenvalues"] = report.symplectic_spectrum;
  return j;
}

}  // namespace gwsteer
