// Command-line front end for the gwsteer library: parameter sweeps over the
// weighted graph-state families, structural verification, one-way steering
// boundary location, and single-state inspection.
//
// Exit status: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwsteer/numeric.hpp"
#include "gwsteer/sweep.hpp"

namespace {

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct RangeOption {
  double lo = 0.0;
  double hi = 0.0;
  bool set = false;
};

RangeOption parse_range(const std::string& text) {
  const auto sep = text.find(':');
  if (sep == std::string::npos)
    throw gwsteer::usage_error("range: expected LO:HI, got '" + text + "'");
  RangeOption range;
  try {
    range.lo = std::stod(text.substr(0, sep));
    range.hi = std::stod(text.substr(sep + 1));
  } catch (const std::exception&) {
    throw gwsteer::usage_error("range: could not parse numbers in '" + text + "'");
  }
  range.set = true;
  return range;
}

/// Writes through `emit` either to stdout or to the given path.
template <typename Emit>
void with_output(const std::string& path, Emit&& emit) {
  if (path.empty()) {
    emit(std::cout);
    std::cout.flush();
    if (!std::cout.good()) throw io_error("failed writing to stdout");
    return;
  }
  std::ofstream ofs(path, std::ios::binary);
  if (!ofs) throw io_error("cannot open '" + path + "' for writing");
  emit(ofs);
  ofs.flush();
  if (!ofs.good()) throw io_error("failed writing to '" + path + "'");
}

const std::string kQuantityHelp =
    "Comma-separated quantities. Grammar: G(X->Y) steering of party Y by party X; "
    "MONO(K|I|J) residual G(K->IJ)-G(K->I)-G(K->J); MONOR(K|I|J) residual "
    "G(IJ->K)-G(I->K)-G(J->K); NULL(A) nullifier variance of mode A; LN(X|Y) "
    "logarithmic negativity across X|Y. Parties are disjoint strings of mode letters "
    "(A,B,C for tripartite; A,B,C,D for fourmode), e.g. G(A->BC), MONO(A|CD|B).";

}  // namespace

int main(int argc, char** argv) {
  using gwsteer::FamilyKind;
  using gwsteer::OutputFormat;
  using gwsteer::SweepAxis;

  CLI::App app{
      "gwsteer: Gaussian EPR steering in weighted graph states.\n"
      "Builds linear tripartite and four-mode square weighted graph states from\n"
      "squeezed inputs and beam-splitter networks, and quantifies Gaussian\n"
      "steering, directionality, monogamy residuals and entanglement."};
  app.require_subcommand(1);

  const std::map<std::string, FamilyKind> family_map{
      {"tripartite", FamilyKind::tripartite_linear}, {"fourmode", FamilyKind::fourmode_square}};
  const std::map<std::string, SweepAxis> axis_map{{"t2", SweepAxis::transmittance},
                                                  {"weight", SweepAxis::weight}};
  const std::map<std::string, OutputFormat> format_map{{"csv", OutputFormat::csv},
                                                       {"json", OutputFormat::json}};

  FamilyKind family = FamilyKind::tripartite_linear;
  SweepAxis axis = SweepAxis::weight;
  std::string range_text;
  int sweep_points = 201;
  int verify_points = 101;
  int boundary_points = 201;
  double r = 0.345;
  double t2 = 0.5;
  std::vector<std::string> quantities;
  OutputFormat format = OutputFormat::csv;
  std::string out_path;

  auto add_family = [&](CLI::App* cmd) {
    cmd->add_option("--family", family, "State family")
        ->transform(CLI::CheckedTransformer(family_map, CLI::ignore_case))
        ->required();
  };
  auto add_r = [&](CLI::App* cmd) { cmd->add_option("--r", r, "Squeezing parameter (default 0.345)"); };
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format (csv|json)")
        ->transform(CLI::CheckedTransformer(format_map, CLI::ignore_case));
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "Output path (default: stdout)");
  };

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Evaluate quantities over a parameter grid and emit CSV or JSON records");
  add_family(sweep_cmd);
  sweep_cmd->add_option("--axis", axis, "Sweep axis: t2 or weight (default weight)")
      ->transform(CLI::CheckedTransformer(axis_map, CLI::ignore_case));
  sweep_cmd->add_option("--range", range_text,
                        "Axis range LO:HI (default: full valid range; clamped to "
                        "t2 in [0.001, 0.999])");
  sweep_cmd->add_option("--points", sweep_points, "Grid points (default 201)");
  add_r(sweep_cmd);
  sweep_cmd->add_option("--quantities", quantities, kQuantityHelp)->delimiter(',')->required();
  add_format(sweep_cmd);
  add_out(sweep_cmd);

  CLI::App* verify_cmd = app.add_subcommand(
      "verify",
      "Run the structural identity suite over a transmittance grid: closed form vs "
      "propagation, nullifier variances, purity, physicality, monogamy, antisqueezing "
      "cancellation");
  add_family(verify_cmd);
  verify_cmd->add_option("--points", verify_points, "Grid points (default 101)");
  add_r(verify_cmd);
  add_out(verify_cmd);

  CLI::App* boundaries_cmd = app.add_subcommand(
      "boundaries",
      "Locate every support boundary of pairwise and one-vs-two steering over the weight axis");
  add_family(boundaries_cmd);
  boundaries_cmd->add_option("--points", boundary_points, "Scan grid points (default 201)");
  add_r(boundaries_cmd);
  add_format(boundaries_cmd);
  add_out(boundaries_cmd);

  CLI::App* state_cmd = app.add_subcommand(
      "state",
      "Dump one state: closed-form and propagated covariance, weight factors, nullifier "
      "variances and symplectic eigenvalues");
  add_family(state_cmd);
  state_cmd->add_option("--t2", t2, "Transmittance in (0,1)")->required();
  add_r(state_cmd);
  add_format(state_cmd);
  add_out(state_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sweep_cmd) {
      gwsteer::SweepConfig config;
      config.family = family;
      config.axis = axis;
      config.points = sweep_points;
      config.r = r;
      config.quantities = quantities;
      config.format = format;
      config.out_path = out_path;
      if (!range_text.empty()) {
        const RangeOption range = parse_range(range_text);
        config.lo = range.lo;
        config.hi = range.hi;
      } else if (axis == SweepAxis::transmittance) {
        config.lo = gwsteer::kTransmittanceClampLo;
        config.hi = gwsteer::kTransmittanceClampHi;
      } else {
        config.lo = gwsteer::weight_from_transmittance(family, gwsteer::kTransmittanceClampLo);
        config.hi = gwsteer::weight_from_transmittance(family, gwsteer::kTransmittanceClampHi);
      }
      const gwsteer::SweepResult result = gwsteer::run_sweep(config);
      with_output(out_path, [&](std::ostream& os) {
        if (format == OutputFormat::csv)
          gwsteer::write_sweep_csv(os, result);
        else
          os << gwsteer::sweep_to_json(result).dump(2) << '\n';
      });
      return kExitOk;
    }

    if (*verify_cmd) {
      const auto checks = gwsteer::run_verify(family, r, verify_points);
      with_output(out_path,
                  [&](std::ostream& os) { gwsteer::write_verify_report(os, checks); });
      for (const auto& check : checks)
        if (!check.passed) return kExitVerificationFailure;
      return kExitOk;
    }

    if (*boundaries_cmd) {
      const auto rows = gwsteer::run_boundaries(family, r, boundary_points);
      with_output(out_path, [&](std::ostream& os) {
        if (format == OutputFormat::csv)
          gwsteer::write_boundaries_csv(os, rows);
        else
          os << gwsteer::boundaries_to_json(rows).dump(2) << '\n';
      });
      return kExitOk;
    }

    if (*state_cmd) {
      const gwsteer::StateReport report = gwsteer::run_state_report(family, t2, r);
      with_output(out_path, [&](std::ostream& os) {
        if (format == OutputFormat::csv)
          gwsteer::write_state_csv(os, report);
        else
          os << gwsteer::state_report_to_json(report).dump(2) << '\n';
      });
      return kExitOk;
    }
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const gwsteer::usage_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerificationFailure;
  }
  return kExitUsage;
}
