#include "cli.hpp"

#include "ifm/errors.hpp"
#include "ifm/interferometer.hpp"
#include "ifm/layout_dsl.hpp"
#include "ifm/soft_photon.hpp"
#include "ifm/verify.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace ifm::cli {

namespace {

using nlohmann::json;

// Thrown for bad input that has already been reported to the error stream.
struct ReportedFailure {};

std::string csv_number(double v) { return fmt::format("{:.17g}", v); }

json vec_json(const optics::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

mzi::Layout load_layout(const std::string& path, std::ostream& err) {
  const dsl::LayoutDocument doc = dsl::parse_layout(read_file(path));
  for (const auto& w : doc.warnings) err << dsl::format_diagnostic(path, w) << '\n';
  for (const auto& d : doc.diagnostics) err << dsl::format_diagnostic(path, d) << '\n';
  if (!doc.ok()) throw ReportedFailure{};
  return *doc.layout;
}

// Writes `text` to `path`, or to `out` when no path was given.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError(fmt::format("cannot write '{}'", path));
  file << text;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("IFM_SEED");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || *env == '-') {
    throw ValidationError(fmt::format("IFM_SEED='{}' is not an unsigned 64-bit integer", env));
  }
  return value;
}

json report_json(const mzi::DetectionReport& r) {
  json j = {
      {"p_d1", r.p_d1},
      {"p_d2", r.p_d2},
      {"p_absorbed", r.p_absorbed},
      {"momentum_d1", vec_json(r.momentum_d1.components())},
      {"momentum_d2", vec_json(r.momentum_d2.components())},
      {"amplitude_d1_re", r.amplitude_d1.real()},
      {"amplitude_d1_im", r.amplitude_d1.imag()},
  };
  if (r.interaction) {
    j["interaction"] = {{"arm", mzi::to_string(r.interaction->arm)},
                        {"position", vec_json(r.interaction->position)},
                        {"absorbed_weight", r.interaction->absorbed_weight}};
  }
  return j;
}

struct SimulateArgs {
  std::string layout;
  std::string format = "json";
  std::string output;
  double locality_tolerance = 1e-6;
};

int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const mzi::Layout layout = load_layout(a.layout, err);
  const mzi::DetectionReport r =
      mzi::propagate_analytic(layout, {.locality_tolerance = a.locality_tolerance});
  if (a.format == "csv") {
    const auto& m1 = r.momentum_d1.components();
    const auto& m2 = r.momentum_d2.components();
    std::string text =
        "p_d1,p_d2,p_absorbed,momentum_d1_x,momentum_d1_y,momentum_d1_z,momentum_d2_x,"
        "momentum_d2_y,momentum_d2_z,amplitude_d1_re,amplitude_d1_im\n";
    text += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", csv_number(r.p_d1),
                        csv_number(r.p_d2), csv_number(r.p_absorbed), csv_number(m1.x()),
                        csv_number(m1.y()), csv_number(m1.z()), csv_number(m2.x()),
                        csv_number(m2.y()), csv_number(m2.z()),
                        csv_number(r.amplitude_d1.real()), csv_number(r.amplitude_d1.imag()));
    emit(text, a.output, out);
  } else {
    emit(report_json(r).dump(2) + "\n", a.output, out);
  }
  return kExitOk;
}

struct ShotsArgs {
  std::string layout;
  std::uint64_t n = 0;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::uint64_t batch = 1000;
  std::string csv;
  std::string output;
};

int shots(const ShotsArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n == 0) throw ValidationError("--n must be at least 1");
  const mzi::Layout layout = load_layout(a.layout, err);
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  const mzi::ShotCounts counts = mzi::run_shots(layout, a.n, seed, a.threads);
  const json j = {{"n_shots", a.n},
                  {"seed", seed},
                  {"d1", counts.d1},
                  {"d2", counts.d2},
                  {"absorbed", counts.absorbed}};
  emit(j.dump(2) + "\n", a.output, out);

  if (!a.csv.empty()) {
    const auto batches = mzi::run_shot_batches(layout, a.n, seed, a.batch, a.threads);
    std::string text = "batch,first_shot,shots,d1,d2,absorbed\n";
    std::uint64_t first = 0;
    for (std::size_t i = 0; i < batches.size(); ++i) {
      const auto& b = batches[i];
      text += fmt::format("{},{},{},{},{},{}\n", i, first, b.total(), b.d1, b.d2, b.absorbed);
      first += b.total();
    }
    emit(text, a.csv, out);
  }
  return kExitOk;
}

struct SoftArgs {
  std::optional<double> beta;
  double e_minus = 0.0;
  double e_plus = 0.0;
  double solid_angle = 0.0;
  std::string legs;
  double e_squared = soft::kHeavisideLorentzE2;
  std::string format = "json";
  std::string output;
};

double weinberg_from_legs(const std::string& path) {
  const json j = json::parse(read_file(path));
  std::vector<soft::ProcessLeg> legs;
  for (const auto& leg : j.at("legs")) {
    legs.push_back({leg.at("charge").get<double>(), leg.at("eta").get<int>(),
                    leg.value("beta", 0.0)});
  }
  return soft::weinberg_factor_general(
      legs, j.at("pairwise_beta").get<std::vector<std::vector<double>>>());
}

int soft_command(const SoftArgs& a, std::ostream& out) {
  if (!a.beta && a.legs.empty()) throw ValidationError("soft needs --beta or --legs");
  const double weinberg =
      a.legs.empty() ? soft::weinberg_factor_fermion(*a.beta) : weinberg_from_legs(a.legs);
  const soft::SoftWindow window{a.e_minus, a.e_plus};
  const double mu = soft::mean_photons(weinberg, window);
  const soft::PollutionConfig config{a.solid_angle};
  const double pollution = soft::pollution_probability(mu, config);

  const mzi::Layout bomb = mzi::with_obstruction(mzi::square_layout(), "lower", 1.0);
  const mzi::DetectionReport base = mzi::propagate_analytic(bomb);
  const soft::PollutedReport corrected =
      soft::corrected_probabilities(base, pollution, config.detector_share);
  const soft::FermionReadings readings = soft::fermion_factor_readings(0.9999);

  if (a.format == "csv") {
    std::string text = "quantity,value\n";
    const std::pair<const char*, double> rows[] = {
        {"weinberg_a", weinberg},
        {"weinberg_a_numeric", weinberg * a.e_squared},
        {"mu", mu},
        {"pollution", pollution},
        {"p_d1", corrected.report.p_d1},
        {"p_d2", corrected.report.p_d2},
        {"p_absorbed", corrected.report.p_absorbed},
        {"absorbed_silent", corrected.absorbed_silent},
        {"absorbed_and_d1", corrected.absorbed_and_d1},
        {"absorbed_and_d2", corrected.absorbed_and_d2},
        {"beta_0_9999_with_two_pi_squared", readings.with_two_pi_squared},
        {"beta_0_9999_without_two_pi_squared", readings.without_two_pi_squared},
    };
    for (const auto& [name, value] : rows) text += fmt::format("{},{}\n", name, csv_number(value));
    emit(text, a.output, out);
    return kExitOk;
  }

  json j = {
      {"weinberg_a", weinberg},
      {"weinberg_units", "e^2"},
      {"e_squared", a.e_squared},
      {"weinberg_a_numeric", weinberg * a.e_squared},
      {"e_minus", a.e_minus},
      {"e_plus", a.e_plus},
      {"log_ratio", std::log(a.e_plus) - std::log(a.e_minus)},
      {"mu", mu},
      {"solid_angle_fraction", a.solid_angle},
      {"angular_model", "isotropic"},
      {"pollution", pollution},
      {"corrected",
       {{"base", {{"p_d1", base.p_d1}, {"p_d2", base.p_d2}, {"p_absorbed", base.p_absorbed}}},
        {"p_d1", corrected.report.p_d1},
        {"p_d2", corrected.report.p_d2},
        {"p_absorbed", corrected.report.p_absorbed},
        {"absorbed_silent", corrected.absorbed_silent},
        {"absorbed_and_d1", corrected.absorbed_and_d1},
        {"absorbed_and_d2", corrected.absorbed_and_d2},
        {"relative_change_d2", (corrected.report.p_d2 - base.p_d2) / base.p_d2}}},
      {"beta_0_9999",
       {{"with_two_pi_squared", readings.with_two_pi_squared},
        {"without_two_pi_squared", readings.without_two_pi_squared}}},
  };
  if (a.beta) j["beta"] = *a.beta;
  if (!a.legs.empty()) j["legs_file"] = a.legs;
  emit(j.dump(2) + "\n", a.output, out);
  return kExitOk;
}

struct FringeArgs {
  std::string layout;
  double min = 0.0;
  double max = 0.0;
  int steps = 0;
  std::string output;
};

int fringe(const FringeArgs& a, std::ostream& out, std::ostream& err) {
  const mzi::Layout layout = load_layout(a.layout, err);
  std::string text = "delta_l,p_d1,p_d2\n";
  for (const auto& row : mzi::fringe_scan(layout, a.min, a.max, a.steps)) {
    text += fmt::format("{},{},{}\n", csv_number(row.delta_l), csv_number(row.p_d1),
                        csv_number(row.p_d2));
  }
  emit(text, a.output, out);
  return kExitOk;
}

struct VerifyArgs {
  int n_max = fock::kDefaultMaxOccupation;
  bool unrestricted = false;
};

int verify_command(const VerifyArgs& a, std::ostream& out) {
  verify::VerifyOptions options;
  options.n_max = a.n_max;
  options.subspace = a.unrestricted ? fock::Subspace::full : fock::Subspace::below_cap;
  const auto results = verify::run_suite(options);
  for (const auto& r : results) {
    fmt::print(out, "{:<4} {:<45} residual {:<12.4e} tolerance {:.1e}\n",
               r.passed() ? "PASS" : "FAIL", r.name, r.residual, r.tolerance);
  }
  const bool ok = verify::all_passed(results);
  fmt::print(out, "{}\n", ok ? "all checks within tolerance" : "tolerance exceeded");
  return ok ? kExitOk : kExitTolerance;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interaction-free measurement simulator for a Mach-Zehnder interferometer",
               "ifm"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Analytic detection probabilities for a layout");
  sim_cmd->add_option("layout", sim.layout, "Layout file (.ifm)")->required();
  sim_cmd->add_option("--format", sim.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sim_cmd->add_option("--output,-o", sim.output, "Write to file instead of stdout");
  sim_cmd->add_option("--locality-tolerance", sim.locality_tolerance,
                      "Maximum packet overlap between the two arms");

  ShotsArgs sh;
  auto* shots_cmd = app.add_subcommand("shots", "Seeded Monte Carlo detector counts");
  shots_cmd->add_option("layout", sh.layout, "Layout file (.ifm)")->required();
  shots_cmd->add_option("--n", sh.n, "Number of shots")->required();
  shots_cmd->add_option("--seed", sh.seed, "Seed (default: $IFM_SEED or 0)");
  shots_cmd->add_option("--threads", sh.threads, "Worker threads (0 = all cores)");
  shots_cmd->add_option("--batch", sh.batch, "Shots per CSV batch row");
  shots_cmd->add_option("--csv", sh.csv, "Also write per-batch tallies to this CSV file");
  shots_cmd->add_option("--output,-o", sh.output, "Write counts JSON to file");

  SoftArgs so;
  auto* soft_cmd = app.add_subcommand("soft", "Low-energy photon emission and pollution");
  soft_cmd->add_option("--beta", so.beta, "Fermion velocity in [0, 1)");
  soft_cmd->add_option("--e-minus", so.e_minus, "Detection threshold E-")->required();
  soft_cmd->add_option("--e-plus", so.e_plus, "Upper energy bound E+")->required();
  soft_cmd->add_option("--solid-angle", so.solid_angle, "Detector solid-angle fraction")
      ->required();
  soft_cmd->add_option("--legs", so.legs, "JSON file with charged legs and pairwise velocities");
  soft_cmd->add_option("--e-squared", so.e_squared, "Numerical value of e^2");
  soft_cmd->add_option("--format", so.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  soft_cmd->add_option("--output,-o", so.output, "Write to file instead of stdout");

  FringeArgs fr;
  auto* fringe_cmd = app.add_subcommand("fringe", "Scan the arm-length mismatch");
  fringe_cmd->add_option("layout", fr.layout, "Layout file (.ifm)")->required();
  fringe_cmd->add_option("--min", fr.min, "Smallest delta L")->required();
  fringe_cmd->add_option("--max", fr.max, "Largest delta L")->required();
  fringe_cmd->add_option("--steps", fr.steps, "Number of samples (>= 2)")->required();
  fringe_cmd->add_option("--output,-o", fr.output, "Write CSV to file instead of stdout");

  VerifyArgs ve;
  auto* verify_cmd = app.add_subcommand("verify", "Run the operator-identity and optics checks");
  verify_cmd->add_option("--n-max", ve.n_max, "Occupation cap of the oracle Fock space");
  verify_cmd->add_flag("--unrestricted", ve.unrestricted,
                       "Measure rotation residuals on the full truncated space");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ifm: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (*sim_cmd) return simulate(sim, out, err);
    if (*shots_cmd) return shots(sh, out, err);
    if (*soft_cmd) return soft_command(so, out);
    if (*fringe_cmd) return fringe(fr, out, err);
    if (*verify_cmd) return verify_command(ve, out);
  } catch (const ReportedFailure&) {
    return kExitInvalid;
  } catch (const Error& e) {
    err << "ifm: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const json::exception& e) {
    err << "ifm: malformed JSON input: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace ifm::cli
