// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "ifm/errors.hpp"
#include "ifm/fock.hpp"
#include "ifm/interferometer.hpp"
#include "ifm/layout_dsl.hpp"
#include "ifm/optics.hpp"
#include "ifm/soft_photon.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed = true;
  std::string detail;
};

// Accumulates sub-check failures for one criterion.
class Tally {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      outcome_.passed = false;
      if (!outcome_.detail.empty()) outcome_.detail += "; ";
      outcome_.detail += what;
    }
  }
  void note(const std::string& what) {
    if (outcome_.passed) notes_ += (notes_.empty() ? "" : ", ") + what;
  }
  Outcome result() const {
    Outcome o = outcome_;
    if (o.passed) o.detail = notes_;
    return o;
  }

 private:
  Outcome outcome_;
  std::string notes_;
};

struct Process {
  int code;
  std::string out;
};

Process run_cli(const std::string& args) {
  const std::string cmd = fmt::format("'{}' {} 2>&1", IFM_CLI_PATH, args);
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  std::array<char, 4096> buffer{};
  while (std::size_t n = std::fread(buffer.data(), 1, buffer.size(), pipe)) out.append(buffer.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string layout_path(const char* name) { return (fs::path(IFM_LAYOUT_DIR) / name).string(); }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome no_bomb() {
  Tally t;
  const auto start = Clock::now();
  const Process p = run_cli(fmt::format("simulate '{}'", layout_path("mzi.ifm")));
  const double elapsed = seconds_since(start);
  t.require(p.code == 0, fmt::format("exit code {}", p.code));
  if (p.code != 0) return t.result();
  const json j = json::parse(p.out);
  const double d1 = j["p_d1"], d2 = j["p_d2"], ab = j["p_absorbed"];
  const double re = j["amplitude_d1_re"], im = j["amplitude_d1_im"];
  t.require(std::abs(d1 - 1) < 1e-12 && std::abs(d2) < 1e-12 && std::abs(ab) < 1e-12,
            fmt::format("probabilities ({}, {}, {})", d1, d2, ab));
  t.require(std::hypot(re + 1.0, im) < 1e-12, fmt::format("D1 amplitude {}{:+}i", re, im));
  t.require(elapsed < 1.0, fmt::format("runtime {:.3f} s", elapsed));
  t.note(fmt::format("p=({:.3g}, {:.3g}, {:.3g}) amp_D1={:.3g} in {:.3f} s", d1, d2, ab, re,
                     elapsed));
  return t.result();
}

Outcome bomb() {
  Tally t;
  const auto start = Clock::now();
  const Process p = run_cli(fmt::format("simulate '{}'", layout_path("mzi_bomb.ifm")));
  const double elapsed = seconds_since(start);
  t.require(p.code == 0, fmt::format("exit code {}", p.code));
  if (p.code != 0) return t.result();
  const json j = json::parse(p.out);
  const double d1 = j["p_d1"], d2 = j["p_d2"], ab = j["p_absorbed"];
  t.require(std::abs(d1 - 0.25) < 1e-12 && std::abs(d2 - 0.25) < 1e-12 &&
                std::abs(ab - 0.5) < 1e-12,
            fmt::format("probabilities ({}, {}, {})", d1, d2, ab));
  t.require(elapsed < 1.0, fmt::format("runtime {:.3f} s", elapsed));
  t.note(fmt::format("p=({}, {}, {}) in {:.3f} s", d1, d2, ab, elapsed));
  return t.result();
}

Outcome momentum() {
  Tally t;
  const ifm::mzi::Layout l = ifm::mzi::square_layout();
  const ifm::mzi::DetectionReport r = ifm::mzi::propagate_analytic(l);
  const ifm::optics::Vec3 p = l.source.mode.momentum().components();
  // Lower path to the D2 port: reflected at L11, L12 and L22.
  ifm::optics::Mat3 product = ifm::optics::Mat3::Identity();
  for (auto v : {ifm::mzi::Vertex::L11, ifm::mzi::Vertex::L12, ifm::mzi::Vertex::L22}) {
    product = l.elements.at(v).reflection.spatial() * product;
  }
  const ifm::optics::Vec3 expected = product * p;
  const double energy_gap = std::abs(r.momentum_d2.energy() - p.norm());
  const double direction_gap = (r.momentum_d2.components() - expected).norm();
  t.require(energy_gap < 1e-12, fmt::format("|p_D2| - |p| = {}", energy_gap));
  t.require(direction_gap < 1e-12, fmt::format("|p_D2 - R p| = {}", direction_gap));
  t.require((expected - p).norm() > 0.5, "output momentum was not rotated");
  t.note(fmt::format("p_D2=({:.3g}, {:.3g}, {:.3g}), energy gap {:.1e}", expected.x(),
                     expected.y(), expected.z(), energy_gap));
  return t.result();
}

Outcome monte_carlo() {
  Tally t;
  const auto layout = ifm::mzi::with_obstruction(ifm::mzi::square_layout(), "lower");
  const std::uint64_t n = 100000;
  const std::uint64_t seed = 2024;
  const auto start = Clock::now();
  const ifm::mzi::ShotCounts c = ifm::mzi::run_shots(layout, n, seed, 1);
  const ifm::mzi::ShotCounts again = ifm::mzi::run_shots(layout, n, seed, 1);
  const ifm::mzi::ShotCounts par2 = ifm::mzi::run_shots(layout, n, seed, 2);
  const ifm::mzi::ShotCounts par8 = ifm::mzi::run_shots(layout, n, seed, 8);
  const double elapsed = seconds_since(start);
  const auto within = [n](std::uint64_t k, double p) {
    const double sd = std::sqrt(n * p * (1 - p));
    return std::abs(static_cast<double>(k) - n * p) < 3 * sd;
  };
  t.require(c.total() == n, "counts do not sum to n");
  t.require(within(c.d1, 0.25), fmt::format("D1 count {}", c.d1));
  t.require(within(c.d2, 0.25), fmt::format("D2 count {}", c.d2));
  t.require(within(c.absorbed, 0.5), fmt::format("absorbed count {}", c.absorbed));
  t.require(c == again, "not reproducible for a fixed seed");
  t.require(c == par2 && c == par8, "counts depend on parallelism");
  t.require(elapsed < 5.0, fmt::format("runtime {:.3f} s", elapsed));
  t.note(fmt::format("counts ({}, {}, {}) identical at 1/2/8 threads, {:.3f} s for 4 runs", c.d1,
                     c.d2, c.absorbed, elapsed));
  return t.result();
}

Outcome fock_oracle() {
  Tally t;
  const auto start = Clock::now();
  const auto space = ifm::fock::build_space({"p", "Rp"}, 6);
  const ifm::fock::ModePair pair{"p", "Rp"};
  double worst_rotation = 0.0, worst_commutator = 0.0;
  for (double alpha : {kPi / 7, kPi / 4, kPi / 2}) {
    worst_rotation = std::max(worst_rotation, ifm::fock::rotation_check(space, pair, alpha));
    worst_commutator =
        std::max(worst_commutator, ifm::fock::commutator_preservation_check(space, pair, alpha));
  }
  const double elapsed = seconds_since(start);
  t.require(worst_rotation < 1e-9, fmt::format("rotation residual {}", worst_rotation));
  t.require(worst_commutator < 1e-10, fmt::format("commutator residual {}", worst_commutator));
  t.require(elapsed < 10.0, fmt::format("runtime {:.3f} s", elapsed));
  t.note(fmt::format("rotation {:.2e}, commutators {:.2e}, {:.3f} s", worst_rotation,
                     worst_commutator, elapsed));
  return t.result();
}

Outcome locality() {
  Tally t;
  const double sigma = 0.05;
  const ifm::optics::PhotonMode mode(ifm::optics::Momentum3(1, 0, 0), {0, 0, 1});
  const ifm::optics::GaussianPacket a{{0, 0, 0}, sigma, mode};
  const ifm::optics::GaussianPacket b{{8 * sigma, 0, 0}, sigma, mode};
  const double overlap = ifm::optics::packet_overlap(a, b);
  t.require(overlap < 1.2e-7, fmt::format("overlap {}", overlap));
  t.require(std::abs(overlap - std::exp(-16.0)) < 1e-20, "overlap differs from exp(-16)");
  t.require(ifm::optics::locality_check(a, b, 1.2e-7), "8 sigma check rejected");
  t.require(!ifm::optics::locality_check(a, a, 1.2e-7), "zero separation accepted");
  t.note(fmt::format("overlap {:.4e}; zero separation rejected", overlap));
  return t.result();
}

// artanh(b)/b - 1 from its Taylor series summed in long double, far from the
// library routine used by the implementation.
double fermion_series_oracle(double beta) {
  long double b2 = static_cast<long double>(beta) * beta, term = b2, sum = 0;
  for (int k = 1; k < 4000 && term > 1e-30L; ++k) {
    sum += term / (2 * k + 1);
    term *= b2;
  }
  return static_cast<double>(2.0L * sum / (4.0L * std::numbers::pi_v<long double> *
                                           std::numbers::pi_v<long double>));
}

Outcome soft_formulas() {
  Tally t;
  const double a = ifm::soft::weinberg_factor_fermion(0.5);
  const double oracle = fermion_series_oracle(0.5);
  t.require(std::abs(a - 0.0049958) < 1e-7, fmt::format("A(0.5) = {}", a));
  t.require(std::abs(a - oracle) < 1e-7, fmt::format("A(0.5) - oracle = {}", a - oracle));
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double beta = 0.99 * k / 49.0;
    const std::vector<ifm::soft::ProcessLeg> legs{{1.0, -1, 0.0}, {1.0, 1, beta}};
    const double general = ifm::soft::weinberg_factor_general(legs, {{0, beta}, {beta, 0}});
    worst = std::max(worst, std::abs(general - ifm::soft::weinberg_factor_fermion(beta)));
  }
  t.require(worst < 1e-12, fmt::format("general vs fermion gap {}", worst));
  bool doubling = true;
  for (double l : {0.1, 1.0, 6.907755278982137, 123.456}) {
    doubling &= ifm::soft::mean_photons_from_log_ratio(a, 2 * l) ==
                2 * ifm::soft::mean_photons_from_log_ratio(a, l);
  }
  const double mu1 = ifm::soft::mean_photons(a, {1.0, std::exp(1.5)});
  const double mu2 = ifm::soft::mean_photons(a, {1.0, std::exp(3.0)});
  doubling &= std::abs(mu2 - 2 * mu1) < 1e-15;
  t.require(doubling, "mu does not double with the log ratio");
  t.note(fmt::format("A(0.5)={:.7f} e^2 (oracle {:.7f}), grid gap {:.1e}", a, oracle, worst));
  return t.result();
}

template <typename E>
bool throws(const std::function<void()>& f, const char* needle) {
  try {
    f();
  } catch (const E& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  } catch (...) {
    return false;
  }
  return false;
}

Outcome divergences() {
  Tally t;
  using ifm::DivergenceError;
  t.require(throws<DivergenceError>([] { ifm::soft::weinberg_factor_fermion(1.0); }, "divergent"),
            "beta = 1");
  t.require(throws<DivergenceError>([] { ifm::soft::weinberg_factor_fermion(1.2); }, "divergent"),
            "beta > 1");
  t.require(throws<DivergenceError>([] { ifm::soft::mean_photons(0.01, {0.0, 1.0}); }, "diverges"),
            "E- = 0");
  t.require(throws<DivergenceError>([] { ifm::soft::mean_photons(0.01, {-1.0, 1.0}); }, "diverges"),
            "E- < 0");
  const Process cli = run_cli("soft --beta 1 --e-minus 1e-3 --e-plus 1 --solid-angle 0.5");
  t.require(cli.code == 1, fmt::format("CLI exit code {} for beta = 1", cli.code));
  t.note("DivergenceError for beta >= 1 and E- <= 0");
  return t.result();
}

Outcome pollution() {
  Tally t;
  const auto report =
      ifm::mzi::propagate_analytic(ifm::mzi::with_obstruction(ifm::mzi::square_layout(), "lower"));
  const double p = ifm::soft::pollution_probability(0.01, {1e-3});
  const auto corrected = ifm::soft::corrected_probabilities(report, p);
  const double relative = (corrected.report.p_d2 - report.p_d2) / report.p_d2;
  t.require(relative >= 0 && relative < 1e-3, fmt::format("relative change {}", relative));
  const double a = ifm::soft::weinberg_factor_fermion(0.9999);
  std::vector<double> sequence;
  for (double e_minus : {1e-2, 1e-10, 1e-50, 1e-150, 1e-300}) {
    sequence.push_back(
        ifm::soft::pollution_probability(ifm::soft::mean_photons(a, {e_minus, 1.0}), {1.0}));
  }
  bool increasing = true;
  for (std::size_t i = 1; i < sequence.size(); ++i) increasing &= sequence[i] >= sequence[i - 1];
  t.require(increasing, "pollution does not grow as E- shrinks");
  t.require(sequence.back() > 1 - 1e-12, fmt::format("pollution {} at E- = 1e-300",
                                                     sequence.back()));
  t.note(fmt::format("relative D2 change {:.2e}; pollution {:.3f} -> {:.15f}", relative,
                     sequence.front(), sequence.back()));
  return t.result();
}

Outcome parser() {
  Tally t;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(IFM_LAYOUT_DIR)) {
    if (entry.path().extension() != ".ifm") continue;
    ++files;
    std::ifstream in(entry.path());
    std::stringstream text;
    text << in.rdbuf();
    const auto doc = ifm::dsl::parse_layout(text.str());
    t.require(doc.ok(), entry.path().filename().string() + " does not parse");
    if (!doc.ok()) continue;
    const std::string canonical = ifm::dsl::serialize_layout(*doc.layout);
    const auto again = ifm::dsl::parse_layout(canonical);
    t.require(again.ok() && *again.layout == *doc.layout &&
                  ifm::dsl::serialize_layout(*again.layout) == canonical,
              entry.path().filename().string() + " does not round-trip");
  }
  t.require(files >= 3, fmt::format("only {} golden layouts", files));
  const std::string bad = (fs::path(IFM_TEST_DATA_DIR) / "degenerate_normal.ifm").string();
  const Process p = run_cli(fmt::format("simulate '{}'", bad));
  t.require(p.code == 1, fmt::format("exit code {}", p.code));
  const std::string expected = ":9:19: error: degenerate normal";
  t.require(p.out.find(expected) != std::string::npos, "diagnostic missing position: " + p.out);
  t.note(fmt::format("{} layouts round-trip; degenerate normal reported at 9:19, exit 1", files));
  return t.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"no-bomb interferometer", no_bomb},
      {"bomb interferometer", bomb},
      {"output momentum", momentum},
      {"monte carlo shots", monte_carlo},
      {"fock oracle", fock_oracle},
      {"packet locality", locality},
      {"soft-photon formulas", soft_formulas},
      {"divergences", divergences},
      {"pollution", pollution},
      {"layout parser", parser},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("unexpected exception: {}", e.what())};
    }
    if (!o.passed) ++failures;
    fmt::print("{} {:2d} {}: {}\n", o.passed ? "PASS" : "FAIL", index, name, o.detail);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
