#include "ifm/verify.hpp"

#include "ifm/expm.hpp"
#include "ifm/optics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ifm::verify {

namespace {

using fock::OperatorMatrix;
constexpr double kPi = std::numbers::pi;

}  // namespace

std::vector<CheckResult> fock_checks(const VerifyOptions& options) {
  const fock::FockSpace space = fock::build_space({"p", "Rp"}, options.n_max);
  const fock::ModePair pair{"p", "Rp"};
  const auto dim = static_cast<Eigen::Index>(space.dim());
  const OperatorMatrix ident = OperatorMatrix::Identity(dim, dim);
  std::vector<CheckResult> results;

  const OperatorMatrix v7 = fock::v_unitary(space, pair, kPi / 7.0);
  results.push_back({"unitarity V(pi/7)", linalg::max_norm(v7.adjoint() * v7 - ident), 1e-12});

  const std::pair<const char*, double> angles[] = {
      {"pi/7", kPi / 7.0}, {"pi/4", kPi / 4.0}, {"pi/2", kPi / 2.0}};
  for (const auto& [label, alpha] : angles) {
    results.push_back({fmt::format("rotation alpha={}", label),
                       fock::rotation_check(space, pair, alpha, options.subspace), 1e-9});
    results.push_back({fmt::format("commutators alpha={}", label),
                       fock::commutator_preservation_check(space, pair, alpha), 1e-10});
  }

  double grid_worst = 0.0;
  double inverse_worst = 0.0;
  double number_worst = 0.0;
  const OperatorMatrix number = fock::number_operator(space);
  for (int k = 0; k < 16; ++k) {
    const double alpha = 2.0 * kPi * k / 16.0;
    grid_worst = std::max(grid_worst, fock::rotation_check(space, pair, alpha, options.subspace));
    const OperatorMatrix v = fock::v_unitary(space, pair, alpha);
    const OperatorMatrix w = fock::v_unitary(space, pair, -alpha);
    inverse_worst = std::max(inverse_worst, linalg::max_norm(v * w - ident));
    number_worst = std::max(number_worst, linalg::max_norm(fock::commutator(number, v)));
  }
  results.push_back({"rotation grid 16 x [0, 2pi)", grid_worst, 1e-9});
  results.push_back({"inverse V(a) V(-a) = I", inverse_worst, 1e-12});
  results.push_back({"photon number conserved", number_worst, 1e-10});

  const OperatorMatrix va = fock::v_unitary(space, pair, 0.3);
  const OperatorMatrix vb = fock::v_unitary(space, pair, 1.1);
  const OperatorMatrix vab = fock::v_unitary(space, pair, 1.4);
  results.push_back({"one-parameter group", linalg::max_norm(va * vb - vab), 1e-10});

  const OperatorMatrix half = fock::v_unitary(space, pair, kPi / 2.0);
  const OperatorMatrix a = fock::ladder(space, "p", fock::LadderKind::lowering);
  results.push_back({"double pi/2 flips sign",
                     fock::pair_distance(space, pair, fock::conjugate(half * half, a), -a,
                                         options.subspace),
                     1e-9});
  return results;
}

std::vector<CheckResult> optics_checks(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto random_vec = [&] { return optics::Vec3(gauss(rng), gauss(rng), gauss(rng)); };

  double energy = 0.0;
  double transverse = 0.0;
  double orthogonal = 0.0;
  double involution = 0.0;
  double determinant = 0.0;
  for (int i = 0; i < options.random_samples; ++i) {
    const optics::HouseholderReflection r(random_vec());
    const optics::Vec3 p = random_vec();
    const optics::Vec3 eps = p.unitOrthogonal();
    const optics::PhotonMode mode(optics::Momentum3(p), eps);
    const optics::PhotonMode out = optics::reflect_mode(r, mode);

    energy = std::max(energy, std::abs(out.momentum().energy() - mode.momentum().energy()));
    transverse = std::max(transverse,
                          std::abs(out.polarization().dot(out.momentum().components())));
    const optics::Mat3& m = r.spatial();
    orthogonal = std::max(orthogonal, (m.transpose() * m - optics::Mat3::Identity()).cwiseAbs().maxCoeff());
    involution = std::max(involution, (m * m - optics::Mat3::Identity()).cwiseAbs().maxCoeff());
    determinant = std::max({determinant, std::abs(m.determinant() + 1.0),
                            std::abs(r.spacetime().determinant() + 1.0)});
  }

  double port_inverse = 0.0;
  for (int k = 0; k < 16; ++k) {
    const double alpha = 2.0 * kPi * k / 16.0;
    port_inverse = std::max(port_inverse,
                            (optics::rotation_matrix(alpha) * optics::rotation_matrix(-alpha) -
                             optics::PortMatrix::Identity())
                                .cwiseAbs()
                                .maxCoeff());
  }

  const optics::PhotonMode carrier(optics::Momentum3(1, 0, 0), optics::Vec3(0, 0, 1));
  const double sigma = 0.05;
  const double overlap = optics::packet_overlap({optics::Vec3::Zero(), sigma, carrier},
                                                {optics::Vec3(8 * sigma, 0, 0), sigma, carrier});

  const auto label = [&](const char* what) {
    return fmt::format("{} ({} reflections)", what, options.random_samples);
  };
  return {
      {label("energy preserved"), energy, 1e-12},
      {label("transversality preserved"), transverse, 1e-12},
      {label("R orthogonal"), orthogonal, 1e-14},
      {label("R involutive"), involution, 1e-14},
      {label("det R = -1"), determinant, 1e-14},
      {"port rotation inverse", port_inverse, 1e-15},
      {"packet overlap at 8 sigma", overlap, 1.2e-7},
  };
}

std::vector<CheckResult> run_suite(const VerifyOptions& options) {
  std::vector<CheckResult> results = fock_checks(options);
  for (CheckResult& r : optics_checks(options)) results.push_back(std::move(r));
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed(); });
}

}  // namespace ifm::verify
