#include "ifm/soft_photon.hpp"

#include "ifm/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace ifm::soft {

namespace {

const double kTwoPiSquared = 4.0 * std::numbers::pi * std::numbers::pi;

void require_subluminal(double beta) {
  if (std::isnan(beta) || beta < 0.0) {
    throw DomainError(fmt::format("velocity {} must lie in [0, 1)", beta));
  }
  if (beta >= 1.0) {
    throw DivergenceError(fmt::format(
        "Weinberg factor is divergent for beta = 1 (got beta = {})", beta));
  }
}

// arctanh(b)/b - 1 = b^2/3 + b^4/5 + b^6/7 + ...
double arctanh_ratio_minus_one(double beta) {
  if (beta < kSeriesCrossover) {
    const double b2 = beta * beta;
    return b2 * (1.0 / 3.0 + b2 * (1.0 / 5.0 + b2 * (1.0 / 7.0 + b2 / 9.0)));
  }
  return std::atanh(beta) / beta - 1.0;
}

}  // namespace

double arctanh_ratio(double beta) {
  require_subluminal(beta);
  if (beta < kSeriesCrossover) return 1.0 + arctanh_ratio_minus_one(beta);
  return std::atanh(beta) / beta;
}

double weinberg_factor_fermion(double beta) {
  require_subluminal(beta);
  return 2.0 / kTwoPiSquared * arctanh_ratio_minus_one(beta);
}

double weinberg_factor_general(const std::vector<ProcessLeg>& legs,
                               const std::vector<std::vector<double>>& pairwise_beta) {
  const std::size_t n = legs.size();
  if (pairwise_beta.size() != n) {
    throw ValidationError(fmt::format("pairwise velocity matrix has {} rows for {} legs",
                                      pairwise_beta.size(), n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const ProcessLeg& leg = legs[i];
    if (leg.eta != 1 && leg.eta != -1) {
      throw ValidationError(fmt::format("leg {} has direction flag {}, expected +1 or -1", i,
                                        leg.eta));
    }
    if (!std::isfinite(leg.charge)) {
      throw ValidationError(fmt::format("leg {} has a non-finite charge", i));
    }
    require_subluminal(leg.beta);
    if (pairwise_beta[i].size() != n) {
      throw ValidationError(fmt::format("row {} of the pairwise velocity matrix has {} entries",
                                        i, pairwise_beta[i].size()));
    }
    if (pairwise_beta[i][i] != 0.0) {
      throw ValidationError(fmt::format("relative velocity of leg {} with itself must be 0", i));
    }
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double b = pairwise_beta[i][j];
      if (b != pairwise_beta[j][i]) {
        throw ValidationError(
            fmt::format("pairwise velocity matrix is not symmetric at ({}, {})", i, j));
      }
      require_subluminal(b);
      sum += legs[i].charge * legs[j].charge * legs[i].eta * legs[j].eta * arctanh_ratio(b);
    }
  }
  return -sum / kTwoPiSquared;
}

FermionReadings fermion_factor_readings(double beta) {
  const double printed = weinberg_factor_fermion(beta);
  return {printed, printed * kTwoPiSquared};
}

void validate_window(const SoftWindow& window) {
  if (std::isnan(window.e_minus) || window.e_minus <= 0.0) {
    throw DivergenceError(fmt::format(
        "detection threshold E- = {} must be positive: as E- goes to 0 the mean photon "
        "number diverges into a cloud of low-energy photons",
        window.e_minus));
  }
  if (std::isnan(window.e_plus) || window.e_plus < window.e_minus) {
    throw ValidationError(fmt::format("upper energy E+ = {} is below E- = {}", window.e_plus,
                                      window.e_minus));
  }
}

double mean_photons_from_log_ratio(double weinberg_a, double log_ratio) {
  if (std::isnan(weinberg_a) || weinberg_a < 0.0) {
    throw DomainError(fmt::format("Weinberg factor {} must be nonnegative", weinberg_a));
  }
  if (std::isnan(log_ratio) || log_ratio < 0.0) {
    throw DomainError(fmt::format("log(E+/E-) = {} must be nonnegative", log_ratio));
  }
  return weinberg_a * log_ratio;
}

double mean_photons(double weinberg_a, const SoftWindow& window) {
  validate_window(window);
  return mean_photons_from_log_ratio(weinberg_a,
                                     std::log(window.e_plus) - std::log(window.e_minus));
}

EmissionModel emission_model(double weinberg_a, const SoftWindow& window) {
  return {weinberg_a, mean_photons(weinberg_a, window)};
}

double poisson_pmf(unsigned n, double mu) {
  if (std::isnan(mu) || mu < 0.0) {
    throw DomainError(fmt::format("Poisson mean {} must be nonnegative", mu));
  }
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  if (std::isinf(mu)) return 0.0;
  const double k = static_cast<double>(n);
  return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
}

unsigned poisson_truncation(double mu) {
  if (std::isnan(mu) || mu < 0.0) {
    throw DomainError(fmt::format("Poisson mean {} must be nonnegative", mu));
  }
  return static_cast<unsigned>(std::ceil(mu + 20.0 * std::sqrt(mu) + 20.0));
}

double pollution_probability(double mu, const PollutionConfig& config) {
  const double f = config.solid_angle_fraction;
  if (!(f > 0.0 && f <= 1.0)) {
    throw ValidationError(fmt::format("solid-angle fraction {} is outside (0, 1]", f));
  }
  if (std::isnan(mu) || mu < 0.0) {
    throw DomainError(fmt::format("Poisson mean {} must be nonnegative", mu));
  }
  return -std::expm1(-mu * f);
}

double PollutedReport::exclusive_total(const mzi::DetectionReport& original) const {
  return original.p_d1 + original.p_d2 + absorbed_silent + absorbed_and_d1 + absorbed_and_d2;
}

PollutedReport corrected_probabilities(const mzi::DetectionReport& report, double pollution,
                                       double detector_share) {
  if (!(pollution >= 0.0 && pollution <= 1.0)) {
    throw DomainError(fmt::format("pollution probability {} is outside [0, 1]", pollution));
  }
  if (!(detector_share >= 0.0 && detector_share <= 0.5)) {
    throw DomainError(
        fmt::format("per-detector share {} is outside [0, 1/2]", detector_share));
  }
  PollutedReport out{report};
  out.absorbed_and_d1 = report.p_absorbed * pollution * detector_share;
  out.absorbed_and_d2 = report.p_absorbed * pollution * detector_share;
  out.absorbed_silent = report.p_absorbed - out.absorbed_and_d1 - out.absorbed_and_d2;
  out.report.p_d1 += out.absorbed_and_d1;
  out.report.p_d2 += out.absorbed_and_d2;
  return out;
}

}  // namespace ifm::soft
