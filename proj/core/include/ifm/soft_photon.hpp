#pragma once

// Emission statistics of low-energy photons radiated when the probe interacts
// with the obstruction: Weinberg factor, Poisson photon-count law over a
// detectable energy window, and the resulting pollution of detector counts.
//
// Weinberg factors are returned in units of e^2 (charges in units of the
// elementary charge). Multiply by SoftConfig::e_squared for a number.

#include "ifm/interferometer.hpp"

#include <numbers>
#include <vector>

namespace ifm::soft {

/// Below this velocity the arctanh(b)/b ratio is evaluated by its Maclaurin series.
inline constexpr double kSeriesCrossover = 1e-4;

/// Heaviside-Lorentz e^2 = 4 pi alpha.
inline constexpr double kHeavisideLorentzE2 = 4.0 * std::numbers::pi / 137.035999;

struct ProcessLeg {
  double charge;  // units of e
  int eta;        // +1 outgoing, -1 incoming
  double beta;    // speed, [0, 1)
};

/// Detectable photon energy window (E-, E+).
struct SoftWindow {
  double e_minus;
  double e_plus;
};

struct EmissionModel {
  double weinberg_a;  // units of e^2
  double mean;        // mu = A ln(E+/E-)
};

enum class AngularModel { isotropic };

struct PollutionConfig {
  double solid_angle_fraction;  // (0, 1]
  AngularModel angular_model = AngularModel::isotropic;
  /// Fraction of polluting photons credited to each of the two detectors.
  double detector_share = 0.5;
};

/// arctanh(b)/b, continuous at b = 0 where it equals 1.
double arctanh_ratio(double beta);

/// (2/(2 pi)^2) [arctanh(b)/b - 1] for a charged fermion scattered once.
/// b >= 1 throws DivergenceError.
double weinberg_factor_fermion(double beta);

/// -sum_{n,m} e_n e_m eta_n eta_m arctanh(b_nm) / ((2 pi)^2 b_nm) with the
/// diagonal terms at their b -> 0 limit. `pairwise_beta` is symmetric with a
/// zero diagonal; any entry >= 1 throws DivergenceError.
double weinberg_factor_general(const std::vector<ProcessLeg>& legs,
                               const std::vector<std::vector<double>>& pairwise_beta);

/// Both readings of the fermion factor: as the formula is written, and with
/// the (2 pi)^2 denominator dropped. Reported side by side by the CLI.
struct FermionReadings {
  double with_two_pi_squared;
  double without_two_pi_squared;
};
FermionReadings fermion_factor_readings(double beta);

/// Throws DivergenceError for E- <= 0 (infrared divergence) and
/// ValidationError for E+ < E-.
void validate_window(const SoftWindow& window);

/// A ln(E+/E-).
double mean_photons(double weinberg_a, const SoftWindow& window);

/// A * log_ratio, for windows too wide to hold in a double.
double mean_photons_from_log_ratio(double weinberg_a, double log_ratio);

EmissionModel emission_model(double weinberg_a, const SoftWindow& window);

/// mu^N e^-mu / N!.
double poisson_pmf(unsigned n, double mu);

/// Index where a Poisson sum with mean mu is cut: mu + 20 sqrt(mu) + 20.
unsigned poisson_truncation(double mu);

/// 1 - exp(-mu f): chance that at least one emitted photon lands inside the
/// detector acceptance when emission is isotropic.
double pollution_probability(double mu, const PollutionConfig& config);

/// Detection report after crediting polluting photons to the detectors.
/// `report` holds the marginal detector probabilities including joint events;
/// the exclusive outcome probabilities below sum to one.
struct PollutedReport {
  mzi::DetectionReport report;
  double absorbed_silent = 0.0;  // bomb fired, no detector click
  double absorbed_and_d1 = 0.0;
  double absorbed_and_d2 = 0.0;

  double exclusive_total(const mzi::DetectionReport& original) const;
};

/// p_detector += p_absorbed * pollution * detector_share for each detector.
PollutedReport corrected_probabilities(const mzi::DetectionReport& report, double pollution,
                                       double detector_share = 0.5);

}  // namespace ifm::soft
