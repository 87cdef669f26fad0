#pragma once

#include "ifm/fock.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ifm::verify {

struct CheckResult {
  std::string name;
  double residual;
  double tolerance;

  bool passed() const { return residual < tolerance; }
};

struct VerifyOptions {
  int n_max = fock::kDefaultMaxOccupation;
  /// Where rotation residuals are measured. `full` includes the truncation
  /// edge and is expected to fail.
  fock::Subspace subspace = fock::Subspace::below_cap;
  int random_samples = 1000;
  std::uint64_t seed = 20240601;
};

/// Operator-identity checks on a two-mode truncated Fock space.
std::vector<CheckResult> fock_checks(const VerifyOptions& options = {});

/// Householder, port-matrix and packet-overlap property checks.
std::vector<CheckResult> optics_checks(const VerifyOptions& options = {});

/// fock_checks followed by optics_checks.
std::vector<CheckResult> run_suite(const VerifyOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace ifm::verify
