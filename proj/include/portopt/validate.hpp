#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "portopt/mc.hpp"

namespace portopt {

struct ValidationConfig {
  std::uint64_t seed = 1;
  int n_samples = 100000;
  /// Multiplicative bias applied to the analytic scaling factor inside the
  /// stationarity check. Zero in normal operation; a small nonzero value
  /// exercises the suite's sensitivity to a corrupted closed form.
  double gw_bias = 0.0;
};

struct ValidationCheck {
  std::string name;
  double analytic = 0.0;
  double mc_estimate = 0.0;
  double mc_se = 0.0;
  double z = 0.0;
  bool pass = false;
};

/// Runs every closed-form-vs-Monte-Carlo cross-check plus the
/// deterministic identities. A check passes when |z| <= 3 (stochastic)
/// or the absolute discrepancy is below its printed tolerance
/// (deterministic, reported with se = 0).
std::vector<ValidationCheck> run_validation(const ValidationConfig& cfg);

bool all_passed(const std::vector<ValidationCheck>& checks);

}  // namespace portopt
