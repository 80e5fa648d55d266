#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace d2gan {

struct IdentityResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  int trials = 0;
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 712;
  int trials = 100;
  // Sensitivity hook: perturbs the u-exponent of the closed-form f_c used by
  // the value-at-optimum identity. A correct build must fail that identity when this
  // is non-zero (e.g. 1e-3).
  double fc_exponent_shift = 0.0;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<IdentityResult> identities;

  bool all_pass() const;
  std::vector<std::string> failing() const;
  nlohmann::json to_json() const;
};

/// Runs every closed-form identity against its brute-force counterpart on
/// random finite settings. Deterministic in (seed, trials).
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace d2gan
