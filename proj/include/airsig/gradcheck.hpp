#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace airsig::gradcheck {

struct CheckResult {
  std::string name;
  double max_rel_error = 0.0;
};

// Central finite differences (h = 1e-6, 64-bit) against every layer's
// analytic gradient, on small random inputs kept away from activation kinks.
std::vector<CheckResult> run_layer_checks(std::uint64_t seed = 7);

// Whole-model check on a tiny two-stream spec (t=64, 3 classes): loss
// derivatives w.r.t. a deterministic sample of every parameter tensor.
CheckResult run_model_check(std::uint64_t seed = 7);

inline constexpr double kTolerance = 1e-4;

}  // namespace airsig::gradcheck
