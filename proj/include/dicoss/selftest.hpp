#pragma once

#include <span>
#include <string>
#include <vector>

namespace dicoss {

using ScalarProxFn = double (*)(double, std::span<const double>, std::span<const double>);

struct CheckResult {
  std::string name;
  std::string tolerance;
  bool pass = false;
  std::string detail;
};

// Oracle-backed invariant suite: scalar prox against a grid minimizer,
// weight-sum identities, codec round trips, and the closed-form truncated
// mixture mean against numerical quadrature. prox_fn is injectable so the
// suite's sensitivity can itself be tested.
std::vector<CheckResult> run_selftest(ScalarProxFn prox_fn = nullptr);

bool all_passed(std::span<const CheckResult> results);

}  // namespace dicoss
