#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fopa::app {

struct VerifyOptions {
  int conservation_n_trunc = 10;  // order at which conservation is demanded
  int series_n_trunc = 20;        // order for every other series evaluation
  std::size_t engine_points = 257;
  unsigned threads = 1;
};

struct CriterionResult {
  int id = 0;  // 0 for informational lines
  std::string name;
  bool passed = false;
  std::string detail;  // measured values, key=value pairs
};

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS  C01 conservation  max_residual=…" (informational lines use INFO).
std::string format_result(const CriterionResult& result);

// True when every numbered criterion passed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace fopa::app
