// Runs the acceptance criteria and prints one line per criterion.
#include <cstdlib>
#include <iostream>

#include "fopa/app/parallel.hpp"
#include "fopa/app/verify.hpp"

int main() {
  fopa::app::VerifyOptions options;
  options.threads = fopa::app::default_threads();
  const auto results = fopa::app::run_acceptance(options, [](const fopa::app::CriterionResult& r) {
    std::cout << fopa::app::format_result(r) << std::endl;
  });
  int failed = 0;
  for (const auto& r : results) failed += r.id != 0 && !r.passed;
  std::cout << (results.size() - 1 - failed) << "/" << (results.size() - 1) << " criteria passed\n";
  return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}
