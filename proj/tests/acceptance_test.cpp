// Runs every acceptance criterion at full size and prints one line each.

#include <iostream>

#include "steuler/acceptance.hpp"

int main() {
  steuler::AcceptanceOptions opts;
  opts.log = [](const std::string& msg) { std::cerr << "  .. " << msg << std::endl; };
  steuler::AcceptanceRunner runner(opts);
  int failed = 0;
  runner.run_all(steuler::suite_names(), [&](const steuler::CriterionResult& r) {
    std::cout << format_result(r) << std::endl;
    failed += r.pass ? 0 : 1;
  });
  std::cout << (failed == 0 ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
  return failed == 0 ? 0 : 1;
}
