#pragma once

// Verification battery behind `steuler verify`. Each suite checks one
// acceptance criterion (A1..A9) at its stated tolerance and reports pass/fail
// with the measured numbers.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "steuler/integrate.hpp"

namespace steuler {

struct CriterionResult {
  std::string id;     // "A1"
  std::string suite;  // "energy"
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Smaller ensembles; same tolerances.
  bool quick = false;
  int threads = 0;
  /// Progress messages (may be empty).
  std::function<void(const std::string&)> log;
};

/// Suite names in criterion order: energy, h1, gronwall, oracle, geodesic,
/// martingale, ito-strat, structure, noise.
const std::vector<std::string>& suite_names();

/// "all" or a comma-separated list of suite names (or ids such as "A3").
std::vector<std::string> expand_suites(const std::string& selection);

class AcceptanceRunner {
 public:
  explicit AcceptanceRunner(AcceptanceOptions options = {});
  ~AcceptanceRunner();

  CriterionResult run(const std::string& suite);
  std::vector<CriterionResult> run_all(const std::vector<std::string>& suites,
                                       const std::function<void(const CriterionResult&)>& on_result = {});

 private:
  struct Cache;
  const EnsembleDiagnostics& conservative_ensemble();
  void log(const std::string& msg) const;

  AcceptanceOptions options_;
  std::unique_ptr<Cache> cache_;
};

/// Fixed-width one-line rendering: "A1  energy      PASS  detail".
std::string format_result(const CriterionResult& r);

}  // namespace steuler
