#pragma once

// Time stepping for the Galerkin system
//
//   du = -B(u) dt + sum_terms sigma (a . grad) u o dB          (Stratonovich)
//   du = (-(1/2) A u - B(u)) dt + sum_terms sigma (a . grad) u dB  (Ito)
//
// and Monte-Carlo ensembles over independent Brownian paths.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "steuler/basis.hpp"
#include "steuler/dynamics.hpp"
#include "steuler/noise.hpp"

namespace steuler {

enum class Scheme { ItoEulerMaruyama, StratHeun, StratImplicitMidpoint };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& text);

struct InitialCondition {
  enum class Kind { Mode, Pair, Random, Coefficients };
  Kind kind = Kind::Pair;
  BasisMode mode = C(1, 0);
  double decay = 3.0;
  std::vector<std::pair<BasisMode, double>> coefficients;

  /// "mode:<k1>,<k2>" (optionally "mode:S<k1>,<k2>"), "pair", "random:<decay>",
  /// or "coeffs:C1,0=0.5;S2,1=-1".
  static InitialCondition parse(const std::string& text);
  std::string describe() const;
};

/// The initial field on I_n. Random draws use N(0,1) |k|^{-decay} per
/// coefficient from a stream derived from `seed`; constant modes are zero.
SpectralField build_initial(const InitialCondition& ic, int n, std::uint64_t seed);

struct SimConfig {
  int n = 8;
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::StratImplicitMidpoint;
  NoiseModel noise = NoiseModel::space_independent();
  int paths = 256;
  std::uint64_t seed = 20240901;
  InitialCondition initial;
  int save_every = 10;
  int threads = 0;  // 0: hardware concurrency
  /// Brownian increments are sums of this many finer normals (for coupling
  /// runs at different dt).
  int substeps = 1;

  int steps() const;
  /// Violations of the configuration invariants (empty when valid).
  std::vector<std::string> validate() const;
};

constexpr double kMidpointTolerance = 1e-12;
constexpr int kMidpointMaxIterations = 50;

struct StepStats {
  int iterations = 0;
  double residual = 0.0;
};

/// One step of `scheme`. `dw` is the noise field sum sigma dB a over the
/// model's advecting fields (see noise_field). With a tensor, B is evaluated
/// from it instead of on the grid.
SpectralField step(Scheme scheme, const SpectralField& u, const SpectralField& dw, double dt,
                   StepStats* stats = nullptr, const AdvectionTensor* tensor = nullptr);

/// Convenience overload that builds the noise field from the increment.
SpectralField step(Scheme scheme, const SpectralField& u, const WienerIncrement& inc,
                   const NoiseModel& model, StepStats* stats = nullptr,
                   const AdvectionTensor* tensor = nullptr);

struct PathResult {
  std::vector<double> times;          // saved times, times[0] = 0
  std::vector<SpectralField> states;  // saved states
  std::vector<double> l2;             // ||u||_0^2 after every step, l2[0] initial
  std::vector<double> h1;             // ||u||_1^2 after every step
  int max_iterations = 0;
};

/// Called after each step with (step index, time, state); step 0 is the initial state.
using StepObserver = std::function<void(int, double, const SpectralField&)>;

PathResult run_path(const SimConfig& config, std::uint64_t path_id,
                    const StepObserver& observer = {});

/// Runs the path without storing states; returns the final state.
SpectralField simulate(const SimConfig& config, std::uint64_t path_id, const StepObserver& observer,
                       int* max_iterations = nullptr);

/// Test function for the martingale diagnostics. `v` is normalized so that
/// <u, v>_0 is the coefficient of the chosen mode.
struct Probe {
  std::string name;
  SpectralField v;
};

Probe make_probe(const BasisMode& mode, int n);
std::vector<Probe> default_probes(int n);

/// Per-path record at the saved times.
struct PathSummary {
  std::vector<double> l2;
  std::vector<double> h1;
  double max_rel_l2_drift = 0.0;  // over every step
  double max_rel_h1_drift = 0.0;
  int max_iterations = 0;
  // Per probe, per saved time.
  std::vector<std::vector<double>> m;                     // M^v(t)
  std::vector<std::vector<double>> qv;                    // int sum <a.grad u, v>^2 ds
  std::vector<std::vector<std::complex<double>>> l_diff;  // L_t - L_0
};

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // unbiased sample variance
  int count = 0;
  double se() const;
};

Moments moments(const std::vector<double>& xs);

struct EnsembleDiagnostics {
  std::vector<double> times;
  std::vector<Moments> l2;
  std::vector<Moments> h1;
  std::vector<double> envelope_h1;  // ||grad u0||^2 e^{C t}
  double l2_initial = 0.0;
  double h1_initial = 0.0;
  double gronwall_rate = 0.0;
  std::vector<std::string> probe_names;
  // Per probe, per saved time.
  std::vector<std::vector<Moments>> m;
  std::vector<std::vector<Moments>> m_sq_minus_qv;
  std::vector<std::vector<Moments>> l_re;
  std::vector<std::vector<Moments>> l_im;
  std::vector<PathSummary> paths;
  double wall_seconds = 0.0;
};

/// Runs config.paths independent paths (in parallel when threads > 1) and
/// aggregates in path order, so results do not depend on the schedule.
/// `path_ids` overrides the ids 0..paths-1 (repeated ids allowed).
EnsembleDiagnostics run_ensemble(const SimConfig& config, const std::vector<Probe>& probes = {},
                                 const std::vector<std::uint64_t>& path_ids = {});

}  // namespace steuler
