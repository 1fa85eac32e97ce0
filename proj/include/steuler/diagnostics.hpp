#pragma once

// Martingale-problem functionals and energy ledgers.
//
// For a test field v and the Ito drift -(1/2) A u - B(u):
//
//   phi^v(u) = i(-(1/2)<grad u, grad v> + <(u . grad) v, u>) - (1/2) sum <(a . grad) u, v>^2
//   L_t      = exp(i<u_t, v>) - int_0^t exp(i<u_s, v>) phi^v(u_s) ds
//   M^v_t    = <u_t, v> - <u_0, v> + int_0^t <(1/2) A u + B(u), v> ds
//
// where the sum runs over the noise model's transport terms weighted by
// sigma^2 (d_1 u, d_2 u for space-independent noise).

#include <complex>
#include <vector>

#include "steuler/integrate.hpp"
#include "steuler/noise.hpp"

namespace steuler {

/// sum_terms sigma^2 <(a . grad) u, v>_0^2
double noise_bracket_rate(const SpectralField& u, const SpectralField& v, const NoiseModel& model);

std::complex<double> phi_v(const SpectralField& u, const SpectralField& v,
                           const NoiseModel& model = NoiseModel::space_independent());

/// Probes together with the transported test fields P_n (a . grad) v for every
/// transport term of a noise model; built once and shared across paths.
class ProbeSet {
 public:
  ProbeSet(const NoiseModel& model, std::vector<Probe> probes, int n);

  std::size_t size() const { return probes_.size(); }
  const Probe& probe(std::size_t p) const { return probes_[p]; }
  /// sum_terms sigma^2 <u, P_n (a . grad) v_p>^2, equal to the noise bracket rate.
  double bracket_rate(std::size_t p, const SpectralField& u) const;

 private:
  struct Sparse {
    double weight;  // sigma^2
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<Probe> probes_;
  std::vector<std::vector<Sparse>> shifted_;
};

/// Online per-path accumulator for M^v, L_t and the bracket integral, using
/// trapezoid quadrature on the step grid.
class ProbeTracker {
 public:
  ProbeTracker(const ProbeSet& set, double dt);

  /// Feed the state at consecutive steps, starting with the initial state.
  void observe(const SpectralField& u);

  std::size_t size() const { return state_.size(); }
  double m(std::size_t p) const { return state_[p].m; }
  double qv(std::size_t p) const { return state_[p].qv; }
  std::complex<double> l(std::size_t p) const;
  std::complex<double> l0(std::size_t p) const { return state_[p].l0; }

 private:
  struct Rates {
    double drift = 0.0;    // <(1/2) A u + B u, v>
    double bracket = 0.0;  // sum sigma^2 <(a . grad) u, v>^2
    std::complex<double> integrand;  // exp(i x) phi
  };
  struct State {
    double x0 = 0.0;
    double x = 0.0;
    double m = 0.0;
    double qv = 0.0;
    double drift_integral = 0.0;
    std::complex<double> l0;
    std::complex<double> integral;
    Rates prev;
  };

  const ProbeSet* set_;
  double dt_;
  std::vector<State> state_;
  bool started_ = false;
};

/// L_t^{n,v} along a path saved at every step.
std::vector<std::complex<double>> martingale_L_series(const PathResult& path, const SpectralField& v,
                                                      const NoiseModel& model, double dt);

struct QvReport {
  std::vector<double> times;
  std::vector<double> mean_m;
  std::vector<double> se_m;
  std::vector<double> gap;     // mean(M^2) - mean(QV)
  std::vector<double> se_gap;  // SE of the per-path difference
};

/// Requires at least 64 paths.
QvReport qv_check(const EnsembleDiagnostics& ens, std::size_t probe);

struct EnergyLedger {
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> h1;
  std::vector<double> l2_drift;  // ||u||_0^2 - ||u_0||_0^2
  std::vector<double> h1_drift;
  std::vector<double> envelope_h1;
  double max_rel_l2_drift = 0.0;
};

EnergyLedger energy_report(const PathResult& path, double dt, double gronwall_rate);

}  // namespace steuler
