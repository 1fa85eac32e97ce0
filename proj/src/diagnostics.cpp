#include "steuler/diagnostics.hpp"

#include <cmath>

#include "steuler/dynamics.hpp"

namespace steuler {

namespace {

SpectralField on(const SpectralField& f, const TruncationSet& t) {
  return f.trunc() == t ? f : f.retruncated(t);
}

SpectralField advector_field(const BasisMode& a) {
  SpectralField f(TruncationSet(a.k.max_abs()));
  f.add(a, 1.0);
  return f;
}

}  // namespace

double noise_bracket_rate(const SpectralField& u, const SpectralField& v, const NoiseModel& model) {
  double sum = 0.0;
  for (const auto& term : noise_field_increment(model)) {
    const SpectralField moved = advect(advector_field(term.advector), u, u.trunc());
    const double c = inner_l2(moved, v);
    sum += term.coefficient * term.coefficient * c * c;
  }
  return sum;
}

std::complex<double> phi_v(const SpectralField& u, const SpectralField& v, const NoiseModel& model) {
  const TruncationSet t(std::max(u.n(), v.n()));
  const SpectralField uu = on(u, t);
  const SpectralField vv = on(v, t);
  // <(u . grad) v, u>
  const double transport = inner_l2(advect(uu, vv, t), uu);
  const double im = -0.5 * inner_h1(uu, vv) + transport;
  return {-0.5 * noise_bracket_rate(uu, vv, model), im};
}

// ---------------------------------------------------------------------------
// ProbeSet / ProbeTracker

ProbeSet::ProbeSet(const NoiseModel& model, std::vector<Probe> probes, int n)
    : probes_(std::move(probes)) {
  const TruncationSet t(n);
  const auto terms = noise_field_increment(model);
  shifted_.resize(probes_.size());
  for (std::size_t p = 0; p < probes_.size(); ++p) {
    probes_[p].v = on(probes_[p].v, t);
    for (const auto& term : terms) {
      // <(a . grad) u, v> = -<u, (a . grad) v> for divergence-free a
      const SpectralField g = advect(advector_field(term.advector), probes_[p].v, t);
      Sparse sp{term.coefficient * term.coefficient, {}};
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] != 0.0) sp.entries.emplace_back(i, g[i] * mode_norm2(t.wavevector(i / 2)));
      }
      if (!sp.entries.empty()) shifted_[p].push_back(std::move(sp));
    }
  }
}

double ProbeSet::bracket_rate(std::size_t p, const SpectralField& u) const {
  double sum = 0.0;
  for (const auto& sp : shifted_[p]) {
    double c = 0.0;
    for (const auto& [i, w] : sp.entries) c += w * u[i];
    sum += sp.weight * c * c;
  }
  return sum;
}

ProbeTracker::ProbeTracker(const ProbeSet& set, double dt)
    : set_(&set), dt_(dt), state_(set.size()) {}

void ProbeTracker::observe(const SpectralField& u) {
  const SpectralField bu = nonlinear_pseudospectral(u);
  const SpectralField au = stokes_apply(u);
  for (std::size_t p = 0; p < state_.size(); ++p) {
    const SpectralField& v = set_->probe(p).v;
    Rates r;
    const double x = inner_l2(u, v);
    r.drift = 0.5 * inner_l2(au, v) + inner_l2(bu, v);
    r.bracket = set_->bracket_rate(p, u);
    const std::complex<double> phi{-0.5 * r.bracket, -r.drift};
    r.integrand = std::exp(std::complex<double>{0.0, x}) * phi;
    State& st = state_[p];
    if (!started_) {
      st.x0 = x;
      st.l0 = std::exp(std::complex<double>{0.0, x});
    } else {
      st.drift_integral += 0.5 * dt_ * (st.prev.drift + r.drift);
      st.qv += 0.5 * dt_ * (st.prev.bracket + r.bracket);
      st.integral += 0.5 * dt_ * (st.prev.integrand + r.integrand);
    }
    st.x = x;
    st.m = x - st.x0 + st.drift_integral;
    st.prev = r;
  }
  started_ = true;
}

std::complex<double> ProbeTracker::l(std::size_t p) const {
  const State& st = state_[p];
  return std::exp(std::complex<double>{0.0, st.x}) - st.integral;
}

// ---------------------------------------------------------------------------
// Path and ensemble reports

std::vector<std::complex<double>> martingale_L_series(const PathResult& path, const SpectralField& v,
                                                      const NoiseModel& model, double dt) {
  if (path.states.size() != path.l2.size()) {
    throw Error("martingale_L_series: path must be saved at every step (save_every = 1)");
  }
  std::vector<std::complex<double>> out;
  out.reserve(path.states.size());
  std::complex<double> integral{};
  std::complex<double> prev{};
  for (std::size_t s = 0; s < path.states.size(); ++s) {
    const SpectralField& u = path.states[s];
    const TruncationSet t(std::max(u.n(), v.n()));
    const double x = inner_l2(on(u, t), on(v, t));
    const std::complex<double> e = std::exp(std::complex<double>{0.0, x});
    const std::complex<double> cur = e * phi_v(u, v, model);
    if (s > 0) integral += 0.5 * dt * (prev + cur);
    prev = cur;
    out.push_back(e - integral);
  }
  return out;
}

QvReport qv_check(const EnsembleDiagnostics& ens, std::size_t probe) {
  if (ens.paths.size() < 64) {
    throw PreconditionError("qv_check: at least 64 paths are required (got " +
                            std::to_string(ens.paths.size()) + ")");
  }
  if (probe >= ens.m.size()) throw Error("qv_check: no such probe");
  QvReport r;
  r.times = ens.times;
  for (std::size_t t = 0; t < ens.times.size(); ++t) {
    r.mean_m.push_back(ens.m[probe][t].mean);
    r.se_m.push_back(ens.m[probe][t].se());
    r.gap.push_back(ens.m_sq_minus_qv[probe][t].mean);
    r.se_gap.push_back(ens.m_sq_minus_qv[probe][t].se());
  }
  return r;
}

EnergyLedger energy_report(const PathResult& path, double dt, double gronwall_rate) {
  EnergyLedger led;
  if (path.l2.empty()) return led;
  const double l0 = path.l2.front();
  const double h0 = path.h1.front();
  for (std::size_t s = 0; s < path.l2.size(); ++s) {
    const double t = s * dt;
    led.times.push_back(t);
    led.l2.push_back(path.l2[s]);
    led.h1.push_back(path.h1[s]);
    led.l2_drift.push_back(path.l2[s] - l0);
    led.h1_drift.push_back(path.h1[s] - h0);
    led.envelope_h1.push_back(h0 * std::exp(gronwall_rate * t));
    if (l0 > 0.0) led.max_rel_l2_drift = std::max(led.max_rel_l2_drift, std::abs(path.l2[s] - l0) / l0);
  }
  return led;
}

}  // namespace steuler
