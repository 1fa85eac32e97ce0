#include "steuler/integrate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <deque>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "steuler/diagnostics.hpp"

namespace steuler {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::ItoEulerMaruyama:
      return "ito-em";
    case Scheme::StratHeun:
      return "strat-heun";
    case Scheme::StratImplicitMidpoint:
      return "strat-midpoint";
  }
  return "?";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "ito-em") return Scheme::ItoEulerMaruyama;
  if (text == "strat-heun") return Scheme::StratHeun;
  if (text == "strat-midpoint") return Scheme::StratImplicitMidpoint;
  throw ConfigError("unknown scheme '" + text + "' (expected ito-em, strat-heun or strat-midpoint)");
}

// ---------------------------------------------------------------------------
// Initial conditions

namespace {

BasisMode parse_mode(std::string text) {
  ModeKind kind = ModeKind::C;
  if (!text.empty() && (text[0] == 'C' || text[0] == 'S' || text[0] == 'c' || text[0] == 's')) {
    kind = (text[0] == 'S' || text[0] == 's') ? ModeKind::S : ModeKind::C;
    text = text.substr(1);
  }
  const auto ks = parse_mode_list(text);
  if (ks.size() != 1) throw ConfigError("expected a single wavevector, got '" + text + "'");
  return {kind, ks[0]};
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": not a number: '" + text + "'");
  }
}

}  // namespace

InitialCondition InitialCondition::parse(const std::string& text) {
  InitialCondition ic;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "pair" && colon == std::string::npos) {
    ic.kind = Kind::Pair;
  } else if (head == "mode") {
    ic.kind = Kind::Mode;
    ic.mode = parse_mode(tail);
  } else if (head == "random") {
    ic.kind = Kind::Random;
    ic.decay = tail.empty() ? 3.0 : parse_double(tail, "random initial condition decay");
  } else if (head == "coeffs") {
    ic.kind = Kind::Coefficients;
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ';')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("coeffs: expected <mode>=<value>, got '" + item + "'");
      ic.coefficients.emplace_back(parse_mode(item.substr(0, eq)),
                                   parse_double(item.substr(eq + 1), "coeffs"));
    }
    if (ic.coefficients.empty()) throw ConfigError("coeffs: empty coefficient list");
  } else {
    throw ConfigError("unknown initial condition '" + text +
                      "' (expected mode:<k1>,<k2>, pair, random:<decay> or coeffs:<list>)");
  }
  return ic;
}

std::string InitialCondition::describe() const {
  switch (kind) {
    case Kind::Mode:
      return "mode:" + std::string(mode.kind == ModeKind::S ? "S" : "") + std::to_string(mode.k.k1) +
             "," + std::to_string(mode.k.k2);
    case Kind::Pair:
      return "pair";
    case Kind::Random: {
      std::ostringstream os;
      os << "random:" << decay;
      return os.str();
    }
    case Kind::Coefficients: {
      std::ostringstream os;
      os << "coeffs:";
      for (std::size_t i = 0; i < coefficients.size(); ++i) {
        const auto& [m, v] = coefficients[i];
        os << (i ? ";" : "") << (m.kind == ModeKind::S ? "S" : "C") << m.k.k1 << "," << m.k.k2 << "="
           << v;
      }
      return os.str();
    }
  }
  return "?";
}

SpectralField build_initial(const InitialCondition& ic, int n, std::uint64_t seed) {
  TruncationSet t(n);
  SpectralField u(t);
  auto require = [&](const BasisMode& m) {
    if (!t.contains(m.k)) {
      throw ConfigError("initial condition mode " + to_string(m) + " lies outside I_" + std::to_string(n));
    }
  };
  switch (ic.kind) {
    case InitialCondition::Kind::Mode:
      require(ic.mode);
      u.add(ic.mode, 1.0);
      break;
    case InitialCondition::Kind::Pair:
      require(C(1, 1));
      u.add(C(1, 0), 1.0);
      u.add(C(1, 1), 1.0);
      break;
    case InitialCondition::Kind::Random: {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x1cu};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> z;
      for (std::size_t i = 2; i < u.size(); ++i) {
        const ModeIndex k = t.wavevector(i / 2);
        u[i] = z(rng) * std::pow(std::sqrt(static_cast<double>(k.norm2())), -ic.decay);
      }
      break;
    }
    case InitialCondition::Kind::Coefficients:
      for (const auto& [m, v] : ic.coefficients) {
        require(m);
        u.add(m, v);
      }
      break;
  }
  return u;
}

// ---------------------------------------------------------------------------
// SimConfig

int SimConfig::steps() const { return static_cast<int>(std::llround(T / dt)); }

std::vector<std::string> SimConfig::validate() const {
  std::vector<std::string> errs;
  if (n < 1) errs.push_back("n must be >= 1 (got " + std::to_string(n) + ")");
  if (!(dt > 0.0)) errs.push_back("dt must be > 0");
  if (!(T >= dt)) errs.push_back("T must be >= dt");
  if (dt > 0.0 && T >= dt) {
    const double r = T / dt;
    if (std::abs(r - std::round(r)) > 1e-6 * std::max(1.0, r)) {
      errs.push_back("T must be an integer multiple of dt");
    }
  }
  if (paths < 1) errs.push_back("paths must be >= 1");
  if (save_every < 1) errs.push_back("save_every must be >= 1");
  if (substeps < 1) errs.push_back("substeps must be >= 1");
  if (threads < 0) errs.push_back("threads must be >= 0");
  if (n >= 1) {
    try {
      build_initial(initial, n, seed);
    } catch (const ConfigError& e) {
      errs.push_back(e.what());
    }
  }
  return errs;
}

// ---------------------------------------------------------------------------
// Schemes

namespace {

// -dt B(u) + P (dw . grad) u
SpectralField increment(const SpectralField& u, const SpectralField& dw, double dt,
                        const AdvectionTensor* tensor) {
  if (tensor != nullptr) {
    SpectralField r = advect(dw, u, u.trunc());
    r.axpy(-dt, nonlinear_direct(u, *tensor));
    return r;
  }
  const int na = std::max(u.n(), dw.n());
  const TruncationSet ta(na);
  SpectralField a = dw.n() == na ? dw : dw.retruncated(ta);
  if (u.n() == na) {
    a.axpy(-dt, u);
  } else {
    a.axpy(-dt, u.retruncated(ta));
  }
  return advect(a, u, u.trunc());
}

// Transport by the constant field (alpha, beta): (a, b) -> (w b, -w a) per mode,
// w = alpha k1 + beta k2. Applies (I + s L0) or solves (I - s L0) x = r.
void apply_constant(SpectralField& u, double alpha, double beta, double s, bool solve) {
  const auto& t = u.trunc();
  for (std::size_t w = 1; w < t.wavevector_count(); ++w) {
    const ModeIndex k = t.wavevector(w);
    const double om = s * (alpha * k.k1 + beta * k.k2);
    const double a = u[2 * w];
    const double b = u[2 * w + 1];
    if (!solve) {
      u[2 * w] = a + om * b;
      u[2 * w + 1] = b - om * a;
    } else {
      const double det = 1.0 + om * om;
      u[2 * w] = (a + om * b) / det;
      u[2 * w + 1] = (b - om * a) / det;
    }
  }
}

// Least-squares coefficients gamma minimizing |f - sum_j gamma_j df_j| by
// modified Gram-Schmidt; columns that are numerically dependent get zero.
std::vector<double> least_squares(const std::deque<std::vector<double>>& df, const std::vector<double>& f) {
  const std::size_t m = df.size();
  const std::size_t n = f.size();
  std::vector<std::vector<double>> q(m, std::vector<double>(n));
  std::vector<std::vector<double>> r(m, std::vector<double>(m, 0.0));
  std::vector<bool> keep(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    q[j] = df[j];
    double orig = 0.0;
    for (double x : q[j]) orig += x * x;
    for (std::size_t i = 0; i < j; ++i) {
      if (!keep[i]) continue;
      double d = 0.0;
      for (std::size_t p = 0; p < n; ++p) d += q[i][p] * q[j][p];
      r[i][j] = d;
      for (std::size_t p = 0; p < n; ++p) q[j][p] -= d * q[i][p];
    }
    double nrm = 0.0;
    for (double x : q[j]) nrm += x * x;
    if (nrm <= 1e-20 * orig || nrm == 0.0) continue;
    nrm = std::sqrt(nrm);
    r[j][j] = nrm;
    for (double& x : q[j]) x /= nrm;
    keep[j] = true;
  }
  std::vector<double> qtf(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (!keep[j]) continue;
    for (std::size_t p = 0; p < n; ++p) qtf[j] += q[j][p] * f[p];
  }
  std::vector<double> gamma(m, 0.0);
  for (std::size_t jj = m; jj-- > 0;) {
    if (!keep[jj]) continue;
    double v = qtf[jj];
    for (std::size_t k = jj + 1; k < m; ++k) v -= r[jj][k] * gamma[k];
    gamma[jj] = v / r[jj][jj];
  }
  return gamma;
}

constexpr std::size_t kAndersonDepth = 5;

// Solves (I - L0/2) x = (I + L0/2) u + R((u + x)/2), with L0 the constant part
// of the transport (solved exactly mode by mode) and R the rest, by
// Anderson-accelerated fixed-point iteration.
SpectralField midpoint(const SpectralField& u, const SpectralField& dw, double dt, StepStats* stats,
                       const AdvectionTensor* tensor) {
  const double alpha = dw[0];
  const double beta = dw[1];
  SpectralField dw1 = dw;
  dw1[0] = dw1[1] = 0.0;
  SpectralField base = u;
  apply_constant(base, alpha, beta, 0.5, false);

  auto map = [&](const SpectralField& x) {
    SpectralField mid = u;
    mid += x;
    mid *= 0.5;
    SpectralField g = base;
    g += increment(mid, dw1, dt, tensor);
    apply_constant(g, alpha, beta, 0.5, true);
    return g;
  };

  const std::size_t n = u.size();
  std::deque<std::vector<double>> df;
  std::deque<std::vector<double>> dg;
  SpectralField x = u;
  SpectralField g = map(x);
  std::vector<double> f(n);
  for (std::size_t p = 0; p < n; ++p) f[p] = g[p] - x[p];
  double residual = 0.0;
  for (int it = 1; it <= kMidpointMaxIterations; ++it) {
    const double change = l2_norm(g - x);
    const double scale = l2_norm(g);
    residual = scale > 0.0 ? change / scale : change;
    if (!std::isfinite(residual)) {
      throw ConvergenceError("implicit midpoint iteration diverged at iteration " + std::to_string(it),
                             std::numeric_limits<double>::infinity());
    }
    if (residual <= kMidpointTolerance || change == 0.0) {
      if (stats) *stats = {it, residual};
      return g;
    }
    if (it == kMidpointMaxIterations) break;
    SpectralField next = g;
    if (!df.empty()) {
      const auto gamma = least_squares(df, f);
      for (std::size_t j = 0; j < gamma.size(); ++j) {
        for (std::size_t p = 0; p < n; ++p) next[p] -= gamma[j] * dg[j][p];
      }
    }
    SpectralField g_next = map(next);
    std::vector<double> f_next(n);
    std::vector<double> dfj(n);
    std::vector<double> dgj(n);
    for (std::size_t p = 0; p < n; ++p) {
      f_next[p] = g_next[p] - next[p];
      dfj[p] = f_next[p] - f[p];
      dgj[p] = g_next[p] - g[p];
    }
    df.push_back(std::move(dfj));
    dg.push_back(std::move(dgj));
    if (df.size() > kAndersonDepth) {
      df.pop_front();
      dg.pop_front();
    }
    x = std::move(next);
    g = std::move(g_next);
    f = std::move(f_next);
  }
  std::ostringstream os;
  os << "implicit midpoint did not converge in " << kMidpointMaxIterations
     << " iterations (relative residual " << residual << ")";
  throw ConvergenceError(os.str(), residual);
}

}  // namespace

SpectralField step(Scheme scheme, const SpectralField& u, const SpectralField& dw, double dt,
                   StepStats* stats, const AdvectionTensor* tensor) {
  switch (scheme) {
    case Scheme::ItoEulerMaruyama: {
      SpectralField out = u;
      out += increment(u, dw, dt, tensor);
      out.axpy(-kViscosity * dt, stokes_apply(u));
      if (stats) *stats = {1, 0.0};
      return out;
    }
    case Scheme::StratHeun: {
      const SpectralField f0 = increment(u, dw, dt, tensor);
      SpectralField pred = u;
      pred += f0;
      const SpectralField f1 = increment(pred, dw, dt, tensor);
      SpectralField out = u;
      out.axpy(0.5, f0);
      out.axpy(0.5, f1);
      if (stats) *stats = {2, 0.0};
      return out;
    }
    case Scheme::StratImplicitMidpoint:
      return midpoint(u, dw, dt, stats, tensor);
  }
  throw Error("step: unknown scheme");
}

SpectralField step(Scheme scheme, const SpectralField& u, const WienerIncrement& inc,
                   const NoiseModel& model, StepStats* stats, const AdvectionTensor* tensor) {
  return step(scheme, u, noise_field(model, inc), inc.dt, stats, tensor);
}

// ---------------------------------------------------------------------------
// Paths

SpectralField simulate(const SimConfig& config, std::uint64_t path_id, const StepObserver& observer,
                       int* max_iterations) {
  if (const auto errs = config.validate(); !errs.empty()) throw ConfigError(errs.front());
  SpectralField u = build_initial(config.initial, config.n, config.seed);
  NoiseStream stream(config.seed, path_id);
  const int nsteps = config.steps();
  if (observer) observer(0, 0.0, u);
  int worst = 0;
  for (int s = 1; s <= nsteps; ++s) {
    const WienerIncrement inc = stream.sample(config.noise, config.dt, config.substeps);
    StepStats st;
    try {
      u = step(config.scheme, u, noise_field(config.noise, inc), config.dt, &st);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("path " + std::to_string(path_id) + ", step " + std::to_string(s) + ": " +
                                 e.what(),
                             e.residual);
    }
    worst = std::max(worst, st.iterations);
    if (observer) observer(s, s * config.dt, u);
  }
  if (max_iterations) *max_iterations = worst;
  return u;
}

PathResult run_path(const SimConfig& config, std::uint64_t path_id, const StepObserver& observer) {
  PathResult res;
  const int nsteps = config.steps();
  auto record = [&](int s, double t, const SpectralField& u) {
    res.l2.push_back(l2_norm2(u));
    res.h1.push_back(h1_norm2(u));
    if (s % config.save_every == 0 || s == nsteps) {
      res.times.push_back(t);
      res.states.push_back(u);
    }
    if (observer) observer(s, t, u);
  };
  simulate(config, path_id, record, &res.max_iterations);
  return res;
}

// ---------------------------------------------------------------------------
// Ensembles

Probe make_probe(const BasisMode& mode, int n) {
  TruncationSet t(n);
  if (!t.contains(mode.k)) throw ConfigError("probe " + to_string(mode) + " outside I_" + std::to_string(n));
  return {to_string(mode), SpectralField::single(t, mode, 1.0 / mode_norm2(mode.k))};
}

std::vector<Probe> default_probes(int n) {
  return {make_probe(S(1, 0), n), make_probe(C(0, 1), n), make_probe(C(1, 1), n)};
}

double Moments::se() const { return count > 0 ? std::sqrt(var / count) : 0.0; }

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.count = static_cast<int>(xs.size());
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / m.count;
  if (m.count > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.var = ss / (m.count - 1);
  }
  return m;
}

namespace {

PathSummary summarize_path(const SimConfig& config, std::uint64_t path_id, const ProbeSet& probes) {
  PathSummary out;
  const int nsteps = config.steps();
  ProbeTracker tracker(probes, config.dt);
  out.m.resize(probes.size());
  out.qv.resize(probes.size());
  out.l_diff.resize(probes.size());
  double l2_0 = 0.0;
  double h1_0 = 0.0;
  auto observe = [&](int s, double, const SpectralField& u) {
    const double l2 = l2_norm2(u);
    const double h1 = h1_norm2(u);
    if (s == 0) {
      l2_0 = l2;
      h1_0 = h1;
    }
    if (l2_0 > 0.0) out.max_rel_l2_drift = std::max(out.max_rel_l2_drift, std::abs(l2 - l2_0) / l2_0);
    if (h1_0 > 0.0) out.max_rel_h1_drift = std::max(out.max_rel_h1_drift, std::abs(h1 - h1_0) / h1_0);
    if (probes.size() > 0) tracker.observe(u);
    if (s % config.save_every == 0 || s == nsteps) {
      out.l2.push_back(l2);
      out.h1.push_back(h1);
      for (std::size_t p = 0; p < probes.size(); ++p) {
        out.m[p].push_back(tracker.m(p));
        out.qv[p].push_back(tracker.qv(p));
        out.l_diff[p].push_back(tracker.l(p) - tracker.l0(p));
      }
    }
  };
  simulate(config, path_id, observe, &out.max_iterations);
  return out;
}

}  // namespace

EnsembleDiagnostics run_ensemble(const SimConfig& config, const std::vector<Probe>& probes,
                                 const std::vector<std::uint64_t>& path_ids) {
  if (const auto errs = config.validate(); !errs.empty()) throw ConfigError(errs.front());
  std::vector<std::uint64_t> ids = path_ids;
  if (ids.empty()) {
    for (int p = 0; p < config.paths; ++p) ids.push_back(static_cast<std::uint64_t>(p));
  }
  if (ids.size() < 2) throw ConfigError("run_ensemble: at least 2 paths are required");

  const auto start = std::chrono::steady_clock::now();
  const ProbeSet probe_set(config.noise, probes, config.n);
  EnsembleDiagnostics ens;
  ens.paths.resize(ids.size());
  int workers = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, static_cast<int>(ids.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= ids.size()) return;
      try {
        ens.paths[i] = summarize_path(config, ids[i], probe_set);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = ids.size();
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Aggregate in path order.
  const int nsteps = config.steps();
  for (int s = 0; s <= nsteps; ++s) {
    if (s % config.save_every == 0 || s == nsteps) ens.times.push_back(s * config.dt);
  }
  const SpectralField u0 = build_initial(config.initial, config.n, config.seed);
  ens.l2_initial = l2_norm2(u0);
  ens.h1_initial = h1_norm2(u0);
  ens.gronwall_rate = config.noise.gronwall_rate();
  for (const auto& p : probes) ens.probe_names.push_back(p.name);
  ens.m.resize(probes.size());
  ens.m_sq_minus_qv.resize(probes.size());
  ens.l_re.resize(probes.size());
  ens.l_im.resize(probes.size());

  std::vector<double> xs(ids.size());
  auto gather = [&](auto get) {
    for (std::size_t i = 0; i < ids.size(); ++i) xs[i] = get(ens.paths[i]);
    return moments(xs);
  };
  for (std::size_t t = 0; t < ens.times.size(); ++t) {
    ens.l2.push_back(gather([&](const PathSummary& p) { return p.l2[t]; }));
    ens.h1.push_back(gather([&](const PathSummary& p) { return p.h1[t]; }));
    ens.envelope_h1.push_back(ens.h1_initial * std::exp(ens.gronwall_rate * ens.times[t]));
    for (std::size_t q = 0; q < probes.size(); ++q) {
      ens.m[q].push_back(gather([&](const PathSummary& p) { return p.m[q][t]; }));
      ens.m_sq_minus_qv[q].push_back(
          gather([&](const PathSummary& p) { return p.m[q][t] * p.m[q][t] - p.qv[q][t]; }));
      ens.l_re[q].push_back(gather([&](const PathSummary& p) { return p.l_diff[q][t].real(); }));
      ens.l_im[q].push_back(gather([&](const PathSummary& p) { return p.l_diff[q][t].imag(); }));
    }
  }
  ens.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ens;
}

}  // namespace steuler
