#include "steuler/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>

#include "steuler/diagnostics.hpp"
#include "steuler/dynamics.hpp"
#include "steuler/geometry.hpp"
#include "steuler/noise.hpp"

namespace steuler {

namespace {

struct SuiteInfo {
  const char* id;
  const char* name;
  const char* title;
};

constexpr SuiteInfo kSuites[] = {
    {"A1", "energy", "pathwise L2 conservation"},
    {"A2", "h1", "H1 expectation constancy"},
    {"A3", "gronwall", "Gronwall envelope for Q-Wiener noise"},
    {"A4", "oracle", "pseudo-spectral vs direct nonlinearity"},
    {"A5", "geodesic", "geodesic drift vs Galerkin advection"},
    {"A6", "martingale", "martingale functionals"},
    {"A7", "ito-strat", "Ito/Stratonovich consistency"},
    {"A8", "structure", "structural identities"},
    {"A9", "noise", "noise normalizer constants"},
};

const SuiteInfo& info(const std::string& suite) {
  for (const auto& s : kSuites)
    if (suite == s.name || suite == s.id) return s;
  throw ConfigError("unknown verification suite '" + suite + "'");
}

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

// Random field with N(0,1) |k|^{-1} coefficients, constant modes N(0,1).
SpectralField random_field(int n, std::mt19937_64& rng) {
  TruncationSet t(n);
  SpectralField f(t);
  std::normal_distribution<double> z;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const ModeIndex k = t.wavevector(i / 2);
    f[i] = k.is_zero() ? z(rng) : z(rng) / std::sqrt(static_cast<double>(k.norm2()));
  }
  return f;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

SimConfig desk_config(int paths, int threads) {
  SimConfig c;
  c.paths = paths;
  c.threads = threads;
  return c;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : kSuites) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

std::vector<std::string> expand_suites(const std::string& selection) {
  if (selection.empty() || selection == "all") return suite_names();
  std::vector<std::string> out;
  std::stringstream ss(selection);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const std::string name = info(item).name;
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  if (out.empty()) throw ConfigError("no verification suite selected");
  return out;
}

struct AcceptanceRunner::Cache {
  std::optional<EnsembleDiagnostics> conservative;
};

AcceptanceRunner::AcceptanceRunner(AcceptanceOptions options)
    : options_(std::move(options)), cache_(std::make_unique<Cache>()) {}

AcceptanceRunner::~AcceptanceRunner() = default;

void AcceptanceRunner::log(const std::string& msg) const {
  if (options_.log) options_.log(msg);
}

// Desk-scale defaults: n = 8, dt = 1e-3, T = 1, pair initial field,
// space-independent noise, implicit midpoint, default probes.
const EnsembleDiagnostics& AcceptanceRunner::conservative_ensemble() {
  if (!cache_->conservative) {
    const SimConfig c = desk_config(options_.quick ? 16 : 256, options_.threads);
    log("running " + std::to_string(c.paths) + " midpoint paths with space-independent noise");
    cache_->conservative = run_ensemble(c, default_probes(c.n));
  }
  return *cache_->conservative;
}

CriterionResult AcceptanceRunner::run(const std::string& suite) {
  const SuiteInfo& s = info(suite);
  CriterionResult r;
  r.id = s.id;
  r.suite = s.name;
  r.title = s.title;
  const auto start = std::chrono::steady_clock::now();
  const std::string name = s.name;
  const bool quick = options_.quick;
  std::ostringstream detail;

  if (name == "energy") {
    const auto& ens = conservative_ensemble();
    double worst = 0.0;
    for (const auto& p : ens.paths) worst = std::max(worst, p.max_rel_l2_drift);
    const bool midpoint_ok = worst <= 1e-8;

    // Heun: the same Brownian paths at three step sizes via summed fine increments.
    const std::vector<double> dts = {1e-3, 5e-4, 2.5e-4};
    std::vector<double> drift;
    for (std::size_t i = 0; i < dts.size(); ++i) {
      SimConfig c = desk_config(32, options_.threads);
      c.scheme = Scheme::StratHeun;
      c.dt = dts[i];
      c.substeps = 1 << (dts.size() - 1 - i);
      c.save_every = c.steps();
      log("running " + std::to_string(c.paths) + " Heun paths at dt=" + sci(c.dt));
      const auto e = run_ensemble(c);
      double sum = 0.0;
      for (const auto& p : e.paths) sum += p.max_rel_l2_drift;
      drift.push_back(sum / e.paths.size());
    }
    const double slope = loglog_slope(dts, drift);
    const bool heun_ok = slope >= 1.0;
    r.pass = midpoint_ok && heun_ok;
    detail << "midpoint max rel drift " << sci(worst) << " (<= 1e-8, " << ens.paths.size()
           << " paths); Heun mean drift " << sci(drift[0]) << ", " << sci(drift[1]) << ", "
           << sci(drift[2]) << " order " << fmt("%.3f", slope) << " (>= 1)";
  } else if (name == "h1") {
    const auto& ens = conservative_ensemble();
    const double ref = ens.h1_initial;
    double worst = 0.0;  // largest |mean - ref| / (3 SE + 1e-8 ref)
    double at = 0.0;
    for (std::size_t t = 0; t < ens.times.size(); ++t) {
      const double ratio = std::abs(ens.h1[t].mean - ref) / (3 * ens.h1[t].se() + 1e-8 * ref);
      if (ratio > worst) {
        worst = ratio;
        at = ens.times[t];
      }
    }
    r.pass = worst <= 1.0;
    detail << "max |mean H1 - H1(0)| / (3 SE + 1e-8 H1(0)) = " << fmt("%.3f", worst) << " at t="
           << fmt("%.2f", at) << "; H1(0) = " << fmt("%.6g", ref) << ", " << ens.paths.size()
           << " paths";
  } else if (name == "gronwall") {
    SimConfig c = desk_config(quick ? 32 : 256, options_.threads);
    c.scheme = Scheme::ItoEulerMaruyama;
    c.noise = NoiseModel::q_wiener(c.n, 4.0);
    log("running " + std::to_string(c.paths) + " Euler-Maruyama paths with Q-Wiener noise");
    const auto ens = run_ensemble(c);
    // At t = 0 every path sits on the envelope; allow summation roundoff there.
    bool under = true;
    double margin = 1e300;  // min over t > 0 of envelope + 3 SE - mean
    double final_mean = 0.0;
    for (std::size_t t = 0; t < ens.times.size(); ++t) {
      const double m = ens.envelope_h1[t] + 3 * ens.h1[t].se() - ens.h1[t].mean;
      under = under && m >= -1e-12 * ens.envelope_h1[t];
      if (t > 0) margin = std::min(margin, m);
      final_mean = ens.h1[t].mean;
    }
    r.pass = under;
    detail << "C = c'_W/c_W = " << fmt("%.6f", ens.gronwall_rate) << "; mean H1 "
           << fmt("%.4g", ens.h1_initial) << " -> " << fmt("%.4g", final_mean)
           << ", envelope at T " << fmt("%.4g", ens.envelope_h1.back()) << ", min margin for t > 0 "
           << fmt("%.4g", margin);
  } else if (name == "oracle") {
    std::mt19937_64 rng(404);
    double worst = 0.0;
    const int fields = quick ? 10 : 100;
    for (int n : {2, 4, 6, 8}) {
      const AdvectionTensor tensor{TruncationSet(n)};
      for (int i = 0; i < fields; ++i) {
        const auto f = random_field(n, rng);
        worst = std::max(worst, max_abs_diff(nonlinear_pseudospectral(f), nonlinear_direct(f, tensor)));
      }
    }
    r.pass = worst <= 1e-10;
    detail << "max entrywise difference " << sci(worst) << " (<= 1e-10) over " << 4 * fields
           << " fields, n in {2,4,6,8}";
  } else if (name == "geodesic") {
    const TruncationSet t(8);
    log("building structure tables for n=8");
    const auto tables = build_structure_tables(t);
    const AdvectionTensor tensor(t);
    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < t.dimension(); ++i)
      if (t.mode(i).k.max_abs() <= 4) interior.push_back(i);
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
    std::normal_distribution<double> z;
    double worst_b = 0.0;
    double worst_noise = 0.0;
    const int fields = quick ? 20 : 100;
    for (int i = 0; i < fields; ++i) {
      SpectralField u(t);
      u[interior[pick(rng)]] += z(rng);
      u[interior[pick(rng)]] += z(rng);
      const auto g = geodesic_drift(u, tables);
      worst_b = std::max(worst_b, max_abs_diff(g, -1.0 * nonlinear_pseudospectral(u)));
      worst_b = std::max(worst_b, max_abs_diff(g, -1.0 * nonlinear_direct(u, tensor)));
      for (std::size_t l : {0u, 1u}) {
        const BasisMode dir = l == 0 ? C(0, 0) : S(0, 0);
        worst_noise = std::max(worst_noise,
                               max_abs_diff(geodesic_noise(u, l, tables), -1.0 * transport_apply(u, dir)));
      }
    }
    r.pass = worst_b <= 1e-10 && worst_noise <= 1e-10;
    detail << "max |geodesic_drift + B(u)| " << sci(worst_b) << ", max |geodesic_noise + d_l u| "
           << sci(worst_noise) << " (<= 1e-10) over " << fields << " interior two-mode fields";
  } else if (name == "martingale") {
    const auto& ens = conservative_ensemble();
    const std::size_t last = ens.times.size() - 1;
    double worst_l = 0.0;  // max |mean| / 3 SE over probes and real/imag parts at T
    for (std::size_t p = 0; p < ens.probe_names.size(); ++p) {
      for (const auto* series : {&ens.l_re[p][last], &ens.l_im[p][last]}) {
        const double ratio = std::abs(series->mean) / (3 * series->se());
        worst_l = std::max(worst_l, ratio);
      }
    }
    const bool l_ok = worst_l <= 1.0;

    // One-mode reference: u0 = c_(1,0), probe s_(1,0).
    // The QV statistics are heavy-tailed; smaller samples under-estimate the SE.
    SimConfig c = desk_config(256, options_.threads);
    c.initial = InitialCondition::parse("mode:1,0");
    log("running " + std::to_string(c.paths) + " one-mode reference paths");
    const auto ref = run_ensemble(c, {make_probe(S(1, 0), c.n)});
    const auto qv = qv_check(ref, 0);
    double worst_qv = 0.0;
    for (std::size_t t = 0; t < qv.times.size(); ++t)
      worst_qv = std::max(worst_qv, std::abs(qv.gap[t]) / (3 * qv.se_gap[t] + 2 * c.dt));
    std::vector<double> msq;
    for (const auto& p : ref.paths) msq.push_back(p.m[0].back() * p.m[0].back());
    const Moments mm = moments(msq);
    const bool qv_ok = worst_qv <= 1.0;
    r.pass = l_ok && qv_ok;
    detail << "max |mean(L_T - L_0)| / 3 SE " << fmt("%.3f", worst_l) << " over "
           << ens.probe_names.size() << " probes; max |QV gap| / (3 SE + 2 dt) "
           << fmt("%.3f", worst_qv) << "; E[M(1)^2] " << fmt("%.4f", mm.mean) << " +- "
           << fmt("%.4f", mm.se()) << " (closed form " << fmt("%.4f", 0.5 + (1 - std::exp(-2.0)) / 4)
           << ")";
  } else if (name == "ito-strat") {
    std::vector<Moments> finals;
    for (Scheme scheme : {Scheme::StratHeun, Scheme::ItoEulerMaruyama}) {
      SimConfig c = desk_config(quick ? 32 : 256, options_.threads);
      c.scheme = scheme;
      c.save_every = c.steps();
      log("running " + std::to_string(c.paths) + " " + to_string(scheme) + " paths");
      const auto e = run_ensemble(c);
      std::vector<double> l2;
      for (const auto& p : e.paths) l2.push_back(p.l2.back());
      finals.push_back(moments(l2));
    }
    const double diff = std::abs(finals[0].mean - finals[1].mean);
    const double se = std::hypot(finals[0].se(), finals[1].se());
    const double tol = 3 * se + 5 * 1e-3;
    r.pass = diff <= tol;
    detail << "mean ||u(1)||^2: Heun " << fmt("%.5f", finals[0].mean) << ", EM "
           << fmt("%.5f", finals[1].mean) << "; |diff| " << sci(diff) << " <= " << sci(tol)
           << " (3 combined SE + 5 dt)";
  } else if (name == "structure") {
    std::mt19937_64 rng(808);
    const int n = 6;
    const TruncationSet t(n);
    std::uniform_int_distribution<std::size_t> pick(2, t.dimension() - 1);
    double worst_b = 0.0;
    double worst_h = 0.0;
    double worst_t = 0.0;
    double worst_div = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto u = random_field(n, rng);
      const auto b = nonlinear_pseudospectral(u);
      worst_b = std::max(worst_b, std::abs(inner_l2(b, u)) / (l2_norm(b) * l2_norm(u)));
      worst_h = std::max(worst_h, std::abs(inner_h1(b, u)) / (h1_norm(b) * h1_norm(u)));
      for (const BasisMode a : {C(0, 0), S(0, 0), t.mode(pick(rng))}) {
        const auto ta = transport_apply(u, a);
        worst_t = std::max(worst_t, std::abs(inner_l2(ta, u)) / (l2_norm(ta) * l2_norm(u)));
      }
      worst_div = std::max({worst_div, divergence_max(u), divergence_max(b)});
    }
    r.pass = worst_b <= 1e-10 && worst_h <= 1e-10 && worst_t <= 1e-10 && worst_div <= 1e-10;
    detail << "relative |<B(u),u>| " << sci(worst_b) << ", |<grad B(u),grad u>| " << sci(worst_h)
           << ", |<(a.grad)u,u>| " << sci(worst_t) << ", max |div| " << sci(worst_div)
           << " (each <= 1e-10, 100 fields, n=6)";
  } else if (name == "noise") {
    bool symmetric = true;
    const std::vector<int> cutoffs = quick ? std::vector<int>{1, 2, 3, 8, 64, 512}
                                           : std::vector<int>{1, 2, 3, 8, 64, 512, 2048, 4096};
    for (double beta : {3.5, 4.0, 6.0}) {
      for (int cut : cutoffs) {
        for (auto fn : {&normalizer_cw, &normalizer_cw_prime}) {
          const BoundedSum a = fn(beta, cut, 1);
          const BoundedSum b = fn(beta, cut, 2);
          symmetric = symmetric && a.partial == b.partial && a.lower == b.lower && a.upper == b.upper;
        }
      }
    }
    const int lo = quick ? 512 : 2048;
    const double cw_step = std::abs(normalizer_cw(4.0, 2 * lo).value() - normalizer_cw(4.0, lo).value());
    const double cwp_step =
        std::abs(normalizer_cw_prime(4.0, 2 * lo).value() - normalizer_cw_prime(4.0, lo).value());
    r.pass = symmetric && cw_step < 1e-8 && cwp_step < 1e-8;
    detail << "component symmetry " << (symmetric ? "exact" : "BROKEN") << " at " << cutoffs.size()
           << " cutoffs; beta=4 change " << lo << " -> " << 2 * lo << ": c_W " << sci(cw_step)
           << ", c'_W " << sci(cwp_step) << " (< 1e-8); c_W = "
           << fmt("%.12f", normalizer_cw(4.0, 2 * lo).value())
           << ", c'_W = " << fmt("%.12f", normalizer_cw_prime(4.0, 2 * lo).value());
  }

  r.detail = detail.str();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> AcceptanceRunner::run_all(
    const std::vector<std::string>& suites, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (const auto& s : suites) {
    CriterionResult r;
    try {
      r = run(s);
    } catch (const std::exception& e) {
      const SuiteInfo& i = info(s);
      r.id = i.id;
      r.suite = i.name;
      r.title = i.title;
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "%-3s %-11s %s %7.1fs  ", r.id.c_str(), r.suite.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds);
  return head + r.title + ": " + r.detail;
}

}  // namespace steuler
