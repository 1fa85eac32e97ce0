#include "steuler/noise.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace steuler {

namespace {

void require_beta(double beta) {
  if (!(beta > 3.0)) {
    throw ConfigError("noise: beta must be > 3 (got " + std::to_string(beta) + ")");
  }
}

// Neumaier compensated summation.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double total() const { return sum + comp; }
};

enum class SumKind { Cw, CwPrime, Trace };

// Partial sum over 0 < max(|k1|,|k2|) <= cutoff. The weight is
// (k_c)^2 |k|^{-2 power} for Cw / CwPrime and |k|^{-2 power} for Trace.
double box_sum(SumKind kind, double beta, int cutoff, int component) {
  const double power = kind == SumKind::Cw ? beta : (kind == SumKind::CwPrime ? beta - 1.0 : beta - 1.0);
  Accumulator acc;
  // Row i of the box; k = (i, j) for component 1 and the transposed point for
  // component 2, so the two components produce the same terms in the same order.
  for (int i = -cutoff; i <= cutoff; ++i) {
    Accumulator row;
    for (int j = -cutoff; j <= cutoff; ++j) {
      if (i == 0 && j == 0) continue;
      const ModeIndex k = component == 1 ? ModeIndex{i, j} : ModeIndex{j, i};
      const double r2 = static_cast<double>(k.norm2());
      double term = std::pow(r2, -power);
      if (kind != SumKind::Trace) {
        const double kc = component == 1 ? k.k1 : k.k2;
        term *= kc * kc;
      }
      row.add(term);
    }
    acc.add(row.total());
  }
  return acc.total();
}

double cached_box_sum(SumKind kind, double beta, int cutoff, int component) {
  static std::mutex mu;
  static std::map<std::tuple<int, double, int, int>, double> cache;
  const auto key = std::make_tuple(static_cast<int>(kind), beta, cutoff, component);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double v = box_sum(kind, beta, cutoff, component);
  std::lock_guard lock(mu);
  cache[key] = v;
  return v;
}

// sum_{i > n} i^{-p} lies in [(n+1)^{1-p}/(p-1), n^{1-p}/(p-1)] for p > 1, n >= 1.
double zeta_tail_lo(double p, int n) { return std::pow(n + 1.0, 1.0 - p) / (p - 1.0); }
double zeta_tail_hi(double p, int n) { return std::pow(static_cast<double>(n), 1.0 - p) / (p - 1.0); }

// int_a^inf (c^2 + y^2)^{-s} dy
double ray_integral(double s, double c, double a) {
  if (c == 0.0) return std::pow(a, 1.0 - 2.0 * s) / (2.0 * s - 1.0);
  const double x = c * c / (c * c + a * a);
  return 0.5 * std::pow(c, 1.0 - 2.0 * s) * boost::math::beta(s - 0.5, 0.5, x);
}

constexpr int kExplicitShells = 256;

}  // namespace

double q_coeff(ModeIndex k, double beta) {
  require_beta(beta);
  if (k.is_zero()) return 1.0;
  return std::pow(static_cast<double>(k.norm2()), -(beta - 1.0));
}

std::pair<double, double> lattice_tail_bounds(double s, int n) {
  if (!(s > 1.0)) throw ConfigError("lattice_tail_bounds: exponent must exceed 1");
  if (n < 0) throw ConfigError("lattice_tail_bounds: negative cutoff");
  if (n < kExplicitShells) {
    // Explicit shells n < max|k_i| <= kExplicitShells, bounds beyond.
    Accumulator acc;
    const int m = kExplicitShells;
    for (int i = -m; i <= m; ++i) {
      for (int j = -m; j <= m; ++j) {
        const ModeIndex k{i, j};
        if (k.max_abs() <= n) continue;
        acc.add(std::pow(static_cast<double>(k.norm2()), -s));
      }
    }
    const auto [lo, hi] = lattice_tail_bounds(s, m);
    return {acc.total() + lo, acc.total() + hi};
  }
  // Columns |i| > n, all j: each column sum is within i^{-2s} of the integral
  // A i^{1-2s}, A = B(1/2, s - 1/2).
  const double a = boost::math::beta(0.5, s - 0.5);
  const double b_lo = 2.0 * (a * zeta_tail_lo(2.0 * s - 1.0, n) - zeta_tail_hi(2.0 * s, n));
  const double b_hi = 2.0 * (a * zeta_tail_hi(2.0 * s - 1.0, n) + zeta_tail_hi(2.0 * s, n));
  // Rows |i| <= n, |j| > n: integral comparison on the decreasing tail in j.
  Accumulator a_lo;
  Accumulator a_hi;
  for (int i = 0; i <= n; ++i) {
    const double mult = i == 0 ? 1.0 : 2.0;
    a_lo.add(mult * ray_integral(s, i, n + 1.0));
    a_hi.add(mult * ray_integral(s, i, static_cast<double>(n)));
  }
  return {b_lo + 2.0 * a_lo.total(), b_hi + 2.0 * a_hi.total()};
}

namespace {

BoundedSum bounded(SumKind kind, double beta, int cutoff, int component) {
  require_beta(beta);
  if (cutoff < 1) throw ConfigError("noise: cutoff must be >= 1");
  if (component != 1 && component != 2) throw ConfigError("noise: component must be 1 or 2");
  BoundedSum out;
  out.cutoff = cutoff;
  out.partial = cached_box_sum(kind, beta, cutoff, component);
  double tail_lo = 0.0;
  double tail_hi = 0.0;
  // By the k1 <-> k2 symmetry of the outer region, sum (k_c)^2 g(|k|^2) over
  // it is half of sum |k|^2 g(|k|^2).
  if (kind == SumKind::Cw) {
    out.partial += 1.0;
    std::tie(tail_lo, tail_hi) = lattice_tail_bounds(beta - 1.0, cutoff);
    tail_lo *= 0.5;
    tail_hi *= 0.5;
  } else if (kind == SumKind::CwPrime) {
    std::tie(tail_lo, tail_hi) = lattice_tail_bounds(beta - 2.0, cutoff);
    tail_lo *= 0.5;
    tail_hi *= 0.5;
  } else {
    std::tie(tail_lo, tail_hi) = lattice_tail_bounds(beta - 1.0, cutoff);
  }
  out.lower = out.partial + tail_lo;
  out.upper = out.partial + tail_hi;
  return out;
}

}  // namespace

BoundedSum normalizer_cw(double beta, int cutoff, int component) {
  return bounded(SumKind::Cw, beta, cutoff, component);
}

BoundedSum normalizer_cw_prime(double beta, int cutoff, int component) {
  return bounded(SumKind::CwPrime, beta, cutoff, component);
}

BoundedSum q_trace(double beta, int cutoff) { return bounded(SumKind::Trace, beta, cutoff, 1); }

double discarded_trace(double beta, int n_w) {
  require_beta(beta);
  const auto [lo, hi] = lattice_tail_bounds(beta - 1.0, n_w);
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// NoiseModel

std::string to_string(NoiseRegime r) {
  switch (r) {
    case NoiseRegime::SpaceIndependent:
      return "space-independent";
    case NoiseRegime::FiniteModes:
      return "finite";
    case NoiseRegime::QWiener:
      return "qwiener";
  }
  return "?";
}

NoiseModel NoiseModel::space_independent(double scale) {
  NoiseModel m;
  m.scale_ = scale;
  m.regime_ = NoiseRegime::SpaceIndependent;
  m.cw_ = 1.0;
  m.cw_prime_ = 0.0;
  m.modes_ = {{0, 0}};
  return m;
}

namespace {
void fill_normalizers(double beta, int cutoff, double& cw, double& cwp, double& cw_width,
                      double& cwp_width) {
  const auto a = normalizer_cw(beta, cutoff);
  const auto b = normalizer_cw_prime(beta, cutoff);
  cw = a.value();
  cwp = b.value();
  cw_width = a.width();
  cwp_width = b.width();
}
}  // namespace

NoiseModel NoiseModel::finite_modes(std::vector<ModeIndex> modes, double beta, int cutoff) {
  require_beta(beta);
  if (modes.empty()) throw ConfigError("finite noise: empty mode set");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (modes[i] == modes[j]) {
        throw ConfigError("finite noise: duplicate wavevector (" + std::to_string(modes[i].k1) +
                          "," + std::to_string(modes[i].k2) + ")");
      }
    }
  }
  NoiseModel m;
  m.regime_ = NoiseRegime::FiniteModes;
  m.beta_ = beta;
  m.modes_ = std::move(modes);
  m.n_w_ = m.degree();
  fill_normalizers(beta, cutoff, m.cw_, m.cw_prime_, m.cw_width_, m.cw_prime_width_);
  return m;
}

NoiseModel NoiseModel::q_wiener(int n_w, double beta, int cutoff) {
  require_beta(beta);
  if (n_w < 0) throw ConfigError("qwiener noise: n_W must be >= 0");
  NoiseModel m;
  m.regime_ = NoiseRegime::QWiener;
  m.beta_ = beta;
  m.n_w_ = n_w;
  m.modes_ = TruncationSet(n_w).lattice();
  fill_normalizers(beta, cutoff, m.cw_, m.cw_prime_, m.cw_width_, m.cw_prime_width_);
  return m;
}

double NoiseModel::amplitude(ModeIndex k) const {
  if (regime_ == NoiseRegime::SpaceIndependent) return scale_;
  return std::sqrt(q_coeff(k, beta_) / cw_);
}

int NoiseModel::degree() const {
  int d = 0;
  for (const auto& k : modes_) d = std::max(d, k.max_abs());
  return d;
}

double NoiseModel::discarded_trace() const {
  if (regime_ == NoiseRegime::SpaceIndependent) return 0.0;
  if (regime_ == NoiseRegime::QWiener) return steuler::discarded_trace(beta_, n_w_);
  const int d = degree();
  double inside = 0.0;
  bool has_origin = false;
  for (const auto& k : modes_) {
    if (k.is_zero()) {
      has_origin = true;
    } else {
      inside += q_coeff(k, beta_);
    }
  }
  Accumulator box;
  for (const auto& k : TruncationSet(d).lattice()) {
    if (!k.is_zero()) box.add(q_coeff(k, beta_));
  }
  return (has_origin ? 0.0 : 1.0) + box.total() - inside + steuler::discarded_trace(beta_, d);
}

std::string NoiseModel::describe() const {
  std::ostringstream os;
  os << to_string(regime_);
  if (regime_ == NoiseRegime::SpaceIndependent && scale_ != 1.0) os << "(scale=" << scale_ << ")";
  if (regime_ == NoiseRegime::QWiener) os << "(n_W=" << n_w_ << ", beta=" << beta_ << ")";
  if (regime_ == NoiseRegime::FiniteModes) os << "(" << modes_.size() << " modes, beta=" << beta_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Sampling

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  engine_.seed(seq);
}

WienerIncrement NoiseStream::sample(const NoiseModel& model, double dt, int substeps) {
  if (dt < 0.0) throw Error("sample_increments: negative dt");
  if (substeps < 1) throw Error("sample_increments: substeps must be >= 1");
  const std::size_t nm = model.modes().size();
  WienerIncrement inc;
  inc.dt = dt;
  inc.db1.assign(nm, 0.0);
  inc.db2.assign(nm, 0.0);
  if (dt == 0.0) return inc;
  const double scale = std::sqrt(dt / substeps);
  for (int s = 0; s < substeps; ++s) {
    for (std::size_t i = 0; i < nm; ++i) {
      inc.db1[i] += scale * normal();
      inc.db2[i] += scale * normal();
    }
  }
  return inc;
}

WienerIncrement sample_increments(const NoiseModel& model, double dt, NoiseStream& stream) {
  return stream.sample(model, dt);
}

std::vector<TransportTerm> noise_field_increment(const NoiseModel& model) {
  std::vector<TransportTerm> out;
  const auto& modes = model.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double sigma = model.amplitude(modes[i]);
    out.push_back({sigma, {ModeKind::C, modes[i]}, i, 1});
    out.push_back({sigma, {ModeKind::S, modes[i]}, i, 2});
  }
  return out;
}

SpectralField noise_field(const NoiseModel& model, const WienerIncrement& inc) {
  const auto& modes = model.modes();
  if (inc.db1.size() != modes.size() || inc.db2.size() != modes.size()) {
    throw DimensionMismatch("noise_field: increment does not match the noise model");
  }
  SpectralField w(TruncationSet(model.degree()));
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double sigma = model.amplitude(modes[i]);
    w.add({ModeKind::C, modes[i]}, sigma * inc.db1[i]);
    w.add({ModeKind::S, modes[i]}, sigma * inc.db2[i]);
  }
  return w;
}

std::vector<ModeIndex> parse_mode_list(const std::string& text) {
  std::vector<ModeIndex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw ConfigError("mode list: expected 'k1,k2', got '" + item + "'");
    try {
      std::size_t p1 = 0;
      std::size_t p2 = 0;
      const std::string a = item.substr(0, comma);
      const std::string b = item.substr(comma + 1);
      const int k1 = std::stoi(a, &p1);
      const int k2 = std::stoi(b, &p2);
      if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing");
      out.push_back({k1, k2});
    } catch (const std::exception&) {
      throw ConfigError("mode list: bad wavevector '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("mode list: no wavevectors in '" + text + "'");
  return out;
}

}  // namespace steuler
