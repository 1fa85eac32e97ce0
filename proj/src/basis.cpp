#include "steuler/basis.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "steuler/fourier_grid.hpp"

namespace steuler {

using std::numbers::pi;

std::string to_string(const BasisMode& mode) {
  return std::string(mode.kind == ModeKind::C ? "C" : "S") + "(" +
         std::to_string(mode.k.k1) + "," + std::to_string(mode.k.k2) + ")";
}

double mode_norm2(ModeIndex k) { return k.is_zero() ? 4.0 * pi * pi : 2.0 * pi * pi; }

Vec2 eval_mode(const BasisMode& mode, const Vec2& theta) {
  const auto [k1, k2] = mode.k;
  if (mode.k.is_zero()) {
    return mode.kind == ModeKind::C ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  }
  const double inv = 1.0 / std::sqrt(static_cast<double>(mode.k.norm2()));
  const double phase = k1 * theta[0] + k2 * theta[1];
  const double t = mode.kind == ModeKind::C ? std::cos(phase) : std::sin(phase);
  return {k2 * inv * t, -k1 * inv * t};
}

CanonicalMode canonicalize(const BasisMode& mode) {
  if (mode.k.is_canonical()) return {mode, 1.0};
  // c_{-k} = -c_k, s_{-k} = s_k
  return {{mode.kind, -mode.k}, mode.kind == ModeKind::C ? -1.0 : 1.0};
}

// ---------------------------------------------------------------------------
// TruncationSet

TruncationSet::TruncationSet(int n) : n_(n) {
  if (n < 0) throw Error("TruncationSet: n must be non-negative");
}

std::size_t TruncationSet::lattice_size() const {
  const std::size_t side = 2 * static_cast<std::size_t>(n_) + 1;
  return side * side;
}

std::size_t TruncationSet::wavevector_count() const {
  return 1 + static_cast<std::size_t>(n_) + static_cast<std::size_t>(n_) * (2 * n_ + 1);
}

ModeIndex TruncationSet::wavevector(std::size_t w) const {
  if (w == 0) return {0, 0};
  if (w <= static_cast<std::size_t>(n_)) return {0, static_cast<int>(w)};
  const std::size_t r = w - n_ - 1;
  const std::size_t side = 2 * n_ + 1;
  return {static_cast<int>(r / side) + 1, static_cast<int>(r % side) - n_};
}

std::size_t TruncationSet::wavevector_slot(ModeIndex k) const {
  if (!contains(k) || !k.is_canonical()) {
    throw Error("TruncationSet: wavevector (" + std::to_string(k.k1) + "," +
                std::to_string(k.k2) + ") is not canonical in I_" + std::to_string(n_));
  }
  if (k.k1 == 0) return static_cast<std::size_t>(k.k2);
  return n_ + 1 + static_cast<std::size_t>(k.k1 - 1) * (2 * n_ + 1) + (k.k2 + n_);
}

BasisMode TruncationSet::mode(std::size_t index) const {
  return {index % 2 == 0 ? ModeKind::C : ModeKind::S, wavevector(index / 2)};
}

std::size_t TruncationSet::index(const BasisMode& m) const {
  return 2 * wavevector_slot(m.k) + (m.kind == ModeKind::S ? 1 : 0);
}

std::vector<ModeIndex> TruncationSet::lattice() const {
  std::vector<ModeIndex> out;
  out.reserve(lattice_size());
  for (int a = -n_; a <= n_; ++a)
    for (int b = -n_; b <= n_; ++b) out.push_back({a, b});
  return out;
}

// ---------------------------------------------------------------------------
// SpectralField

SpectralField::SpectralField(TruncationSet trunc)
    : trunc_(trunc), coeffs_(trunc.dimension(), 0.0) {}

SpectralField::SpectralField(TruncationSet trunc, std::vector<double> coeffs)
    : trunc_(trunc), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != trunc_.dimension()) {
    throw DimensionMismatch("SpectralField: expected " + std::to_string(trunc_.dimension()) +
                            " coefficients, got " + std::to_string(coeffs_.size()));
  }
}

SpectralField SpectralField::single(TruncationSet trunc, const BasisMode& mode, double value) {
  SpectralField f(trunc);
  if (!trunc.contains(mode.k)) {
    throw Error("SpectralField::single: " + to_string(mode) + " outside I_" +
                std::to_string(trunc.n()));
  }
  f.add(mode, value);
  return f;
}

double SpectralField::coeff(const BasisMode& mode) const {
  if (!trunc_.contains(mode.k)) return 0.0;
  const auto c = canonicalize(mode);
  return c.sign * coeffs_[trunc_.index(c.mode)];
}

void SpectralField::add(const BasisMode& mode, double value) {
  if (!trunc_.contains(mode.k)) return;
  const auto c = canonicalize(mode);
  coeffs_[trunc_.index(c.mode)] += c.sign * value;
}

int SpectralField::degree() const {
  int deg = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0.0) deg = std::max(deg, trunc_.wavevector(i / 2).max_abs());
  }
  return deg;
}

bool SpectralField::is_zero() const {
  for (double c : coeffs_)
    if (c != 0.0) return false;
  return true;
}

SpectralField SpectralField::retruncated(TruncationSet trunc) const {
  SpectralField out(trunc);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0.0) out.add(trunc_.mode(i), coeffs_[i]);
  }
  return out;
}

void SpectralField::require_same(const SpectralField& other) const {
  if (!(trunc_ == other.trunc_)) {
    throw DimensionMismatch("SpectralField: truncation mismatch (n=" + std::to_string(n()) +
                            " vs n=" + std::to_string(other.n()) + ")");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

void SpectralField::axpy(double a, const SpectralField& x) {
  require_same(x);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
}

// ---------------------------------------------------------------------------
// Grid transforms

GridField::GridField(int resolution)
    : m(resolution),
      u1(static_cast<std::size_t>(resolution) * resolution, 0.0),
      u2(static_cast<std::size_t>(resolution) * resolution, 0.0) {}

Vec2 GridField::node(int m, int a, int b) {
  return {2.0 * pi * a / m, 2.0 * pi * b / m};
}

namespace {

void check_resolution(int m, int n, const char* what) {
  if (m < 2 * n + 2) {
    throw ResolutionError(std::string(what) + ": grid resolution " + std::to_string(m) +
                          " < 2n+2 = " + std::to_string(2 * n + 2));
  }
}

}  // namespace

GridField synthesize(const SpectralField& f, int m) {
  check_resolution(m, f.n(), "synthesize");
  FourierGrid& grid = FourierGrid::local(m);
  GridField out(m);
  for (int comp = 0; comp < 2; ++comp) {
    load_field(grid, f, comp);
    grid.backward();
    auto r = grid.real();
    std::copy(r.begin(), r.end(), (comp == 0 ? out.u1 : out.u2).begin());
  }
  return out;
}

SpectralField analyze(const GridField& g, TruncationSet trunc) {
  const std::size_t pts = static_cast<std::size_t>(g.m) * g.m;
  if (g.u1.size() != pts || g.u2.size() != pts) {
    throw DimensionMismatch("analyze: grid arrays do not match resolution " + std::to_string(g.m));
  }
  check_resolution(g.m, trunc.n(), "analyze");
  FourierGrid& grid = FourierGrid::local(g.m);
  thread_local std::vector<std::complex<double>> first;
  auto r = grid.real();
  std::copy(g.u1.begin(), g.u1.end(), r.begin());
  grid.forward();
  first.assign(grid.spectrum(), grid.spectrum() + grid.spectrum_size());
  std::copy(g.u2.begin(), g.u2.end(), r.begin());
  grid.forward();
  SpectralField out(trunc);
  extract_field(first.data(), grid.spectrum(), g.m, out);
  return out;
}

SpectralField leray_project(const GridField& g, TruncationSet trunc) { return analyze(g, trunc); }

// ---------------------------------------------------------------------------
// FourierField

FourierField::FourierField(int n) : n_(n), data_((2 * n + 1) * (2 * n + 1)) {}

std::size_t FourierField::slot(ModeIndex k) const {
  if (k.max_abs() > n_) throw Error("FourierField: wavevector outside lattice");
  return static_cast<std::size_t>(k.k1 + n_) * (2 * n_ + 1) + (k.k2 + n_);
}

FourierField::Coeff& FourierField::at(ModeIndex k) { return data_[slot(k)]; }
const FourierField::Coeff& FourierField::at(ModeIndex k) const { return data_[slot(k)]; }

FourierField FourierField::from_grid(const GridField& g, int n) {
  check_resolution(g.m, n, "FourierField::from_grid");
  FourierGrid& grid = FourierGrid::local(g.m);
  FourierField out(n);
  for (int comp = 0; comp < 2; ++comp) {
    auto r = grid.real();
    const auto& src = comp == 0 ? g.u1 : g.u2;
    std::copy(src.begin(), src.end(), r.begin());
    grid.forward();
    for (int a = -n; a <= n; ++a) {
      for (int b = -n; b <= n; ++b) {
        const auto z = grid.get({a, b});
        auto& dst = comp == 0 ? out.at({a, b}).x : out.at({a, b}).y;
        dst = {z.real(), z.imag()};
      }
    }
  }
  return out;
}

GridField FourierField::to_grid(int m) const {
  check_resolution(m, n_, "FourierField::to_grid");
  FourierGrid& grid = FourierGrid::local(m);
  GridField out(m);
  for (int comp = 0; comp < 2; ++comp) {
    grid.clear_spectrum();
    for (int a = -n_; a <= n_; ++a) {
      for (int b = 0; b <= n_; ++b) {
        const ModeIndex k{a, b};
        if (b == 0 && a < 0) continue;
        const auto& c = comp == 0 ? at(k).x : at(k).y;
        grid.set(k, {c[0], c[1]});
      }
    }
    grid.backward();
    auto r = grid.real();
    std::copy(r.begin(), r.end(), (comp == 0 ? out.u1 : out.u2).begin());
  }
  return out;
}

FourierField leray_project(const FourierField& f) {
  FourierField out = f;
  const int n = f.n();
  for (int a = -n; a <= n; ++a) {
    for (int b = -n; b <= n; ++b) {
      const ModeIndex k{a, b};
      if (k.is_zero()) continue;
      auto& c = out.at(k);
      const double k2 = k.norm2();
      for (int part = 0; part < 2; ++part) {
        const double dot = (a * c.x[part] + b * c.y[part]) / k2;
        c.x[part] -= dot * a;
        c.y[part] -= dot * b;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derivatives and norms

std::array<SpectralField, 2> gradient(const SpectralField& f) {
  const auto& trunc = f.trunc();
  std::array<SpectralField, 2> out{SpectralField(trunc), SpectralField(trunc)};
  for (std::size_t w = 1; w < trunc.wavevector_count(); ++w) {
    const ModeIndex k = trunc.wavevector(w);
    const double a = f[2 * w];
    const double b = f[2 * w + 1];
    // d_l c_k = -k_l s_k, d_l s_k = k_l c_k
    for (int l = 0; l < 2; ++l) {
      const double kl = l == 0 ? k.k1 : k.k2;
      out[l][2 * w] = kl * b;
      out[l][2 * w + 1] = -kl * a;
    }
  }
  return out;
}

namespace {
template <bool H1>
double weighted_inner(const SpectralField& f, const SpectralField& g) {
  const SpectralField& small = f.n() <= g.n() ? f : g;
  const SpectralField& large = f.n() <= g.n() ? g : f;
  const auto& ts = small.trunc();
  const bool same = f.n() == g.n();
  double sum = 0.0;
  for (std::size_t w = 0; w < ts.wavevector_count(); ++w) {
    const ModeIndex k = ts.wavevector(w);
    double weight = mode_norm2(k);
    if constexpr (H1) weight *= k.norm2();
    if (weight == 0.0) continue;
    const std::size_t lw = same ? w : large.trunc().wavevector_slot(k);
    sum += weight * (small[2 * w] * large[2 * lw] + small[2 * w + 1] * large[2 * lw + 1]);
  }
  return sum;
}
}  // namespace

double inner_l2(const SpectralField& f, const SpectralField& g) { return weighted_inner<false>(f, g); }
double inner_h1(const SpectralField& f, const SpectralField& g) { return weighted_inner<true>(f, g); }
double l2_norm2(const SpectralField& f) { return inner_l2(f, f); }
double h1_norm2(const SpectralField& f) { return inner_h1(f, f); }
double l2_norm(const SpectralField& f) { return std::sqrt(l2_norm2(f)); }
double h1_norm(const SpectralField& f) { return std::sqrt(h1_norm2(f)); }

double divergence_max(const SpectralField& f, int m) {
  if (m == 0) m = 2 * f.n() + 2;
  const auto grad = gradient(f);
  const GridField d1 = synthesize(grad[0], m);
  const GridField d2 = synthesize(grad[1], m);
  double worst = 0.0;
  for (std::size_t i = 0; i < d1.u1.size(); ++i) {
    worst = std::max(worst, std::abs(d1.u1[i] + d2.u2[i]));
  }
  return worst;
}

int pow2_at_least(int lo) {
  int m = 1;
  while (m < lo) m *= 2;
  return m;
}

}  // namespace steuler
