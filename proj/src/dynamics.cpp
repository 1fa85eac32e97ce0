#include "steuler/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "steuler/fourier_grid.hpp"

namespace steuler {

using std::numbers::pi;

SpectralField stokes_apply(const SpectralField& f) {
  SpectralField out = f;
  const auto& trunc = f.trunc();
  for (std::size_t w = 0; w < trunc.wavevector_count(); ++w) {
    const double lam = trunc.wavevector(w).norm2();
    out[2 * w] *= lam;
    out[2 * w + 1] *= lam;
  }
  return out;
}

namespace {

struct Factor {
  ModeKind kind;  // C -> cos, S -> sin
  double sign;
  ModeIndex k;
};

// Polarization vector (k2, -k1)/|k|, or the constant direction for k = 0.
Vec2 polarization(const BasisMode& m) {
  if (m.k.is_zero()) return m.kind == ModeKind::C ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  const double inv = 1.0 / std::sqrt(static_cast<double>(m.k.norm2()));
  return {m.k.k2 * inv, -m.k.k1 * inv};
}

// Scalar profile of a basis field: cos(k.theta) or sin(k.theta); constants are cos(0).
Factor profile(const BasisMode& m) {
  if (m.k.is_zero()) return {ModeKind::C, 1.0, {0, 0}};
  return {m.kind, 1.0, m.k};
}

// d/dx cos = -sin, d/dx sin = cos
Factor derivative(const Factor& f) {
  if (f.kind == ModeKind::C) return {ModeKind::S, -f.sign, f.k};
  return {ModeKind::C, f.sign, f.k};
}

// e^{+-ix} weights: cos -> 1/2, 1/2; sin -> -i/2, +i/2.
std::complex<double> weight(ModeKind kind, int s) {
  if (kind == ModeKind::C) return {0.5, 0.0};
  return s > 0 ? std::complex<double>{0.0, -0.5} : std::complex<double>{0.0, 0.5};
}

// int over the torus of the product of three profiles.
double triple_integral(const Factor& a, const Factor& b, const Factor& c) {
  std::complex<double> sum{};
  for (int sa : {1, -1}) {
    for (int sb : {1, -1}) {
      for (int sc : {1, -1}) {
        const int q1 = sa * a.k.k1 + sb * b.k.k1 + sc * c.k.k1;
        const int q2 = sa * a.k.k2 + sb * b.k.k2 + sc * c.k.k2;
        if (q1 != 0 || q2 != 0) continue;
        sum += weight(a.kind, sa) * weight(b.kind, sb) * weight(c.kind, sc);
      }
    }
  }
  return 4.0 * pi * pi * a.sign * b.sign * c.sign * sum.real();
}

}  // namespace

double advection_integral(const BasisMode& a, const BasisMode& b, const BasisMode& c) {
  if (b.k.is_zero()) return 0.0;
  const Vec2 pa = polarization(a);
  const Vec2 pb = polarization(b);
  const Vec2 pc = polarization(c);
  const double directional = pa[0] * b.k.k1 + pa[1] * b.k.k2;
  const double align = pb[0] * pc[0] + pb[1] * pc[1];
  if (directional == 0.0 || align == 0.0) return 0.0;
  return directional * align * triple_integral(profile(a), derivative(profile(b)), profile(c));
}

// ---------------------------------------------------------------------------
// AdvectionTensor

AdvectionTensor::AdvectionTensor(TruncationSet trunc)
    : trunc_(trunc), dim_(trunc.dimension()), offsets_(dim_ * dim_ + 1, 0) {
  const double drop = 1e-13 * 4.0 * pi * pi;
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < dim_; ++i) {
    const BasisMode mi = trunc_.mode(i);
    for (std::size_t k = 0; k < dim_; ++k) {
      const BasisMode mk = trunc_.mode(k);
      targets.clear();
      if (!mk.k.is_zero()) {
        for (int s : {1, -1}) {
          for (int t : {1, -1}) {
            ModeIndex q{s * mi.k.k1 + t * mk.k.k1, s * mi.k.k2 + t * mk.k.k2};
            if (!trunc_.contains(q)) continue;
            if (!q.is_canonical()) q = -q;
            const std::size_t w = trunc_.wavevector_slot(q);
            targets.push_back(2 * w);
            targets.push_back(2 * w + 1);
          }
        }
      }
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      for (std::size_t j : targets) {
        // Evaluate one orientation of each (k, j) pair so that b_ikj = -b_ijk
        // holds exactly; the diagonal vanishes.
        if (j == k) continue;
        const double v = k < j ? advection_integral(mi, mk, trunc_.mode(j))
                               : -advection_integral(mi, trunc_.mode(j), mk);
        if (std::abs(v) > drop) entries_.push_back({static_cast<std::uint32_t>(j), v});
      }
      offsets_[i * dim_ + k + 1] = entries_.size();
    }
  }
}

std::span<const AdvectionTensor::Entry> AdvectionTensor::row(std::size_t i, std::size_t k) const {
  const std::size_t r = i * dim_ + k;
  return {entries_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
}

double AdvectionTensor::entry(std::size_t i, std::size_t k, std::size_t j) const {
  for (const auto& e : row(i, k))
    if (e.j == j) return e.value;
  return 0.0;
}

SpectralField nonlinear_direct(const SpectralField& f, const AdvectionTensor& tensor) {
  if (!(f.trunc() == tensor.trunc())) {
    throw DimensionMismatch("nonlinear_direct: tensor built for n=" +
                            std::to_string(tensor.trunc().n()) + ", field has n=" +
                            std::to_string(f.n()));
  }
  SpectralField out(f.trunc());
  const std::size_t dim = f.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (f[i] == 0.0) continue;
    for (std::size_t k = 0; k < dim; ++k) {
      if (f[k] == 0.0) continue;
      const double fik = f[i] * f[k];
      for (const auto& e : tensor.row(i, k)) out[e.j] += e.value * fik;
    }
  }
  const auto& trunc = f.trunc();
  for (std::size_t j = 0; j < dim; ++j) out[j] /= mode_norm2(trunc.wavevector(j / 2));
  return out;
}

// ---------------------------------------------------------------------------
// Grid path

SpectralField advect(const SpectralField& a, const SpectralField& f, TruncationSet out) {
  const int lo = std::max(a.n() + f.n() + out.n() + 1,
                          2 * std::max({a.n(), f.n(), out.n()}) + 2);
  const int m = pow2_at_least(lo);
  FourierGrid& grid = FourierGrid::local(m);
  const std::size_t pts = grid.points();
  thread_local std::vector<double> a1, a2, d11, d12, d21;
  thread_local std::vector<std::complex<double>> first;
  auto to_grid = [&](const SpectralField& g, int comp, int deriv, std::vector<double>& dst) {
    load_field(grid, g, comp, deriv);
    grid.backward();
    auto r = grid.real();
    dst.assign(r.begin(), r.end());
  };
  to_grid(a, 0, -1, a1);
  to_grid(a, 1, -1, a2);
  to_grid(f, 0, 0, d11);
  to_grid(f, 1, 0, d12);
  to_grid(f, 0, 1, d21);
  // d_2 f_2 = -d_1 f_1 for divergence-free f
  auto r = grid.real();
  for (std::size_t p = 0; p < pts; ++p) r[p] = a1[p] * d11[p] + a2[p] * d21[p];
  grid.forward();
  first.assign(grid.spectrum(), grid.spectrum() + grid.spectrum_size());
  for (std::size_t p = 0; p < pts; ++p) r[p] = a1[p] * d12[p] - a2[p] * d11[p];
  grid.forward();
  SpectralField res(out);
  extract_field(first.data(), grid.spectrum(), m, res);
  return res;
}

SpectralField nonlinear_pseudospectral(const SpectralField& f) { return advect(f, f, f.trunc()); }

SpectralField transport_apply(const SpectralField& f, const BasisMode& advector) {
  SpectralField a(TruncationSet(advector.k.max_abs()));
  a.add(advector, 1.0);
  return advect(a, f, f.trunc());
}

SpectralField strat_drift(const SpectralField& f) {
  SpectralField out = nonlinear_pseudospectral(f);
  out *= -1.0;
  return out;
}

SpectralField ito_drift(const SpectralField& f) {
  SpectralField out = strat_drift(f);
  out.axpy(-kViscosity, stokes_apply(f));
  return out;
}

}  // namespace steuler
