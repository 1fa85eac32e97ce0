#pragma once

// Independent reference evaluation for tests: fields are evaluated pointwise in
// long double from their coefficients, derivatives are taken analytically, and
// projections use trapezoid quadrature on a grid fine enough to be exact for
// the trigonometric polynomials involved.

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "steuler/basis.hpp"

namespace steuler::oracle {

using real = long double;
constexpr real kPi = std::numbers::pi_v<long double>;

struct Point {
  real x;
  real y;
};

struct Jet {
  std::array<real, 2> v{};     // value
  std::array<real, 2> d1{};    // d/dtheta1
  std::array<real, 2> d2{};    // d/dtheta2
};

// Value and first derivatives of coefficient * basis field at a point.
inline void accumulate_mode(Jet& jet, int kind_s, int k1, int k2, real coeff, Point p) {
  if (coeff == 0) return;
  if (k1 == 0 && k2 == 0) {
    jet.v[kind_s] += coeff;
    return;
  }
  const real inv = 1.0L / std::sqrt(static_cast<real>(k1 * k1 + k2 * k2));
  const real px = k2 * inv;
  const real py = -k1 * inv;
  const real phase = k1 * p.x + k2 * p.y;
  const real c = std::cos(phase);
  const real s = std::sin(phase);
  const real t = kind_s ? s : c;
  const real dt = kind_s ? c : -s;  // derivative of the profile w.r.t. the phase
  jet.v[0] += coeff * px * t;
  jet.v[1] += coeff * py * t;
  jet.d1[0] += coeff * px * dt * k1;
  jet.d1[1] += coeff * py * dt * k1;
  jet.d2[0] += coeff * px * dt * k2;
  jet.d2[1] += coeff * py * dt * k2;
}

inline Jet evaluate(const SpectralField& f, Point p) {
  Jet jet;
  const auto& t = f.trunc();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    const BasisMode m = t.mode(i);
    accumulate_mode(jet, m.kind == ModeKind::S ? 1 : 0, m.k.k1, m.k.k2, f[i], p);
  }
  return jet;
}

// Trapezoid projection of a sampled vector field onto the basis of `out`.
// samples[a * q + b] holds the value at (2 pi a / q, 2 pi b / q).
inline SpectralField project(const std::vector<std::array<real, 2>>& samples, int q,
                             TruncationSet out) {
  SpectralField res(out);
  const real cell = 4.0L * kPi * kPi / (static_cast<real>(q) * q);
  for (std::size_t i = 0; i < res.size(); ++i) {
    const BasisMode m = out.mode(i);
    real acc = 0;
    for (int a = 0; a < q; ++a) {
      for (int b = 0; b < q; ++b) {
        const Point p{2 * kPi * a / q, 2 * kPi * b / q};
        Jet e;
        accumulate_mode(e, m.kind == ModeKind::S ? 1 : 0, m.k.k1, m.k.k2, 1.0L, p);
        const auto& s = samples[static_cast<std::size_t>(a) * q + b];
        acc += s[0] * e.v[0] + s[1] * e.v[1];
      }
    }
    const real norm2 = m.k.k1 == 0 && m.k.k2 == 0 ? 4 * kPi * kPi : 2 * kPi * kPi;
    res[i] = static_cast<double>(acc * cell / norm2);
  }
  return res;
}

// Projection of (a . grad) f onto `out`, by quadrature.
inline SpectralField advect(const SpectralField& a, const SpectralField& f, TruncationSet out) {
  const int q = a.n() + f.n() + out.n() + 2;
  std::vector<std::array<real, 2>> samples(static_cast<std::size_t>(q) * q);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const Point p{2 * kPi * i / q, 2 * kPi * j / q};
      const Jet ja = evaluate(a, p);
      const Jet jf = evaluate(f, p);
      auto& s = samples[static_cast<std::size_t>(i) * q + j];
      for (int c = 0; c < 2; ++c) s[c] = ja.v[0] * jf.d1[c] + ja.v[1] * jf.d2[c];
    }
  }
  return project(samples, q, out);
}

// L2 inner product by quadrature.
inline real inner(const SpectralField& f, const SpectralField& g) {
  const int q = f.n() + g.n() + 2;
  real acc = 0;
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const Point p{2 * kPi * i / q, 2 * kPi * j / q};
      const Jet a = evaluate(f, p);
      const Jet b = evaluate(g, p);
      acc += a.v[0] * b.v[0] + a.v[1] * b.v[1];
    }
  }
  return acc * 4 * kPi * kPi / (static_cast<real>(q) * q);
}

// Field with N(0,1) * |k|^{-decay} coefficients; constant modes included when asked.
inline SpectralField random_field(int n, std::mt19937& rng, double decay = 1.0,
                                  bool constants = false) {
  TruncationSet t(n);
  SpectralField f(t);
  std::normal_distribution<double> z;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const ModeIndex k = t.wavevector(i / 2);
    if (k.is_zero()) {
      if (constants) f[i] = z(rng);
      continue;
    }
    f[i] = z(rng) * std::pow(static_cast<double>(k.norm2()), -0.5 * decay);
  }
  return f;
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace steuler::oracle
