#include "steuler/basis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "oracle.hpp"

namespace steuler {
namespace {

using std::numbers::pi;

TEST(Basis, PointEvaluation) {
  const Vec2 c00 = eval_mode(C(0, 0), {1.0, 2.0});
  EXPECT_EQ(c00[0], 1.0);
  EXPECT_EQ(c00[1], 0.0);

  const Vec2 s10 = eval_mode(S(1, 0), {0.0, 0.0});
  EXPECT_EQ(s10[0], 0.0);
  EXPECT_EQ(s10[1], 0.0);

  const Vec2 c11 = eval_mode(C(1, 1), {pi / 2, 0.0});
  EXPECT_NEAR(c11[0], 0.0, 1e-15);
  EXPECT_NEAR(c11[1], 0.0, 1e-15);

  // c_(1,0) = (0, -cos theta1)
  const Vec2 c10 = eval_mode(C(1, 0), {0.3, 1.7});
  EXPECT_NEAR(c10[0], 0.0, 1e-15);
  EXPECT_NEAR(c10[1], -std::cos(0.3), 1e-15);
}

TEST(Basis, FoldingSigns) {
  const Vec2 th{0.4, -1.1};
  for (const ModeIndex k : {ModeIndex{1, 0}, ModeIndex{2, -3}, ModeIndex{0, 1}}) {
    const Vec2 cp = eval_mode({ModeKind::C, k}, th);
    const Vec2 cm = eval_mode({ModeKind::C, -k}, th);
    const Vec2 sp = eval_mode({ModeKind::S, k}, th);
    const Vec2 sm = eval_mode({ModeKind::S, -k}, th);
    for (int c = 0; c < 2; ++c) {
      EXPECT_NEAR(cm[c], -cp[c], 1e-15);
      EXPECT_NEAR(sm[c], sp[c], 1e-15);
    }
    const auto cc = canonicalize({ModeKind::C, -k});
    EXPECT_EQ(cc.sign, -1.0);
    EXPECT_EQ(canonicalize({ModeKind::S, -k}).sign, 1.0);
  }
}

TEST(Basis, EnumerationIsABijection) {
  for (int n : {0, 1, 2, 5, 8}) {
    TruncationSet t(n);
    EXPECT_EQ(t.dimension(), static_cast<std::size_t>((2 * n + 1) * (2 * n + 1) + 1));
    std::set<std::pair<int, int>> seen;
    for (std::size_t w = 0; w < t.wavevector_count(); ++w) {
      const ModeIndex k = t.wavevector(w);
      EXPECT_TRUE(k.is_canonical());
      EXPECT_TRUE(t.contains(k));
      EXPECT_EQ(t.wavevector_slot(k), w);
      seen.insert({k.k1, k.k2});
    }
    EXPECT_EQ(seen.size(), t.wavevector_count());
    for (std::size_t i = 0; i < t.dimension(); ++i) EXPECT_EQ(t.index(t.mode(i)), i);
  }
  EXPECT_EQ(TruncationSet(8).dimension(), 290u);
}

TEST(Basis, NormsOfSimpleFields) {
  TruncationSet t(2);
  const auto c10 = SpectralField::single(t, C(1, 0));
  EXPECT_NEAR(l2_norm2(c10), 2 * pi * pi, 1e-12);
  EXPECT_NEAR(h1_norm2(c10), 2 * pi * pi, 1e-12);

  const auto c00 = SpectralField::single(t, C(0, 0), 3.0);
  EXPECT_NEAR(l2_norm2(c00), 36 * pi * pi, 1e-12);
  EXPECT_EQ(h1_norm2(c00), 0.0);
}

TEST(Basis, NormsMatchQuadrature) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = oracle::random_field(4, rng, 0.5, true);
    const auto g = oracle::random_field(4, rng, 0.5, true);
    EXPECT_NEAR(inner_l2(f, g), static_cast<double>(oracle::inner(f, g)), 1e-10);
    const auto grad = gradient(f);
    const double h1 = l2_norm2(grad[0]) + l2_norm2(grad[1]);
    EXPECT_NEAR(h1_norm2(f), h1, 1e-10 * h1);
  }
}

TEST(Basis, BasisIsOrthogonal) {
  TruncationSet t(2);
  for (std::size_t i = 0; i < t.dimension(); ++i) {
    for (std::size_t j = 0; j < t.dimension(); ++j) {
      const auto a = SpectralField::single(t, t.mode(i));
      const auto b = SpectralField::single(t, t.mode(j));
      const double expected = i == j ? mode_norm2(t.mode(i).k) : 0.0;
      EXPECT_NEAR(static_cast<double>(oracle::inner(a, b)), expected, 1e-12);
    }
  }
}

TEST(Basis, GridRoundTrip) {
  std::mt19937 rng(3);
  for (int n : {1, 4, 7}) {
    const auto f = oracle::random_field(n, rng, 0.0, true);
    for (int m : {2 * n + 2, pow2_at_least(2 * n + 2), 3 * n + 5}) {
      const auto back = analyze(synthesize(f, m), f.trunc());
      EXPECT_LE(oracle::max_abs_diff(f, back), 1e-12) << "n=" << n << " m=" << m;
    }
  }
}

TEST(Basis, SynthesisMatchesPointwise) {
  std::mt19937 rng(5);
  const auto f = oracle::random_field(3, rng, 0.0, true);
  const int m = 10;
  const auto g = synthesize(f, m);
  for (int a = 0; a < m; a += 3) {
    for (int b = 0; b < m; b += 2) {
      const Vec2 th = GridField::node(m, a, b);
      const auto jet = oracle::evaluate(f, {th[0], th[1]});
      EXPECT_NEAR(g.at(a, b)[0], static_cast<double>(jet.v[0]), 1e-12);
      EXPECT_NEAR(g.at(a, b)[1], static_cast<double>(jet.v[1]), 1e-12);
    }
  }
}

TEST(Basis, ResolutionAndShapeErrors) {
  TruncationSet t(4);
  SpectralField f(t);
  EXPECT_THROW(synthesize(f, 9), ResolutionError);
  GridField g(10);
  EXPECT_NO_THROW(analyze(g, t));
  g.u1.pop_back();
  EXPECT_THROW(analyze(g, t), DimensionMismatch);
  EXPECT_THROW(SpectralField(t, std::vector<double>(3)), DimensionMismatch);
  EXPECT_THROW(f += SpectralField(TruncationSet(3)), DimensionMismatch);
}

// Gradient fields on the grid: u = grad phi must be annihilated.
TEST(Basis, LerayRemovesGradients) {
  const int m = 16;
  GridField g(m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Vec2 th = GridField::node(m, a, b);
      // phi = sin(th1 + 2 th2) + cos(3 th1)
      const std::size_t i = static_cast<std::size_t>(a) * m + b;
      g.u1[i] = std::cos(th[0] + 2 * th[1]) - 3 * std::sin(3 * th[0]);
      g.u2[i] = 2 * std::cos(th[0] + 2 * th[1]);
    }
  }
  const auto p = leray_project(g, TruncationSet(4));
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], 0.0, 1e-13);
}

TEST(Basis, LerayIdempotentAndSelfAdjoint) {
  std::mt19937 rng(9);
  std::normal_distribution<double> z;
  const int n = 4;
  const int m = 12;
  auto random_grid = [&] {
    FourierField f(n);
    // Random real field of degree n: fill half the lattice, mirror the rest.
    for (int a = -n; a <= n; ++a) {
      for (int b = -n; b <= n; ++b) {
        const ModeIndex k{a, b};
        if (!k.is_canonical()) continue;
        auto& c = f.at(k);
        c.x = {z(rng), k.is_zero() ? 0.0 : z(rng)};
        c.y = {z(rng), k.is_zero() ? 0.0 : z(rng)};
        auto& d = f.at(-k);
        d.x = {c.x[0], -c.x[1]};
        d.y = {c.y[0], -c.y[1]};
      }
    }
    return f;
  };
  const FourierField u = random_grid();
  const FourierField v = random_grid();
  const FourierField pu = leray_project(u);
  const FourierField ppu = leray_project(pu);
  const FourierField pv = leray_project(v);
  double ip1 = 0.0;
  double ip2 = 0.0;
  for (int a = -n; a <= n; ++a) {
    for (int b = -n; b <= n; ++b) {
      const ModeIndex k{a, b};
      for (int part = 0; part < 2; ++part) {
        EXPECT_NEAR(ppu.at(k).x[part], pu.at(k).x[part], 1e-14);
        EXPECT_NEAR(ppu.at(k).y[part], pu.at(k).y[part], 1e-14);
      }
      // Re <Pu, v> and Re <u, Pv> over the lattice
      ip1 += pu.at(k).x[0] * v.at(k).x[0] + pu.at(k).x[1] * v.at(k).x[1] +
             pu.at(k).y[0] * v.at(k).y[0] + pu.at(k).y[1] * v.at(k).y[1];
      ip2 += u.at(k).x[0] * pv.at(k).x[0] + u.at(k).x[1] * pv.at(k).x[1] +
             u.at(k).y[0] * pv.at(k).y[0] + u.at(k).y[1] * pv.at(k).y[1];
    }
  }
  EXPECT_NEAR(ip1, ip2, 1e-12);

  // The grid path agrees with the coefficient path.
  const auto from_grid = leray_project(u.to_grid(m), TruncationSet(n));
  const auto via_fourier = analyze(pu.to_grid(m), TruncationSet(n));
  EXPECT_LE(oracle::max_abs_diff(from_grid, via_fourier), 1e-12);
  EXPECT_LE(divergence_max(from_grid), 1e-12);
}

TEST(Basis, DerivativeOfSingleMode) {
  TruncationSet t(2);
  const auto grad = gradient(SpectralField::single(t, C(1, 0)));
  EXPECT_EQ(grad[0].coeff(S(1, 0)), -1.0);
  EXPECT_TRUE(grad[1].is_zero());
}

TEST(Basis, ParsevalOnGrid) {
  std::mt19937 rng(21);
  const auto f = oracle::random_field(5, rng, 0.0, true);
  const int m = 16;
  const auto g = synthesize(f, m);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.u1.size(); ++i) acc += g.u1[i] * g.u1[i] + g.u2[i] * g.u2[i];
  acc *= 4 * pi * pi / (m * m);
  EXPECT_NEAR(acc, l2_norm2(f), 1e-11 * acc);
}

TEST(Basis, RetruncationAndFolding) {
  SpectralField f(TruncationSet(3));
  f.add(C(-1, 2), 2.0);
  EXPECT_EQ(f.coeff(C(1, -2)), -2.0);
  EXPECT_EQ(f.coeff(C(-1, 2)), 2.0);
  f.add(S(3, 3), 1.0);
  EXPECT_EQ(f.degree(), 3);
  const auto g = f.retruncated(TruncationSet(2));
  EXPECT_EQ(g.degree(), 2);
  EXPECT_EQ(g.coeff(C(-1, 2)), 2.0);
  const auto h = g.retruncated(TruncationSet(5));
  EXPECT_EQ(h.coeff(C(-1, 2)), 2.0);
  EXPECT_EQ(f.coeff(C(7, 0)), 0.0);
}

}  // namespace
}  // namespace steuler
