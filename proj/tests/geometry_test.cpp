#include "steuler/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracle.hpp"
#include "steuler/dynamics.hpp"

namespace steuler {
namespace {

using std::numbers::pi;

const double kR2 = std::sqrt(2.0);
const double kR10 = std::sqrt(10.0);

SpectralField two_mode(TruncationSet t, BasisMode a, double x, BasisMode b, double y) {
  SpectralField f(t);
  f.add(a, x);
  f.add(b, y);
  return f;
}

TEST(Geometry, BracketFrozenValues) {
  TruncationSet t(3);
  const auto c10 = SpectralField::single(t, C(1, 0));
  const auto c01 = SpectralField::single(t, C(0, 1));

  SpectralField expect(t);
  expect.add(S(1, -1), kR2 / 2);
  expect.add(S(1, 1), kR2 / 2);
  EXPECT_LE(oracle::max_abs_diff(lie_bracket(c10, c01), expect), 1e-14);

  SpectralField expect2(t);
  expect2.add(C(0, 1), -kR2 / 4);
  expect2.add(C(2, 1), -kR10 / 4);
  EXPECT_LE(oracle::max_abs_diff(lie_bracket(c10, SpectralField::single(t, S(1, 1))), expect2),
            1e-14);

  // The constant field e1 acts as d_1.
  const auto b = lie_bracket(SpectralField::single(t, C(0, 0)), SpectralField::single(t, C(1, 2)));
  EXPECT_LE(oracle::max_abs_diff(b, SpectralField::single(t, S(1, 2), -1.0)), 1e-14);

  // c_k and s_k commute.
  EXPECT_LE(oracle::max_abs_diff(lie_bracket(c10, SpectralField::single(t, S(1, 0))),
                                 SpectralField(t)),
            1e-14);
}

TEST(Geometry, BracketMatchesQuadrature) {
  std::mt19937 rng(5);
  TruncationSet out(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = oracle::random_field(2, rng);
    const auto y = oracle::random_field(2, rng);
    auto expect = oracle::advect(x, y, out);
    expect -= oracle::advect(y, x, out);
    const auto got = lie_bracket(x, y, out);
    EXPECT_LE(oracle::max_abs_diff(got, expect), 1e-12);
    EXPECT_LE(divergence_max(got), 1e-12);
    EXPECT_LE(oracle::max_abs_diff(lie_bracket(x, x), SpectralField(x.trunc())), 1e-14);
  }
}

TEST(Geometry, StructureConstantsFrozen) {
  TruncationSet t(3);
  const auto tables = build_structure_tables(t);
  const std::size_t c10 = t.index(C(1, 0));
  const std::size_t c01 = t.index(C(0, 1));
  const std::size_t s11 = t.index(S(1, 1));
  EXPECT_NEAR(tables.c(c10, c01, s11), 1.0 / (2 * pi), 1e-15);
  EXPECT_NEAR(tables.c(c01, c10, s11), -1.0 / (2 * pi), 1e-15);
  // Orthonormal rescaling of -(sqrt 10 / 4) c_(2,1).
  EXPECT_NEAR(tables.c(c10, s11, t.index(C(2, 1))), -kR10 / 4 / (pi * kR2), 1e-15);
  // Constant direction: ||e_0|| = 2 pi.
  EXPECT_NEAR(tables.c(t.index(C(0, 0)), t.index(C(1, 2)), t.index(S(1, 2))), -1.0 / (2 * pi),
              1e-15);
}

TEST(Geometry, StructureConstantsMatchQuadrature) {
  TruncationSet t(2);
  const auto tables = build_structure_tables(t);
  for (std::size_t k = 0; k < 8; ++k) {
    for (std::size_t l = 0; l < 8; ++l) {
      const auto ek = SpectralField::single(t, t.mode(k));
      const auto el = SpectralField::single(t, t.mode(l));
      auto b = oracle::advect(ek, el, t);
      b -= oracle::advect(el, ek, t);
      for (std::size_t m = 0; m < t.dimension(); ++m) {
        const double expect = b[m] * mode_norm2(t.mode(m).k) /
                              (orthonormal_scale(t, k) * orthonormal_scale(t, l) *
                               orthonormal_scale(t, m));
        EXPECT_NEAR(tables.c(k, l, m), expect, 1e-12) << k << " " << l << " " << m;
      }
    }
  }
}

TEST(Geometry, AntisymmetryAndChristoffelFormula) {
  TruncationSet t(3);
  const auto tables = build_structure_tables(t);
  const std::size_t dim = t.dimension();
  for (std::size_t k = 0; k < dim; ++k) {
    EXPECT_TRUE(tables.c_row(k, k).empty());
    for (std::size_t l = 0; l < dim; ++l) {
      EXPECT_EQ(tables.incomplete(k, l), tables.incomplete(l, k));
      for (std::size_t m = 0; m < dim; ++m) {
        ASSERT_EQ(tables.c(k, l, m), -tables.c(l, k, m));
        const double g = 0.5 * (tables.c(k, l, m) - tables.c(l, m, k) + tables.c(m, k, l));
        ASSERT_NEAR(tables.gamma(k, l, m), g, 1e-15);
      }
    }
  }
}

TEST(Geometry, IncompleteFlags) {
  TruncationSet t(2);
  const auto tables = build_structure_tables(t);
  // (2,0) and (0,2) only reach (2,+-2).
  EXPECT_FALSE(tables.incomplete(t.index(C(2, 0)), t.index(C(0, 2))));
  EXPECT_TRUE(tables.incomplete(t.index(C(2, 0)), t.index(C(1, 1))));
  EXPECT_FALSE(tables.incomplete(t.index(C(0, 0)), t.index(S(2, 2))));
  // Parallel wavevectors commute whatever their size.
  EXPECT_FALSE(tables.incomplete(t.index(C(2, 2)), t.index(S(1, 1))));
  EXPECT_GT(tables.incomplete_count(), 0u);
}

TEST(Geometry, JacobiOnResolvedTriples) {
  TruncationSet t(6);
  const auto tables = build_structure_tables(t);
  std::vector<std::size_t> inner;
  for (std::size_t i = 0; i < t.dimension(); ++i)
    if (t.mode(i).k.max_abs() <= 2) inner.push_back(i);
  ASSERT_EQ(inner.size(), TruncationSet(2).dimension());
  double worst = 0.0;
  for (std::size_t a = 0; a < inner.size(); ++a)
    for (std::size_t b = a + 1; b < inner.size(); ++b)
      for (std::size_t c = b + 1; c < inner.size(); ++c)
        worst = std::max(worst, jacobi_residual(tables, inner[a], inner[b], inner[c]));
  EXPECT_LE(worst, 1e-10);
}

TEST(Geometry, DriftOfSingleModeVanishes) {
  TruncationSet t(4);
  const auto tables = build_structure_tables(t);
  for (const auto m : {C(1, 0), S(2, -1), C(0, 0), S(1, 1)}) {
    const auto d = geodesic_drift(SpectralField::single(t, m, 1.3), tables);
    EXPECT_LE(oracle::max_abs_diff(d, SpectralField(t)), 1e-14);
  }
}

TEST(Geometry, DriftMatchesNonlinearity) {
  TruncationSet t(4);
  const auto tables = build_structure_tables(t);
  const AdvectionTensor tensor(t);
  const std::pair<BasisMode, BasisMode> pairs[] = {
      {C(1, 0), C(1, 1)}, {C(1, 0), S(0, 2)}, {S(1, -1), C(2, 1)}, {C(0, 0), S(1, 2)},
      {C(2, 0), C(0, 2)}};
  for (const auto& [a, b] : pairs) {
    const auto u = two_mode(t, a, 0.8, b, -1.1);
    const auto d = geodesic_drift(u, tables);
    auto neg = nonlinear_direct(u, tensor);
    neg *= -1.0;
    EXPECT_LE(oracle::max_abs_diff(d, neg), 1e-10) << to_string(a) << " " << to_string(b);
    auto ps = nonlinear_pseudospectral(u);
    ps *= -1.0;
    EXPECT_LE(oracle::max_abs_diff(d, ps), 1e-10);
    auto d2 = geodesic_drift(2.0 * u, tables);
    EXPECT_LE(oracle::max_abs_diff(d2, 4.0 * d), 1e-12);
  }
}

TEST(Geometry, DriftRejectsUnresolvedSupport) {
  TruncationSet t(2);
  const auto tables = build_structure_tables(t);
  const auto u = two_mode(t, C(2, 0), 1.0, C(1, 1), 1.0);
  EXPECT_THROW(geodesic_drift(u, tables), PreconditionError);
  EXPECT_THROW(geodesic_drift(SpectralField(TruncationSet(3)), tables), DimensionMismatch);
}

TEST(Geometry, NoiseContractionIsMinusDerivative) {
  TruncationSet t(4);
  const auto tables = build_structure_tables(t);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = oracle::random_field(4, rng);
    for (std::size_t l : {0u, 1u}) {
      const BasisMode dir = l == 0 ? C(0, 0) : S(0, 0);
      auto expect = transport_apply(u, dir);
      expect *= -1.0;
      EXPECT_LE(oracle::max_abs_diff(geodesic_noise(u, l, tables), expect), 1e-12);
    }
  }
  EXPECT_THROW(geodesic_noise(SpectralField(t), 2, tables), PreconditionError);
}

}  // namespace
}  // namespace steuler
