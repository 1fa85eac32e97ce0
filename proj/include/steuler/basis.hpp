#pragma once

// Divergence-free Fourier basis on the torus [0, 2pi]^2.
//
// For k != (0,0) the basis fields are
//
//   c_k(theta) = (k2, -k1)/|k| cos(k.theta),   s_k(theta) = (k2, -k1)/|k| sin(k.theta),
//
// and the constant fields c_(0,0) = (1,0), s_(0,0) = (0,1). The fields are not
// unit-normalized: ||c_k||^2 = ||s_k||^2 = 2 pi^2 for k != 0 and 4 pi^2 for k = 0.
//
// Since c_{-k} = -c_k and s_{-k} = s_k, a field over the lattice {-n..n}^2 is
// stored on the canonical half-lattice (k1 > 0, or k1 = 0 and k2 > 0) plus the
// origin. Coefficient layout: index 2w is the C-mode and 2w+1 the S-mode of the
// w-th canonical wavevector, with w = 0 the origin.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "steuler/error.hpp"

namespace steuler {

using Vec2 = std::array<double, 2>;

struct ModeIndex {
  int k1 = 0;
  int k2 = 0;

  constexpr int norm2() const { return k1 * k1 + k2 * k2; }
  constexpr bool is_zero() const { return k1 == 0 && k2 == 0; }
  constexpr bool is_canonical() const {
    return k1 > 0 || (k1 == 0 && k2 >= 0);
  }
  constexpr ModeIndex operator-() const { return {-k1, -k2}; }
  constexpr int max_abs() const {
    const int a = k1 < 0 ? -k1 : k1;
    const int b = k2 < 0 ? -k2 : k2;
    return a > b ? a : b;
  }
  friend constexpr bool operator==(ModeIndex, ModeIndex) = default;
};

enum class ModeKind { C, S };

struct BasisMode {
  ModeKind kind = ModeKind::C;
  ModeIndex k;

  friend constexpr bool operator==(BasisMode, BasisMode) = default;
};

inline BasisMode C(int k1, int k2) { return {ModeKind::C, {k1, k2}}; }
inline BasisMode S(int k1, int k2) { return {ModeKind::S, {k1, k2}}; }

std::string to_string(const BasisMode& mode);

/// Squared L2 norm of a basis field: 2 pi^2, or 4 pi^2 for the constant modes.
double mode_norm2(ModeIndex k);

/// Value of a basis field at a point.
Vec2 eval_mode(const BasisMode& mode, const Vec2& theta);

/// Reduction of an arbitrary lattice mode to its canonical representative:
/// mode = sign * canonical.
struct CanonicalMode {
  BasisMode mode;
  double sign = 1.0;
};
CanonicalMode canonicalize(const BasisMode& mode);

/// The index set {-n..n}^2 and its canonical enumeration.
class TruncationSet {
 public:
  explicit TruncationSet(int n);

  int n() const { return n_; }
  /// Cardinality of the full lattice box, (2n+1)^2.
  std::size_t lattice_size() const;
  /// Number of canonical wavevectors including the origin.
  std::size_t wavevector_count() const;
  /// Number of real coefficients (two per canonical wavevector).
  std::size_t dimension() const { return 2 * wavevector_count(); }

  bool contains(ModeIndex k) const { return k.max_abs() <= n_; }
  ModeIndex wavevector(std::size_t w) const;
  std::size_t wavevector_slot(ModeIndex canonical_k) const;
  BasisMode mode(std::size_t index) const;
  /// Coefficient index of a canonical mode; throws if not in the set.
  std::size_t index(const BasisMode& canonical_mode) const;

  /// Full lattice {-n..n}^2 in row order.
  std::vector<ModeIndex> lattice() const;

  friend bool operator==(const TruncationSet&, const TruncationSet&) = default;

 private:
  int n_;
};

/// Real coefficients of a divergence-free field in the c_k/s_k basis.
class SpectralField {
 public:
  explicit SpectralField(TruncationSet trunc);
  SpectralField(TruncationSet trunc, std::vector<double> coeffs);

  static SpectralField single(TruncationSet trunc, const BasisMode& mode,
                              double value = 1.0);

  const TruncationSet& trunc() const { return trunc_; }
  int n() const { return trunc_.n(); }
  std::size_t size() const { return coeffs_.size(); }

  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  /// Coefficient of an arbitrary lattice mode (sign-folded); zero if outside.
  double coeff(const BasisMode& mode) const;
  /// Adds value * mode, folding non-canonical modes. Ignored if outside.
  void add(const BasisMode& mode, double value);

  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  /// Highest |k_i| carrying a nonzero coefficient (0 for the zero field).
  int degree() const;
  bool is_zero() const;

  /// Re-expresses the field on another truncation (zero-pads or truncates).
  SpectralField retruncated(TruncationSet trunc) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  void axpy(double a, const SpectralField& x);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  void require_same(const SpectralField& other) const;

  TruncationSet trunc_;
  std::vector<double> coeffs_;
};

/// Samples of a real vector field on the uniform M x M grid
/// theta_ab = (2 pi a / M, 2 pi b / M), stored row-major in a.
struct GridField {
  int m = 0;
  std::vector<double> u1;
  std::vector<double> u2;

  GridField() = default;
  explicit GridField(int resolution);

  Vec2 at(int a, int b) const {
    const std::size_t i = static_cast<std::size_t>(a) * m + b;
    return {u1[i], u2[i]};
  }
  static Vec2 node(int m, int a, int b);
};

/// Grid values of a spectral field; requires m >= 2n + 2.
GridField synthesize(const SpectralField& f, int m);

/// Projection of grid samples onto the basis of `trunc`. The gradient part of
/// the sampled field is discarded mode by mode, so this is the Leray projection
/// followed by truncation. Requires an alias-free grid (m >= 2n + 2, and the
/// sampled field of degree below m - n).
SpectralField analyze(const GridField& g, TruncationSet trunc);

/// Same operation as `analyze`, named for call sites that project arbitrary
/// (not divergence-free) grid data.
SpectralField leray_project(const GridField& g, TruncationSet trunc);

/// Complex Fourier coefficients of a real vector field on the full lattice
/// {-n..n}^2, u(theta) = sum_k uhat(k) exp(i k.theta).
class FourierField {
 public:
  using Complex = std::array<double, 2>;  // re, im
  struct Coeff {
    Complex x{};
    Complex y{};
  };

  explicit FourierField(int n);

  int n() const { return n_; }
  Coeff& at(ModeIndex k);
  const Coeff& at(ModeIndex k) const;

  /// Fourier coefficients of a grid field (degree n, alias-free grid).
  static FourierField from_grid(const GridField& g, int n);
  GridField to_grid(int m) const;

 private:
  std::size_t slot(ModeIndex k) const;

  int n_;
  std::vector<Coeff> data_;
};

/// Removes the component of each coefficient parallel to k; k = 0 passes.
FourierField leray_project(const FourierField& f);

/// Spectral partial derivatives: result[l] = d_l f (l = 0, 1). Each is again a
/// divergence-free field on the same mode set.
std::array<SpectralField, 2> gradient(const SpectralField& f);

double inner_l2(const SpectralField& f, const SpectralField& g);
double inner_h1(const SpectralField& f, const SpectralField& g);
double l2_norm2(const SpectralField& f);
double h1_norm2(const SpectralField& f);
double l2_norm(const SpectralField& f);
double h1_norm(const SpectralField& f);
/// max |div f| on the collocation grid of resolution m (0 picks 2n + 2).
double divergence_max(const SpectralField& f, int m = 0);

/// Smallest power of two that is >= lo.
int pow2_at_least(int lo);

}  // namespace steuler
