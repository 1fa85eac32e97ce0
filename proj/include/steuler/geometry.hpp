#pragma once

// Lie-group view of the Euler nonlinearity: brackets of basis fields, structure
// constants and Levi-Civita Christoffel symbols over the L2-orthonormal frame
// e_i / ||e_i||.
//
// Conventions. The bracket is [X, Y] = (X . grad)Y - (Y . grad)X and
//
//   c_{k,l}^m     = <[e_k, e_l], e_m> / (|e_k| |e_l| |e_m|),
//   Gamma_{k,l}^m = (c_{k,l}^m - c_{l,m}^k + c_{m,k}^l) / 2.
//
// With these, sum_{l,j} Gamma_{l,j}^m u^l u^j is the m-th orthonormal coordinate
// of B(u), so geodesic_drift returns -B(u) with no further sign change. For a
// constant direction l the contraction sum_j Gamma_{l,j}^m u^j equals the
// coordinate of (e_l/|e_l| . grad) u, so geodesic_noise gives -d_l u: the
// transport term of the Stratonovich equation with B replaced by -B, which has
// the same law.

#include <cstdint>
#include <span>
#include <vector>

#include "steuler/basis.hpp"

namespace steuler {

/// [X, Y] projected onto `out`.
SpectralField lie_bracket(const SpectralField& x, const SpectralField& y, TruncationSet out);
/// [X, Y] on the larger of the two truncations.
SpectralField lie_bracket(const SpectralField& x, const SpectralField& y);

/// ||e_i||, the factor between working and orthonormal coordinates.
double orthonormal_scale(const TruncationSet& trunc, std::size_t i);

class StructureTables {
 public:
  struct Entry {
    std::uint32_t m;
    double value;
  };

  const TruncationSet& trunc() const { return trunc_; }
  std::size_t dimension() const { return dim_; }

  std::span<const Entry> c_row(std::size_t k, std::size_t l) const;
  std::span<const Entry> gamma_row(std::size_t k, std::size_t l) const;
  double c(std::size_t k, std::size_t l, std::size_t m) const;
  double gamma(std::size_t k, std::size_t l, std::size_t m) const;

  /// [e_k, e_l] has content at wavevectors outside the truncation, so the
  /// row c_{k,l}^. is the projection of the bracket, not the bracket.
  bool incomplete(std::size_t k, std::size_t l) const { return incomplete_[k * dim_ + l] != 0; }
  std::size_t incomplete_count() const;

  std::size_t c_nonzeros() const { return c_entries_.size(); }
  std::size_t gamma_nonzeros() const { return gamma_entries_.size(); }

 private:
  friend StructureTables build_structure_tables(TruncationSet trunc);
  explicit StructureTables(TruncationSet trunc);

  TruncationSet trunc_;
  std::size_t dim_;
  std::vector<std::size_t> c_offsets_;
  std::vector<Entry> c_entries_;
  std::vector<std::size_t> gamma_offsets_;
  std::vector<Entry> gamma_entries_;
  std::vector<std::uint8_t> incomplete_;
};

StructureTables build_structure_tables(TruncationSet trunc);

/// Largest |coordinate| of [[a,b],c] + [[b,c],a] + [[c,a],b] computed from the
/// tables. Meaningful when all three inner brackets and the outer ones are resolved,
/// e.g. a, b, c inside I_{n/3}.
double jacobi_residual(const StructureTables& tables, std::size_t a, std::size_t b,
                       std::size_t c);

/// -sum_{l,j} Gamma_{l,j} u^l u^j in working coordinates. Throws
/// PreconditionError if a pair of modes in the support of u has an incomplete
/// bracket.
SpectralField geodesic_drift(const SpectralField& u, const StructureTables& tables);

/// -|e_l| sum_j Gamma_{l,j} u^j for a constant direction l (coefficient index
/// 0 or 1), in working coordinates.
SpectralField geodesic_noise(const SpectralField& u, std::size_t l, const StructureTables& tables);

}  // namespace steuler
