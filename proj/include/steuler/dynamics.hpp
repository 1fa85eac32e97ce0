#pragma once

// Galerkin operators: Stokes term, the projected nonlinearity B(u) = P(u . grad)u
// and transport by a given advecting field.

#include <cstdint>
#include <span>
#include <vector>

#include "steuler/basis.hpp"

namespace steuler {

/// Coefficient of the Laplacian in the Ito drift (the Stratonovich correction).
constexpr double kViscosity = 0.5;

/// Multiplies every coefficient by |k|^2.
SpectralField stokes_apply(const SpectralField& f);

/// <(a . grad) b, c>_0 for arbitrary lattice basis fields, in closed form.
double advection_integral(const BasisMode& a, const BasisMode& b, const BasisMode& c);

/// Sparse b_{ikj} = <(e_i . grad) e_k, e_j>_0 over the coefficient enumeration of
/// a truncation set, grouped by the pair (i, k).
class AdvectionTensor {
 public:
  struct Entry {
    std::uint32_t j;
    double value;
  };

  explicit AdvectionTensor(TruncationSet trunc);

  const TruncationSet& trunc() const { return trunc_; }
  std::size_t dimension() const { return dim_; }
  std::span<const Entry> row(std::size_t i, std::size_t k) const;
  double entry(std::size_t i, std::size_t k, std::size_t j) const;
  std::size_t nonzeros() const { return entries_.size(); }

 private:
  TruncationSet trunc_;
  std::size_t dim_;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

/// B(f) from the tensor: coefficient_j = sum_{ik} b_ikj f_i f_k / ||e_j||^2.
SpectralField nonlinear_direct(const SpectralField& f, const AdvectionTensor& tensor);

/// B(f) on a dealiased collocation grid.
SpectralField nonlinear_pseudospectral(const SpectralField& f);

/// Projection onto `out` of (a . grad) f, computed on an alias-free grid.
SpectralField advect(const SpectralField& a, const SpectralField& f, TruncationSet out);

/// (a . grad) f projected back onto f's truncation, for a single advecting
/// basis field (C(0,0) = e1 and S(0,0) = e2 give d_1 f and d_2 f).
SpectralField transport_apply(const SpectralField& f, const BasisMode& advector);

/// -B(f)
SpectralField strat_drift(const SpectralField& f);
/// -(1/2) A f - B(f)
SpectralField ito_drift(const SpectralField& f);

}  // namespace steuler
