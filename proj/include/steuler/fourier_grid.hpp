#pragma once

// Thin FFTW wrapper for real 2D transforms on an M x M periodic grid.
//
// The spectrum is the half-complex layout of fftw_plan_dft_r2c_2d: index
// (a, b) with a in [0, M) holding k1 = a (or a - M) and b in [0, M/2] holding
// k2 = b. Coefficients are normalized so that u(theta) = sum_k uhat(k) e^{i k.theta}.

#include <complex>
#include <span>
#include <vector>

#include "steuler/basis.hpp"

namespace steuler {

class FourierGrid {
 public:
  explicit FourierGrid(int m);
  ~FourierGrid();
  FourierGrid(const FourierGrid&) = delete;
  FourierGrid& operator=(const FourierGrid&) = delete;

  int m() const { return m_; }
  std::size_t points() const { return static_cast<std::size_t>(m_) * m_; }

  std::span<double> real() { return {real_, points()}; }
  std::complex<double>* spectrum() { return spectrum_; }
  std::size_t spectrum_size() const { return static_cast<std::size_t>(m_) * half_; }

  /// Clears the spectrum buffer.
  void clear_spectrum();
  /// Sets uhat(k); the Hermitian partner is filled where the half layout
  /// stores both (k2 = 0 column).
  void set(ModeIndex k, std::complex<double> value);
  /// uhat(k) for any |k_i| < M/2, after `forward`.
  std::complex<double> get(ModeIndex k) const;

  /// real -> spectrum, scaled by 1/M^2.
  void forward();
  /// spectrum -> real. The spectrum buffer is destroyed.
  void backward();

  /// Per-thread instance for resolution m.
  static FourierGrid& local(int m);

 private:
  std::size_t slot(int k1, int k2) const;

  int m_;
  int half_;
  double* real_ = nullptr;
  std::complex<double>* spectrum_ = nullptr;
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;
};

/// Where the canonical wavevectors of I_n live in the half-complex spectrum of
/// an m x m grid, with their polarization vectors.
struct ModeSlot {
  std::size_t pos;    // slot holding uhat(k) (or its conjugate when conj is set)
  std::size_t mirror; // second slot for k2 = 0 (holds conj uhat(k)); npos otherwise
  bool conj;          // slot stores uhat(-k) = conj uhat(k)
  double p1;
  double p2;
  double k1;
  double k2;
};

/// Per-thread cached table for (n, m), indexed by wavevector slot w >= 1
/// (entry 0 is the origin).
const std::vector<ModeSlot>& mode_slots(int n, int m);

/// Loads the spectrum of component `comp` (0 or 1) of f, or of its derivative
/// d_deriv f when deriv is 0 or 1. Requires grid.m() >= 2 f.n() + 2.
void load_field(FourierGrid& grid, const SpectralField& f, int comp, int deriv = -1);

/// Projects a vector field given by the spectra of its two components onto
/// the basis of out.trunc() (Leray projection plus truncation).
void extract_field(const std::complex<double>* spec1, const std::complex<double>* spec2, int m,
                   SpectralField& out);

}  // namespace steuler
