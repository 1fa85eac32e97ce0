#include "steuler/fourier_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace steuler {

namespace {
// The FFTW planner is not re-entrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

FourierGrid::FourierGrid(int m) : m_(m), half_(m / 2 + 1) {
  if (m < 2) throw ResolutionError("FourierGrid: resolution must be >= 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(points());
  spectrum_ = reinterpret_cast<std::complex<double>*>(
      fftw_alloc_complex(static_cast<std::size_t>(m_) * half_));
  auto* spectrum = reinterpret_cast<fftw_complex*>(spectrum_);
  plan_forward_ = fftw_plan_dft_r2c_2d(m_, m_, real_, spectrum, FFTW_ESTIMATE);
  plan_backward_ = fftw_plan_dft_c2r_2d(m_, m_, spectrum, real_, FFTW_ESTIMATE);
}

FourierGrid::~FourierGrid() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  fftw_free(real_);
  fftw_free(spectrum_);
}

std::size_t FourierGrid::slot(int k1, int k2) const {
  const int a = ((k1 % m_) + m_) % m_;
  return static_cast<std::size_t>(a) * half_ + k2;
}

void FourierGrid::clear_spectrum() {
  std::fill_n(spectrum_, static_cast<std::size_t>(m_) * half_, std::complex<double>{});
}

void FourierGrid::set(ModeIndex k, std::complex<double> value) {
  if (k.k2 > 0) {
    spectrum_[slot(k.k1, k.k2)] = value;
  } else if (k.k2 < 0) {
    spectrum_[slot(-k.k1, -k.k2)] = std::conj(value);
  } else {
    spectrum_[slot(k.k1, 0)] = value;
    spectrum_[slot(-k.k1, 0)] = std::conj(value);
  }
}

std::complex<double> FourierGrid::get(ModeIndex k) const {
  if (k.k2 >= 0) return spectrum_[slot(k.k1, k.k2)];
  return std::conj(spectrum_[slot(-k.k1, -k.k2)]);
}

void FourierGrid::forward() {
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  const double scale = 1.0 / static_cast<double>(points());
  const std::size_t count = static_cast<std::size_t>(m_) * half_;
  for (std::size_t i = 0; i < count; ++i) spectrum_[i] *= scale;
}

void FourierGrid::backward() { fftw_execute(static_cast<fftw_plan>(plan_backward_)); }

FourierGrid& FourierGrid::local(int m) {
  thread_local std::map<int, std::unique_ptr<FourierGrid>> cache;
  auto& entry = cache[m];
  if (!entry) entry = std::make_unique<FourierGrid>(m);
  return *entry;
}

const std::vector<ModeSlot>& mode_slots(int n, int m) {
  thread_local std::map<std::pair<int, int>, std::vector<ModeSlot>> cache;
  auto& table = cache[{n, m}];
  if (!table.empty()) return table;
  const TruncationSet t(n);
  const int half = m / 2 + 1;
  auto slot = [&](int k1, int k2) {
    const int a = ((k1 % m) + m) % m;
    return static_cast<std::size_t>(a) * half + k2;
  };
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  table.resize(t.wavevector_count());
  table[0] = {slot(0, 0), none, false, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t w = 1; w < t.wavevector_count(); ++w) {
    const ModeIndex k = t.wavevector(w);
    const double inv = 1.0 / std::sqrt(static_cast<double>(k.norm2()));
    ModeSlot e{0, none, false, k.k2 * inv, -k.k1 * inv, static_cast<double>(k.k1),
               static_cast<double>(k.k2)};
    if (k.k2 > 0) {
      e.pos = slot(k.k1, k.k2);
    } else if (k.k2 < 0) {
      e.pos = slot(-k.k1, -k.k2);
      e.conj = true;
    } else {
      e.pos = slot(k.k1, 0);
      e.mirror = slot(-k.k1, 0);
    }
    table[w] = e;
  }
  return table;
}

void load_field(FourierGrid& grid, const SpectralField& f, int comp, int deriv) {
  const auto& table = mode_slots(f.n(), grid.m());
  grid.clear_spectrum();
  std::complex<double>* spectrum = grid.spectrum();
  if (deriv < 0) spectrum[table[0].pos] = f[comp];
  for (std::size_t w = 1; w < table.size(); ++w) {
    const double a = f[2 * w];
    const double b = f[2 * w + 1];
    if (a == 0.0 && b == 0.0) continue;
    const ModeSlot& e = table[w];
    const double hp = 0.5 * (comp == 0 ? e.p1 : e.p2);
    // a p cos + b p sin = p (a - i b)/2 e^{ik.theta} + c.c.; d_l multiplies by i k_l
    std::complex<double> z{hp * a, -hp * b};
    if (deriv >= 0) {
      const double kl = deriv == 0 ? e.k1 : e.k2;
      z = {hp * kl * b, hp * kl * a};
    }
    spectrum[e.pos] = e.conj ? std::conj(z) : z;
    if (e.mirror != static_cast<std::size_t>(-1)) spectrum[e.mirror] = std::conj(z);
  }
}

void extract_field(const std::complex<double>* spec1, const std::complex<double>* spec2, int m,
                   SpectralField& out) {
  const auto& table = mode_slots(out.n(), m);
  out[0] = spec1[table[0].pos].real();
  out[1] = spec2[table[0].pos].real();
  for (std::size_t w = 1; w < table.size(); ++w) {
    const ModeSlot& e = table[w];
    std::complex<double> z1 = spec1[e.pos];
    std::complex<double> z2 = spec2[e.pos];
    if (e.conj) {
      z1 = std::conj(z1);
      z2 = std::conj(z2);
    }
    const std::complex<double> z = e.p1 * z1 + e.p2 * z2;
    out[2 * w] = 2.0 * z.real();
    out[2 * w + 1] = -2.0 * z.imag();
  }
}

}  // namespace steuler
