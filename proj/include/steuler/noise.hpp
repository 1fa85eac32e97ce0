#pragma once

// Noise regimes for the transport-type forcing sum_k sigma_k (a_k . grad) u dB_k.
//
//  - SpaceIndependent: W(t) = (B1(t), B2(t)), advecting with the constant fields.
//  - FiniteModes: a finite wavevector set K, weights sqrt(q_k / c_W).
//  - QWiener: all wavevectors with |k_i| <= n_W, weights sqrt(q_k / c_W).
//
// Each lattice wavevector k carries its own pair (B^1_k, B^2_k) multiplying
// c_k and s_k; k and -k are independent.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "steuler/basis.hpp"

namespace steuler {

/// q_k = 1 for k = 0, |k|^{-2(beta-1)} otherwise. Throws ConfigError for beta <= 3.
double q_coeff(ModeIndex k, double beta);

/// A lattice sum evaluated up to a cutoff plus a rigorous enclosure of the tail.
struct BoundedSum {
  double partial = 0.0;  // sum over max(|k1|,|k2|) <= cutoff
  double lower = 0.0;    // partial + lower tail bound
  double upper = 0.0;    // partial + upper tail bound
  int cutoff = 0;

  double value() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

constexpr int kDefaultNoiseCutoff = 2048;

/// c_W = 1 + sum_{k != 0} (k_c)^2 / |k|^{2 beta}, with c = component (1 or 2).
/// The component-2 sum visits the transposed lattice order, so both
/// components agree bitwise at every cutoff.
BoundedSum normalizer_cw(double beta, int cutoff = kDefaultNoiseCutoff, int component = 1);

/// c'_W = sum_{k != 0} (k_c)^2 / |k|^{2 beta - 2}.
BoundedSum normalizer_cw_prime(double beta, int cutoff = kDefaultNoiseCutoff, int component = 1);

/// sum_{k != 0} q_k over the lattice, with tail enclosure.
BoundedSum q_trace(double beta, int cutoff = kDefaultNoiseCutoff);

/// sum of q_k over wavevectors with max(|k1|,|k2|) > n_w (midpoint of the enclosure).
double discarded_trace(double beta, int n_w);

/// Enclosure [lo, hi] of sum_{max(|k1|,|k2|) > n} |k|^{-2s}, s > 1.
std::pair<double, double> lattice_tail_bounds(double s, int n);

enum class NoiseRegime { SpaceIndependent, FiniteModes, QWiener };

std::string to_string(NoiseRegime r);

class NoiseModel {
 public:
  /// `scale` multiplies both Brownian motions (0 switches the noise off).
  static NoiseModel space_independent(double scale = 1.0);
  /// `modes` are lattice wavevectors (each gets its own Brownian pair).
  static NoiseModel finite_modes(std::vector<ModeIndex> modes, double beta,
                                 int cutoff = kDefaultNoiseCutoff);
  static NoiseModel q_wiener(int n_w, double beta, int cutoff = kDefaultNoiseCutoff);

  NoiseRegime regime() const { return regime_; }
  double beta() const { return beta_; }
  double cw() const { return cw_; }
  double cw_prime() const { return cw_prime_; }
  /// Gronwall rate c'_W / c_W (zero for space-independent noise).
  double gronwall_rate() const { return cw_ == 0.0 ? 0.0 : cw_prime_ / cw_; }
  int n_w() const { return n_w_; }
  /// Enclosure widths of the normalizers (zero when not computed).
  double cw_bound_width() const { return cw_width_; }
  double cw_prime_bound_width() const { return cw_prime_width_; }

  /// Wavevectors with an independent Brownian pair, in sampling order.
  const std::vector<ModeIndex>& modes() const { return modes_; }
  /// Weight multiplying the transport by c_k / s_k: sqrt(q_k / c_W), or 1.
  double amplitude(ModeIndex k) const;
  /// Highest |k_i| among the active modes.
  int degree() const;
  /// sum of q_k over the lattice outside the active set (QWiener only).
  double discarded_trace() const;

  std::string describe() const;

 private:
  NoiseRegime regime_ = NoiseRegime::SpaceIndependent;
  double beta_ = 0.0;
  double cw_ = 1.0;
  double cw_prime_ = 0.0;
  double cw_width_ = 0.0;
  double cw_prime_width_ = 0.0;
  int n_w_ = 0;
  double scale_ = 1.0;
  std::vector<ModeIndex> modes_;
};

/// Brownian increments (dB^1_k, dB^2_k) over one step, one pair per model mode.
struct WienerIncrement {
  double dt = 0.0;
  std::vector<double> db1;
  std::vector<double> db2;
};

/// Per-path Gaussian stream. Seeded from (seed, path id); the draw order is
/// fixed (substep, then mode, then component), so a step of size dt with r
/// substeps consumes exactly the normals of r consecutive steps of size dt/r.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t path);

  double normal() { return dist_(engine_); }
  WienerIncrement sample(const NoiseModel& model, double dt, int substeps = 1);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_;
};

WienerIncrement sample_increments(const NoiseModel& model, double dt, NoiseStream& stream);

/// One transport term coefficient * (advector . grad) u * dB^component_{slot}.
struct TransportTerm {
  double coefficient = 0.0;
  BasisMode advector;   // c_k / s_k on the full lattice; C(0,0) = e1, S(0,0) = e2
  std::size_t slot = 0;  // index into model.modes()
  int component = 1;     // 1 -> db1, 2 -> db2
};

std::vector<TransportTerm> noise_field_increment(const NoiseModel& model);

/// The noise field dW = sum_k sigma_k (dB^1_k c_k + dB^2_k s_k) on I_{degree}.
SpectralField noise_field(const NoiseModel& model, const WienerIncrement& inc);

/// Parses "k1,k2;k1,k2;..." into wavevectors.
std::vector<ModeIndex> parse_mode_list(const std::string& text);

}  // namespace steuler
