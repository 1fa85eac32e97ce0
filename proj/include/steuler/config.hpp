#pragma once

// Run configuration: a key = value file, flag overrides, validation and the
// JSON manifest written next to every output.
//
// File schema (all keys optional, '#' starts a comment):
//
//   n = 8                    Galerkin truncation I_n
//   dt = 1e-3                time step
//   T = 1.0                  final time, an integer multiple of dt
//   paths = 256              ensemble size
//   seed = 20240901          master seed
//   scheme = strat-midpoint  ito-em | strat-heun | strat-midpoint
//   noise = space-independent
//                            space-independent | finite:<k1,k2;...> | qwiener:<n_W>
//   beta = 4                 noise decay exponent, > 3
//   noise_cutoff = 2048      lattice cutoff for c_W and c'_W
//   ic = pair                mode:<k1,k2> | pair | random:<decay> | coeffs:<list>
//   out = steuler-out        output directory
//   save_every = 10          steps between saved states
//   threads = 0              worker threads (0: all cores)
//   substeps = 1             fine normals summed per Brownian increment

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "steuler/integrate.hpp"

namespace steuler {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "STEULER_OUT";

struct RunSettings {
  int n = 8;
  double dt = 1e-3;
  double T = 1.0;
  int paths = 256;
  std::uint64_t seed = 20240901;
  std::string scheme = "strat-midpoint";
  std::string noise = "space-independent";
  double beta = 4.0;
  int noise_cutoff = kDefaultNoiseCutoff;
  std::string ic = "pair";
  std::string out = "steuler-out";
  int save_every = 10;
  int threads = 0;
  int substeps = 1;

  /// Defaults, with `out` taken from the environment when set.
  static RunSettings defaults();

  /// Every violated constraint, one message each.
  std::vector<std::string> validate() const;
  /// Throws ConfigError listing all violations.
  SimConfig resolve() const;

  nlohmann::json to_json() const;
  static RunSettings from_json(const nlohmann::json& j);
};

/// Parses key = value text onto `base`. Errors carry "<origin>:<line>: ".
RunSettings parse_config_text(const std::string& text, RunSettings base,
                              const std::string& origin = "config");
/// Reads a key = value file, or a manifest (.json) written by a previous run.
RunSettings load_config_file(const std::string& path, RunSettings base);

/// Sets one key from its textual value; throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(RunSettings& s, const std::string& key, const std::string& value);

/// Noise model named by `text` ("space-independent", "finite:...", "qwiener:<n_W>").
NoiseModel parse_noise(const std::string& text, double beta, int cutoff);

struct RunManifest {
  std::string command;
  RunSettings settings;
  std::vector<std::string> outputs;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace steuler
