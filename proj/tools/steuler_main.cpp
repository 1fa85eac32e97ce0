// steuler: command-line front end (run, ensemble, verify, tables).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "steuler/acceptance.hpp"
#include "steuler/config.hpp"
#include "steuler/diagnostics.hpp"
#include "steuler/geometry.hpp"
#include "steuler/output.hpp"

namespace fs = std::filesystem;
using namespace steuler;

namespace {

// Flags that map onto config keys; only the ones given on the command line
// override the file.
struct SettingFlags {
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key = value file or a manifest.json to replay")
        ->check(CLI::ExistingFile);
    add(app, "--n", "n", "Galerkin truncation (modes |k_i| <= n)");
    add(app, "--dt", "dt", "time step");
    add(app, "--T", "T", "final time");
    add(app, "--paths", "paths", "ensemble size");
    add(app, "--seed", "seed", "master seed");
    add(app, "--scheme", "scheme", "ito-em | strat-heun | strat-midpoint");
    add(app, "--noise", "noise", "space-independent | finite:<k1,k2;...> | qwiener:<n_W>");
    add(app, "--beta", "beta", "noise decay exponent (> 3)");
    add(app, "--noise-cutoff", "noise_cutoff", "lattice cutoff for the noise normalizers");
    add(app, "--ic", "ic", "mode:<k1,k2> | pair | random:<decay> | coeffs:<list>");
    add(app, "--out", "out", "output directory (default $" + std::string(kOutputDirEnv) + " or steuler-out)");
    add(app, "--save-every", "save_every", "steps between saved states");
    add(app, "--threads", "threads", "worker threads (0: all cores)");
    add(app, "--substeps", "substeps", "fine normals per Brownian increment");
  }

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }

  RunSettings resolve() const {
    RunSettings s = RunSettings::defaults();
    if (!config.empty()) s = load_config_file(config, s);
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      try {
        apply_setting(s, key, values.at(key));
      } catch (const ConfigError& e) {
        throw ConfigError("--" + key + ": " + e.what());
      }
    }
    return s;
  }
};

std::ofstream open_output(const fs::path& path, std::vector<std::string>& written) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  written.push_back(path.filename().string());
  return f;
}

void write_manifest(const fs::path& dir, RunManifest& manifest, std::chrono::steady_clock::time_point start) {
  manifest.finished = utc_timestamp();
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.outputs.push_back("manifest.json");
  std::ofstream f(dir / "manifest.json");
  if (!f) throw Error("cannot write manifest in '" + dir.string() + "'");
  f << manifest.to_json().dump(2) << '\n';
}

std::string file_safe(const std::string& name) {
  std::string out;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch))) out += ch;
    else if (ch == ',' || ch == '-') out += '_';
  }
  return out;
}

int cmd_run(const SettingFlags& flags, std::uint64_t path_id) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest{"run", flags.resolve(), {}, utc_timestamp(), {}, 0.0};
  const SimConfig config = manifest.settings.resolve();
  const fs::path dir = manifest.settings.out;
  fs::create_directories(dir);
  std::cerr << "run: n=" << config.n << " " << to_string(config.scheme) << " "
            << config.noise.describe() << ", " << config.steps() << " steps\n";
  const PathResult path = run_path(config, path_id);
  {
    auto f = open_output(dir / "path.csv", manifest.outputs);
    write_path_norms_csv(f, path, config.dt);
  }
  {
    auto f = open_output(dir / "states.csv", manifest.outputs);
    write_states_csv(f, path);
  }
  write_manifest(dir, manifest, start);
  const auto led = energy_report(path, config.dt, config.noise.gronwall_rate());
  std::cout << "L2 " << format_number(path.l2.front()) << " -> " << format_number(path.l2.back())
            << " (max relative drift " << led.max_rel_l2_drift << "), H1 "
            << format_number(path.h1.front()) << " -> " << format_number(path.h1.back()) << "\n"
            << "wrote " << dir.string() << "/{path.csv,states.csv,manifest.json}\n";
  return 0;
}

int cmd_ensemble(const SettingFlags& flags) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest{"ensemble", flags.resolve(), {}, utc_timestamp(), {}, 0.0};
  const SimConfig config = manifest.settings.resolve();
  const fs::path dir = manifest.settings.out;
  fs::create_directories(dir);
  std::cerr << "ensemble: " << config.paths << " paths, n=" << config.n << " "
            << to_string(config.scheme) << " " << config.noise.describe() << "\n";
  const auto ens = run_ensemble(config, default_probes(config.n));
  {
    auto f = open_output(dir / "ensemble.csv", manifest.outputs);
    write_ensemble_csv(f, ens, 0);
  }
  for (std::size_t p = 0; p < ens.probe_names.size(); ++p) {
    auto f = open_output(dir / ("probe_" + file_safe(ens.probe_names[p]) + ".csv"), manifest.outputs);
    write_probe_csv(f, ens, p);
  }
  {
    auto f = open_output(dir / "paths.csv", manifest.outputs);
    write_paths_csv(f, ens);
  }
  write_manifest(dir, manifest, start);
  std::cout << "mean L2 " << format_number(ens.l2.back().mean) << " +- "
            << format_number(ens.l2.back().se()) << ", mean H1 " << format_number(ens.h1.back().mean)
            << " +- " << format_number(ens.h1.back().se()) << " at T (" << ens.wall_seconds << " s)\n"
            << "wrote " << manifest.outputs.size() << " files to " << dir.string() << "\n";
  return 0;
}

int cmd_verify(const std::string& suite, bool quick, int threads) {
  AcceptanceOptions opts;
  opts.quick = quick;
  opts.threads = threads;
  opts.log = [](const std::string& msg) { std::cerr << "  .. " << msg << "\n"; };
  AcceptanceRunner runner(opts);
  const auto results = runner.run_all(expand_suites(suite), [](const CriterionResult& r) {
    std::cout << format_result(r) << std::endl;
  });
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (failed == 0 ? "all " + std::to_string(results.size()) + " criteria passed"
                            : std::to_string(failed) + " of " + std::to_string(results.size()) +
                                  " criteria failed:");
  for (const auto& r : results)
    if (!r.pass) std::cout << " " << r.id << "(" << r.suite << ")";
  std::cout << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_tables(int n, std::string out) {
  if (n < 1) throw ConfigError("--n must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  if (out.empty()) out = RunSettings::defaults().out;
  const fs::path dir = out;
  fs::create_directories(dir);
  const TruncationSet trunc(n);
  const auto tables = build_structure_tables(trunc);
  std::vector<std::string> written;
  {
    auto f = open_output(dir / "modes.csv", written);
    write_modes_csv(f, trunc);
  }
  {
    auto f = open_output(dir / "structure.csv", written);
    write_structure_csv(f, tables);
  }
  {
    auto f = open_output(dir / "christoffel.csv", written);
    write_christoffel_csv(f, tables);
  }
  {
    auto f = open_output(dir / "incomplete.csv", written);
    f << "k,l\n";
    for (std::size_t k = 0; k < tables.dimension(); ++k)
      for (std::size_t l = 0; l < tables.dimension(); ++l)
        if (tables.incomplete(k, l)) f << k << ',' << l << '\n';
  }
  nlohmann::json j{{"program", "steuler"},
                   {"version", STEULER_VERSION},
                   {"command", "tables"},
                   {"n", n},
                   {"dimension", tables.dimension()},
                   {"structure_nonzeros", tables.c_nonzeros()},
                   {"christoffel_nonzeros", tables.gamma_nonzeros()},
                   {"incomplete_pairs", tables.incomplete_count()},
                   {"outputs", written},
                   {"finished", utc_timestamp()},
                   {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  std::ofstream(dir / "manifest.json") << j.dump(2) << '\n';
  std::cout << "n=" << n << ": " << tables.dimension() << " modes, " << tables.c_nonzeros()
            << " structure constants, " << tables.gamma_nonzeros() << " Christoffel symbols, "
            << tables.incomplete_count() << " incomplete pairs\nwrote " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin simulation of the 2D Euler equation with transport noise"};
  app.set_version_flag("--version", std::string(STEULER_VERSION));
  app.require_subcommand(1);

  SettingFlags run_flags;
  std::uint64_t path_id = 0;
  auto* run = app.add_subcommand("run", "simulate one path; writes path.csv and states.csv");
  run_flags.attach(run);
  run->add_option("--path", path_id, "path id (selects the Brownian stream)");

  SettingFlags ens_flags;
  auto* ensemble = app.add_subcommand("ensemble", "simulate an ensemble; writes ensemble.csv");
  ens_flags.attach(ensemble);

  std::string suite = "all";
  bool quick = false;
  int threads = 0;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria; exit 1 on failure");
  verify->add_option("--suite", suite,
                     "all, or a comma list of energy, h1, gronwall, oracle, geodesic, "
                     "martingale, ito-strat, structure, noise");
  verify->add_flag("--quick", quick, "smaller ensembles, same tolerances");
  verify->add_option("--threads", threads, "worker threads (0: all cores)");

  int table_n = 8;
  std::string table_out;
  auto* tables = app.add_subcommand("tables", "dump structure constants and Christoffel symbols");
  tables->add_option("--n", table_n, "truncation");
  tables->add_option("--out", table_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags, path_id);
    if (*ensemble) return cmd_ensemble(ens_flags);
    if (*verify) return cmd_verify(suite, quick, threads);
    if (*tables) return cmd_tables(table_n, table_out);
  } catch (const ConfigError& e) {
    std::cerr << "steuler: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "steuler: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
