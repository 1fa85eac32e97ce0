#include "steuler/config.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace steuler {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  T v{};
  is >> v;
  if (is.fail() || !(is >> std::ws).eof()) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

}  // namespace

RunSettings RunSettings::defaults() {
  RunSettings s;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') s.out = env;
  return s;
}

void apply_setting(RunSettings& s, const std::string& key, const std::string& value) {
  if (key == "n") s.n = parse_number<int>(key, value);
  else if (key == "dt") s.dt = parse_number<double>(key, value);
  else if (key == "T") s.T = parse_number<double>(key, value);
  else if (key == "paths") s.paths = parse_number<int>(key, value);
  else if (key == "seed") {
    if (!value.empty() && value.front() == '-') throw ConfigError("'seed' must be non-negative");
    s.seed = parse_number<std::uint64_t>(key, value);
  }
  else if (key == "scheme") s.scheme = value;
  else if (key == "noise") s.noise = value;
  else if (key == "beta") s.beta = parse_number<double>(key, value);
  else if (key == "noise_cutoff") s.noise_cutoff = parse_number<int>(key, value);
  else if (key == "ic") s.ic = value;
  else if (key == "out") s.out = value;
  else if (key == "save_every") s.save_every = parse_number<int>(key, value);
  else if (key == "threads") s.threads = parse_number<int>(key, value);
  else if (key == "substeps") s.substeps = parse_number<int>(key, value);
  else throw ConfigError("unknown key '" + key + "'");
}

RunSettings parse_config_text(const std::string& text, RunSettings base, const std::string& origin) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line) + ": ";
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + body + "'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
    try {
      apply_setting(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return base;
}

RunSettings load_config_file(const std::string& path, RunSettings base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
    return RunSettings::from_json(j.contains("settings") ? j.at("settings") : j);
  }
  return parse_config_text(ss.str(), std::move(base), path);
}

NoiseModel parse_noise(const std::string& text, double beta, int cutoff) {
  if (text == "space-independent") return NoiseModel::space_independent();
  if (text.rfind("finite:", 0) == 0) {
    const auto modes = parse_mode_list(text.substr(7));
    if (modes.empty()) throw ConfigError("noise 'finite:' needs at least one wavevector");
    return NoiseModel::finite_modes(modes, beta, cutoff);
  }
  if (text.rfind("qwiener:", 0) == 0) {
    return NoiseModel::q_wiener(parse_number<int>("noise", text.substr(8)), beta, cutoff);
  }
  throw ConfigError("unknown noise '" + text +
                    "' (expected space-independent, finite:<k1,k2;...> or qwiener:<n_W>)");
}

std::vector<std::string> RunSettings::validate() const {
  std::vector<std::string> errs;
  if (!(beta > 3.0)) {
    std::ostringstream os;
    os << "beta must be > 3 for a trace-class covariance with finite c'_W (got " << beta << ")";
    errs.push_back(os.str());
  }
  if (noise_cutoff < 1) errs.push_back("noise_cutoff must be >= 1");
  try {
    parse_scheme(scheme);
  } catch (const ConfigError& e) {
    errs.push_back(e.what());
  }
  if (noise.rfind("qwiener:", 0) == 0) {
    try {
      if (parse_number<int>("noise", noise.substr(8)) < 1) errs.push_back("qwiener n_W must be >= 1");
    } catch (const ConfigError& e) {
      errs.push_back(e.what());
    }
  } else if (noise.rfind("finite:", 0) == 0) {
    try {
      if (parse_mode_list(noise.substr(7)).empty()) errs.push_back("noise 'finite:' needs at least one wavevector");
    } catch (const ConfigError& e) {
      errs.push_back(e.what());
    }
  } else if (noise != "space-independent") {
    errs.push_back("unknown noise '" + noise + "'");
  }
  SimConfig c;
  c.n = n;
  c.dt = dt;
  c.T = T;
  c.paths = paths;
  c.seed = seed;
  c.save_every = save_every;
  c.threads = threads;
  c.substeps = substeps;
  try {
    c.initial = InitialCondition::parse(ic);
    for (auto& e : c.validate()) errs.push_back(std::move(e));
  } catch (const ConfigError& e) {
    errs.push_back(e.what());
    c.initial = InitialCondition{};
    for (auto& e2 : c.validate()) errs.push_back(std::move(e2));
  }
  if (out.empty()) errs.push_back("out must not be empty");
  return errs;
}

SimConfig RunSettings::resolve() const {
  if (const auto errs = validate(); !errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  SimConfig c;
  c.n = n;
  c.dt = dt;
  c.T = T;
  c.scheme = parse_scheme(scheme);
  c.noise = parse_noise(noise, beta, noise_cutoff);
  c.paths = paths;
  c.seed = seed;
  c.initial = InitialCondition::parse(ic);
  c.save_every = save_every;
  c.threads = threads;
  c.substeps = substeps;
  return c;
}

nlohmann::json RunSettings::to_json() const {
  return {{"n", n},         {"dt", dt},         {"T", T},
          {"paths", paths}, {"seed", seed},     {"scheme", scheme},
          {"noise", noise}, {"beta", beta},     {"noise_cutoff", noise_cutoff},
          {"ic", ic},       {"out", out},       {"save_every", save_every},
          {"threads", threads}, {"substeps", substeps}};
}

RunSettings RunSettings::from_json(const nlohmann::json& j) {
  RunSettings s;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") s.n = value.get<int>();
      else if (key == "dt") s.dt = value.get<double>();
      else if (key == "T") s.T = value.get<double>();
      else if (key == "paths") s.paths = value.get<int>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else if (key == "scheme") s.scheme = value.get<std::string>();
      else if (key == "noise") s.noise = value.get<std::string>();
      else if (key == "beta") s.beta = value.get<double>();
      else if (key == "noise_cutoff") s.noise_cutoff = value.get<int>();
      else if (key == "ic") s.ic = value.get<std::string>();
      else if (key == "out") s.out = value.get<std::string>();
      else if (key == "save_every") s.save_every = value.get<int>();
      else if (key == "threads") s.threads = value.get<int>();
      else if (key == "substeps") s.substeps = value.get<int>();
      else throw ConfigError("manifest: unknown setting '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return s;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["program"] = "steuler";
  j["version"] = STEULER_VERSION;
  j["command"] = command;
  j["settings"] = settings.to_json();
  const SimConfig c = settings.resolve();
  nlohmann::json noise{{"regime", to_string(c.noise.regime())},
                       {"description", c.noise.describe()},
                       {"modes", c.noise.modes().size()}};
  if (c.noise.regime() != NoiseRegime::SpaceIndependent) {
    noise["beta"] = c.noise.beta();
    noise["c_W"] = c.noise.cw();
    noise["c_W_prime"] = c.noise.cw_prime();
    noise["c_W_bound_width"] = c.noise.cw_bound_width();
    noise["c_W_prime_bound_width"] = c.noise.cw_prime_bound_width();
    noise["gronwall_rate"] = c.noise.gronwall_rate();
  }
  if (c.noise.regime() == NoiseRegime::QWiener) noise["discarded_trace"] = c.noise.discarded_trace();
  j["noise"] = noise;
  j["initial_condition"] = c.initial.describe();
  j["steps"] = c.steps();
  j["outputs"] = outputs;
  j["started"] = started;
  j["finished"] = finished;
  j["wall_seconds"] = wall_seconds;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace steuler
