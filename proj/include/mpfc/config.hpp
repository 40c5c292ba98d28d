#pragma once

// Flat key=value run configuration. One pair per line, '#' starts a comment,
// unknown keys are errors. Every value is validated before anything is
// allocated.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mpfc/experiments.hpp"

namespace mpfc {

enum class Experiment { simulate, decompose, beta_sweep, dissipativity, convergence };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::simulate: return "simulate";
    case Experiment::decompose: return "decompose";
    case Experiment::beta_sweep: return "beta_sweep";
    case Experiment::dissipativity: return "dissipativity";
    case Experiment::convergence: return "convergence";
  }
  return "?";
}

struct Tolerances {
  double charge = 1e-12;     // drift of the conserved charge and mean modes
  double energy = 1e-10;     // per-step PFC energy increase
  double recon = 1e-8;       // relative decomposition mismatch
  double r2_min = 0.99;      // decay fit quality
  double slope_min = 0.45;   // beta-continuation slope
  double spread = 0.1;       // dissipativity terminal spread
  double order = 0.1;        // |convergence slope - 1|
  double layer_slack = 2.0;  // boundary-layer envelope factor
};

struct RunConfig {
  Experiment experiment = Experiment::simulate;
  ModelParams model;
  std::optional<double> stabilization;
  int dim = 1;
  int n_points = 128;
  double dt = 1e-3;
  double horizon = 1.0;
  int sample_stride = 100;
  std::uint64_t seed = 42;
  std::string output_dir = "mpfc-out";
  InitialDataSpec init;
  std::vector<double> beta_values{1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.0};
  std::vector<double> sample_times{1.0, 2.0, 4.0};
  double transient = 0.2;
  double norm_ratio = 10.0;
  int levels = 6;
  Tolerances tol;

  // Every key as it was resolved, in a stable order, and the defaults that
  // were filled in.
  std::vector<std::pair<std::string, std::string>> resolved;
  std::vector<std::string> notes;
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(key, "expected a real number, got '" + text + "'");
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

inline long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "expected a comma separated list of reals");
  return out;
}

// Shortest text that reads back to the same double.
inline std::string format_real(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
  return out;
}

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "experiment", "beta",        "epsilon",      "k_split",      "beta0",      "nonlinearity",
      "stabilization", "dim",      "n_points",     "dt",           "horizon",    "sample_stride",
      "seed",       "output_dir",  "mean_phi0",    "mean_phi1",    "amplitude",  "max_mode",
      "beta_values", "sample_times", "transient",  "norm_ratio",   "levels",     "charge_tol",
      "energy_tol", "recon_tol",   "r2_min",       "slope_min",    "spread_tol", "order_tol",
      "layer_slack"};
  return keys;
}

}  // namespace config_detail

inline RunConfig parse_config(std::string_view text) {
  using namespace config_detail;
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key=value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    bool known = false;
    for (const auto& k : known_keys()) known = known || k == key;
    if (!known) throw ConfigError(key, "unknown key");
    if (kv.count(key)) throw ConfigError(key, "given more than once");
    if (value.empty()) throw ConfigError(key, "empty value");
    kv[key] = value;
  }

  RunConfig cfg;
  auto has = [&](const char* k) { return kv.count(k) > 0; };
  auto note = [&](const std::string& k, const std::string& v) {
    cfg.notes.push_back("default " + k + "=" + v);
  };
  auto real = [&](const char* k, double fallback) {
    if (has(k)) return parse_real(k, kv[k]);
    note(k, format_real(fallback));
    return fallback;
  };
  auto integer = [&](const char* k, long long fallback) {
    if (has(k)) return parse_integer(k, kv[k]);
    note(k, std::to_string(fallback));
    return fallback;
  };

  if (!has("experiment")) throw ConfigError("experiment", "missing required key");
  const std::string& ex = kv["experiment"];
  if (ex == "simulate") cfg.experiment = Experiment::simulate;
  else if (ex == "decompose") cfg.experiment = Experiment::decompose;
  else if (ex == "beta_sweep") cfg.experiment = Experiment::beta_sweep;
  else if (ex == "dissipativity") cfg.experiment = Experiment::dissipativity;
  else if (ex == "convergence") cfg.experiment = Experiment::convergence;
  else throw ConfigError("experiment", "unknown experiment '" + ex + "'");
  const Experiment e = cfg.experiment;

  if (!has("epsilon")) throw ConfigError("epsilon", "missing required key");
  const double epsilon = parse_real("epsilon", kv["epsilon"]);
  // A sweep takes its betas from beta_values.
  double beta = 0.0;
  if (has("beta")) {
    beta = parse_real("beta", kv["beta"]);
  } else if (e != Experiment::beta_sweep) {
    throw ConfigError("beta", "missing required key");
  }
  if (!(beta >= 0.0)) throw ConfigError("beta", "must be >= 0");
  const double beta0 = real("beta0", 1.0);
  std::optional<double> k_split;
  if (has("k_split")) {
    k_split = parse_real("k_split", kv["k_split"]);
  } else {
    note("k_split", format_real(default_k_split(epsilon)));
  }
  Nonlinearity nl = Nonlinearity::cubic;
  if (has("nonlinearity")) {
    if (kv["nonlinearity"] == "cubic") nl = Nonlinearity::cubic;
    else if (kv["nonlinearity"] == "linear") nl = Nonlinearity::linear;
    else throw ConfigError("nonlinearity", "expected cubic or linear");
  } else {
    note("nonlinearity", "cubic");
  }
  cfg.model = ModelParams::make(beta, epsilon, k_split, beta0, nl);

  if (has("stabilization") && kv["stabilization"] != "auto") {
    cfg.stabilization = parse_real("stabilization", kv["stabilization"]);
  } else if (!has("stabilization")) {
    note("stabilization", "auto");
  }

  const long long dim = integer("dim", 1);
  if (dim < 1 || dim > 3) throw ConfigError("dim", "must be 1, 2 or 3");
  cfg.dim = static_cast<int>(dim);
  const long long n = integer("n_points", dim == 1 ? 128 : 64);
  if (n < 4 || n > (1 << 20) || !detail::is_power_of_two(static_cast<int>(n))) {
    throw ConfigError("n_points", "must be a power of two >= 4");
  }
  cfg.n_points = static_cast<int>(n);

  const double default_dt = e == Experiment::convergence                                 ? 0.0625
                            : (e == Experiment::decompose || e == Experiment::beta_sweep) ? 1e-4
                                                                                          : 1e-3;
  const double default_horizon = e == Experiment::decompose       ? 2.0
                                 : e == Experiment::beta_sweep    ? 4.0
                                 : e == Experiment::dissipativity ? 20.0
                                                                  : 1.0;
  cfg.dt = real("dt", default_dt);
  if (!(cfg.dt > 0.0)) throw ConfigError("dt", "must be > 0");
  cfg.horizon = real("horizon", default_horizon);
  if (!(cfg.horizon > 0.0)) throw ConfigError("horizon", "must be > 0");
  const long long stride = integer("sample_stride", 100);
  if (stride < 1 || stride > (1LL << 40)) throw ConfigError("sample_stride", "must be >= 1");
  cfg.sample_stride = static_cast<int>(stride);
  const long long seed = integer("seed", 42);
  if (seed < 0) throw ConfigError("seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  if (has("output_dir")) {
    cfg.output_dir = kv["output_dir"];
  } else {
    note("output_dir", cfg.output_dir);
  }

  cfg.init.mean_phi0 = real("mean_phi0", 0.1);
  cfg.init.mean_phi1 = real("mean_phi1", 0.1);
  cfg.init.amplitude = real("amplitude", 0.1);
  if (!(cfg.init.amplitude >= 0.0)) throw ConfigError("amplitude", "must be >= 0");
  const long long max_mode = integer("max_mode", 8);
  if (max_mode < 1 || 3 * max_mode > n) throw ConfigError("max_mode", "must lie in [1, n_points/3]");
  cfg.init.max_mode = static_cast<int>(max_mode);

  if (has("beta_values")) {
    cfg.beta_values = parse_list("beta_values", kv["beta_values"]);
  } else if (e == Experiment::beta_sweep) {
    note("beta_values", format_list(cfg.beta_values));
  }
  if (has("sample_times")) {
    cfg.sample_times = parse_list("sample_times", kv["sample_times"]);
  } else if (e == Experiment::beta_sweep) {
    note("sample_times", format_list(cfg.sample_times));
  }
  cfg.transient = real("transient", 0.2);
  // Only the decay fit uses the transient, so only there must it fit inside the horizon.
  if (!(cfg.transient >= 0.0) || (e == Experiment::decompose && cfg.transient >= cfg.horizon)) {
    throw ConfigError("transient", "must lie in [0, horizon)");
  }
  cfg.norm_ratio = real("norm_ratio", 10.0);
  if (!(cfg.norm_ratio >= 1.0)) throw ConfigError("norm_ratio", "must be >= 1");
  const long long levels = integer("levels", 6);
  if (levels < 2 || levels > 30) throw ConfigError("levels", "must lie in [2, 30]");
  cfg.levels = static_cast<int>(levels);

  auto positive = [&](const char* k, double fallback) {
    const double v = real(k, fallback);
    if (!(v > 0.0)) throw ConfigError(k, "must be > 0");
    return v;
  };
  cfg.tol.charge = positive("charge_tol", cfg.tol.charge);
  cfg.tol.energy = positive("energy_tol", cfg.tol.energy);
  cfg.tol.recon = positive("recon_tol", cfg.tol.recon);
  cfg.tol.r2_min = real("r2_min", cfg.tol.r2_min);
  cfg.tol.slope_min = real("slope_min", cfg.tol.slope_min);
  cfg.tol.spread = positive("spread_tol", cfg.tol.spread);
  cfg.tol.order = positive("order_tol", cfg.tol.order);
  cfg.tol.layer_slack = positive("layer_slack", cfg.tol.layer_slack);

  // Cross-field constraints.
  if (e == Experiment::beta_sweep) {
    const auto& b = cfg.beta_values;
    if (b.size() < 2 || b.back() != 0.0) throw ConfigError("beta_values", "must end with 0");
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      if (!(b[i] > b[i + 1])) throw ConfigError("beta_values", "must be sorted strictly descending");
    }
    if (b.front() > beta0) throw ConfigError("beta_values", "entries must be <= beta0");
    for (std::size_t i = 0; i < cfg.sample_times.size(); ++i) {
      const double t = cfg.sample_times[i];
      if (!(t > 0.0) || t > cfg.horizon) throw ConfigError("sample_times", "entries must lie in (0, horizon]");
      if (i > 0 && !(t > cfg.sample_times[i - 1])) throw ConfigError("sample_times", "must be increasing");
      (void)steps_to(t, cfg.dt);
    }
  }
  if ((e == Experiment::decompose || e == Experiment::dissipativity) && !(beta > 0.0)) {
    throw ConfigError("beta", "must be > 0 for experiment " + to_string(e));
  }
  if (e == Experiment::convergence && nl != Nonlinearity::linear) {
    throw ConfigError("nonlinearity", "convergence needs nonlinearity=linear");
  }
  if (e != Experiment::convergence) (void)steps_to(cfg.horizon, cfg.dt);
  if (cfg.stabilization) {
    if (!std::isfinite(*cfg.stabilization)) throw ConfigError("stabilization", "must be finite");
  }

  // Resolved view, in the order of known_keys().
  const ModelParams& m = cfg.model;
  const std::map<std::string, std::string> resolved{
      {"experiment", to_string(e)},
      {"beta", format_real(m.beta)},
      {"epsilon", format_real(m.epsilon)},
      {"k_split", format_real(m.k_split)},
      {"beta0", format_real(m.beta0)},
      {"nonlinearity", nl == Nonlinearity::cubic ? "cubic" : "linear"},
      {"stabilization", cfg.stabilization ? format_real(*cfg.stabilization) : "auto"},
      {"dim", std::to_string(cfg.dim)},
      {"n_points", std::to_string(cfg.n_points)},
      {"dt", format_real(cfg.dt)},
      {"horizon", format_real(cfg.horizon)},
      {"sample_stride", std::to_string(cfg.sample_stride)},
      {"seed", std::to_string(cfg.seed)},
      {"output_dir", cfg.output_dir},
      {"mean_phi0", format_real(cfg.init.mean_phi0)},
      {"mean_phi1", format_real(cfg.init.mean_phi1)},
      {"amplitude", format_real(cfg.init.amplitude)},
      {"max_mode", std::to_string(cfg.init.max_mode)},
      {"beta_values", format_list(cfg.beta_values)},
      {"sample_times", format_list(cfg.sample_times)},
      {"transient", format_real(cfg.transient)},
      {"norm_ratio", format_real(cfg.norm_ratio)},
      {"levels", std::to_string(cfg.levels)},
      {"charge_tol", format_real(cfg.tol.charge)},
      {"energy_tol", format_real(cfg.tol.energy)},
      {"recon_tol", format_real(cfg.tol.recon)},
      {"r2_min", format_real(cfg.tol.r2_min)},
      {"slope_min", format_real(cfg.tol.slope_min)},
      {"spread_tol", format_real(cfg.tol.spread)},
      {"order_tol", format_real(cfg.tol.order)},
      {"layer_slack", format_real(cfg.tol.layer_slack)}};
  for (const auto& k : known_keys()) cfg.resolved.emplace_back(k, resolved.at(k));
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mpfc
