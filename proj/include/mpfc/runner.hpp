#pragma once

// Experiment dispatch. A run writes into its own output directory:
//   run.log      resolved configuration and applied defaults
//   summary.txt  metrics and one line per checked invariant
//   *.csv        experiment data, 17 significant digits
//   snapshots/   binary field snapshots
// Nothing time- or host-dependent is written, so identical configurations
// give identical files.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mpfc/config.hpp"
#include "mpfc/decomposition.hpp"
#include "mpfc/energy_identity.hpp"
#include "mpfc/io.hpp"

namespace mpfc {

enum ExitStatus : int { exit_ok = 0, exit_check_failed = 1, exit_config_error = 2, exit_runtime_error = 3 };

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string relation;  // how value is compared with limit
  bool fatal = true;
};

struct RunReport {
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> metrics;

  bool passed() const {
    for (const auto& c : checks) {
      if (c.fatal && !c.passed) return false;
    }
    return true;
  }
  void at_most(std::string name, double value, double limit) {
    checks.push_back({std::move(name), value <= limit, value, limit, "<=", true});
  }
  void at_least(std::string name, double value, double limit) {
    checks.push_back({std::move(name), value >= limit, value, limit, ">=", true});
  }
  void flag(std::string name, bool ok) {
    checks.push_back({std::move(name), ok, ok ? 1.0 : 0.0, 1.0, "==", false});
  }
  void require(std::string name, bool ok) {
    checks.push_back({std::move(name), ok, ok ? 1.0 : 0.0, 1.0, "==", true});
  }
  void metric(std::string name, double v) { metrics.emplace_back(std::move(name), v); }
};

struct RunOptions {
  bool quiet = false;
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
};

// Command-line overrides; the resolved view is updated to match.
inline void apply_overrides(RunConfig& cfg, const std::optional<std::string>& output_dir,
                            const std::optional<std::uint64_t>& seed) {
  auto set = [&](const std::string& key, const std::string& value) {
    for (auto& [k, v] : cfg.resolved) {
      if (k == key) v = value;
    }
    std::erase_if(cfg.notes, [&](const std::string& n) { return n.rfind("default " + key + "=", 0) == 0; });
  };
  if (output_dir) {
    if (output_dir->empty()) throw ConfigError("output_dir", "must not be empty");
    cfg.output_dir = *output_dir;
    set("output_dir", *output_dir);
  }
  if (seed) {
    cfg.seed = *seed;
    set("seed", std::to_string(*seed));
  }
}

namespace run_detail {

namespace fs = std::filesystem;

struct Context {
  const RunConfig& cfg;
  fs::path dir;
  std::string phase = "setup";
};

inline std::string snapshot_name(const std::string& stem, long index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%08ld.bin", stem.c_str(), index);
  return buf;
}

inline InitialData initial_data(const RunConfig& cfg, const GridPtr& grid) {
  return make_initial_data(grid, cfg.init, cfg.seed);
}

inline State initial_state(const InitialData& data, double beta) {
  return beta > 0.0 ? make_state(data.phi0, data.phi1, beta) : make_pfc_state(data.phi0);
}

inline RunLogRow log_row(const State& s, const ModelParams& p, double residual) {
  RunLogRow r;
  r.t = s.time;
  r.mean_phi = mean(s.phi);
  r.mean_phit = mean(s.phi_t);
  r.charge = conserved_charge(s).value;
  r.energy = energy(s.phi, p);
  r.full_energy = full_energy(s, p);
  r.hminus1_phit = hm_norm(s.phi_t, -1);
  r.h2_phi = hm_norm(s.phi, 2);
  r.identity_residual = residual;
  return r;
}

inline bool all_finite(const State& s) {
  for (double v : s.phi.values()) {
    if (!std::isfinite(v)) return false;
  }
  for (double v : s.phi_t.values()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline void simulate(Context& ctx, RunReport& rep) {
  const RunConfig& cfg = ctx.cfg;
  const ModelParams& p = cfg.model;
  ctx.phase = "initial data";
  const auto grid = make_grid(cfg.dim, cfg.n_points);
  const auto data = initial_data(cfg, grid);
  State s = initial_state(data, p.beta);
  const StepScheme scheme = scheme_for(p, cfg.dt, cfg.stabilization);

  ctx.phase = "integration";
  EnergyIdentityTracker tracker(p);
  tracker.push(s);
  RunLog log;
  const long steps = steps_to(cfg.horizon, cfg.dt);
  const double charge0 = conserved_charge(s).value;
  const double m0 = mean(s.phi);
  const double m1 = mean(s.phi_t);
  double charge_drift = 0.0, mean_mode_error = 0.0, energy_rise = 0.0;
  double prev_energy = energy(s.phi, p);
  bool finite = true;
  fs::create_directories(ctx.dir / "snapshots");
  auto record = [&](long n) {
    log.rows.push_back(log_row(s, p, tracker.residual()));
    save_snapshot(make_snapshot(s, p.epsilon), (ctx.dir / "snapshots" / snapshot_name("state", n)).string());
  };
  record(0);
  for (long n = 1; n <= steps; ++n) {
    s = step(s, scheme, p);
    s.time = static_cast<double>(n) * cfg.dt;
    tracker.push(s);
    if (!all_finite(s)) {
      finite = false;
      break;
    }
    charge_drift = std::max(charge_drift, std::abs(conserved_charge(s).value - charge0));
    const auto exact = mean_mode_exact(p, m0, m1, s.time);
    mean_mode_error = std::max(mean_mode_error, std::abs(mean(s.phi_t) - exact.phi_t));
    if (p.beta == 0.0) {
      const double e = energy(s.phi, p);
      energy_rise = std::max(energy_rise, e - prev_energy);
      prev_energy = e;
    }
    if (n % cfg.sample_stride == 0 || n == steps) record(n);
  }

  ctx.phase = "output";
  write_timeseries(log, (ctx.dir / "timeseries.csv").string());
  rep.require("finite_fields", finite);
  rep.at_most("charge_drift", charge_drift, cfg.tol.charge);
  rep.at_most("mean_phit_vs_exact", mean_mode_error, cfg.tol.charge);
  if (p.beta == 0.0) rep.at_most("pfc_energy_step_increase", energy_rise, cfg.tol.energy);
  rep.metric("final_energy", log.rows.back().energy);
  rep.metric("final_full_energy", log.rows.back().full_energy);
  rep.metric("identity_residual", tracker.residual());
}

inline void decompose(Context& ctx, RunReport& rep) {
  const RunConfig& cfg = ctx.cfg;
  const ModelParams& p = cfg.model;
  ctx.phase = "initial data";
  const auto grid = make_grid(cfg.dim, cfg.n_points);
  const auto data = initial_data(cfg, grid);
  const StepScheme scheme = scheme_for(p, cfg.dt, cfg.stabilization);
  SplitRun run(initial_state(data, p.beta), p, scheme);

  ctx.phase = "integration";
  EnergyIdentityTracker tracker(p);
  tracker.push(run.full());
  RunLog log;
  std::vector<SplitSample> samples;
  fs::create_directories(ctx.dir / "snapshots");
  double recon = 0.0, recon_t = 0.0, d_mean = 0.0;
  auto record = [&](long n) {
    samples.push_back(sample_split(run));
    const auto& sm = samples.back();
    recon = std::max(recon, sm.recon_error / (1.0 + sm.full_h2));
    recon_t = std::max(recon_t, sm.recon_error_t / (1.0 + hm_norm(run.full().phi_t, -1)));
    d_mean = std::max({d_mean, std::abs(sm.d_mean_phi), std::abs(sm.d_mean_phit)});
    log.rows.push_back(log_row(run.full(), p, tracker.residual()));
    save_snapshot(make_snapshot(run.full(), p.epsilon),
                  (ctx.dir / "snapshots" / snapshot_name("state", n)).string());
  };
  record(0);
  const long steps = steps_to(cfg.horizon, cfg.dt);
  for (long n = 1; n <= steps; ++n) {
    run.advance();
    tracker.push(run.full());
    if (n % cfg.sample_stride == 0 || n == steps) record(n);
  }

  ctx.phase = "output";
  write_timeseries(log, (ctx.dir / "timeseries.csv").string());
  CsvTable t;
  t.header = {"t", "recon_error", "recon_error_t", "full_h2", "d_norm", "c_norm", "d_mean_phi", "d_mean_phit"};
  double d_min = 0.0, d_max = 0.0;
  for (const auto& s : samples) {
    t.rows.push_back({s.t, s.recon_error, s.recon_error_t, s.full_h2, s.d_norm, s.c_norm, s.d_mean_phi, s.d_mean_phit});
    d_min = std::min(d_min, s.d_min);
    d_max = std::max(d_max, s.d_max);
  }
  write_csv((ctx.dir / "decomposition.csv").string(), t);

  ctx.phase = "fit";
  rep.at_most("reconstruction_relative", recon, cfg.tol.recon);
  rep.at_most("reconstruction_relative_t", recon_t, cfg.tol.recon);
  rep.at_most("d_part_mean", d_mean, cfg.tol.charge);
  const DecayFit fit = fit_d_decay(samples, cfg.transient);
  rep.at_least("d_decay_rate_positive", fit.rate, std::numeric_limits<double>::min());
  rep.at_least("d_decay_r_squared", fit.r_squared, cfg.tol.r2_min);
  // f_k nondecreasing on the realised range of phi^d.
  bool monotone = true;
  double prev = fk_eval(d_min, p);
  for (int i = 1; i <= 1000; ++i) {
    const double v = fk_eval(d_min + (d_max - d_min) * i / 1000.0, p);
    monotone = monotone && v >= prev;
    prev = v;
  }
  rep.require("fk_monotone_on_range", monotone);
  rep.metric("d_decay_rate", fit.rate);
  rep.metric("d_decay_prefactor", fit.prefactor);
  rep.metric("max_c_norm", [&] {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.c_norm);
    return m;
  }());
}

inline void beta_sweep(Context& ctx, RunReport& rep) {
  const RunConfig& cfg = ctx.cfg;
  ctx.phase = "initial data";
  const auto grid = make_grid(cfg.dim, cfg.n_points);
  const auto data = initial_data(cfg, grid);
  BetaSweep sweep{cfg.beta_values, data.phi0, data.phi1, cfg.horizon, cfg.sample_times};
  sweep.validate(cfg.model.beta0);
  SweepOptions opt;
  opt.dt = cfg.dt;
  opt.stabilization = cfg.stabilization;

  ctx.phase = "integration";
  opt.rescale_phi1 = true;
  const auto scaled = run_sweep(sweep, cfg.model, opt);
  opt.rescale_phi1 = false;
  const auto fixed = run_sweep(sweep, cfg.model, opt);

  ctx.phase = "distances";
  const auto scan = distance_scan(scaled, sweep.sample_times);
  const double late_t0 = std::min(1.0, cfg.horizon);
  const auto layer_scaled = boundary_layer_report(layer_series(scaled), 0.0, 0.1, late_t0, cfg.horizon,
                                                  cfg.tol.layer_slack);
  const auto layer_fixed = boundary_layer_report(layer_series(fixed), 0.0, 0.1, late_t0, cfg.horizon,
                                                 cfg.tol.layer_slack);

  ctx.phase = "output";
  CsvTable d;
  d.header = {"t", "beta1", "beta2", "dist"};
  for (const auto& r : scan.records) d.rows.push_back({r.t, r.beta1, r.beta2, r.dist});
  write_csv((ctx.dir / "distances.csv").string(), d);
  CsvTable sl;
  sl.header = {"t", "slope_vs_zero", "r2_vs_zero", "slope_all_pairs", "holder_k", "holder_violations", "monotone"};
  for (const auto& s : scan.slopes) {
    sl.rows.push_back({s.t, s.vs_zero.slope, s.vs_zero.r_squared, s.all_pairs.slope, s.holder_k,
                       static_cast<double>(s.holder_violations), s.monotone ? 1.0 : 0.0});
  }
  write_csv((ctx.dir / "slopes.csv").string(), sl);
  CsvTable bl;
  bl.header = {"beta", "early_max_rescaled", "late_max_rescaled", "early_max_fixed", "late_max_fixed"};
  for (std::size_t i = 0; i < layer_scaled.beta.size(); ++i) {
    bl.rows.push_back({layer_scaled.beta[i], layer_scaled.early_max[i], layer_scaled.late_max[i],
                       layer_fixed.early_max[i], layer_fixed.late_max[i]});
  }
  write_csv((ctx.dir / "boundary_layer.csv").string(), bl);
  fs::create_directories(ctx.dir / "snapshots");
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    for (std::size_t k = 0; k < scaled[i].samples.size(); ++k) {
      save_snapshot(make_snapshot(scaled[i].samples[k], cfg.model.epsilon),
                    (ctx.dir / "snapshots" / snapshot_name("member" + std::to_string(i), static_cast<long>(k))).string());
    }
  }

  // The slope is checked at t = 1 when sampled, else at the first sample time.
  std::size_t at = 0;
  for (std::size_t k = 0; k < scan.slopes.size(); ++k) {
    if (scan.slopes[k].t == 1.0) at = k;
  }
  rep.at_least("slope_vs_zero", scan.slopes[at].vs_zero.slope, cfg.tol.slope_min);
  int violations = 0;
  bool monotone = true;
  for (const auto& s : scan.slopes) {
    violations += s.holder_violations;
    monotone = monotone && s.monotone;
    rep.metric("slope_vs_zero_t" + config_detail::format_real(s.t), s.vs_zero.slope);
    rep.metric("slope_all_pairs_t" + config_detail::format_real(s.t), s.all_pairs.slope);
  }
  rep.at_most("holder_violations", violations, 0);
  rep.require("boundary_layer_late_within_envelope", layer_fixed.late_within_envelope);
  rep.require("boundary_layer_early_grows_rescaled", layer_scaled.early_grows);
  rep.flag("distance_monotone_in_beta", monotone);
}

inline void dissipativity(Context& ctx, RunReport& rep) {
  const RunConfig& cfg = ctx.cfg;
  const ModelParams& p = cfg.model;
  ctx.phase = "initial data";
  const auto grid = make_grid(cfg.dim, cfg.n_points);
  const auto data = initial_data(cfg, grid);
  const State base = initial_state(data, p.beta);
  const std::vector<State> family{base, scale_to_norm(base, cfg.norm_ratio * x_norm(base, 0))};

  ctx.phase = "integration";
  DissipativityOptions opt;
  opt.dt = cfg.dt;
  opt.stabilization = cfg.stabilization;
  opt.sample_stride = cfg.sample_stride;
  const auto scan = dissipativity_scan(family, p, cfg.horizon, opt);

  ctx.phase = "output";
  CsvTable t;
  t.header = {"t"};
  for (std::size_t m = 0; m < scan.members.size(); ++m) t.header.push_back("member_" + std::to_string(m));
  for (std::size_t r = 0; r < scan.members.front().t.size(); ++r) {
    std::vector<double> row{scan.members.front().t[r]};
    for (const auto& m : scan.members) row.push_back(m.value[r]);
    t.rows.push_back(std::move(row));
  }
  write_csv((ctx.dir / "dissipativity.csv").string(), t);
  rep.at_most("terminal_relative_spread", scan.relative_spread, cfg.tol.spread);
  rep.metric("band_min", scan.band_min);
  rep.metric("band_max", scan.band_max);
  for (std::size_t m = 0; m < scan.members.size(); ++m) {
    rep.metric("initial_norm_" + std::to_string(m), scan.members[m].initial_norm);
    rep.metric("entry_time_" + std::to_string(m), scan.members[m].entry_time);
  }
}

inline void convergence(Context& ctx, RunReport& rep) {
  const RunConfig& cfg = ctx.cfg;
  const ModelParams& p = cfg.model;
  ctx.phase = "initial data";
  const auto grid = make_grid(cfg.dim, cfg.n_points);
  const auto data = initial_data(cfg, grid);
  std::vector<double> dts;
  for (int j = 0; j < cfg.levels; ++j) dts.push_back(std::ldexp(cfg.dt, -j));
  for (double dt : dts) (void)steps_to(cfg.horizon, dt);

  ctx.phase = "integration";
  const auto pfc = oracle_convergence(make_pfc_state(data.phi0), p.with_beta(0.0), cfg.stabilization, cfg.horizon, dts);
  std::optional<ConvergenceStudy> mpfc;
  if (p.beta > 0.0) {
    mpfc = oracle_convergence(make_state(data.phi0, data.phi1, p.beta), p, cfg.stabilization, cfg.horizon, dts);
  }

  ctx.phase = "output";
  CsvTable t;
  t.header = {"dt", "error_pfc"};
  if (mpfc) t.header.push_back("error_mpfc");
  for (std::size_t i = 0; i < dts.size(); ++i) {
    std::vector<double> row{dts[i], pfc.error[i]};
    if (mpfc) row.push_back(mpfc->error[i]);
    t.rows.push_back(std::move(row));
  }
  write_csv((ctx.dir / "convergence.csv").string(), t);
  rep.at_most("pfc_order_deviation", std::abs(pfc.fit.slope - 1.0), cfg.tol.order);
  rep.metric("pfc_order", pfc.fit.slope);
  if (mpfc) {
    rep.at_most("mpfc_order_deviation", std::abs(mpfc->fit.slope - 1.0), cfg.tol.order);
    rep.metric("mpfc_order", mpfc->fit.slope);
  }
}

inline void write_run_log(const Context& ctx) {
  std::ofstream out(ctx.dir / "run.log", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write run.log");
  for (const auto& [k, v] : ctx.cfg.resolved) out << k << '=' << v << '\n';
  for (const auto& n : ctx.cfg.notes) out << "# " << n << '\n';
}

inline void write_summary(const Context& ctx, const RunReport& rep) {
  std::ofstream out(ctx.dir / "summary.txt", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write summary.txt");
  out << "experiment=" << to_string(ctx.cfg.experiment) << '\n';
  for (const auto& [k, v] : rep.metrics) out << "metric " << k << '=' << config_detail::format_real(v) << '\n';
  for (const auto& c : rep.checks) {
    out << (c.fatal ? "check " : "flag ") << c.name << ' ' << (c.passed ? "PASS" : "FAIL") << " value="
        << config_detail::format_real(c.value) << ' ' << c.relation << ' ' << config_detail::format_real(c.limit) << '\n';
  }
  out << "status=" << (rep.passed() ? "PASS" : "FAIL") << '\n';
}

}  // namespace run_detail

// Runs the configured experiment and returns the process exit status.
inline int run(const RunConfig& cfg, const RunOptions& opt = {}) {
  run_detail::Context ctx{cfg, cfg.output_dir};
  const std::string chain = "experiment=" + to_string(cfg.experiment);
  try {
    ctx.phase = "output directory";
    std::filesystem::create_directories(ctx.dir);
    run_detail::write_run_log(ctx);
    if (!opt.quiet) {
      // The full list is in run.log; only the model defaults are echoed here.
      for (const auto& n : cfg.notes) {
        for (const char* key : {"k_split=", "beta0=", "nonlinearity=", "stabilization=", "dt=", "horizon="}) {
          if (n == "default " + std::string(key) + n.substr(n.find('=') + 1)) *opt.out << "note: " << n << '\n';
        }
      }
    }
    RunReport rep;
    switch (cfg.experiment) {
      case Experiment::simulate: run_detail::simulate(ctx, rep); break;
      case Experiment::decompose: run_detail::decompose(ctx, rep); break;
      case Experiment::beta_sweep: run_detail::beta_sweep(ctx, rep); break;
      case Experiment::dissipativity: run_detail::dissipativity(ctx, rep); break;
      case Experiment::convergence: run_detail::convergence(ctx, rep); break;
    }
    ctx.phase = "summary";
    run_detail::write_summary(ctx, rep);
    if (!opt.quiet) {
      for (const auto& c : rep.checks) {
        *opt.out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << config_detail::format_real(c.value) << ' ' << c.relation
                 << ' ' << config_detail::format_real(c.limit) << (c.fatal ? "" : ", advisory") << ")\n";
      }
    }
    return rep.passed() ? exit_ok : exit_check_failed;
  } catch (const ConfigError& e) {
    *opt.err << "error [" << chain << " > " << e.key() << "] " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    *opt.err << "error [" << chain << " > " << ctx.phase << "] " << e.what() << '\n';
    return exit_runtime_error;
  }
}

}  // namespace mpfc
