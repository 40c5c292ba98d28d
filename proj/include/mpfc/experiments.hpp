#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mpfc/fit.hpp"
#include "mpfc/integrators.hpp"
#include "mpfc/oracle.hpp"
#include "mpfc/parallel.hpp"

namespace mpfc {

// ---------------------------------------------------------------- initial data

struct InitialDataSpec {
  double mean_phi0 = 0.1;
  double mean_phi1 = 0.1;
  double amplitude = 0.1;  // max |perturbation| on the grid
  int max_mode = 8;        // perturbation supported on |kappa_j| <= max_mode
};

// Real field with the given mean plus a random perturbation supported on
// 0 < |kappa_j| <= max_mode, inside the dealiasing band, scaled so that its
// largest grid value in magnitude equals `amplitude`.
inline Field band_limited_field(const GridPtr& grid, double mean_value, double amplitude, int max_mode,
                                std::mt19937_64& rng) {
  if (!std::isfinite(mean_value)) throw ConfigError("mean", "must be finite");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ConfigError("amplitude", "must be >= 0");
  if (max_mode < 1) throw ConfigError("max_mode", "must be >= 1");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Field pert(grid);
  auto s = pert.mutable_spectrum();
  const auto mask = grid->dealias_mask();
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto& k = grid->kappa(i);
    const bool in_band = mask[i] && std::abs(k[0]) <= max_mode && std::abs(k[1]) <= max_mode &&
                         std::abs(k[2]) <= max_mode;
    const std::size_t j = grid->mirror(i);
    if (!in_band || j < i) continue;
    const double re = unit(rng);
    const double im = unit(rng);
    if (j == i) {
      s[i] = Complex(re, 0.0);
    } else {
      s[i] = Complex(re, im);
      s[j] = Complex(re, -im);
    }
  }
  const auto v = pert.values();
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (peak > 0.0) pert *= amplitude / peak;
  Field out = Field::constant(grid, mean_value);
  out += pert;
  return out;
}

struct InitialData {
  Field phi0;
  Field phi1;
  std::uint64_t seed = 0;
};

inline InitialData make_initial_data(const GridPtr& grid, const InitialDataSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Field phi0 = band_limited_field(grid, spec.mean_phi0, spec.amplitude, spec.max_mode, rng);
  Field phi1 = band_limited_field(grid, spec.mean_phi1, spec.amplitude, spec.max_mode, rng);
  return {std::move(phi0), std::move(phi1), seed};
}

// ------------------------------------------------------------------ rescaling

// (u, v) in X^beta  ->  (u, sqrt(beta/beta0) v) in X^beta0.
inline State rescale(const State& s, double beta0) {
  if (!(beta0 > 0.0) || !std::isfinite(beta0)) throw ContractViolation("rescale requires beta0 > 0");
  if (s.beta == 0.0) throw ContractViolation("rescale is undefined for beta = 0");
  if (!(s.beta > 0.0) || s.beta > beta0) throw ContractViolation("rescale requires 0 < beta <= beta0");
  State out = s;
  out.phi_t *= std::sqrt(s.beta / beta0);
  out.beta = beta0;
  return out;
}

// Inverse of rescale: `s` is tagged with beta0.
inline State unrescale(const State& s, double beta) {
  if (!(beta > 0.0) || beta > s.beta) throw ContractViolation("unrescale requires 0 < beta <= beta0");
  State out = s;
  out.phi_t *= std::sqrt(s.beta / beta);
  out.beta = beta;
  return out;
}

// Common-space image used for cross-beta comparisons; beta = 0 maps to (u, 0).
inline State to_common_space(const State& s, double beta0) {
  if (s.beta == 0.0) {
    State out = s;
    out.phi_t = Field(s.phi.grid_ptr());
    out.beta = beta0;
    return out;
  }
  return rescale(s, beta0);
}

// ------------------------------------------------------------------ the sweep

struct BetaSweep {
  std::vector<double> beta_values;  // strictly descending, terminal 0
  Field shared_phi0;
  Field shared_phi1;
  double horizon = 4.0;
  std::vector<double> sample_times{1.0, 2.0, 4.0};

  void validate(double beta0) const {
    if (beta_values.size() < 2) throw ConfigError("beta_values", "need at least one positive beta and 0");
    for (std::size_t i = 0; i < beta_values.size(); ++i) {
      const double b = beta_values[i];
      if (!std::isfinite(b)) throw ConfigError("beta_values", "entries must be finite");
      if (i + 1 < beta_values.size()) {
        if (!(b > 0.0)) throw ConfigError("beta_values", "all entries but the last must be > 0");
        if (!(b > beta_values[i + 1])) throw ConfigError("beta_values", "must be sorted strictly descending");
      }
    }
    if (beta_values.back() != 0.0) throw ConfigError("beta_values", "last entry must be 0");
    if (beta_values.front() > beta0) throw ConfigError("beta_values", "entries must be <= beta0");
    if (shared_phi0.empty() || shared_phi1.empty()) throw InvalidField("sweep initial data missing");
    if (!shared_phi0.same_grid(shared_phi1)) throw InvalidField("sweep initial data on different grids");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon", "must be > 0");
    if (sample_times.empty()) throw ConfigError("sample_times", "must not be empty");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
      const double t = sample_times[i];
      if (!(t > 0.0) || t > horizon) throw ConfigError("sample_times", "entries must lie in (0, horizon]");
      if (i > 0 && !(t > sample_times[i - 1])) throw ConfigError("sample_times", "must be increasing");
    }
  }
};

struct SweepOptions {
  double dt = 1e-4;
  std::optional<double> stabilization;
  bool rescale_phi1 = true;  // start from (phi0, sqrt(beta0/beta) phi1)
  unsigned workers = worker_count();
};

// One member of the sweep: common-space samples at the sweep's sample times
// and |phi_t|_{-1} at every step (beta > 0 only).
struct SweepRun {
  double beta = 0.0;
  std::vector<State> samples;
  std::vector<double> layer_t;
  std::vector<double> layer_value;
};

inline State sweep_initial_state(const BetaSweep& sweep, std::size_t member, double beta0, bool rescale_phi1) {
  const double beta = sweep.beta_values.at(member);
  if (beta == 0.0) return make_pfc_state(sweep.shared_phi0);
  Field v = sweep.shared_phi1;
  if (rescale_phi1) v *= std::sqrt(beta0 / beta);
  return make_state(sweep.shared_phi0, std::move(v), beta);
}

inline long steps_to(double t, double dt) {
  const double n = t / dt;
  const long r = std::lround(n);
  if (std::abs(n - static_cast<double>(r)) > 1e-6 * std::max(1.0, n)) {
    throw ConfigError("dt", "sample times must be integer multiples of dt");
  }
  return r;
}

inline SweepRun run_sweep_member(const BetaSweep& sweep, std::size_t member, const ModelParams& params,
                                 const SweepOptions& opt) {
  const double beta = sweep.beta_values.at(member);
  const ModelParams p = params.with_beta(beta);
  const StepScheme scheme = scheme_for(p, opt.dt, opt.stabilization);
  State s = sweep_initial_state(sweep, member, p.beta0, opt.rescale_phi1);

  SweepRun run;
  run.beta = beta;
  std::vector<long> sample_steps;
  for (double t : sweep.sample_times) sample_steps.push_back(steps_to(t, opt.dt));
  const long total = steps_to(sweep.horizon, opt.dt);
  auto record_layer = [&] {
    if (beta > 0.0) {
      run.layer_t.push_back(s.time);
      run.layer_value.push_back(hm_norm(s.phi_t, -1));
    }
  };
  record_layer();
  std::size_t next = 0;
  for (long n = 1; n <= total; ++n) {
    s = step(s, scheme, p);
    s.time = static_cast<double>(n) * opt.dt;  // avoid drift from repeated addition
    record_layer();
    while (next < sample_steps.size() && sample_steps[next] == n) {
      run.samples.push_back(to_common_space(s, p.beta0));
      ++next;
    }
  }
  return run;
}

// Runs every member, concurrently when allowed; results are stored by member
// index so the output does not depend on scheduling.
inline std::vector<SweepRun> run_sweep(const BetaSweep& sweep, const ModelParams& params, const SweepOptions& opt) {
  sweep.validate(params.beta0);
  // Bring both representations of the shared data up to date before any
  // worker copies them.
  (void)sweep.shared_phi0.values();
  (void)sweep.shared_phi0.spectrum();
  (void)sweep.shared_phi1.values();
  (void)sweep.shared_phi1.spectrum();
  std::vector<SweepRun> runs(sweep.beta_values.size());
  parallel_for(runs.size(), opt.workers,
               [&](std::size_t i) { runs[i] = run_sweep_member(sweep, i, params, opt); });
  return runs;
}

// ---------------------------------------------------------- distance records

struct DistanceRecord {
  double t = 0.0;
  double beta1 = 0.0;  // beta1 > beta2
  double beta2 = 0.0;
  double dist = 0.0;
};

// X_0^beta0 norm of the difference of two common-space states.
inline double common_space_distance(const State& a, const State& b) {
  if (a.beta != b.beta) throw ContractViolation("distance requires states in the same space");
  return x_norm(a.phi - b.phi, a.phi_t - b.phi_t, a.beta, 0);
}

struct SlopeSummary {
  double t = 0.0;
  LineFit vs_zero;    // log dist(beta, 0) against log beta
  LineFit all_pairs;  // log dist against log (beta1 - beta2) over every pair
  double holder_k = 0.0;  // dist / gap^{1/6} at the pair with the largest gap
  int holder_violations = 0;
  bool monotone = true;   // dist to beta = 0 nonincreasing as beta decreases
};

struct BetaScanReport {
  std::vector<double> beta_values;
  std::vector<DistanceRecord> records;  // ordered by (t, beta1, beta2) as swept
  std::vector<SlopeSummary> slopes;     // one per sample time
};

inline constexpr double holder_exponent = 1.0 / 6.0;
inline constexpr double monotone_noise_floor = 1e-9;

namespace detail {

inline LineFit safe_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(x[i]);
      ly.push_back(y[i]);
    }
  }
  if (lx.size() < 2) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan};
  }
  return fit_log_log(lx, ly);
}

}  // namespace detail

// Every pair of members at every sample time.
inline BetaScanReport distance_scan(const std::vector<SweepRun>& runs, std::span<const double> sample_times) {
  BetaScanReport rep;
  const std::size_t m = runs.size();
  if (m < 2) throw ContractViolation("distance scan needs at least two runs");
  for (std::size_t i = 0; i < m; ++i) {
    rep.beta_values.push_back(runs[i].beta);
    if (runs[i].samples.size() != sample_times.size()) throw ContractViolation("run is missing samples");
    if (i > 0 && !(runs[i].beta < runs[i - 1].beta)) throw ContractViolation("runs must be sorted strictly descending");
  }
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    const double t = sample_times[k];
    std::vector<double> gap, dist, beta_vs0, dist_vs0;
    const std::size_t first = rep.records.size();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double d = common_space_distance(runs[i].samples[k], runs[j].samples[k]);
        rep.records.push_back({t, runs[i].beta, runs[j].beta, d});
        gap.push_back(runs[i].beta - runs[j].beta);
        dist.push_back(d);
        if (j == m - 1 && runs[j].beta == 0.0) {
          beta_vs0.push_back(runs[i].beta);
          dist_vs0.push_back(d);
        }
      }
    }
    SlopeSummary s;
    s.t = t;
    s.vs_zero = detail::safe_log_log(beta_vs0, dist_vs0);
    s.all_pairs = detail::safe_log_log(gap, dist);
    // The pair (first, last) has the largest gap.
    const auto& coarse = rep.records[first + (m - 2)];
    s.holder_k = coarse.dist / std::pow(coarse.beta1 - coarse.beta2, holder_exponent);
    for (std::size_t r = first; r < rep.records.size(); ++r) {
      const auto& rec = rep.records[r];
      const double bound = s.holder_k * std::pow(rec.beta1 - rec.beta2, holder_exponent);
      if (rec.dist > bound * (1.0 + 1e-12)) ++s.holder_violations;
    }
    for (std::size_t i = 1; i < dist_vs0.size(); ++i) {
      if (dist_vs0[i] > dist_vs0[i - 1] + monotone_noise_floor) s.monotone = false;
    }
    rep.slopes.push_back(s);
  }
  return rep;
}

inline BetaScanReport beta_distance_scan(const BetaSweep& sweep, const ModelParams& params, SweepOptions opt = {}) {
  opt.rescale_phi1 = true;
  const auto runs = run_sweep(sweep, params, opt);
  return distance_scan(runs, sweep.sample_times);
}

// -------------------------------------------------------------- boundary layer

struct BoundaryLayerSeries {
  double beta = 0.0;
  std::vector<double> t;
  std::vector<double> value;  // |phi_t(t)|_{-1}
};

inline BoundaryLayerSeries boundary_layer_metric(std::span<const State> trajectory, double beta) {
  if (!(beta > 0.0)) throw ContractViolation("boundary layer metric requires beta > 0");
  BoundaryLayerSeries out;
  out.beta = beta;
  for (const auto& s : trajectory) {
    out.t.push_back(s.time);
    out.value.push_back(hm_norm(s.phi_t, -1));
  }
  return out;
}

// Max of the series over t in [t0, t1]; NaN if no sample falls inside.
inline double window_max(const BoundaryLayerSeries& s, double t0, double t1) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] >= t0 - 1e-12 && s.t[i] <= t1 + 1e-12) {
      best = std::isnan(best) ? s.value[i] : std::max(best, s.value[i]);
    }
  }
  return best;
}

struct BoundaryLayerReport {
  std::vector<double> beta;        // positive members, descending
  std::vector<double> early_max;   // max over the early window
  std::vector<double> late_max;    // max over the late window
  double envelope = 0.0;           // slack x late max of the largest beta
  bool late_within_envelope = true;
  bool early_grows = true;         // early max strictly increasing as beta decreases
};

inline BoundaryLayerReport boundary_layer_report(const std::vector<BoundaryLayerSeries>& series, double early_t0,
                                                 double early_t1, double late_t0, double late_t1,
                                                 double slack = 2.0) {
  if (series.empty()) throw ContractViolation("boundary layer report needs at least one series");
  BoundaryLayerReport rep;
  for (const auto& s : series) {
    rep.beta.push_back(s.beta);
    rep.early_max.push_back(window_max(s, early_t0, early_t1));
    rep.late_max.push_back(window_max(s, late_t0, late_t1));
  }
  rep.envelope = slack * rep.late_max.front();
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(rep.late_max[i] < rep.envelope) && !(rep.late_max[i] == 0.0 && rep.envelope == 0.0)) {
      rep.late_within_envelope = false;
    }
    if (i > 0 && !(rep.early_max[i] > rep.early_max[i - 1])) rep.early_grows = false;
  }
  return rep;
}

inline std::vector<BoundaryLayerSeries> layer_series(const std::vector<SweepRun>& runs) {
  std::vector<BoundaryLayerSeries> out;
  for (const auto& r : runs) {
    if (r.beta > 0.0) out.push_back({r.beta, r.layer_t, r.layer_value});
  }
  return out;
}

struct BoundaryLayerWindows {
  double early_t0 = 0.0;
  double early_t1 = 0.1;
  double late_t0 = 1.0;
  double late_t1 = 4.0;
  double slack = 2.0;
};

inline BoundaryLayerReport boundary_layer_scan(const BetaSweep& sweep, const ModelParams& params,
                                               SweepOptions opt, const BoundaryLayerWindows& w = {}) {
  const auto runs = run_sweep(sweep, params, opt);
  return boundary_layer_report(layer_series(runs), w.early_t0, w.early_t1, w.late_t0, w.late_t1, w.slack);
}

// ------------------------------------------------------------- dissipativity

// |phi|_2^2 + beta |zero-mean phi_t|_{-1}^2
inline double dissipation_functional(const State& s) {
  double acc = hm_norm_squared(s.phi, SobolevLevel(2));
  if (s.beta > 0.0) acc += s.beta * hm_norm_squared(zero_mean(s.phi_t), SobolevLevel(-1));
  return acc;
}

// Scales the zero-mean parts of (phi, phi_t) so the X_0^beta norm equals
// `target`; the means are kept.
inline State scale_to_norm(const State& s, double target) {
  const Field mp = Field::constant(s.phi.grid_ptr(), mean(s.phi));
  const Field mv = Field::constant(s.phi.grid_ptr(), mean(s.phi_t));
  const Field pp = s.phi - mp;
  const Field pv = s.phi_t - mv;
  const double fixed = std::pow(x_norm(mp, mv, s.beta, 0), 2);
  const double pert = std::pow(x_norm(pp, pv, s.beta, 0), 2);
  const double need = target * target - fixed;
  if (!(pert > 0.0) || !(need >= 0.0)) throw ContractViolation("target norm is not reachable by scaling");
  const double a = std::sqrt(need / pert);
  return make_state(mp + pp * a, mv + pv * a, s.beta, s.time);
}

struct DissipativityMember {
  double initial_norm = 0.0;  // X_0^beta
  std::vector<double> t;
  std::vector<double> value;
  double terminal = 0.0;
  double entry_time = 0.0;  // first sample after which value stays below the band ceiling
};

struct DissipativityReport {
  std::vector<DissipativityMember> members;
  double band_min = 0.0;
  double band_max = 0.0;
  double relative_spread = 0.0;  // (band_max - band_min) / band_max
};

struct DissipativityOptions {
  double dt = 1e-3;
  std::optional<double> stabilization;
  int sample_stride = 100;
  double entry_slack = 0.1;
  unsigned workers = worker_count();
};

inline DissipativityReport dissipativity_scan(const std::vector<State>& family, const ModelParams& params,
                                              double horizon, const DissipativityOptions& opt = {}) {
  if (family.empty()) throw ContractViolation("dissipativity scan needs initial data");
  if (opt.sample_stride < 1) throw ConfigError("sample_stride", "must be >= 1");
  for (const auto& s : family) {
    (void)s.phi.values();
    (void)s.phi.spectrum();
    (void)s.phi_t.values();
    (void)s.phi_t.spectrum();
  }
  DissipativityReport rep;
  rep.members.resize(family.size());
  const long total = steps_to(horizon, opt.dt);
  parallel_for(family.size(), opt.workers, [&](std::size_t i) {
    const ModelParams p = params.with_beta(family[i].beta);
    const StepScheme scheme = scheme_for(p, opt.dt, opt.stabilization);
    State s = family[i];
    auto& m = rep.members[i];
    m.initial_norm = x_norm(s, 0);
    m.t.push_back(s.time);
    m.value.push_back(dissipation_functional(s));
    for (long n = 1; n <= total; ++n) {
      s = step(s, scheme, p);
      if (n % opt.sample_stride == 0 || n == total) {
        m.t.push_back(s.time);
        m.value.push_back(dissipation_functional(s));
      }
    }
    m.terminal = m.value.back();
  });
  rep.band_min = rep.members.front().terminal;
  rep.band_max = rep.band_min;
  for (const auto& m : rep.members) {
    rep.band_min = std::min(rep.band_min, m.terminal);
    rep.band_max = std::max(rep.band_max, m.terminal);
  }
  rep.relative_spread = rep.band_max > 0.0 ? (rep.band_max - rep.band_min) / rep.band_max : 0.0;
  const double ceiling = rep.band_max * (1.0 + opt.entry_slack);
  for (auto& m : rep.members) {
    std::size_t k = m.value.size();
    while (k > 0 && m.value[k - 1] <= ceiling) --k;
    m.entry_time = k < m.value.size() ? m.t[k] : m.t.back();
  }
  return rep;
}

// --------------------------------------------------------------- convergence

// Exact solution of the linearised equation at time t, mode by mode.
inline State oracle_state(const State& initial, const ModelParams& p, double t) {
  const Grid& grid = initial.phi.grid();
  const auto lambda = grid.lambda();
  const auto c0 = initial.phi.spectrum();
  const auto c1 = initial.phi_t.spectrum();
  State out = initial;
  auto phi = out.phi.mutable_spectrum();
  auto v = out.phi_t.mutable_spectrum();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const LinearModeOracle o{lambda[i], initial.beta, p.epsilon};
    const auto r = oracle_solve<Complex>(o, c0[i], c1[i], t);
    phi[i] = r.c;
    v[i] = initial.beta > 0.0 ? r.c_dot : Complex(0.0);
  }
  out.time = initial.time + t;
  return out;
}

struct ConvergenceStudy {
  std::vector<double> dt;
  std::vector<double> error;  // L2 error of phi against the oracle at the horizon
  LineFit fit;                // log2 error against log2 dt
};

inline ConvergenceStudy oracle_convergence(const State& initial, const ModelParams& p,
                                           std::optional<double> stabilization, double horizon,
                                           std::span<const double> dts) {
  if (p.nonlinearity != Nonlinearity::linear) {
    throw ConfigError("nonlinearity", "oracle convergence needs the linear model");
  }
  if (dts.size() < 2) throw ConfigError("levels", "need at least two time steps");
  const State exact = oracle_state(initial, p, horizon);
  ConvergenceStudy out;
  for (double dt : dts) {
    const StepScheme scheme = scheme_for(p, dt, stabilization);
    State s = initial;
    const long n = steps_to(horizon, dt);
    for (long i = 0; i < n; ++i) s = step(s, scheme, p);
    out.dt.push_back(dt);
    out.error.push_back(hm_norm(s.phi - exact.phi, 0));
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    x.push_back(std::log2(out.dt[i]));
    y.push_back(std::log2(out.error[i]));
  }
  out.fit = fit_line(x, y);
  return out;
}

}  // namespace mpfc
