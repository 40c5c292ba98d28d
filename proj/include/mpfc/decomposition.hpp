#pragma once

// Splitting of an MPFC trajectory into a part phi^d that decays
// exponentially and a remainder phi^c, integrated in lockstep with the full
// solution. Both pieces use the same IMEX machinery as step_mpfc; with the
// explicit terms chosen below their sum reproduces the full update exactly
// up to rounding.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mpfc/fit.hpp"
#include "mpfc/integrators.hpp"

namespace mpfc {

inline constexpr double zero_mean_tol = 1e-12;

// Decaying part: f replaced by the monotone f_k = f + k id, zero means.
inline State step_d(const State& d, const StepScheme& scheme, const ModelParams& p) {
  scheme.validate();
  if (std::abs(mean(d.phi)) > zero_mean_tol || std::abs(mean(d.phi_t)) > zero_mean_tol) {
    throw ContractViolation("step_d: both components must have zero mean");
  }
  const double big_k = scheme.k(p);
  // f_k(phi^d) - K phi^d
  Field g = cubic_term(d.phi, p);
  {
    auto s = g.mutable_spectrum();
    const auto ph = d.phi.spectrum();
    const double c = 1.0 - p.epsilon + p.k_split - big_k;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += c * ph[i];
  }
  State next = d;
  detail::imex_advance(next, scheme.dt, big_k, g);
  return next;
}

// Remainder, driven by the full solution phi_full at the same time level:
//   f_k(phi) - f_k(phi - phi^c) - k phi  (means drop out under Lap).
inline State step_c(const State& c, const Field& phi_full, const StepScheme& scheme,
                    const ModelParams& p) {
  scheme.validate();
  if (!c.phi.same_grid(phi_full)) throw InvalidField("step_c: phi_full lives on a different grid");
  const double big_k = scheme.k(p);
  Field g(phi_full.grid_ptr());
  if (p.nonlinearity == Nonlinearity::cubic) {
    auto gv = g.mutable_values();
    const auto full = phi_full.values();
    const auto pc = c.phi.values();
    for (std::size_t i = 0; i < gv.size(); ++i) {
      const double a = full[i];
      const double b = full[i] - pc[i];
      gv[i] = a * a * a - b * b * b;
    }
    dealias_in_place(g.mutable_spectrum(), g.grid());
  }
  {
    auto s = g.mutable_spectrum();
    const auto pc = c.phi.spectrum();
    const auto full = phi_full.spectrum();
    const double cc = 1.0 - p.epsilon + p.k_split - big_k;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += cc * pc[i] - p.k_split * full[i];
  }
  State next = c;
  detail::imex_advance(next, scheme.dt, big_k, g);
  return next;
}

// Full, decaying and remainder states advanced together.
class SplitRun {
 public:
  SplitRun(State initial, ModelParams params, StepScheme scheme)
      : params_(params), scheme_(scheme), full_(std::move(initial)) {
    if (!(full_.beta > 0.0)) throw ContractViolation("SplitRun requires beta > 0");
    scheme_.validate();
    const auto grid = full_.phi.grid_ptr();
    d_ = make_state(zero_mean(full_.phi), zero_mean(full_.phi_t), full_.beta, full_.time);
    c_ = make_state(Field::constant(grid, mean(full_.phi)), Field::constant(grid, mean(full_.phi_t)),
                    full_.beta, full_.time);
  }

  void advance() {
    State d_next = step_d(d_, scheme_, params_);
    State c_next = step_c(c_, full_.phi, scheme_, params_);
    full_ = step_mpfc(full_, scheme_, params_);
    d_ = std::move(d_next);
    c_ = std::move(c_next);
  }

  const State& full() const noexcept { return full_; }
  const State& d_part() const noexcept { return d_; }
  const State& c_part() const noexcept { return c_; }
  const ModelParams& params() const noexcept { return params_; }
  const StepScheme& scheme() const noexcept { return scheme_; }

  // |phi - (phi^d + phi^c)|_2
  double reconstruction_error() const { return hm_norm(full_.phi - d_.phi - c_.phi, 2); }

  // |phi_t - (phi^d_t + phi^c_t)|_{-1}
  double reconstruction_error_t() const { return hm_norm(full_.phi_t - d_.phi_t - c_.phi_t, -1); }

  double d_norm() const { return x_norm(d_, 0); }
  double c_norm(int level = 1) const { return x_norm(c_, level); }

 private:
  ModelParams params_;
  StepScheme scheme_;
  State full_;
  State d_;
  State c_;
};

struct SplitSample {
  double t = 0.0;
  double recon_error = 0.0;    // H^2 norm of phi - (phi^d + phi^c)
  double recon_error_t = 0.0;  // H^{-1} norm of the phi_t mismatch
  double full_h2 = 0.0;        // |phi|_2
  double d_norm = 0.0;         // X_0^beta norm of (phi^d, phi^d_t)
  double c_norm = 0.0;         // X_1^beta norm of (phi^c, phi^c_t)
  double d_mean_phi = 0.0;
  double d_mean_phit = 0.0;
  double d_min = 0.0;          // realised range of phi^d
  double d_max = 0.0;
};

inline SplitSample sample_split(const SplitRun& run) {
  SplitSample s;
  s.t = run.full().time;
  s.recon_error = run.reconstruction_error();
  s.recon_error_t = run.reconstruction_error_t();
  s.full_h2 = hm_norm(run.full().phi, 2);
  s.d_norm = run.d_norm();
  s.c_norm = run.c_norm(1);
  s.d_mean_phi = mean(run.d_part().phi);
  s.d_mean_phit = mean(run.d_part().phi_t);
  const auto v = run.d_part().phi.values();
  s.d_min = *std::min_element(v.begin(), v.end());
  s.d_max = *std::max_element(v.begin(), v.end());
  return s;
}

// Runs to `horizon`, sampling every `stride` steps (and at t = 0).
inline std::vector<SplitSample> run_split(State initial, const ModelParams& p, const StepScheme& scheme,
                                          double horizon, int stride) {
  if (stride < 1) throw ConfigError("sample_stride", "must be >= 1");
  SplitRun run(std::move(initial), p, scheme);
  const auto steps = static_cast<long>(std::llround(horizon / scheme.dt));
  std::vector<SplitSample> out;
  out.push_back(sample_split(run));
  for (long n = 1; n <= steps; ++n) {
    run.advance();
    if (n % stride == 0 || n == steps) out.push_back(sample_split(run));
  }
  return out;
}

// Decay fit of the X_0^beta norm of phi^d over samples with t >= transient.
inline DecayFit fit_d_decay(const std::vector<SplitSample>& samples, double transient) {
  std::vector<double> t, v;
  for (const auto& s : samples) {
    if (s.t >= transient) {
      t.push_back(s.t);
      v.push_back(s.d_norm);
    }
  }
  return fit_decay_rate(t, v);
}

}  // namespace mpfc
