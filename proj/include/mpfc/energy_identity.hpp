#pragma once

// Discrete check of the energy balance
//   E(t) = E(s) - int_s^t |phi_t - <phi_t>|_{-1}^2 + int_s^t <phi_t> int_Q f(phi),
// where E = (beta/2)|phi_t - <phi_t>|_{-1}^2 + E(phi) and <phi_t(tau)> equals
// <phi_1> e^{-tau/beta}. Time integrals use the trapezoid rule on the stored
// states. For beta = 0 the dissipation uses difference quotients of phi.

#include <cmath>
#include <optional>
#include <span>

#include "mpfc/model.hpp"

namespace mpfc {

class EnergyIdentityTracker {
 public:
  explicit EnergyIdentityTracker(ModelParams params) : params_(params) {}

  void push(const State& s) {
    const double e = full_energy(s, params_);
    if (count_ == 0) {
      first_energy_ = e;
    } else {
      const double dt = s.time - prev_time_;
      if (s.beta > 0.0) {
        const double d = dissipation(s);
        const double w = forcing(s);
        dissipated_ += 0.5 * dt * (prev_dissipation_ + d);
        forced_ += 0.5 * dt * (prev_forcing_ + w);
        prev_dissipation_ = d;
        prev_forcing_ = w;
      } else if (dt > 0.0) {
        Field q = zero_mean(s.phi - *prev_phi_);
        const double h = hm_norm(q, -1) / dt;
        dissipated_ += dt * h * h;
      }
    }
    if (count_ == 0 && s.beta > 0.0) {
      prev_dissipation_ = dissipation(s);
      prev_forcing_ = forcing(s);
    }
    if (s.beta == 0.0) prev_phi_ = s.phi;
    last_energy_ = e;
    prev_time_ = s.time;
    ++count_;
  }

  std::size_t count() const noexcept { return count_; }
  double first_energy() const noexcept { return first_energy_; }
  double last_energy() const noexcept { return last_energy_; }
  double dissipated() const noexcept { return dissipated_; }
  double forced() const noexcept { return forced_; }

  double residual() const {
    return std::abs(last_energy_ - first_energy_ + dissipated_ - forced_);
  }

 private:
  static double dissipation(const State& s) {
    const double h = hm_norm(zero_mean(s.phi_t), -1);
    return h * h;
  }

  double forcing(const State& s) const { return mean(s.phi_t) * integrated_f(s.phi, params_); }

  ModelParams params_;
  std::size_t count_ = 0;
  double first_energy_ = 0.0;
  double last_energy_ = 0.0;
  double dissipated_ = 0.0;
  double forced_ = 0.0;
  double prev_time_ = 0.0;
  double prev_dissipation_ = 0.0;
  double prev_forcing_ = 0.0;
  std::optional<Field> prev_phi_;
};

inline double energy_identity_residual(std::span<const State> trajectory, const ModelParams& p) {
  if (trajectory.size() < 2) {
    throw ContractViolation("energy_identity_residual needs at least two states");
  }
  EnergyIdentityTracker tracker(p);
  for (const auto& s : trajectory) tracker.push(s);
  return tracker.residual();
}

}  // namespace mpfc
