#pragma once

// First-order IMEX steppers for PFC and MPFC. The stiff linear operator
// Lap(Lap^2 + 2 Lap + k) is implicit, the remainder Lap(f(phi) - k phi) is
// explicit, and the spatial means advance by the exact solution of
// beta m'' + m' = 0.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "mpfc/model.hpp"

namespace mpfc {

enum class SchemeKind { pfc_imex1, mpfc_imex1 };

struct StepScheme {
  SchemeKind kind = SchemeKind::mpfc_imex1;
  double dt = 1e-3;
  // Constant k of the implicit operator; ModelParams::k_split when unset.
  std::optional<double> stabilization;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be > 0");
    if (stabilization && !std::isfinite(*stabilization)) {
      throw ConfigError("stabilization", "must be finite");
    }
  }

  double k(const ModelParams& p) const { return stabilization.value_or(p.k_split); }
};

inline StepScheme scheme_for(const ModelParams& p, double dt, std::optional<double> stabilization = {}) {
  StepScheme s{p.beta > 0.0 ? SchemeKind::mpfc_imex1 : SchemeKind::pfc_imex1, dt, stabilization};
  s.validate();
  return s;
}

namespace detail {

inline void check_implicit_symbol(const Grid& grid, double k) {
  const auto lambda = grid.lambda();
  for (std::size_t i = 1; i < lambda.size(); ++i) {
    const double lam = lambda[i];
    if (lam * lam - 2.0 * lam + k < 0.0) {
      const auto& kap = grid.kappa(i);
      std::ostringstream msg;
      msg << "implicit symbol lambda^2 - 2 lambda + k is negative at mode (" << kap[0];
      for (int d = 1; d < grid.dim(); ++d) msg << ", " << kap[static_cast<std::size_t>(d)];
      msg << ") with k = " << k;
      throw ConfigError("stabilization", msg.str());
    }
  }
}

// Advances (phi, phi_t) by one step given the spectrum of the explicit
// chemical-potential remainder g, i.e. the update of
//   beta v_t + v = Lap[(Lap^2 + 2 Lap + k) phi] + Lap g.
// For beta = 0 the phi_t component stays zero.
inline void imex_advance(State& s, double dt, double k, const Field& explicit_part) {
  const Grid& grid = s.phi.grid();
  check_implicit_symbol(grid, k);
  const auto lambda = grid.lambda();
  const auto g = explicit_part.spectrum();
  auto phi = s.phi.mutable_spectrum();

  if (s.beta == 0.0) {
    for (std::size_t i = 1; i < phi.size(); ++i) {
      const double lam = lambda[i];
      const double sym = lam * (lam * lam - 2.0 * lam + k);
      phi[i] = (phi[i] - dt * lam * g[i]) / (1.0 + dt * sym);
    }
  } else {
    auto v = s.phi_t.mutable_spectrum();
    const double beta = s.beta;
    const double inertia = beta / dt;
    for (std::size_t i = 1; i < phi.size(); ++i) {
      const double lam = lambda[i];
      const double sym = lam * (lam * lam - 2.0 * lam + k);
      const double denom = inertia + 1.0 + dt * sym;
      // dt > 0, beta > 0 and sym >= 0 keep denom >= 1.
      const Complex v_new = (inertia * v[i] - sym * phi[i] - lam * g[i]) / denom;
      v[i] = v_new;
      phi[i] += dt * v_new;
    }
    const double decay = std::exp(-dt / beta);
    const double gained = -std::expm1(-dt / beta);
    phi[0] += beta * v[0] * gained;
    v[0] *= decay;
  }
  s.time += dt;
}

}  // namespace detail

// Explicit remainder f(phi) - k phi, cubic dealiased.
inline Field explicit_remainder(const Field& phi, const ModelParams& p, double k) {
  Field out = cubic_term(phi, p);
  auto s = out.mutable_spectrum();
  const auto ph = phi.spectrum();
  const double c = 1.0 - p.epsilon - k;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += c * ph[i];
  return out;
}

inline State step_pfc(const State& state, const StepScheme& scheme, const ModelParams& p) {
  scheme.validate();
  if (state.beta != 0.0) throw ContractViolation("step_pfc requires beta = 0");
  const double k = scheme.k(p);
  State next = state;
  detail::imex_advance(next, scheme.dt, k, explicit_remainder(state.phi, p, k));
  return next;
}

inline State step_mpfc(const State& state, const StepScheme& scheme, const ModelParams& p) {
  scheme.validate();
  if (!(state.beta > 0.0)) throw ContractViolation("step_mpfc requires beta > 0");
  const double k = scheme.k(p);
  State next = state;
  detail::imex_advance(next, scheme.dt, k, explicit_remainder(state.phi, p, k));
  return next;
}

// Routes beta = 0 to the PFC stepper.
inline State step(const State& state, const StepScheme& scheme, const ModelParams& p) {
  return state.beta == 0.0 ? step_pfc(state, scheme, p) : step_mpfc(state, scheme, p);
}

}  // namespace mpfc
