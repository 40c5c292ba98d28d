#pragma once

#include <cmath>

#include "mpfc/spectral.hpp"

namespace mpfc {

// A point (phi, phi_t) of the phase space X_0^beta.
struct State {
  Field phi;
  Field phi_t;
  double beta = 0.0;
  double time = 0.0;
};

inline State make_state(Field phi, Field phi_t, double beta, double time = 0.0) {
  if (phi.empty() || phi_t.empty()) throw InvalidField("state components must be initialised");
  if (!phi.same_grid(phi_t)) throw InvalidField("phi and phi_t live on different grids");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ContractViolation("state beta must be >= 0");
  if (!(time >= 0.0)) throw ContractViolation("state time must be >= 0");
  if (beta == 0.0) {
    for (double v : phi_t.values()) {
      if (v != 0.0) throw ContractViolation("phi_t must vanish identically when beta = 0");
    }
  }
  return State{std::move(phi), std::move(phi_t), beta, time};
}

inline State make_pfc_state(Field phi, double time = 0.0) {
  Field zero(phi.grid_ptr());
  return make_state(std::move(phi), std::move(zero), 0.0, time);
}

inline double x_norm(const State& s, int level) { return x_norm(s.phi, s.phi_t, s.beta, level); }

struct ConservedCharge {
  double value = 0.0;
};

// beta <phi_t> + <phi>.
inline ConservedCharge conserved_charge(const State& s) {
  return {s.beta * mean(s.phi_t) + mean(s.phi)};
}

}  // namespace mpfc
