#pragma once

// The nonlinearity, its monotone splitting, the free energy and the exact
// laws obeyed by the spatial means.

#include <cmath>
#include <utility>

#include "mpfc/params.hpp"
#include "mpfc/state.hpp"

namespace mpfc {

inline double cubic_coefficient(const ModelParams& p) {
  return p.nonlinearity == Nonlinearity::cubic ? 1.0 : 0.0;
}

// f(s) = s^3 + (1 - epsilon) s
inline double f_eval(double s, const ModelParams& p) {
  return cubic_coefficient(p) * s * s * s + (1.0 - p.epsilon) * s;
}

// f_k(s) = f(s) + k s
inline double fk_eval(double s, const ModelParams& p) { return f_eval(s, p) + p.k_split * s; }

// F(s) = (1 - epsilon)/2 s^2 + s^4/4, bounded below by -(1 - epsilon)^2/4.
inline double free_energy_density(double s, const ModelParams& p) {
  const double s2 = s * s;
  return 0.5 * (1.0 - p.epsilon) * s2 + 0.25 * cubic_coefficient(p) * s2 * s2;
}

// Dealiased transform of the pointwise map g applied to the samples of u.
template <typename Map>
Field dealiased_pointwise(const Field& u, Map&& g) {
  Field out = u;
  auto v = out.mutable_values();
  for (auto& x : v) x = g(x);
  dealias_in_place(out.mutable_spectrum(), out.grid());
  return out;
}

// Dealiased cubic part of f; zero when the cubic is disabled.
inline Field cubic_term(const Field& phi, const ModelParams& p) {
  if (p.nonlinearity == Nonlinearity::linear) return Field(phi.grid_ptr());
  return dealiased_pointwise(phi, [](double s) { return s * s * s; });
}

// E(phi) = int 1/2 |Lap phi|^2 - |grad phi|^2 + F(phi). Quadratic part is
// exact in Fourier space; the F term uses the grid average.
inline double energy(const Field& phi, const ModelParams& p) {
  const auto s = phi.spectrum();
  const auto lambda = phi.grid().lambda();
  double quad = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    quad += (0.5 * lambda[i] * lambda[i] - lambda[i]) * std::norm(s[i]);
  }
  double pot = 0.0;
  for (double v : phi.values()) pot += free_energy_density(v, p);
  return quad + pot / static_cast<double>(phi.size());
}

// (beta/2) |phi_t - <phi_t>|_{-1}^2 + E(phi)
inline double full_energy(const State& s, const ModelParams& p) {
  double kinetic = 0.0;
  if (s.beta > 0.0) {
    const double h = hm_norm(zero_mean(s.phi_t), -1);
    kinetic = 0.5 * s.beta * h * h;
  }
  return kinetic + energy(s.phi, p);
}

// int_Q f(phi) dx by grid quadrature.
inline double integrated_f(const Field& phi, const ModelParams& p) {
  double acc = 0.0;
  for (double v : phi.values()) acc += f_eval(v, p);
  return acc / static_cast<double>(phi.size());
}

// Variational derivative Lap^2 phi + 2 Lap phi + f(phi), sampled pointwise
// (no dealiasing), for checking the gradient-flow structure.
inline Field chemical_potential(const Field& phi, const ModelParams& p) {
  Field linear = apply_multiplier(phi, [](double lam, std::size_t) { return lam * lam - 2.0 * lam; });
  Field out = phi;
  auto v = out.mutable_values();
  const auto lv = linear.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = lv[i] + f_eval(v[i], p);
  return out;
}

struct MeanModes {
  double phi = 0.0;
  double phi_t = 0.0;
};

// Closed-form means: <phi_t> = m1 e^{-t/beta}, <phi> = m0 + beta m1 (1 - e^{-t/beta}).
// beta = 0 gives plain mass conservation.
inline MeanModes mean_mode_exact(const ModelParams& p, double mean_phi0, double mean_phi1, double t) {
  if (!(t >= 0.0)) throw ContractViolation("mean_mode_exact: t must be >= 0");
  if (p.beta == 0.0) return {mean_phi0, 0.0};
  const double decay = std::exp(-t / p.beta);
  const double gained = -std::expm1(-t / p.beta);
  return {mean_phi0 + p.beta * mean_phi1 * gained, mean_phi1 * decay};
}

// Lap[Lap^2 phi + 2 Lap phi + f(phi)] with the cubic product dealiased.
inline Field rhs_pfc(const Field& phi, const ModelParams& p) {
  const Field cubic = cubic_term(phi, p);
  Field out = phi;
  auto s = out.mutable_spectrum();
  const auto c = cubic.spectrum();
  const auto lambda = phi.grid().lambda();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lam = lambda[i];
    s[i] = -lam * ((lam * lam - 2.0 * lam + 1.0 - p.epsilon) * s[i] + c[i]);
  }
  return out;
}

}  // namespace mpfc
