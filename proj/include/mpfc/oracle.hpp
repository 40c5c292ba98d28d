#pragma once

// Closed-form solution of a single Fourier mode of the linearised equation,
//   beta c'' + c' + lambda (lambda^2 - 2 lambda + 1 - epsilon) c = 0,
// used as the reference for convergence studies.

#include <cmath>
#include <span>

#include "mpfc/error.hpp"

namespace mpfc {

struct LinearModeOracle {
  double lambda = 0.0;  // |2 pi kappa|^2
  double beta = 0.0;
  double epsilon = 0.0;

  double rate() const { return lambda * (lambda * lambda - 2.0 * lambda + 1.0 - epsilon); }
};

template <typename T>
struct OracleValue {
  T c;
  T c_dot;
};

// Repeated roots are assumed once |1 - 4 beta sigma| falls below this.
inline constexpr double oracle_repeated_root_tol = 1e-12;

// T may be real or complex; the ODE has real coefficients so real and
// imaginary parts evolve independently.
template <typename T>
OracleValue<T> oracle_solve(const LinearModeOracle& o, T c0, T c1, double t) {
  if (!(t >= 0.0)) throw ContractViolation("oracle_solve: t must be >= 0");
  if (!(o.lambda >= 0.0)) throw ContractViolation("oracle_solve: lambda must be >= 0");
  if (!(o.beta >= 0.0)) throw ContractViolation("oracle_solve: beta must be >= 0");
  const double sigma = o.rate();

  if (o.beta == 0.0) {
    const double e = std::exp(-sigma * t);
    return {c0 * e, -sigma * c0 * e};
  }

  const double beta = o.beta;
  const double disc = 1.0 - 4.0 * beta * sigma;
  if (std::abs(disc) <= oracle_repeated_root_tol) {
    const double r = -1.0 / (2.0 * beta);
    const double e = std::exp(r * t);
    const T slope = c1 - r * c0;
    const T c = (c0 + slope * t) * e;
    return {c, r * c + slope * e};
  }
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double r_fast = (-1.0 - sq) / (2.0 * beta);
    // Vieta avoids the cancellation in (-1 + sq) / (2 beta).
    const double r_slow = 2.0 * sigma / (-1.0 - sq);
    const T a = (c1 - r_fast * c0) / (r_slow - r_fast);
    const T b = c0 - a;
    const double es = std::exp(r_slow * t);
    const double ef = std::exp(r_fast * t);
    return {a * es + b * ef, a * r_slow * es + b * r_fast * ef};
  }
  const double re = -1.0 / (2.0 * beta);
  const double om = std::sqrt(-disc) / (2.0 * beta);
  const double e = std::exp(re * t);
  const double cs = std::cos(om * t);
  const double sn = std::sin(om * t);
  const T b = (c1 - re * c0) / om;
  const T c = e * (c0 * cs + b * sn);
  const T c_dot = re * c + e * (-c0 * om * sn + b * om * cs);
  return {c, c_dot};
}

}  // namespace mpfc
