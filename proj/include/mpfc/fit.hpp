#pragma once

// Least-squares helpers for rate and slope estimation.

#include <cmath>
#include <span>
#include <vector>

#include "mpfc/error.hpp"

namespace mpfc {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ContractViolation("fit_line needs two equally sized series with >= 2 points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ContractViolation("fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

// Slope of log(y) against log(x).
inline LineFit fit_log_log(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ContractViolation("fit_log_log needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

struct DecayFit {
  double rate = 0.0;       // kappa in C e^{-kappa t}; negative for growth
  double prefactor = 0.0;  // C
  double r_squared = 1.0;  // of the log-linear fit
};

inline DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> value) {
  if (t.size() != value.size()) throw ContractViolation("fit_decay_rate: size mismatch");
  if (t.size() < 10) throw ContractViolation("fit_decay_rate needs at least 10 samples");
  std::vector<double> logs(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!(value[i] > 0.0)) throw ContractViolation("fit_decay_rate: values must be positive");
    logs[i] = std::log(value[i]);
  }
  const LineFit f = fit_line(t, logs);
  return {-f.slope, std::exp(f.intercept), f.r_squared};
}

}  // namespace mpfc
