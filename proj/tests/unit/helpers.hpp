#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "mpfc/mpfc.hpp"

namespace testing_helpers {

inline constexpr double pi = std::numbers::pi;

// Random real field built from real-space cosines/sines of modes with
// |kappa_j| <= max_mode (test-side construction, no library spectra).
inline mpfc::Field random_field(const mpfc::GridPtr& g, std::uint64_t seed, int max_mode = 4, double mean = 0.0,
                                double scale = 0.1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int d = g->dim();
  struct Term {
    int k[3];
    double a, b;
  };
  std::vector<Term> terms;
  for (int kx = 0; kx <= max_mode; ++kx) {
    for (int ky = (d > 1 ? -max_mode : 0); ky <= (d > 1 ? max_mode : 0); ++ky) {
      for (int kz = (d > 2 ? -max_mode : 0); kz <= (d > 2 ? max_mode : 0); ++kz) {
        if (kx == 0 && (ky < 0 || (ky == 0 && kz <= 0))) continue;
        terms.push_back({{kx, ky, kz}, u(rng), u(rng)});
      }
    }
  }
  return mpfc::Field::from_function(g, [&](double x, double y, double z) {
    double acc = mean;
    for (const auto& t : terms) {
      const double arg = 2.0 * pi * (t.k[0] * x + t.k[1] * y + t.k[2] * z);
      acc += scale * (t.a * std::cos(arg) + t.b * std::sin(arg)) / static_cast<double>(terms.size());
    }
    return acc;
  });
}

inline double max_abs_diff(const mpfc::Field& a, const mpfc::Field& b) {
  const auto x = a.values();
  const auto y = b.values();
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

inline double max_abs(const mpfc::Field& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

// Classical RK4 for beta c'' + c' + sigma c = 0 (beta > 0) or c' = -sigma c.
struct Rk4Result {
  double c, c_dot;
};
inline Rk4Result rk4_linear_mode(double beta, double sigma, double c0, double c1, double t, long steps) {
  const double h = t / static_cast<double>(steps);
  if (beta == 0.0) {
    double c = c0;
    for (long n = 0; n < steps; ++n) {
      const double k1 = -sigma * c;
      const double k2 = -sigma * (c + 0.5 * h * k1);
      const double k3 = -sigma * (c + 0.5 * h * k2);
      const double k4 = -sigma * (c + h * k3);
      c += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return {c, -sigma * c};
  }
  auto acc = [&](double c, double v) { return (-v - sigma * c) / beta; };
  double c = c0, v = c1;
  for (long n = 0; n < steps; ++n) {
    const double k1c = v, k1v = acc(c, v);
    const double k2c = v + 0.5 * h * k1v, k2v = acc(c + 0.5 * h * k1c, v + 0.5 * h * k1v);
    const double k3c = v + 0.5 * h * k2v, k3v = acc(c + 0.5 * h * k2c, v + 0.5 * h * k2v);
    const double k4c = v + h * k3v, k4v = acc(c + h * k3c, v + h * k3v);
    c += h / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return {c, v};
}

// epsilon for which the slowest nonzero mode on the unit box decays at `rate`.
inline double near_marginal_epsilon(double rate) {
  const double l1 = 4.0 * pi * pi;
  return (l1 - 1.0) * (l1 - 1.0) - rate / l1;
}

}  // namespace testing_helpers
