#pragma once

// Fourier multipliers, mean splitting and the Sobolev-scale norms on the
// periodic unit box.

#include <cmath>
#include <string>

#include "mpfc/field.hpp"

namespace mpfc {

// Sobolev index accepted by hm_norm: -1 (the dual space) through 5.
class SobolevLevel {
 public:
  explicit SobolevLevel(int m) : m_(m) {
    if (m < -1 || m > max_sobolev_level) {
      throw Error("unsupported Sobolev level " + std::to_string(m));
    }
  }
  int value() const noexcept { return m_; }

 private:
  int m_;
};

inline void require_finite(const Field& u) {
  for (double v : u.values()) {
    if (!std::isfinite(v)) throw InvalidField("field contains non-finite samples");
  }
}

// Spatial average over the unit box, i.e. the kappa=0 coefficient.
inline double mean(const Field& u) {
  require_finite(u);
  return u.spectrum()[0].real();
}

inline Field zero_mean(const Field& u) {
  Field out = u;
  out.mutable_spectrum()[0] = 0.0;
  return out;
}

// Multiplies mode kappa by symbol(lambda, idx).
template <typename Symbol>
Field apply_multiplier(const Field& u, Symbol&& symbol) {
  Field out = u;
  auto s = out.mutable_spectrum();
  const auto lambda = u.grid().lambda();
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= symbol(lambda[i], i);
  return out;
}

inline Field laplacian(const Field& u) {
  return apply_multiplier(u, [](double lam, std::size_t) { return -lam; });
}

// A0^s with A0 = -Laplacian on zero-mean functions; the mean is dropped.
inline Field inv_laplacian_pow(const Field& u, double s) {
  return apply_multiplier(u, [s](double lam, std::size_t i) {
    return i == 0 ? 0.0 : std::pow(lam, s);
  });
}

// Two-thirds rule.
inline void dealias_in_place(std::span<Complex> spectrum, const Grid& grid) {
  const auto mask = grid.dealias_mask();
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (mask[i] == 0) spectrum[i] = 0.0;
  }
}

inline Field dealias(const Field& u) {
  Field out = u;
  dealias_in_place(out.mutable_spectrum(), u.grid());
  return out;
}

// Squared H^m norm. For m >= 0 the full multi-index sum; for m = -1 the
// dual norm |grad psi_u|^2 + <u>^2 with -Laplacian psi_u = u - <u>.
inline double hm_norm_squared(const Field& u, SobolevLevel level) {
  const auto s = u.spectrum();
  double acc = 0.0;
  if (level.value() < 0) {
    const auto lambda = u.grid().lambda();
    for (std::size_t i = 1; i < s.size(); ++i) acc += std::norm(s[i]) / lambda[i];
    acc += std::norm(s[0]);
  } else {
    const auto w = u.grid().sobolev_weight(level.value());
    for (std::size_t i = 0; i < s.size(); ++i) acc += w[i] * std::norm(s[i]);
  }
  return acc;
}

inline double hm_norm(const Field& u, SobolevLevel level) {
  return std::sqrt(hm_norm_squared(u, level));
}

inline double hm_norm(const Field& u, int m) { return hm_norm(u, SobolevLevel(m)); }

// Norm of the product space X_level^beta:
// (|u|_{level+2}^2 + beta |v|_{level-1}^2)^{1/2}; the second summand is
// dropped for beta = 0.
inline double x_norm(const Field& u, const Field& v, double beta, int level) {
  if (level < 0 || level > 3) {
    throw Error("x_norm level must be in [0, 3] (got " + std::to_string(level) + ")");
  }
  double acc = hm_norm_squared(u, SobolevLevel(level + 2));
  if (beta > 0.0) acc += beta * hm_norm_squared(v, SobolevLevel(level - 1));
  return std::sqrt(acc);
}

// L2 inner product by the grid quadrature rule.
inline double grid_inner(const Field& a, const Field& b) {
  const auto x = a.values();
  const auto y = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc / static_cast<double>(x.size());
}

}  // namespace mpfc
