#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "mpfc/error.hpp"

namespace mpfc {

// `linear` drops the cubic term, leaving f(s) = (1 - epsilon) s. Used by the
// closed-form oracle comparisons.
enum class Nonlinearity { cubic, linear };

// Splitting constant used when none is configured: keeps s^2 - 2s + k
// positive and f + k*id monotone.
inline double default_k_split(double epsilon) { return std::max(1.0, epsilon - 1.0 + 0.1); }

struct ModelParams {
  double beta = 0.0;     // relaxation time
  double epsilon = 0.0;  // undercooling
  double k_split = 1.0;  // f_k = f + k_split * id must be nondecreasing
  double beta0 = 1.0;    // reference relaxation time, beta <= beta0
  Nonlinearity nonlinearity = Nonlinearity::cubic;

  void validate() const {
    auto finite = [](const char* key, double v) {
      if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
    };
    finite("beta", beta);
    finite("epsilon", epsilon);
    finite("k_split", k_split);
    finite("beta0", beta0);
    if (beta < 0.0) throw ConfigError("beta", "must be >= 0");
    if (beta0 <= 0.0) throw ConfigError("beta0", "must be > 0");
    if (beta > beta0) throw ConfigError("beta", "must not exceed beta0");
    const double k_min = std::max(0.0, epsilon - 1.0);
    if (k_split < k_min) {
      throw ConfigError("k_split", "must be >= max(0, epsilon - 1) = " + std::to_string(k_min));
    }
  }

  static ModelParams make(double beta, double epsilon, std::optional<double> k_split = std::nullopt,
                          double beta0 = 1.0, Nonlinearity nl = Nonlinearity::cubic) {
    ModelParams p;
    p.beta = beta;
    p.epsilon = epsilon;
    p.k_split = k_split.value_or(default_k_split(epsilon));
    p.beta0 = beta0;
    p.nonlinearity = nl;
    p.validate();
    return p;
  }

  ModelParams with_beta(double b) const {
    ModelParams p = *this;
    p.beta = b;
    p.validate();
    return p;
  }
};

}  // namespace mpfc
