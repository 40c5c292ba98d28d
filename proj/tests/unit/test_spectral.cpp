#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "mpfc/mpfc.hpp"

using namespace mpfc;
using testing_helpers::max_abs_diff;
using testing_helpers::pi;
using testing_helpers::random_field;

namespace {

Field cos_mode(const GridPtr& g, int k, double a = 1.0, double c = 0.0) {
  return Field::from_function(g, [=](double x, double, double) { return c + a * std::cos(2.0 * pi * k * x); });
}

}  // namespace

// ------------------------------------------------------------------- Grid

TEST(Grid, RejectsBadDimension) {
  for (int d : {0, 4, -1}) {
    try {
      Grid g(d, 16);
      FAIL() << "dim " << d << " accepted";
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.key(), "dim");
    }
  }
}

TEST(Grid, RejectsNonPowerOfTwo) {
  for (int n : {0, 2, 6, 12, 100}) {
    try {
      Grid g(1, n);
      FAIL() << "n_points " << n << " accepted";
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.key(), "n_points");
    }
  }
}

TEST(Grid, SizeSpacingAndSingleZeroMode) {
  for (int d = 1; d <= 3; ++d) {
    const auto g = make_grid(d, 8);
    EXPECT_EQ(g->size(), static_cast<std::size_t>(std::pow(8, d)));
    EXPECT_DOUBLE_EQ(g->spacing(), 1.0 / 8.0);
    int zeros = 0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const auto& k = g->kappa(i);
      if (k[0] == 0 && k[1] == 0 && k[2] == 0) {
        ++zeros;
        EXPECT_EQ(g->lambda()[i], 0.0);
      } else {
        EXPECT_GT(g->lambda()[i], 0.0);
      }
    }
    EXPECT_EQ(zeros, 1);
  }
}

TEST(Grid, WavenumbersAreTwoPiKappa) {
  const auto g = make_grid(2, 16);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto& k = g->kappa(i);
    const double expect = std::pow(2.0 * pi * k[0], 2) + std::pow(2.0 * pi * k[1], 2);
    EXPECT_NEAR(g->lambda()[i], expect, 1e-9 * (1.0 + expect));
    EXPECT_GE(k[0], -8);
    EXPECT_LT(k[0], 8);
  }
}

TEST(Grid, DealiasMaskFollowsTwoThirdsRule) {
  for (int n : {8, 16, 64}) {
    const auto g = make_grid(2, n);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const auto& k = g->kappa(i);
      const bool keep = 3 * std::abs(k[0]) <= n && 3 * std::abs(k[1]) <= n;
      EXPECT_EQ(static_cast<bool>(g->dealias_mask()[i]), keep);
    }
  }
}

TEST(Grid, MirrorIsNegatedWavevector) {
  const auto g = make_grid(3, 8);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto& k = g->kappa(i);
    const auto& m = g->kappa(g->mirror(i));
    for (int a = 0; a < 3; ++a) {
      const int expect = -k[static_cast<std::size_t>(a)];
      // -(-N/2) aliases to -N/2.
      if (expect == 4) {
        EXPECT_EQ(m[static_cast<std::size_t>(a)], -4);
      } else {
        EXPECT_EQ(m[static_cast<std::size_t>(a)], expect);
      }
    }
  }
}

// ------------------------------------------------------------------ Field

TEST(Field, RoundTripReproducesValues) {
  for (int d = 1; d <= 3; ++d) {
    const auto g = make_grid(d, d == 3 ? 8 : 32);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> v(g->size());
    for (auto& x : v) x = u(rng);
    Field f = Field::from_values(g, v);
    (void)f.spectrum();
    Field back(g);
    {
      auto s = back.mutable_spectrum();
      const auto src = f.spectrum();
      std::copy(src.begin(), src.end(), s.begin());
    }
    double num = 0.0, den = 0.0;
    const auto w = back.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      num += (w[i] - v[i]) * (w[i] - v[i]);
      den += v[i] * v[i];
    }
    EXPECT_LE(std::sqrt(num / den), 1e-12);
  }
}

TEST(Field, SpectrumOfRealFieldIsConjugateSymmetric) {
  const auto g = make_grid(2, 16);
  const Field f = random_field(g, 3, 7, 0.2, 1.0);
  const auto s = f.spectrum();
  for (std::size_t i = 0; i < g->size(); ++i) {
    EXPECT_LE(std::abs(s[g->mirror(i)] - std::conj(s[i])), 1e-14);
  }
}

TEST(Field, RejectsWrongSampleCount) {
  const auto g = make_grid(1, 16);
  EXPECT_THROW(Field::from_values(g, std::vector<double>(15, 0.0)), InvalidField);
}

TEST(Field, ArithmeticRequiresSameGrid) {
  const auto a = make_grid(1, 16);
  const auto b = make_grid(1, 32);
  const auto c = make_grid(2, 16);
  Field x(a), y(b), z(c);
  EXPECT_THROW(x += y, InvalidField);
  EXPECT_THROW(x -= z, InvalidField);
  // Grids of the same shape are interchangeable.
  Field w(make_grid(1, 16));
  EXPECT_NO_THROW(x += w);
}

// ------------------------------------------------------------------- mean

TEST(Mean, ConstantField) {
  const auto g = make_grid(2, 16);
  EXPECT_DOUBLE_EQ(mean(Field::constant(g, 2.5)), 2.5);
  EXPECT_NEAR(mean(Field::from_function(g, [](double, double, double) { return -1.75; })), -1.75, 1e-15);
}

TEST(Mean, ZeroMeanMode) {
  const auto g = make_grid(1, 32);
  EXPECT_NEAR(mean(cos_mode(g, 1)), 0.0, 1e-16);
}

TEST(Mean, MatchesSampleAverage) {
  const auto g = make_grid(1, 64);
  const Field u = cos_mode(g, 1, 0.05, 0.1);
  double avg = 0.0;
  for (double v : u.values()) avg += v;
  avg /= static_cast<double>(u.size());
  EXPECT_NEAR(mean(u), avg, 1e-15);
  EXPECT_NEAR(mean(u), 0.1, 1e-15);
}

TEST(Mean, RejectsNonFinite) {
  const auto g = make_grid(1, 16);
  std::vector<double> v(16, 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(mean(Field::from_values(g, v)), InvalidField);
  v[3] = INFINITY;
  EXPECT_THROW(mean(Field::from_values(g, v)), InvalidField);
}

// -------------------------------------------------------------- zero_mean

TEST(ZeroMean, Examples) {
  const auto g = make_grid(1, 32);
  EXPECT_LE(testing_helpers::max_abs(zero_mean(Field::constant(g, 3.0))), 1e-15);
  EXPECT_LE(max_abs_diff(zero_mean(cos_mode(g, 1)), cos_mode(g, 1)), 1e-15);
  EXPECT_LE(max_abs_diff(zero_mean(cos_mode(g, 1, 1.0, 1.0)), cos_mode(g, 1)), 1e-15);
}

TEST(ZeroMean, MeanVanishesAndReconstructs) {
  const auto g = make_grid(2, 16);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Field u = random_field(g, seed, 5, 0.7, 2.0);
    const Field z = zero_mean(u);
    EXPECT_LE(std::abs(mean(z)), 1e-14);
    Field back = z + Field::constant(g, mean(u));
    EXPECT_LE(max_abs_diff(back, u), 1e-14);
  }
}

// ----------------------------------------------------- inv_laplacian_pow

TEST(InvLaplacianPow, InverseOfSingleMode) {
  const auto g = make_grid(1, 32);
  const Field out = inv_laplacian_pow(cos_mode(g, 1), -1.0);
  EXPECT_LE(max_abs_diff(out, cos_mode(g, 1, 1.0 / std::pow(2.0 * pi, 2))), 1e-15);
}

TEST(InvLaplacianPow, PositivePowerIsMinusLaplacian) {
  const auto g = make_grid(1, 32);
  const Field out = inv_laplacian_pow(cos_mode(g, 1), 1.0);
  EXPECT_LE(max_abs_diff(out, cos_mode(g, 1, std::pow(2.0 * pi, 2))), 1e-11);
}

TEST(InvLaplacianPow, ConstantMapsToZero) {
  const auto g = make_grid(1, 32);
  EXPECT_LE(testing_helpers::max_abs(inv_laplacian_pow(Field::constant(g, 4.0), -1.0)), 1e-16);
}

TEST(InvLaplacianPow, SolvesPoissonForZeroMeanPart) {
  const auto g = make_grid(2, 32);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Field u = random_field(g, seed, 8, 0.4, 1.0);
    const Field psi = inv_laplacian_pow(u, -1.0);
    EXPECT_LE(std::abs(mean(psi)), 1e-16);
    Field back = laplacian(psi) * -1.0;
    EXPECT_LE(max_abs_diff(back, zero_mean(u)), 1e-12);
  }
}

TEST(InvLaplacianPow, FractionalPowersCompose) {
  const auto g = make_grid(1, 32);
  const Field u = random_field(g, 9, 6, 0.0, 1.0);
  const Field a = inv_laplacian_pow(inv_laplacian_pow(u, -0.5), -0.5);
  EXPECT_LE(max_abs_diff(a, inv_laplacian_pow(u, -1.0)), 1e-15);
}

// ------------------------------------------------------------------ norms

namespace {

// Sum over multi-indices |alpha| <= m of prod_j (2 pi k_j)^{2 alpha_j}.
double multi_index_weight(const std::array<int, 3>& k, int d, int m) {
  double total = 0.0;
  for (int a0 = 0; a0 <= m; ++a0) {
    for (int a1 = 0; a1 <= (d > 1 ? m - a0 : 0); ++a1) {
      for (int a2 = 0; a2 <= (d > 2 ? m - a0 - a1 : 0); ++a2) {
        total += std::pow(2.0 * pi * k[0], 2 * a0) * std::pow(2.0 * pi * k[1], 2 * a1) *
                 std::pow(2.0 * pi * k[2], 2 * a2);
      }
    }
  }
  return total;
}

}  // namespace

TEST(HmNorm, SingleModeMinusOne) {
  const auto g = make_grid(1, 32);
  EXPECT_NEAR(hm_norm(cos_mode(g, 1), -1), 1.0 / (2.0 * std::sqrt(2.0) * pi), 1e-15);
}

TEST(HmNorm, ConstantMinusOneIsAbsoluteValue) {
  const auto g = make_grid(2, 8);
  EXPECT_NEAR(hm_norm(Field::constant(g, -0.3), -1), 0.3, 1e-16);
}

TEST(HmNorm, ZeroFieldHasZeroNorm) {
  const auto g = make_grid(1, 16);
  for (int m = -1; m <= 5; ++m) EXPECT_EQ(hm_norm(Field(g), m), 0.0);
}

TEST(HmNorm, RejectsUnsupportedLevel) {
  const auto g = make_grid(1, 16);
  EXPECT_THROW(hm_norm(Field(g), -2), Error);
  EXPECT_THROW(hm_norm(Field(g), 6), Error);
  EXPECT_THROW(SobolevLevel(7), Error);
}

TEST(HmNorm, FullMultiIndexSumOnSingleModes) {
  // |u|_m^2 for u = cos(2 pi k.x) is (1/2) * sum over alpha of the derivative weights.
  for (int d = 1; d <= 3; ++d) {
    const auto g = make_grid(d, 16);
    const std::array<int, 3> k{2, d > 1 ? -1 : 0, d > 2 ? 3 : 0};
    const Field u = Field::from_function(
        g, [&](double x, double y, double z) { return std::cos(2.0 * pi * (k[0] * x + k[1] * y + k[2] * z)); });
    for (int m = 0; m <= 5; ++m) {
      const double expect = std::sqrt(0.5 * multi_index_weight(k, d, m));
      EXPECT_NEAR(hm_norm(u, m), expect, 1e-11 * expect) << "d=" << d << " m=" << m;
    }
  }
}

TEST(HmNorm, ParsevalConsistency) {
  for (int d = 1; d <= 3; ++d) {
    const auto g = make_grid(d, d == 3 ? 8 : 32);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const Field u = random_field(g, seed, d == 3 ? 2 : 6, 0.3, 1.0);
      double direct = 0.0;
      for (double v : u.values()) direct += v * v;
      direct /= static_cast<double>(u.size());
      EXPECT_NEAR(std::pow(hm_norm(u, 0), 2), direct, 1e-12 * direct);
    }
  }
}

TEST(HmNorm, DualitySandwich) {
  for (int d = 1; d <= 2; ++d) {
    const auto g = make_grid(d, 32);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Field u = zero_mean(random_field(g, seed, 8, 0.0, 1.0));
      EXPECT_GE(hm_norm(u, -1) * hm_norm(u, 1), std::pow(hm_norm(u, 0), 2) * (1.0 - 1e-12));
    }
  }
}

TEST(HmNorm, MonotoneInLevel) {
  const auto g = make_grid(2, 16);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Field u = random_field(g, seed, 5, 0.5, 1.0);
    for (int m = 0; m < 5; ++m) EXPECT_LE(hm_norm(u, m), hm_norm(u, m + 1));
  }
}

TEST(XNorm, BetaZeroIgnoresSecondComponent) {
  const auto g = make_grid(1, 32);
  const Field u = random_field(g, 1, 4, 0.1, 1.0);
  const Field v = random_field(g, 2, 4, 0.3, 1.0);
  for (int level = 0; level <= 3; ++level) {
    EXPECT_EQ(x_norm(u, v, 0.0, level), hm_norm(u, level + 2));
  }
}

TEST(XNorm, ScaledMinusOneMode) {
  const auto g = make_grid(1, 32);
  EXPECT_NEAR(x_norm(Field(g), cos_mode(g, 1), 4.0, 0), 2.0 / (2.0 * std::sqrt(2.0) * pi), 1e-15);
}

TEST(XNorm, ZeroStateAndLevelRange) {
  const auto g = make_grid(1, 16);
  EXPECT_EQ(x_norm(Field(g), Field(g), 0.7, 2), 0.0);
  EXPECT_THROW(x_norm(Field(g), Field(g), 0.7, 4), Error);
  EXPECT_THROW(x_norm(Field(g), Field(g), 0.7, -1), Error);
  const State s = make_state(cos_mode(g, 1), cos_mode(g, 2), 0.5);
  for (int level = 0; level <= 3; ++level) {
    const double expect =
        std::sqrt(std::pow(hm_norm(s.phi, level + 2), 2) + 0.5 * std::pow(hm_norm(s.phi_t, level - 1), 2));
    EXPECT_NEAR(x_norm(s, level), expect, 1e-13 * expect);
  }
}

// --------------------------------------------------------------- dealias

TEST(Dealias, RemovesOnlyModesOutsideTheBand) {
  const auto g = make_grid(1, 64);
  // 3 * 21 = 63 <= 64 is kept, 22 is dropped.
  EXPECT_LE(max_abs_diff(dealias(cos_mode(g, 21)), cos_mode(g, 21)), 1e-14);
  EXPECT_LE(testing_helpers::max_abs(dealias(cos_mode(g, 22))), 1e-13);
}

TEST(Dealias, CubicProductKeepsBandedPart) {
  const auto g = make_grid(1, 64);
  ModelParams p = ModelParams::make(0.0, 0.5);
  // cos^3 = (3 cos + cos 3x) / 4: for mode 6 the harmonic 18 <= 21 survives.
  const Field c = cubic_term(cos_mode(g, 6), p);
  const Field expect = cos_mode(g, 6, 0.75) + cos_mode(g, 18, 0.25);
  EXPECT_LE(max_abs_diff(c, expect), 1e-14);
  // For mode 10 the harmonic 30 is removed.
  const Field c2 = cubic_term(cos_mode(g, 10), p);
  EXPECT_LE(max_abs_diff(c2, cos_mode(g, 10, 0.75)), 1e-14);
}

TEST(GridInner, MatchesQuadrature) {
  const auto g = make_grid(1, 32);
  EXPECT_NEAR(grid_inner(cos_mode(g, 2), cos_mode(g, 2)), 0.5, 1e-15);
  EXPECT_NEAR(grid_inner(cos_mode(g, 2), cos_mode(g, 3)), 0.0, 1e-15);
}
