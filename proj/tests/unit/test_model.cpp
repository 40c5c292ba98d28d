#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mpfc/mpfc.hpp"

using namespace mpfc;
using testing_helpers::pi;
using testing_helpers::random_field;

namespace {

ModelParams params(double eps, std::optional<double> k = {}, double beta = 0.0) {
  return ModelParams::make(beta, eps, k);
}

}  // namespace

// ---------------------------------------------------------------- params

TEST(ModelParams, DefaultSplitConstant) {
  EXPECT_DOUBLE_EQ(params(0.5).k_split, 1.0);
  EXPECT_DOUBLE_EQ(params(3.0).k_split, 2.1);
  EXPECT_DOUBLE_EQ(default_k_split(-4.0), 1.0);
}

TEST(ModelParams, ValidationNamesTheKey) {
  auto key_of = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("none");
  };
  EXPECT_EQ(key_of([] { ModelParams::make(-1.0, 0.5); }), "beta");
  EXPECT_EQ(key_of([] { ModelParams::make(2.0, 0.5); }), "beta");  // above beta0 = 1
  EXPECT_EQ(key_of([] { ModelParams::make(0.1, 0.5, {}, 0.0); }), "beta0");
  EXPECT_EQ(key_of([] { ModelParams::make(0.1, 3.0, 1.5); }), "k_split");
  EXPECT_EQ(key_of([] { ModelParams::make(0.1, 0.5, -0.1); }), "k_split");
  EXPECT_EQ(key_of([] { ModelParams::make(0.1, std::nan("")); }), "epsilon");
  EXPECT_EQ(key_of([] { ModelParams::make(0.1, 0.5, 0.0); }), "none");
}

TEST(ModelParams, WithBetaKeepsOtherFields) {
  const ModelParams p = ModelParams::make(0.5, 2.0, 3.0, 2.0, Nonlinearity::linear);
  const ModelParams q = p.with_beta(0.25);
  EXPECT_EQ(q.beta, 0.25);
  EXPECT_EQ(q.epsilon, 2.0);
  EXPECT_EQ(q.k_split, 3.0);
  EXPECT_EQ(q.beta0, 2.0);
  EXPECT_EQ(q.nonlinearity, Nonlinearity::linear);
  EXPECT_THROW(p.with_beta(3.0), ConfigError);
}

// ----------------------------------------------------------------- State

TEST(State, PfcStateRequiresZeroPhiT) {
  const auto g = make_grid(1, 16);
  EXPECT_THROW(make_state(Field(g), Field::constant(g, 1e-300), 0.0), ContractViolation);
  EXPECT_NO_THROW(make_state(Field(g), Field(g), 0.0));
}

TEST(State, RejectsMismatchedGridsAndNegativeInputs) {
  EXPECT_THROW(make_state(Field(make_grid(1, 16)), Field(make_grid(1, 32)), 0.1), InvalidField);
  const auto g = make_grid(1, 16);
  EXPECT_THROW(make_state(Field(g), Field(g), -0.1), ContractViolation);
  EXPECT_THROW(make_state(Field(g), Field(g), 0.1, -1.0), ContractViolation);
  EXPECT_THROW(make_state(Field(), Field(g), 0.1), InvalidField);
}

TEST(State, ConservedChargeValue) {
  const auto g = make_grid(1, 16);
  const State s = make_state(Field::constant(g, 0.3), Field::constant(g, -0.5), 0.4);
  EXPECT_NEAR(conserved_charge(s).value, 0.4 * -0.5 + 0.3, 1e-16);
}

// ------------------------------------------------------------ pointwise

TEST(FEval, Examples) {
  EXPECT_EQ(f_eval(0.0, params(0.3)), 0.0);
  EXPECT_DOUBLE_EQ(f_eval(1.0, params(0.0)), 2.0);
  EXPECT_DOUBLE_EQ(f_eval(2.0, params(0.25)), 9.5);
}

TEST(FEval, LinearVariantDropsTheCube) {
  const ModelParams p = ModelParams::make(0.0, 0.25, {}, 1.0, Nonlinearity::linear);
  EXPECT_DOUBLE_EQ(f_eval(2.0, p), 1.5);
  EXPECT_DOUBLE_EQ(free_energy_density(2.0, p), 0.75 * 2.0);
}

TEST(FkEval, Examples) {
  EXPECT_DOUBLE_EQ(fk_eval(0.7, params(0.5, 0.0)), f_eval(0.7, params(0.5, 0.0)));
  EXPECT_EQ(fk_eval(0.0, params(0.5)), 0.0);
  EXPECT_DOUBLE_EQ(fk_eval(1.0, params(2.0, 1.0)), 1.0);
}

TEST(FkEval, MonotoneWheneverParamsAreValid) {
  for (double eps : {-2.0, 0.0, 0.5, 1.0, 2.0, 5.0}) {
    const double kmin = std::max(0.0, eps - 1.0);
    for (double k : {kmin, kmin + 0.5, default_k_split(eps)}) {
      const ModelParams p = params(eps, k);
      double prev = fk_eval(-5.0, p);
      for (int i = 1; i <= 20000; ++i) {
        const double v = fk_eval(-5.0 + 10.0 * i / 20000.0, p);
        ASSERT_GE(v, prev) << "eps=" << eps << " k=" << k;
        prev = v;
      }
    }
  }
}

TEST(FreeEnergyDensity, Examples) {
  EXPECT_EQ(free_energy_density(0.0, params(0.7)), 0.0);
  double best = INFINITY;
  for (int i = -2000; i <= 2000; ++i) best = std::min(best, free_energy_density(i / 1000.0, params(0.0)));
  EXPECT_EQ(best, 0.0);
  const ModelParams p2 = params(2.0);
  EXPECT_DOUBLE_EQ(free_energy_density(1.0, p2), -0.25);
  EXPECT_DOUBLE_EQ(free_energy_density(-1.0, p2), -0.25);
  EXPECT_DOUBLE_EQ(-std::pow(1.0 - 2.0, 2) / 4.0, -0.25);
}

TEST(FreeEnergyDensity, UniformLowerBound) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> us(-10.0, 10.0), ue(-2.0, 2.0);
  for (int i = 0; i < 1000000; ++i) {
    const double s = us(rng);
    const double eps = ue(rng);
    // Only epsilon enters F; k is irrelevant here.
    ModelParams p;
    p.epsilon = eps;
    ASSERT_GE(free_energy_density(s, p), -std::pow(1.0 - eps, 2) / 4.0 - 1e-12);
  }
}

// ---------------------------------------------------------------- energy

TEST(Energy, Examples) {
  const auto g = make_grid(1, 64);
  const ModelParams p = params(0.25);
  EXPECT_EQ(energy(Field(g), p), 0.0);
  EXPECT_NEAR(energy(Field::constant(g, 0.4), p), free_energy_density(0.4, p), 1e-15);
  const double a = 0.3;
  const Field phi = Field::from_function(g, [&](double x, double, double) { return a * std::cos(2.0 * pi * x); });
  const double l = 2.0 * pi;
  const double expect = a * a * std::pow(l, 4) / 4.0 - a * a * l * l / 2.0 + (1.0 - 0.25) * a * a / 4.0 +
                        3.0 * std::pow(a, 4) / 32.0;
  EXPECT_NEAR(energy(phi, p), expect, 1e-12 * expect);
}

TEST(Energy, GradientMatchesChemicalPotential) {
  const ModelParams p = params(0.5);
  for (int d = 1; d <= 2; ++d) {
    const auto g = make_grid(d, 32);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Field phi = random_field(g, seed, 4, 0.1, 0.5);
      const Field v = random_field(g, seed + 100, 4, 0.05, 0.5);
      // Test-side chemical potential: Lap^2 phi + 2 Lap phi + f(phi).
      const Field lap = laplacian(phi);
      Field mu = laplacian(lap) + lap * 2.0;
      {
        auto m = mu.mutable_values();
        const auto ph = phi.values();
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += f_eval(ph[i], p);
      }
      const double analytic = grid_inner(mu, v);
      const double h = 1e-4;
      const double fd = (energy(phi + v * h, p) - energy(phi - v * h, p)) / (2.0 * h);
      EXPECT_NEAR(fd, analytic, 1e-6 * std::abs(analytic)) << "d=" << d << " seed=" << seed;
      EXPECT_NEAR(grid_inner(chemical_potential(phi, p), v), analytic, 1e-10 * std::abs(analytic));
    }
  }
}

TEST(FullEnergy, Examples) {
  const auto g = make_grid(1, 32);
  const ModelParams p = params(0.5, {}, 0.0);
  const Field phi = random_field(g, 4, 4, 0.2, 0.4);
  EXPECT_EQ(full_energy(make_pfc_state(phi), p), energy(phi, p));
  EXPECT_NEAR(full_energy(make_state(phi, Field::constant(g, 0.7), 0.5), p), energy(phi, p), 1e-14);
  const Field c = Field::from_function(g, [](double x, double, double) { return std::cos(2.0 * pi * x); });
  ModelParams p2 = p;
  p2.beta0 = 2.0;
  EXPECT_NEAR(full_energy(make_state(Field(g), c, 2.0), p2), 1.0 / (8.0 * pi * pi), 1e-16);
}

// ------------------------------------------------------------ mean modes

TEST(MeanModeExact, NoInitialVelocityConservesMass) {
  const ModelParams p = ModelParams::make(0.3, 0.5);
  for (double t : {0.0, 0.5, 3.0, 100.0}) {
    const auto m = mean_mode_exact(p, 0.2, 0.0, t);
    EXPECT_EQ(m.phi, 0.2);
    EXPECT_EQ(m.phi_t, 0.0);
  }
}

TEST(MeanModeExact, UnitExample) {
  const ModelParams p = ModelParams::make(1.0, 0.5);
  const auto m = mean_mode_exact(p, 0.0, 1.0, 1.0);
  EXPECT_NEAR(m.phi, 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(m.phi_t, std::exp(-1.0), 1e-15);
  // Scalar ODE beta m'' + m' = 0 integrated independently.
  const auto r = testing_helpers::rk4_linear_mode(1.0, 0.0, 0.0, 1.0, 1.0, 20000);
  EXPECT_NEAR(m.phi, r.c, 1e-12);
  EXPECT_NEAR(m.phi_t, r.c_dot, 1e-12);
}

TEST(MeanModeExact, LongTimeLimit) {
  const ModelParams p = ModelParams::make(0.4, 0.5);
  const auto m = mean_mode_exact(p, 0.1, 0.6, 1e3);
  EXPECT_NEAR(m.phi, 0.4 * 0.6 + 0.1, 1e-15);
  EXPECT_EQ(m.phi_t, 0.0);
}

TEST(MeanModeExact, PfcLimitAndErrors) {
  const ModelParams p = ModelParams::make(0.0, 0.5);
  const auto m = mean_mode_exact(p, 0.3, 5.0, 2.0);
  EXPECT_EQ(m.phi, 0.3);
  EXPECT_EQ(m.phi_t, 0.0);
  EXPECT_THROW(mean_mode_exact(p, 0.3, 0.0, -1e-9), ContractViolation);
}

TEST(MeanModeExact, SatisfiesChargeIdentity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ut(0.0, 10.0), ub(1e-3, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const ModelParams p = ModelParams::make(ub(rng), 0.5);
    const double m0 = u(rng), m1 = u(rng), t = ut(rng);
    const auto m = mean_mode_exact(p, m0, m1, t);
    ASSERT_NEAR(p.beta * m.phi_t + m.phi, p.beta * m1 + m0, 1e-14);
  }
}

// ---------------------------------------------------------------- rhs_pfc

TEST(RhsPfc, ConstantIsEquilibrium) {
  const auto g = make_grid(2, 16);
  EXPECT_LE(testing_helpers::max_abs(rhs_pfc(Field::constant(g, 0.37), params(0.5))), 1e-13);
}

TEST(RhsPfc, LinearSymbolOnSingleModes) {
  const auto g = make_grid(1, 64);
  const ModelParams p = ModelParams::make(0.0, 0.3, {}, 1.0, Nonlinearity::linear);
  for (int k : {1, 3, 7}) {
    const double lam = std::pow(2.0 * pi * k, 2);
    const Field phi = Field::from_function(g, [&](double x, double, double) { return std::cos(2.0 * pi * k * x); });
    // Compared coefficient-wise: sampling round-off in the other modes is
    // amplified by the cubic symbol and would swamp a real-space comparison.
    const auto out = rhs_pfc(phi, p).spectrum();
    const double expect = 0.5 * -lam * (lam * lam - 2.0 * lam + 1.0 - 0.3);
    EXPECT_NEAR(out[static_cast<std::size_t>(k)].real(), expect, 1e-12 * std::abs(expect));
    EXPECT_NEAR(out[static_cast<std::size_t>(64 - k)].real(), expect, 1e-12 * std::abs(expect));
  }
}

TEST(RhsPfc, ZeroMeanForRandomInput) {
  const ModelParams p = params(0.5);
  for (int d = 1; d <= 3; ++d) {
    const auto g = make_grid(d, d == 3 ? 8 : 32);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      EXPECT_EQ(mean(rhs_pfc(random_field(g, seed, 2, 0.3, 1.0), p)), 0.0);
    }
  }
}

TEST(IntegratedF, IsGridAverageOfF) {
  const auto g = make_grid(1, 32);
  const ModelParams p = params(0.5);
  const Field phi = random_field(g, 6, 4, 0.2, 0.5);
  double acc = 0.0;
  for (double v : phi.values()) acc += f_eval(v, p);
  EXPECT_NEAR(integrated_f(phi, p), acc / 32.0, 1e-15);
}
