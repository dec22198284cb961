#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cyclic/builtins.hpp"
#include "cyclic/densities.hpp"
#include "cyclic/rng.hpp"
#include "cyclic/solver.hpp"

using namespace cyclic;
using std::numbers::pi;

namespace {

const OptimalKernelSolution& cauchy_solution() {
  static const auto s = solve_optimal_kernel(cauchy_density());
  return s;
}

const OptimalKernelSolution& gaussian_solution() {
  static const auto s = solve_optimal_kernel(gaussian_density());
  return s;
}

double sup_diff_from_sine(const OptimalKernelSolution& s) {
  double worst = 0.0;
  for (double x : s.grid_x) worst = std::max(worst, std::abs(s.kernel.phi(x) - std::sin(x) / pi));
  return worst;
}

}  // namespace

TEST(Solver, GridLayout) {
  const auto x = solver_grid();
  ASSERT_EQ(x.size(), 4096u);
  EXPECT_DOUBLE_EQ(x.front(), 1e-3);
  EXPECT_NEAR(x.back(), kTwoPi - 1e-3, 1e-15);
}

TEST(Solver, ConstantWeightGivesSine) {
  const auto s = solve_optimal_kernel(constant_weight());
  EXPECT_NEAR(s.lambda1, 0.0, 1e-6);
  EXPECT_NEAR(s.lambda2, 1.0 / pi, 1e-10);
  EXPECT_LT(sup_diff_from_sine(s), 1e-6);
}

TEST(Solver, WideUniformGivesSine) {
  const auto s = solve_optimal_kernel(uniform_density(1e6));
  EXPECT_LT(sup_diff_from_sine(s), 1e-5);
}

TEST(Solver, CauchyMultipliers) {
  const auto& s = cauchy_solution();
  EXPECT_NEAR(s.lambda1, 0.0, 1e-6);
  EXPECT_NEAR(s.lambda2, 0.118, 0.005);
  EXPECT_EQ(s.m_name, "cauchy");
}

TEST(Solver, CauchyKernelMatchesClosedForm) {
  const auto& s = cauchy_solution();
  for (std::size_t j = 0; j < s.grid_x.size(); j += 37) {
    const double x = s.grid_x[j];
    const double expected = (s.lambda1 + s.lambda2 * alpha_closed(x)) / beta_cauchy_closed(x);
    EXPECT_NEAR(s.kernel.phi(x), expected, 1e-9) << x;
  }
}

TEST(Solver, GaussianMultipliersAndConstraints) {
  const auto& s = gaussian_solution();
  EXPECT_NEAR(s.lambda1, 0.0, 1e-6);
  EXPECT_GT(s.lambda2, 0.0);
  EXPECT_TRUE(check_constraints(s.kernel).passed);
}

TEST(Solver, EvenDensitiesHaveZeroLambda1) {
  for (const auto& m : {laplace_density(), scale_mixture_density(4.0)}) {
    EXPECT_NEAR(solve_optimal_kernel(m).lambda1, 0.0, 1e-6) << m.name;
  }
}

TEST(Solver, ReturnedKernelsPassConstraints) {
  for (const auto* s : {&cauchy_solution(), &gaussian_solution()}) {
    const auto r = check_constraints(s->kernel);
    EXPECT_LT(r.zero_mean_residual, 1e-6);
    EXPECT_LT(r.line_integral_residual, 1e-6);
  }
}

TEST(Solver, BetaGridIsNormalizedLattice) {
  const auto& s = cauchy_solution();
  const auto m = cauchy_density();
  for (std::size_t j = 0; j < s.grid_x.size(); j += 101) {
    EXPECT_NEAR(s.beta_m_grid[j], beta_weighted(s.grid_x[j], m), 1e-10 * s.beta_m_grid[j]);
  }
}

TEST(Solver, ObjectiveBelowFourier) {
  for (const auto* s : {&cauchy_solution(), &gaussian_solution()}) {
    const auto m = density_by_name(s->m_name);
    EXPECT_LE(s->objective_value, weighted_square_norm(fourier_kernel(), m) + 1e-12);
  }
}

// Zero-mean, zero line-integral perturbations phi + t eta raise the weighted
// objective quadratically, with the minimum at t = 0.
TEST(Solver, OptimalUnderPerturbation) {
  const auto& s = cauchy_solution();
  const auto m = cauchy_density();
  const double f0 = s.objective_value;
  Rng rng(77, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 6);
    const double a = rng.normal() * 0.05;
    const double b = rng.normal() * 0.05;
    auto eta = [n, a, b](double x) {
      return a * (std::sin(n * x) - std::sin(x)) + b * (std::cos(n * x) - std::cos(2.0 * x));
    };
    auto kernel_at = [&](double t) {
      const auto base = s.kernel;
      return CyclicKernel(
          "perturbed", [base, eta, t](double r) { return base.phi(r) + t * eta(r); },
          base.psi0() + t * a * (n - 1));
    };
    const double h = 1.0;
    const double fm = weighted_square_norm(kernel_at(-h), m);
    const double fp = weighted_square_norm(kernel_at(h), m);
    EXPECT_GT(fm, f0);
    EXPECT_GT(fp, f0);
    const double vertex = -h * (fp - fm) / (2.0 * (fp - 2.0 * f0 + fm));
    EXPECT_NEAR(vertex, 0.0, 1e-6);
  }
}

TEST(ObjectiveGap, ZeroForItself) {
  const auto& s = cauchy_solution();
  EXPECT_NEAR(objective_gap(cauchy_density(), s.kernel, s), 0.0, 1e-12);
}

TEST(ObjectiveGap, FourierUnderCauchyPositive) {
  const auto& s = cauchy_solution();
  const double gap = objective_gap(cauchy_density(), fourier_kernel(), s);
  EXPECT_GT(gap, 0.0);
  EXPECT_NEAR(gap, 0.0575168 - 0.0375286, 1e-5);
}

TEST(ObjectiveGap, FourierUnderConstantWeightZero) {
  const auto s = solve_optimal_kernel(constant_weight());
  EXPECT_NEAR(objective_gap(constant_weight(), fourier_kernel(), s), 0.0, 1e-9);
}

TEST(ObjectiveGap, NonNegativeForBuiltins) {
  for (const auto* s : {&cauchy_solution(), &gaussian_solution()}) {
    const auto m = density_by_name(s->m_name);
    for (auto b : all_builtins()) EXPECT_GE(objective_gap(m, make_builtin(b), *s), -1e-9);
  }
}

TEST(Solver, RejectsWeightVanishingOnGrid) {
  DensityFn m = uniform_density(1.0);  // no mass near x = pi
  m.shape_lattice = nullptr;
  EXPECT_THROW(solve_optimal_kernel(m), NumericError);
}
