#pragma once

// Minimizes int_0^{2 pi} phi^2 beta_m subject to int phi = 0 and
// int phi alpha = 1. The Euler-Lagrange condition makes phi a combination
// (a + b alpha) / beta_m, and both constraints are linear in (a, b):
//
//   [ int 1/beta_m      int alpha/beta_m   ] [a]   [0]
//   [ int alpha/beta_m  int alpha^2/beta_m ] [b] = [1]
//
// The multipliers are reported against the unnormalized shape of m
// (beta_m / shape_scale); the kernel itself does not depend on that scale.

#include <cmath>
#include <string>
#include <vector>

#include "cyclic/densities.hpp"
#include "cyclic/errors.hpp"
#include "cyclic/kernels.hpp"
#include "cyclic/lattice.hpp"
#include "cyclic/quadrature.hpp"

namespace cyclic {

inline constexpr double kGridMargin = 1e-3;
inline constexpr std::size_t kSolverGridSize = 4096;

struct OptimalKernelSolution {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<double> grid_x;       // kSolverGridSize nodes on [delta, 2 pi - delta]
  std::vector<double> beta_m_grid;  // beta_m at grid_x, normalized density
  CyclicKernel kernel = fourier_kernel();
  double objective_value = 0.0;  // weighted_square_norm(kernel, m)
  std::string m_name;
};

inline std::vector<double> solver_grid(std::size_t n = kSolverGridSize, double delta = kGridMargin) {
  std::vector<double> x(n);
  const double span = kTwoPi - 2.0 * delta;
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = delta + span * static_cast<double>(j) / static_cast<double>(n - 1);
  }
  return x;
}

inline OptimalKernelSolution solve_optimal_kernel(const DensityFn& m,
                                                  const LatticeSumSpec& spec = {100000, 1e-13},
                                                  const QuadSpec& quad = {1e-14, 1e-12, 50000}) {
  auto shape_lattice = [&](double x) {
    if (m.shape_lattice) return m.shape_lattice(x);
    return beta_weighted(x, m, spec) / m.shape_scale;
  };

  OptimalKernelSolution sol;
  sol.m_name = m.name;
  sol.grid_x = solver_grid();
  sol.beta_m_grid.resize(sol.grid_x.size());
  for (std::size_t j = 0; j < sol.grid_x.size(); ++j) {
    const double b = shape_lattice(sol.grid_x[j]);
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw NumericError("solve_optimal_kernel: beta_m is not positive at x=" +
                         std::to_string(sol.grid_x[j]));
    }
    sol.beta_m_grid[j] = b * m.shape_scale;
  }

  // 1/beta_m ~ x^2, alpha/beta_m ~ x and alpha^2/beta_m ~ 1 near the poles,
  // so all three integrands are bounded on the open interval.
  const double a11 = integrate_fundamental([&](double x) { return 1.0 / shape_lattice(x); }, quad);
  const double a12 = integrate_fundamental(
      [&](double x) { return alpha_closed(x) / shape_lattice(x); }, quad);
  const double a22 = integrate_fundamental(
      [&](double x) {
        const double a = alpha_closed(x);
        return a * a / shape_lattice(x);
      },
      quad);
  const double det = a11 * a22 - a12 * a12;
  if (std::abs(det) < 1e-12) {
    throw NumericError("solve_optimal_kernel: singular constraint system (det=" +
                       std::to_string(det) + ")");
  }
  sol.lambda1 = -a12 / det;
  sol.lambda2 = a11 / det;

  const auto nodes = tabulation_nodes();
  std::vector<double> values(nodes.size());
  values[0] = 0.0;
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    const double x = nodes[j];
    values[j] = (sol.lambda1 + sol.lambda2 * alpha_closed(x)) / shape_lattice(x);
  }
  sol.kernel = tabulated_kernel("optimal_" + m.name, values);
  sol.objective_value = weighted_square_norm(sol.kernel, m, spec);
  return sol;
}

// How much worse a candidate kernel does than the optimum under weight m.
inline double objective_gap(const DensityFn& m, const CyclicKernel& candidate,
                            const OptimalKernelSolution& optimal,
                            const LatticeSumSpec& spec = {100000, 1e-13}) {
  return weighted_square_norm(candidate, m, spec) - optimal.objective_value;
}

}  // namespace cyclic
