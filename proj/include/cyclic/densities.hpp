#pragma once

// Built-in densities. Each carries a tail envelope for certified lattice-sum
// truncation and, where known, a characteristic function.

#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>

#include "cyclic/lattice.hpp"
#include "cyclic/quadrature.hpp"

namespace cyclic {

inline DensityFn cauchy_density() {
  using std::numbers::inv_pi;
  DensityFn m;
  m.name = "cauchy";
  m.eval = [](double x) { return inv_pi / (1.0 + x * x); };
  m.tail_envelope = [](double r) { return inv_pi / (1.0 + r * r); };
  m.sup_norm = inv_pi;
  m.shape_scale = inv_pi;
  m.shape_lattice = [](double x) { return beta_cauchy_closed(x); };
  m.char_fn = [](double w) { return std::exp(-std::abs(w)); };
  m.symmetric = true;
  return m;
}

inline DensityFn gaussian_density() {
  constexpr double c = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;  // 1/sqrt(2 pi)
  DensityFn m;
  m.name = "gaussian";
  m.eval = [](double x) { return c * std::exp(-0.5 * x * x); };
  m.tail_envelope = [](double r) { return c * std::exp(-0.5 * r * r); };
  m.sup_norm = c;
  m.shape_scale = c;
  m.char_fn = [](double w) { return std::exp(-0.5 * w * w); };
  m.symmetric = true;
  return m;
}

inline DensityFn laplace_density() {
  DensityFn m;
  m.name = "laplace";
  m.eval = [](double x) { return 0.5 * std::exp(-std::abs(x)); };
  m.tail_envelope = [](double r) { return 0.5 * std::exp(-std::abs(r)); };
  m.sup_norm = 0.5;
  m.shape_scale = 0.5;
  m.char_fn = [](double w) { return 1.0 / (1.0 + w * w); };
  m.symmetric = true;
  return m;
}

// Uniform density on [-L, L]. Its shape lattice sum is beta(x) minus the
// terms that fall outside the support, which are trigamma tails.
inline DensityFn uniform_density(double half_width) {
  if (!(half_width > 0.0)) throw ValidationError("uniform_density: half_width must be positive");
  const double L = half_width;
  const double v = 0.5 / L;
  DensityFn m;
  m.name = "uniform";
  m.eval = [L, v](double x) { return std::abs(x) <= L ? v : 0.0; };
  m.tail_envelope = [L, v](double r) { return r <= L ? v : 0.0; };
  m.sup_norm = v;
  m.shape_scale = v;
  m.shape_lattice = [L](double x) {
    const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    // right side: k >= n_right with x + 2 pi k > L
    double n_right = std::floor((L - x) / kTwoPi) + 1.0;
    // left side: k = -j, j >= n_left with 2 pi j - x > L
    double n_left = std::floor((L + x) / kTwoPi) + 1.0;
    using boost::math::trigamma;
    const double outside = (trigamma(n_right + x / kTwoPi) + trigamma(n_left - x / kTwoPi)) / four_pi2;
    return beta_closed(x) - outside;
  };
  m.char_fn = [L](double w) {
    const double a = w * L;
    return a == 0.0 ? 1.0 : std::sin(a) / a;
  };
  m.symmetric = true;
  return m;
}

// The constant weight 1. Not a probability density; with it the weighted
// variance functional reduces to the unweighted one.
inline DensityFn constant_weight() {
  DensityFn m;
  m.name = "constant";
  m.eval = [](double) { return 1.0; };
  m.tail_envelope = [](double) { return 1.0; };
  m.sup_norm = 1.0;
  m.shape_scale = 1.0;
  m.shape_lattice = [](double x) { return beta_closed(x); };
  m.symmetric = true;
  return m;
}

// p(y | theta) = int N(y | 0, v^2) Gamma(v | shape 2, rate theta) dv.
inline DensityFn scale_mixture_density(double theta) {
  if (!(theta > 0.0)) throw ValidationError("scale_mixture_density: theta must be positive");
  constexpr double c = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  QuadSpec q{1e-15, 1e-11, 4000};
  auto pdf = [theta, q](double y) {
    if (y == 0.0) return theta * c;
    const double y2 = y * y;
    // theta^2 / sqrt(2 pi) * int_0^inf exp(-y^2 / (2 v^2) - theta v) dv
    auto f = [&](double v) {
      return v <= 0.0 ? 0.0 : std::exp(-0.5 * y2 / (v * v) - theta * v);
    };
    return theta * theta * c * integrate_half_line(f, 0.0, q);
  };
  DensityFn m;
  m.name = "scale_mixture";
  m.eval = pdf;
  m.tail_envelope = [pdf](double r) { return pdf(std::abs(r)); };
  m.sup_norm = theta * c;
  m.shape_scale = 1.0;
  // E exp(-v^2 w^2 / 2) under Gamma(2, theta)
  m.char_fn = [theta, q](double w) {
    const double w2 = w * w;
    auto f = [&](double v) { return v * std::exp(-theta * v - 0.5 * w2 * v * v); };
    return theta * theta * integrate_half_line(f, 0.0, q);
  };
  m.symmetric = true;
  return m;
}

// Bivariate density on R^2.
struct MultiDensityFn {
  std::string name;
  std::size_t dim = 2;
  std::function<double(std::span<const double>)> eval;
  double operator()(std::span<const double> x) const { return eval(x); }
};

struct BananaParams {
  double sigma1 = 2.0;
  double b = 0.5;
};

// x1 ~ N(0, sigma1^2), x2 = z + b (x1^2 - sigma1^2) with z ~ N(0, 1).
inline MultiDensityFn banana_density(BananaParams p) {
  if (!(p.sigma1 > 0.0)) throw ValidationError("banana_density: sigma1 must be positive");
  constexpr double c = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  MultiDensityFn m;
  m.name = "banana";
  m.dim = 2;
  m.eval = [p](std::span<const double> x) {
    const double z1 = x[0] / p.sigma1;
    const double z2 = x[1] - p.b * (x[0] * x[0] - p.sigma1 * p.sigma1);
    return (c / p.sigma1) * std::exp(-0.5 * z1 * z1) * c * std::exp(-0.5 * z2 * z2);
  };
  return m;
}

inline DensityFn density_by_name(const std::string& name, double param = 0.0) {
  if (name == "cauchy") return cauchy_density();
  if (name == "gaussian") return gaussian_density();
  if (name == "laplace") return laplace_density();
  if (name == "uniform") return uniform_density(param > 0.0 ? param : 1e6);
  if (name == "constant") return constant_weight();
  if (name == "scale_mixture") return scale_mixture_density(param > 0.0 ? param : 4.0);
  throw ValidationError("unknown density '" + name + "'");
}

}  // namespace cyclic
