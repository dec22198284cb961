#pragma once

// Cyclic kernels: 2*pi-periodic phi with
//
//   int_0^{2 pi} phi = 0   and   int_R phi(x)/x dx = int_0^{2 pi} phi alpha = 1,
//
// and the two variance functionals int (phi/x)^2 and int (phi/x)^2 m.

#include <boost/math/special_functions/polygamma.hpp>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cyclic/errors.hpp"
#include "cyclic/lattice.hpp"
#include "cyclic/quadrature.hpp"
#include "cyclic/spline.hpp"
#include "cyclic/summation.hpp"

namespace cyclic {

enum class NormalizationKind { analytic, numeric };

struct Normalization {
  NormalizationKind kind = NormalizationKind::analytic;
  double scale = 1.0;  // factor applied on top of the analytic form
};

inline constexpr double kCoincidenceEps = 1e-10;

// Immutable after construction; copies share the underlying evaluator.
class CyclicKernel {
 public:
  // `centered` evaluates phi on the centered domain [-pi, pi). `kinks` lists
  // points of [0, 2 pi) where phi loses smoothness.
  CyclicKernel(std::string name, std::function<double(double)> centered, double psi0,
               std::vector<double> kinks = {}, Normalization norm = {}, double psi_slope = 0.0)
      : name_(std::move(name)),
        centered_(std::make_shared<const std::function<double(double)>>(std::move(centered))),
        psi0_(psi0),
        psi_slope_(psi_slope),
        kinks_(std::move(kinks)),
        norm_(norm) {}

  const std::string& name() const { return name_; }
  double psi0() const { return psi0_; }
  const std::vector<double>& kinks() const { return kinks_; }
  const Normalization& normalization() const { return norm_; }

  static double reduce(double x) {
    double r = x - kTwoPi * std::round(x / kTwoPi);
    if (r >= std::numbers::pi) r -= kTwoPi;
    if (r < -std::numbers::pi) r += kTwoPi;
    return r;
  }

  double phi(double x) const { return scale_ * (*centered_)(reduce(x)); }

  double psi(double u, double eps = kCoincidenceEps) const {
    if (std::abs(u) < eps) return psi0_ + psi_slope_ * u;
    if (ratio_ && std::abs(u) < 1.0) return scale_ * (*ratio_)(u);
    return phi(u) / u;
  }

  // Kernel multiplied by c; records the scale as a numeric normalization.
  CyclicKernel scaled(double c) const {
    CyclicKernel k = *this;
    k.scale_ *= c;
    k.psi0_ *= c;
    k.psi_slope_ *= c;
    k.norm_ = {NormalizationKind::numeric, norm_.scale * c};
    return k;
  }

  CyclicKernel renamed(std::string name) const {
    CyclicKernel k = *this;
    k.name_ = std::move(name);
    return k;
  }

  // Optional accurate evaluator of phi(u)/u for small |u| (tabulated kernels).
  void set_ratio(std::function<double(double)> ratio) {
    ratio_ = std::make_shared<const std::function<double(double)>>(std::move(ratio));
  }

 private:
  std::string name_;
  std::shared_ptr<const std::function<double(double)>> centered_;
  std::shared_ptr<const std::function<double(double)>> ratio_;
  double scale_ = 1.0;
  double psi0_;
  double psi_slope_;
  std::vector<double> kinks_;
  Normalization norm_;
};

inline double eval_phi(const CyclicKernel& k, double x) { return k.phi(x); }
inline double eval_psi(const CyclicKernel& k, double u) { return k.psi(u); }

struct KernelConstraintReport {
  double zero_mean_residual = 0.0;      // |int_0^{2pi} phi|
  double line_integral_residual = 0.0;  // |int_0^{2pi} phi alpha - 1|
  double line_integral = 0.0;
  double square_norm = 0.0;
  bool passed = false;
};

inline constexpr double kZeroMeanTol = 1e-8;
inline constexpr double kLineIntegralTol = 1e-6;

inline QuadSpec kernel_quad_spec() { return {1e-14, 1e-13, 50000}; }

inline double kernel_mean(const CyclicKernel& k, const QuadSpec& q = kernel_quad_spec()) {
  return integrate_fundamental([&](double x) { return k.phi(x); }, q, k.kinks());
}

// int_0^{2 pi} phi(x) alpha(x) dx; phi alpha is bounded at both ends.
inline double line_integral(const CyclicKernel& k, const QuadSpec& q = kernel_quad_spec()) {
  return integrate_fundamental([&](double x) { return k.phi(x) * alpha_closed(x); }, q, k.kinks());
}

// int_R (phi(x)/x)^2 dx folded onto the fundamental domain as int phi^2 beta.
inline double square_norm(const CyclicKernel& k, const QuadSpec& q = kernel_quad_spec()) {
  return integrate_fundamental(
      [&](double x) {
        const double p = k.phi(x);
        return p * p * beta_closed(x);
      },
      q, k.kinks());
}

inline KernelConstraintReport check_constraints(const CyclicKernel& k,
                                                const QuadSpec& q = kernel_quad_spec()) {
  KernelConstraintReport r;
  r.zero_mean_residual = std::abs(kernel_mean(k, q));
  r.line_integral = line_integral(k, q);
  r.line_integral_residual = std::abs(r.line_integral - 1.0);
  r.square_norm = square_norm(k, q);
  r.passed = r.zero_mean_residual < kZeroMeanTol && r.line_integral_residual < kLineIntegralTol;
  return r;
}

// Lattice sum of the normalized density m, using its closed form when known.
inline double density_lattice(double x, const DensityFn& m, const LatticeSumSpec& spec) {
  if (m.shape_lattice) return m.shape_scale * m.shape_lattice(x);
  return beta_weighted(x, m, spec);
}

// int_R (phi(x)/x)^2 m(x) dx = int_0^{2 pi} phi^2 beta_m.
inline double weighted_square_norm(const CyclicKernel& k, const DensityFn& m,
                                   const LatticeSumSpec& spec = {100000, 1e-13},
                                   const QuadSpec& q = kernel_quad_spec()) {
  return integrate_fundamental(
      [&](double x) {
        const double p = k.phi(x);
        return p == 0.0 ? 0.0 : p * p * density_lattice(x, m, spec);
      },
      q, k.kinks());
}

// Rescales the kernel so that int phi alpha = 1. The zero-mean constraint
// cannot be repaired by scaling and must already hold.
inline CyclicKernel normalize_kernel(const CyclicKernel& k, const QuadSpec& q = kernel_quad_spec()) {
  const double mean = kernel_mean(k, q);
  if (std::abs(mean) >= kZeroMeanTol) {
    throw ValidationError("kernel '" + k.name() + "' does not integrate to zero over a period (" +
                          std::to_string(mean) + ")");
  }
  const double li = line_integral(k, q);
  if (std::abs(li) < 1e-12) {
    throw ValidationError("kernel '" + k.name() + "' has zero line integral");
  }
  if (std::abs(li - 1.0) < kLineIntegralTol) return k;
  return k.scaled(1.0 / li);
}

// ---------------------------------------------------------------------------
// Built-in analytic kernels

inline CyclicKernel fourier_kernel() {
  using std::numbers::inv_pi;
  return CyclicKernel("fourier", [](double r) { return inv_pi * std::sin(r); }, inv_pi);
}

// A normalizing constant from its defining series, with a bound on what the
// tail correction may have missed.
struct SeriesConstant {
  double value = 0.0;
  double tail_bound = 0.0;
  long terms = 0;
};

namespace detail {

// Sums pairs t(k) + t(-k) for k = K..1 plus t(0). The pair sums behave like
// c k^-p, so the discarded part is estimated as c sum_{k>K} k^-p (a Hurwitz
// zeta value) and added back. Its relative error is O(1/K).
template <class Term>
SeriesConstant symmetric_series(Term&& term, long max_k, int decay_order) {
  CompensatedSum s;
  double last_pair = 0.0;
  for (long k = max_k; k >= 1; --k) {
    const double pair = term(k) + term(-k);
    if (k == max_k) last_pair = pair;
    s += pair;
  }
  s += term(0);
  const double kd = static_cast<double>(max_k);
  const double c = last_pair * std::pow(kd, decay_order);
  // sum_{k>K} k^-p = (-1)^p psi^(p-1)(K+1) / (p-1)!
  const int n = decay_order - 1;
  double fact = 1.0;
  for (int j = 2; j <= n; ++j) fact *= j;
  const double zeta_tail = ((decay_order % 2 == 0) ? 1.0 : -1.0) *
                           boost::math::polygamma(n, kd + 1.0) / fact;
  const double tail = c * zeta_tail;
  s += tail;
  return {s.value(), 2.0 * std::abs(tail) / kd, max_k};
}

}  // namespace detail

// C1 = sum_k [2(2k+1) log((4k+3)/(4k+1)) - 4k log((4k+1)/(4k-1))], the line
// integral of the unit-slope triangle wave 2x/pi.
inline SeriesConstant haar_constant_series(long max_k = 10000) {
  auto term = [](long k) {
    const double kd = static_cast<double>(k);
    double t = 2.0 * (2.0 * kd + 1.0) * std::log1p(2.0 / (4.0 * kd + 1.0));
    if (k != 0) t -= 4.0 * kd * std::log1p(2.0 / (4.0 * kd - 1.0));
    return t;
  };
  return detail::symmetric_series(term, max_k, 4);
}

// C2 = sum_k [4 + 8k(2k-1) log(2k/(2k-1)) - 8k(2k+1) log((2k+1)/(2k))], the
// line integral of the piecewise parabola 4x(pi-x)/pi^2. The constant 4 per
// period comes from the polynomial part of int (x-a)(b-x)/x.
inline SeriesConstant spline_constant_series(long max_k = 10000) {
  // Expanding both logs in u = 1/(2k) leaves only even powers,
  // term(k) = -8 sum_{j>=1} u^{2j} / ((2j+1)(2j+2)), which avoids the
  // cancellation between the two O(k) log terms.
  auto term = [](long k) {
    if (k == 0) return 4.0;
    const double u2 = 0.25 / (static_cast<double>(k) * static_cast<double>(k));
    double p = 1.0, t = 0.0;
    for (int j = 1; j < 60; ++j) {
      p *= u2;
      const double add = p / ((2.0 * j + 1.0) * (2.0 * j + 2.0));
      t += add;
      if (add < 1e-18 * t) break;
    }
    return -8.0 * t;
  };
  return detail::symmetric_series(term, max_k, 2);
}

inline CyclicKernel haar_kernel_with_constant(double c1) {
  using std::numbers::pi;
  const double slope = 2.0 / (c1 * pi);
  auto f = [slope](double r) {
    if (r > 0.5 * pi) return slope * (pi - r);
    if (r < -0.5 * pi) return slope * (-pi - r);
    return slope * r;
  };
  return CyclicKernel("haar", f, slope, {0.5 * pi, 1.5 * pi});
}

inline CyclicKernel spline_kernel_with_constant(double c2) {
  using std::numbers::pi;
  const double a = 4.0 / (c2 * pi * pi);
  auto f = [a](double r) { return r >= 0.0 ? a * r * (pi - r) : a * r * (r + pi); };
  return CyclicKernel("spline", f, a * pi, {pi});
}

// Builds the kernel from the series constant and falls back to numeric
// rescaling if the series leaves a residual above the constraint tolerance.
inline CyclicKernel haar_kernel() {
  return normalize_kernel(haar_kernel_with_constant(haar_constant_series().value));
}

inline CyclicKernel spline_kernel() {
  return normalize_kernel(spline_kernel_with_constant(spline_constant_series().value));
}

// ---------------------------------------------------------------------------
// Tabulated kernels

inline constexpr std::size_t kTabulationSize = 4096;

inline std::vector<double> tabulation_nodes(std::size_t n = kTabulationSize) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
  return x;
}

// Periodic cubic-spline kernel through values at x_j = 2 pi j / N. The value
// at x = 0 must vanish.
inline CyclicKernel tabulated_kernel(std::string name, std::span<const double> values) {
  if (values.size() < 8) throw ValidationError("tabulated kernel needs at least 8 nodes");
  if (std::abs(values[0]) > 1e-12) {
    throw ValidationError("tabulated kernel '" + name + "' must vanish at x = 0");
  }
  std::vector<double> v(values.begin(), values.end());
  v[0] = 0.0;
  auto spline = std::make_shared<const PeriodicSpline>(v);
  const double psi0 = spline->derivative_at_zero();
  CyclicKernel k(std::move(name), [spline](double r) { return (*spline)(r); }, psi0);
  k.set_ratio([spline](double u) { return spline->ratio_to_offset(u); });
  return k;
}

inline std::vector<double> tabulate(const CyclicKernel& k, std::size_t n = kTabulationSize) {
  std::vector<double> out(n);
  const auto x = tabulation_nodes(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = j == 0 ? 0.0 : k.phi(x[j]);
  return out;
}

}  // namespace cyclic
