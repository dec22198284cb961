#pragma once

// Product-kernel Monte Carlo density estimator
//
//   m_hat(y) = (1/n) sum_i prod_j phi(R (y_j - X_ij)) / (y_j - X_ij),
//
// its population counterpart m_{R,phi}(y) (the estimator's expectation), and
// a product-Gaussian KDE baseline.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cyclic/densities.hpp"
#include "cyclic/errors.hpp"
#include "cyclic/kernels.hpp"
#include "cyclic/lattice.hpp"
#include "cyclic/parallel.hpp"
#include "cyclic/quadrature.hpp"
#include "cyclic/summation.hpp"

namespace cyclic {

// Row-major n x d observations.
class SampleMatrix {
 public:
  SampleMatrix() = default;

  SampleMatrix(std::size_t n, std::size_t d, std::vector<double> data)
      : n_(n), d_(d), data_(std::move(data)) {
    if (n_ < 1 || d_ < 1) throw ValidationError("SampleMatrix: need n >= 1 and d >= 1");
    if (data_.size() != n_ * d_) throw ValidationError("SampleMatrix: data size does not match n*d");
    for (double v : data_) {
      if (!std::isfinite(v)) throw ValidationError("SampleMatrix: entries must be finite");
    }
  }

  static SampleMatrix column(std::vector<double> values) {
    const std::size_t n = values.size();
    return {n, 1, std::move(values)};
  }

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * d_, d_}; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * d_ + j]; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

struct EstimatorConfig {
  CyclicKernel kernel = fourier_kernel();
  double R = 1.0;
  double coincidence_eps = kCoincidenceEps;

  void validate() const {
    if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("EstimatorConfig: R must be positive");
    if (!(coincidence_eps > 0.0 && coincidence_eps <= 1e-6)) {
      throw ValidationError("EstimatorConfig: coincidence_eps must lie in (0, 1e-6]");
    }
  }
};

// phi(R u) / u = R psi(R u), so each factor stays finite when a query point
// coincides with a sample.
inline double estimate_at(const SampleMatrix& s, const EstimatorConfig& cfg, std::span<const double> y) {
  cfg.validate();
  if (y.size() != s.d()) {
    throw ValidationError("estimate_at: query has dimension " + std::to_string(y.size()) +
                          " but samples have " + std::to_string(s.d()));
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw ValidationError("estimate_at: query must be finite");
  }
  std::vector<double> terms(s.n());
  for (std::size_t i = 0; i < s.n(); ++i) {
    const auto x = s.row(i);
    double prod = 1.0;
    for (std::size_t j = 0; j < s.d(); ++j) {
      prod *= cfg.R * cfg.kernel.psi(cfg.R * (y[j] - x[j]), cfg.coincidence_eps);
    }
    terms[i] = prod;
  }
  return pairwise_sum(terms) / static_cast<double>(s.n());
}

inline double estimate_at(const SampleMatrix& s, const EstimatorConfig& cfg, double y) {
  return estimate_at(s, cfg, std::span<const double>(&y, 1));
}

// Each point is evaluated exactly as estimate_at, so results are identical for
// every thread count.
inline std::vector<double> estimate_grid(const SampleMatrix& s, const EstimatorConfig& cfg,
                                         const std::vector<std::vector<double>>& grid,
                                         unsigned threads = 1) {
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) { out[i] = estimate_at(s, cfg, grid[i]); });
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian product-kernel baseline

// h_j = n^{-1/(d+4)} sd_j, with the unbiased sample standard deviation.
inline std::vector<double> silverman_bandwidths(const SampleMatrix& s) {
  if (s.n() < 2) throw ValidationError("silverman_bandwidths: need at least two samples");
  const double n = static_cast<double>(s.n());
  const double factor = std::pow(n, -1.0 / (static_cast<double>(s.d()) + 4.0));
  std::vector<double> h(s.d());
  for (std::size_t j = 0; j < s.d(); ++j) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < s.n(); ++i) sum += s(i, j);
    const double mean = sum.value() / n;
    CompensatedSum ss;
    for (std::size_t i = 0; i < s.n(); ++i) {
      const double d = s(i, j) - mean;
      ss += d * d;
    }
    const double var = ss.value() / (n - 1.0);
    if (!(var > 0.0)) {
      throw ValidationError("silverman_bandwidths: coordinate " + std::to_string(j) + " has zero variance");
    }
    h[j] = factor * std::sqrt(var);
  }
  return h;
}

inline double gaussian_kde(const SampleMatrix& s, std::span<const double> y, std::span<const double> h) {
  if (y.size() != s.d() || h.size() != s.d()) throw ValidationError("gaussian_kde: dimension mismatch");
  constexpr double c = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  double norm = 1.0;
  for (double hj : h) {
    if (!(hj > 0.0)) throw ValidationError("gaussian_kde: bandwidths must be positive");
    norm *= c / hj;
  }
  std::vector<double> terms(s.n());
  for (std::size_t i = 0; i < s.n(); ++i) {
    double q = 0.0;
    for (std::size_t j = 0; j < s.d(); ++j) {
      const double z = (y[j] - s(i, j)) / h[j];
      q += z * z;
    }
    terms[i] = std::exp(-0.5 * q);
  }
  return norm * pairwise_sum(terms) / static_cast<double>(s.n());
}

inline double gaussian_kde_baseline(const SampleMatrix& s, std::span<const double> y) {
  const auto h = silverman_bandwidths(s);
  return gaussian_kde(s, y, h);
}

// ---------------------------------------------------------------------------
// Population quantities

enum class SmoothingRoute {
  automatic,  // spectral when available, folded otherwise
  folded,     // period-folded quadrature in the spatial domain
  spectral,   // sine coefficients of phi against the characteristic function
};

namespace detail {

inline QuadSpec smoothing_quad() { return {1e-14, 1e-11, 50000}; }

// Shortest half-width Z (in units of x) beyond which the density's tail,
// weighted by the 1/u decay of the kernel ratio, is below tol.
inline double smoothing_cutoff(const DensityFn& m, double R, double y) {
  const double tol = 1e-14;
  for (double z = 4.0; z <= 1e8; z *= 1.5) {
    const double env = m.tail_envelope ? m.tail_envelope(z) : m.sup_norm;
    if (env / (R * (z + std::abs(y))) <= tol) return z;
  }
  throw NumericError("smoothed_density: density tail too heavy to truncate");
}

}  // namespace detail

// m_{R,phi}(y) = int phi(u)/u m(y - u/R) du, folded onto (0, 2 pi):
// int_0^{2 pi} sum_k psi(t + 2 pi k) m(y - (t + 2 pi k)/R) dt, with k running
// over a range symmetric in u.
inline double smoothed_density_folded(const DensityFn& m, const CyclicKernel& kernel, double R, double y) {
  if (!(R > 0.0)) throw ValidationError("smoothed_density: R must be positive");
  const double z = detail::smoothing_cutoff(m, R, y);
  const auto K = static_cast<long>(std::ceil(R * (z + std::abs(y)) / kTwoPi));
  auto integrand = [&](double t) {
    const double p = kernel.phi(t);
    CompensatedSum s;
    for (long k = K; k >= 1; --k) {
      const double a = kTwoPi * static_cast<double>(k);
      const double up = t + a;
      const double um = t - a - kTwoPi;  // pairs k with -(k+1)
      s += p / up * m.eval(y - up / R) + p / um * m.eval(y - um / R);
    }
    s += kernel.psi(t) * m.eval(y - t / R);
    const double u1 = t - kTwoPi;
    s += kernel.psi(u1) * m.eval(y - u1 / R);
    return s.value();
  };
  return integrate_fundamental(integrand, detail::smoothing_quad(), kernel.kinks());
}

// Sine coefficients c_n = int_0^{2 pi} phi(x) sin(n x) dx. For an odd kernel
// phi = sum_n (c_n / pi) sin(n x) and the constraint reads sum_n c_n = 1.
struct SineExpansion {
  std::vector<double> c;  // c[n-1] for n = 1..N
  bool odd = false;
};

inline SineExpansion sine_expansion(const CyclicKernel& k, std::size_t harmonics = 128) {
  const QuadSpec q{1e-15, 1e-12, 50000};
  auto breaks_for = [&](std::size_t n) {
    std::vector<double> b = k.kinks();
    for (std::size_t j = 1; j < 2 * n; ++j) b.push_back(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
    return b;
  };
  SineExpansion e;
  e.odd = true;
  for (std::size_t n = 1; n <= 8; ++n) {
    const double nd = static_cast<double>(n);
    const double a = integrate_fundamental([&](double x) { return k.phi(x) * std::cos(nd * x); }, q, breaks_for(n));
    if (std::abs(a) > 1e-9) e.odd = false;
  }
  e.c.resize(harmonics);
  for (std::size_t n = 1; n <= harmonics; ++n) {
    const double nd = static_cast<double>(n);
    const double c = integrate_fundamental([&](double x) { return k.phi(x) * std::sin(nd * x); }, q, breaks_for(n));
    e.c[n - 1] = std::abs(c) < 1e-15 ? 0.0 : c;
  }
  return e;
}

// Tail of the inverse transform, (1/pi) int_Omega^inf m_hat(w) cos(w y) dw.
inline double spectral_tail(const DensityFn& m, double omega, double y) {
  const QuadSpec q{1e-300, 1e-10, 20000};
  if (y == 0.0) return std::numbers::inv_pi * integrate_half_line(m.char_fn, omega, q);
  const double period = std::numbers::pi / std::abs(y);
  CompensatedSum s;
  for (int j = 0; j < 200000; ++j) {
    const double a = omega + period * j;
    const double b = a + period;
    const double v = integrate_adaptive([&](double w) { return m.char_fn(w) * std::cos(w * y); }, a, b, q).value;
    s += v;
    if (std::abs(m.char_fn(b)) * period <= 1e-17 * std::abs(s.value()) + 1e-300) {
      return std::numbers::inv_pi * s.value();
    }
  }
  throw NumericError("spectral_tail: characteristic function decays too slowly");
}

// The sine expansion stops at N harmonics; the terms it drops are weighted by
// the transform beyond N R, so the route is used only where m_hat is
// negligible there relative to its value at R.
inline bool spectral_route_available(const DensityFn& m, const SineExpansion& e, double R) {
  if (!m.char_fn || !m.symmetric || !e.odd || e.c.empty()) return false;
  const double cut = std::abs(m.char_fn(R * static_cast<double>(e.c.size())));
  return cut <= 1e-16 * std::abs(m.char_fn(R));
}

// m_{R,phi}(y) - m(y) = -sum_n c_n T(n R, y); no cancellation against m(y).
inline double smoothing_bias_spectral(const DensityFn& m, const SineExpansion& e, double R, double y) {
  if (!spectral_route_available(m, e, R)) {
    throw ValidationError("spectral route needs a symmetric density whose characteristic "
                          "function is negligible beyond the expansion, and an odd kernel");
  }
  CompensatedSum s;
  for (std::size_t n = 1; n <= e.c.size(); ++n) {
    const double cn = e.c[n - 1];
    if (cn == 0.0) continue;
    const double t = spectral_tail(m, R * static_cast<double>(n), y);
    s += -cn * t;
    if (n > 1 && std::abs(t) <= 1e-20 * std::abs(s.value())) break;
    if (t == 0.0) break;
  }
  return s.value();
}

inline double smoothing_bias(const DensityFn& m, const CyclicKernel& kernel, double R, double y,
                             SmoothingRoute route = SmoothingRoute::automatic) {
  if (route != SmoothingRoute::folded) {
    const SineExpansion e = sine_expansion(kernel);
    if (spectral_route_available(m, e, R)) return smoothing_bias_spectral(m, e, R, y);
    if (route == SmoothingRoute::spectral) {
      throw ValidationError("spectral route unavailable for this kernel and density");
    }
  }
  return smoothed_density_folded(m, kernel, R, y) - m.eval(y);
}

inline double smoothed_density(const DensityFn& m, const CyclicKernel& kernel, double R, double y,
                               SmoothingRoute route = SmoothingRoute::folded) {
  if (route == SmoothingRoute::folded) return smoothed_density_folded(m, kernel, R, y);
  return m.eval(y) + smoothing_bias(m, kernel, R, y, route);
}

// Product-form density: the smoothing factorizes over coordinates.
inline double smoothed_density(std::span<const DensityFn> marginals, const CyclicKernel& kernel,
                               double R, std::span<const double> y) {
  if (marginals.size() != y.size()) throw ValidationError("smoothed_density: dimension mismatch");
  double p = 1.0;
  for (std::size_t j = 0; j < y.size(); ++j) p *= smoothed_density(marginals[j], kernel, R, y[j]);
  return p;
}

struct BiasPoint {
  double R = 0.0;
  double bias = 0.0;  // |m_{R,phi}(y) - m(y)|
};

inline std::vector<BiasPoint> bias_decay_curve(const DensityFn& m, const CyclicKernel& kernel, double y,
                                               const std::vector<double>& R_list,
                                               SmoothingRoute route = SmoothingRoute::automatic) {
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (!(R_list[i] > 0.0) || (i > 0 && !(R_list[i] > R_list[i - 1]))) {
      throw ValidationError("bias_decay_curve: R values must be positive and increasing");
    }
  }
  std::vector<BiasPoint> out;
  SineExpansion e;
  if (route != SmoothingRoute::folded) e = sine_expansion(kernel);
  for (double R : R_list) {
    const bool spectral = route != SmoothingRoute::folded && spectral_route_available(m, e, R);
    if (route == SmoothingRoute::spectral && !spectral) {
      throw ValidationError("spectral route unavailable for this kernel and density");
    }
    const double b = spectral ? smoothing_bias_spectral(m, e, R, y)
                              : smoothed_density_folded(m, kernel, R, y) - m.eval(y);
    out.push_back({R, std::abs(b)});
  }
  return out;
}

// E[(phi(R(y - X)) / (y - X))^2] = R int_0^{2 pi} phi(t)^2
//   sum_k m(y - (t + 2 pi k)/R) / (t + 2 pi k)^2 dt.
inline double second_moment(const DensityFn& m, const CyclicKernel& kernel, double R, double y) {
  if (!(R > 0.0)) throw ValidationError("second_moment: R must be positive");
  const LatticeSumSpec spec{100000000, 1e-13};
  auto weight = [&](double u) { return m.eval(y - u / R); };
  auto env = [&](double r) {
    const double z = std::max(0.0, r / R - std::abs(y));
    return m.tail_envelope ? m.tail_envelope(z) : m.sup_norm;
  };
  auto integrand = [&](double t) {
    const double p = kernel.phi(t);
    if (p == 0.0) return 0.0;
    return p * p * weighted_lattice_sum(t, weight, env, spec);
  };
  return R * integrate_fundamental(integrand, detail::smoothing_quad(), kernel.kinks());
}

// Var(m_hat_R(y)) = Var(phi(R(y - X)) / (y - X)) / n.
inline double predicted_variance(const DensityFn& m, const CyclicKernel& kernel, double R, double y,
                                 std::size_t n) {
  const double mean = smoothed_density_folded(m, kernel, R, y);
  return (second_moment(m, kernel, R, y) - mean * mean) / static_cast<double>(n);
}

}  // namespace cyclic
