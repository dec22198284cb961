#pragma once

// Folded lattice sums over the period-2*pi lattice:
//
//   alpha(x)   = sum_k 1 / (x + 2 pi k)            = cot(x/2) / 2
//   beta(x)    = sum_k 1 / (x + 2 pi k)^2          = 1 / (4 sin^2(x/2))
//   beta_m(x)  = sum_k m(x + 2 pi k) / (x + 2 pi k)^2
//
// for x in (0, 2 pi). The truncated series are the reference for every closed
// form in this header.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "cyclic/errors.hpp"
#include "cyclic/quadrature.hpp"
#include "cyclic/summation.hpp"

namespace cyclic {

struct LatticeSumSpec {
  long max_terms = 100000;  // last |k| kept; each series documents its pairing
  double tail_tol = 1e-6;   // bound on the discarded tail

  void validate() const {
    if (max_terms < 1) throw ValidationError("LatticeSumSpec: max_terms must be >= 1");
    if (!(tail_tol > 0.0)) throw ValidationError("LatticeSumSpec: tail_tol must be positive");
  }

  static LatticeSumSpec beta_default() { return {100000, 1e-6}; }
  static LatticeSumSpec alpha_default() { return {1000000, 1e-6}; }
};

// A univariate density together with what the lattice sums need to know
// about it.
struct DensityFn {
  std::string name;
  std::function<double(double)> eval;
  // sup of eval over |t| >= r; non-increasing in r.
  std::function<double(double)> tail_envelope;
  double sup_norm = 0.0;
  // eval = shape_scale * shape for the unnormalized shape the optimal-kernel
  // multipliers are reported against (1/(1+x^2) for the Cauchy density).
  double shape_scale = 1.0;
  // Optional closed form of sum_k shape(x + 2 pi k) / (x + 2 pi k)^2.
  std::function<double(double)> shape_lattice;
  // Optional real characteristic function of a symmetric density.
  std::function<double(double)> char_fn;
  bool symmetric = false;

  double operator()(double x) const { return eval(x); }
};

namespace detail {

inline void require_fundamental(double x, const char* who) {
  if (!(x > 0.0 && x < kTwoPi)) {
    throw ValidationError(std::string(who) + ": argument must lie in (0, 2*pi), got " +
                          std::to_string(x));
  }
}

// sum_{j >= k} 1/j^2 <= 1/k + 1/k^2.
inline double inverse_square_tail(long k) {
  if (k <= 0) return std::numeric_limits<double>::infinity();
  const double kd = static_cast<double>(k);
  return 1.0 / kd + 1.0 / (kd * kd);
}

// Bound on sum_{|k| > K} 1/(x + 2 pi k)^2 for x in (0, 2 pi): every such term
// is at most (2 pi (|k| - 1))^-2.
inline double beta_tail_bound(long max_terms) {
  return 2.0 / (4.0 * std::numbers::pi * std::numbers::pi) * inverse_square_tail(max_terms);
}

// Bound on the discarded pairs for k > K. Pair k is
// (2x - 2 pi) / ((x + 2 pi k)(x - 2 pi (k + 1))) and both factors of the
// denominator exceed 2 pi k in magnitude, so it is at most 1 / (2 pi k^2).
inline double alpha_tail_bound(long max_terms) {
  return inverse_square_tail(max_terms + 1) / (2.0 * std::numbers::pi);
}

}  // namespace detail

// Truncated alpha series, pairing the term at k with the one at -(k + 1) for
// k = 0 .. max_terms. The series converges only conditionally, so the pairing
// is part of the definition; this one is symmetric about pi, where every pair
// vanishes exactly.
inline double alpha_series(double x, const LatticeSumSpec& spec = LatticeSumSpec::alpha_default()) {
  detail::require_fundamental(x, "alpha_series");
  spec.validate();
  const double bound = detail::alpha_tail_bound(spec.max_terms);
  if (bound > spec.tail_tol) {
    throw NumericError("alpha_series: tail bound " + std::to_string(bound) +
                       " exceeds tail_tol with max_terms=" + std::to_string(spec.max_terms));
  }
  // Smallest pairs first; the common numerator is factored out.
  CompensatedSum s;
  for (long k = spec.max_terms; k >= 0; --k) {
    const double a = kTwoPi * static_cast<double>(k);
    s += 1.0 / ((x + a) * (x - a - kTwoPi));
  }
  return (2.0 * x - kTwoPi) * s.value();
}

inline double alpha_closed(double x) {
  detail::require_fundamental(x, "alpha_closed");
  return 0.5 * std::cos(0.5 * x) / std::sin(0.5 * x);
}

inline double beta_series(double x, const LatticeSumSpec& spec = LatticeSumSpec::beta_default()) {
  detail::require_fundamental(x, "beta_series");
  spec.validate();
  const double bound = detail::beta_tail_bound(spec.max_terms);
  if (bound > spec.tail_tol) {
    throw NumericError("beta_series: tail bound " + std::to_string(bound) +
                       " exceeds tail_tol with max_terms=" + std::to_string(spec.max_terms));
  }
  CompensatedSum s;
  for (long k = spec.max_terms; k >= 1; --k) {
    const double a = kTwoPi * static_cast<double>(k);
    const double p = x + a;
    const double q = x - a;
    s += 1.0 / (p * p) + 1.0 / (q * q);
  }
  s += 1.0 / (x * x);
  return s.value();
}

// Equals -alpha'(x). Positive on the whole interval.
inline double beta_closed(double x) {
  detail::require_fundamental(x, "beta_closed");
  const double s = std::sin(0.5 * x);
  return 0.25 / (s * s);
}

// sum_k w(x + 2 pi k) / (x + 2 pi k)^2 for a weight with a known tail
// envelope (sup of |w| over |t| >= r). Terms are added outwards from k = 0
// until the certified remainder drops under tail_tol.
template <class W, class Env>
double weighted_lattice_sum(double x, W&& weight, Env&& envelope, const LatticeSumSpec& spec) {
  spec.validate();
  CompensatedSum s;
  s += weight(x) / (x * x);
  for (long k = 1;; ++k) {
    const double a = kTwoPi * static_cast<double>(k);
    const double p = x + a;
    const double q = x - a;
    s += weight(p) / (p * p) + weight(q) / (q * q);
    // Every remaining term has |x + 2 pi k'| >= 2 pi k.
    const double bound = envelope(kTwoPi * static_cast<double>(k)) * detail::beta_tail_bound(k + 1);
    if (bound <= spec.tail_tol) break;
    if (k >= spec.max_terms) {
      throw NumericError("weighted lattice sum: tail bound " + std::to_string(bound) +
                         " not below tail_tol after max_terms=" + std::to_string(spec.max_terms));
    }
  }
  return s.value();
}

inline double beta_weighted(double x, const DensityFn& m,
                            const LatticeSumSpec& spec = LatticeSumSpec{100000, 1e-13}) {
  detail::require_fundamental(x, "beta_weighted");
  auto env = [&](double r) {
    return m.tail_envelope ? m.tail_envelope(r) : m.sup_norm;
  };
  return weighted_lattice_sum(x, m.eval, env, spec);
}

// sum_k 1 / ((x + 2 pi k)^2 (1 + (x + 2 pi k)^2)), i.e. the lattice sum of the
// unnormalized Cauchy shape 1/(1+x^2). The normalized Cauchy density gives
// this value divided by pi.
inline double beta_cauchy_closed(double x) {
  detail::require_fundamental(x, "beta_cauchy_closed");
  const double s = std::sin(0.5 * x);
  const double cot = std::cos(0.5 * x) / s;
  const double coth_half = 1.0 / std::tanh(0.5);
  const double c2 = cot * cot;
  return 0.25 / (s * s) - 0.5 * coth_half * (1.0 + c2) / (coth_half * coth_half + c2);
}

}  // namespace cyclic
