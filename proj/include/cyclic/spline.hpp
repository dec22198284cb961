#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "cyclic/errors.hpp"

namespace cyclic {

// Interpolating cubic spline of a 2*pi-periodic function sampled at
// x_j = 2*pi*j/N, j = 0..N-1.
class PeriodicSpline {
 public:
  PeriodicSpline() = default;

  explicit PeriodicSpline(std::span<const double> values)
      : y_(values.begin(), values.end()) {
    const std::size_t n = y_.size();
    if (n < 4) throw ValidationError("PeriodicSpline: need at least 4 nodes");
    h_ = 2.0 * std::numbers::pi / static_cast<double>(n);
    solve_second_derivatives();
  }

  std::size_t size() const { return y_.size(); }
  double spacing() const { return h_; }
  std::span<const double> values() const { return y_; }

  double operator()(double x) const {
    const Local l = locate(x);
    return eval_local(l);
  }

  // Value divided by the centered offset r in [-pi, pi). With values()[0] == 0
  // every term of the panel polynomial next to 0 is proportional to r, so
  // the quotient keeps full relative accuracy as r -> 0.
  double ratio_to_offset(double x) const {
    const Local l = locate(x);
    const double r = l.t * h_;  // centered offset in [-pi, pi)
    return eval_local(l) / r;
  }

  // First derivative at the node x = 0.
  double derivative_at_zero() const {
    return (y_[1] - y_[0]) / h_ - h_ * (2.0 * m_[0] + m_[1]) / 6.0;
  }

 private:
  struct Local {
    std::size_t j;  // left node index
    double s;       // position in panel, [0, 1)
    double u;       // 1 - s, computed without cancellation
    double t;       // centered coordinate / h
  };

  Local locate(double x) const {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = x - two_pi * std::round(x / two_pi);
    if (r >= std::numbers::pi) r -= two_pi;
    if (r < -std::numbers::pi) r += two_pi;
    const double t = r / h_;
    const double jf = std::floor(t);
    const double s = t - jf;
    const double u = (jf + 1.0) - t;
    const auto n = static_cast<long>(y_.size());
    long j = static_cast<long>(jf) % n;
    if (j < 0) j += n;
    return {static_cast<std::size_t>(j), s, u, t};
  }

  double eval_local(const Local& l) const {
    const std::size_t j1 = (l.j + 1) % y_.size();
    const double c = h_ * h_ / 6.0;
    // (u^3 - u) = -s u (1 + u), (s^3 - s) = -u s (1 + s)
    return l.u * y_[l.j] + l.s * y_[j1] -
           c * l.s * l.u * ((1.0 + l.u) * m_[l.j] + (1.0 + l.s) * m_[j1]);
  }

  // Cyclic tridiagonal system M_{j-1} + 4 M_j + M_{j+1} = 6 (y_{j+1} - 2 y_j +
  // y_{j-1}) / h^2, solved by Sherman-Morrison on top of the Thomas algorithm.
  void solve_second_derivatives() {
    const std::size_t n = y_.size();
    std::vector<double> rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double ym = y_[(j + n - 1) % n];
      const double yp = y_[(j + 1) % n];
      rhs[j] = 6.0 * (yp - 2.0 * y_[j] + ym) / (h_ * h_);
    }
    const double gamma = -4.0;
    std::vector<double> diag(n, 4.0);
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = 1.0;
    const std::vector<double> x = thomas(diag, rhs);
    const std::vector<double> z = thomas(diag, u);
    const double fact = (x[0] + x[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
    m_.resize(n);
    for (std::size_t j = 0; j < n; ++j) m_[j] = x[j] - fact * z[j];
  }

  // Tridiagonal solve with unit off-diagonals.
  static std::vector<double> thomas(const std::vector<double>& diag, const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n), x(n);
    c[0] = 1.0 / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double denom = diag[i] - c[i - 1];
      c[i] = 1.0 / denom;
      d[i] = (rhs[i] - d[i - 1]) / denom;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  }

  std::vector<double> y_;
  std::vector<double> m_;
  double h_ = 0.0;
};

}  // namespace cyclic
