#pragma once

// Adaptive Gauss-Kronrod (7/15) integration, globally adaptive in the style of
// QUADPACK's QAG: the panel with the largest error estimate is bisected until
// the summed error meets max(abs_tol, rel_tol * |I|). An error estimate at the
// rounding floor of the rule (a multiple of eps * int |f|) also counts as
// converged, since further bisection cannot lower it.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "cyclic/errors.hpp"
#include "cyclic/summation.hpp"

namespace cyclic {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class EndpointMode {
  open,    // integrand is never evaluated at the interval ends
  closed,  // integrand must also be finite at both ends (checked)
};

struct QuadSpec {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_subdivisions = 20000;
  EndpointMode endpoint_mode = EndpointMode::open;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw ValidationError("QuadSpec: tolerances must be positive");
    }
    if (max_subdivisions < 1) {
      throw ValidationError("QuadSpec: max_subdivisions must be >= 1");
    }
  }
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

namespace detail {

struct Panel {
  double a, b, value, error, absval;  // absval: integral of |f| on the panel
  bool operator<(const Panel& o) const { return error < o.error; }
};

// Nodes and weights of the 15-point Kronrod rule and its embedded 7-point
// Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double ah = std::abs(half);
  resasc *= ah;
  resabs *= ah;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  if (!std::isfinite(resk)) {
    throw NumericError("quadrature: integrand is not finite on [" +
                       std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return {a, b, resk * half, err, resabs};
}

}  // namespace detail

// Integrates f over [a, b]. `breaks` are interior points where f is known to
// lose smoothness; each starts as its own panel boundary.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, const QuadSpec& spec,
                              std::vector<double> breaks = {}) {
  spec.validate();
  if (!(a < b)) {
    if (a == b) return {};
    throw ValidationError("integrate_adaptive: requires a < b");
  }
  if (spec.endpoint_mode == EndpointMode::closed) {
    if (!std::isfinite(f(a)) || !std::isfinite(f(b))) {
      throw NumericError("quadrature: integrand not finite at an endpoint");
    }
  }
  std::vector<double> cuts{a};
  std::sort(breaks.begin(), breaks.end());
  for (double x : breaks) {
    if (x > cuts.back() && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);

  std::priority_queue<detail::Panel> heap;
  CompensatedSum total, total_err, total_abs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto p = detail::gk15(f, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.error;
    total_abs += p.absval;
    heap.push(p);
  }
  constexpr double floor_factor = 100.0 * std::numeric_limits<double>::epsilon();
  int panels = static_cast<int>(heap.size());
  while (true) {
    const double tol = std::max({spec.abs_tol, spec.rel_tol * std::abs(total.value()),
                                 floor_factor * total_abs.value()});
    if (total_err.value() <= tol) break;
    if (panels >= spec.max_subdivisions) {
      throw NumericError("quadrature: no convergence after " +
                         std::to_string(panels) + " panels (error estimate " +
                         std::to_string(total_err.value()) + ")");
    }
    const detail::Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw NumericError("quadrature: panel width reached machine resolution");
    }
    heap.pop();
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_abs += left.absval + right.absval - worst.absval;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum the final panels so accumulated update rounding does not leak in.
  std::vector<double> values;
  values.reserve(heap.size());
  double err = 0.0;
  while (!heap.empty()) {
    values.push_back(heap.top().value);
    err += heap.top().error;
    heap.pop();
  }
  std::sort(values.begin(), values.end(),
            [](double x, double y) { return std::abs(x) < std::abs(y); });
  CompensatedSum s;
  for (double v : values) s += v;
  return {s.value(), err, panels};
}

// Integral over the fundamental domain (0, 2*pi).
template <class F>
double integrate_fundamental(F&& f, const QuadSpec& spec = {},
                             std::vector<double> breaks = {}) {
  return integrate_adaptive(std::forward<F>(f), 0.0, kTwoPi, spec, std::move(breaks)).value;
}

// Integral over [-half_width, half_width]. A positive `panel_width` seeds the
// adaptive scheme with equal panels, which oscillatory integrands need.
// Truncation error beyond half_width is the caller's responsibility.
template <class F>
double integrate_line(F&& f, double half_width, const QuadSpec& spec = {},
                      double panel_width = 0.0) {
  if (!(half_width > 0.0)) throw ValidationError("integrate_line: half_width must be positive");
  std::vector<double> breaks;
  if (panel_width > 0.0) {
    const auto count = static_cast<long>(std::ceil(2.0 * half_width / panel_width));
    for (long i = 1; i < count; ++i) {
      breaks.push_back(-half_width + 2.0 * half_width * static_cast<double>(i) /
                                         static_cast<double>(count));
    }
  }
  QuadSpec s = spec;
  s.max_subdivisions = std::max<int>(s.max_subdivisions, static_cast<int>(breaks.size()) * 8 + 64);
  return integrate_adaptive(std::forward<F>(f), -half_width, half_width, s, std::move(breaks)).value;
}

// Integral over [a, +inf) through the map w = a + t / (1 - t).
template <class F>
double integrate_half_line(F&& f, double a, const QuadSpec& spec = {}) {
  auto g = [&](double t) {
    const double u = 1.0 - t;
    const double w = a + t / u;
    const double v = f(w);
    return v == 0.0 ? 0.0 : v / (u * u);
  };
  return integrate_adaptive(g, 0.0, 1.0, spec).value;
}

}  // namespace cyclic
