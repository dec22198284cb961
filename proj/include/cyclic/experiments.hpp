#pragma once

// Seeded replication harness. Replication i draws from Rng(seed, i) and
// results are stored by index, so the output does not depend on the number
// of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "cyclic/builtins.hpp"
#include "cyclic/densities.hpp"
#include "cyclic/errors.hpp"
#include "cyclic/estimator.hpp"
#include "cyclic/parallel.hpp"
#include "cyclic/rng.hpp"
#include "cyclic/summation.hpp"

namespace cyclic {

struct ExperimentSpec {
  std::string name = "theta";
  std::size_t n = 100;
  double R = 50.0;
  std::size_t reps = 1000;
  std::uint64_t seed = 20240531;
  std::string kernel = "fourier";
  // theta
  double theta0 = 4.0;
  // banana
  BananaParams banana;
  // variance, convergence
  std::string density = "cauchy";
  double y = 0.0;
  std::vector<double> R_list;
  std::vector<std::string> kernels;

  void validate() const {
    if (n < 1) throw ValidationError("experiment: n must be >= 1");
    if (reps < 1) throw ValidationError("experiment: reps must be >= 1");
    if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("experiment: R must be positive");
    if (!(theta0 > 0.0)) throw ValidationError("experiment: theta0 must be positive");
    if (!(banana.sigma1 > 0.0)) throw ValidationError("experiment: sigma1 must be positive");
    if (!std::isfinite(y)) throw ValidationError("experiment: y must be finite");
    for (const auto& k : kernels) parse_builtin(k);
    parse_builtin(kernel);
  }
};

inline ExperimentSpec default_spec(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  if (name == "theta") {
    s.n = 100;
    s.R = 50.0;
    s.reps = 1000;
  } else if (name == "banana") {
    s.n = 100000;
    s.R = 20.0;
    s.reps = 100;
  } else if (name == "variance") {
    s.n = 10000;
    s.R = 20.0;
    s.reps = 500;
    s.density = "cauchy";
    s.kernels = {"fourier", "cauchy_optimal"};
  } else if (name == "convergence") {
    s.reps = 1;
    s.density = "gaussian";
    s.R_list = {5.0, 10.0, 20.0, 40.0};
    s.kernels = {"fourier", "haar", "spline"};
  } else {
    throw ValidationError("unknown experiment '" + name +
                          "' (expected theta, banana, variance or convergence)");
  }
  return s;
}

struct Histogram {
  std::vector<double> edges;  // bins + 1 increasing values
  std::vector<std::size_t> counts;
};

struct ReplicationResult {
  std::vector<double> estimates;
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator
  Histogram histogram;

  double se() const { return estimates.empty() ? 0.0 : sd / std::sqrt(static_cast<double>(estimates.size())); }
};

// Equal-width bins over mean +- 4 sd; values outside fall into the end bins.
inline Histogram make_histogram(const std::vector<double>& v, double mean, double sd, std::size_t bins = 30) {
  Histogram h;
  const double half = sd > 0.0 ? 4.0 * sd : std::max(std::abs(mean) * 1e-6, 1e-12);
  const double lo = mean - half;
  const double width = 2.0 * half / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges[bins] = mean + half;
  h.counts.assign(bins, 0);
  for (double x : v) {
    const double t = std::floor((x - lo) / width);
    const auto b = static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(bins - 1)));
    ++h.counts[b];
  }
  return h;
}

inline ReplicationResult summarize(std::vector<double> estimates) {
  if (estimates.empty()) throw ValidationError("summarize: no estimates");
  ReplicationResult r;
  const double n = static_cast<double>(estimates.size());
  r.mean = pairwise_sum(estimates) / n;
  if (estimates.size() > 1) {
    std::vector<double> sq(estimates.size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
      const double d = estimates[i] - r.mean;
      sq[i] = d * d;
    }
    r.sd = std::sqrt(pairwise_sum(sq) / (n - 1.0));
  }
  r.histogram = make_histogram(estimates, r.mean, r.sd);
  r.estimates = std::move(estimates);
  return r;
}

// ---------------------------------------------------------------------------
// Samplers

// v ~ Gamma(2, rate theta) as a sum of two exponentials, then y ~ N(0, v^2).
inline SampleMatrix sample_scale_mixture(std::size_t n, double theta, Rng& rng) {
  if (!(theta > 0.0)) throw ValidationError("sample_scale_mixture: theta must be positive");
  std::vector<double> y(n);
  for (auto& v : y) {
    const double scale = rng.exponential(theta) + rng.exponential(theta);
    v = scale * rng.normal();
  }
  return SampleMatrix::column(std::move(y));
}

inline SampleMatrix sample_banana(std::size_t n, BananaParams p, Rng& rng) {
  if (!(p.sigma1 > 0.0)) throw ValidationError("sample_banana: sigma1 must be positive");
  std::vector<double> data(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = p.sigma1 * rng.normal();
    const double z = rng.normal();
    data[2 * i] = x1;
    data[2 * i + 1] = z + p.b * (x1 * x1 - p.sigma1 * p.sigma1);
  }
  return {n, 2, std::move(data)};
}

// Closed form at the origin: N(0; 0, sigma1^2) N(b sigma1^2; 0, 1).
inline double banana_density_at_origin(BananaParams p) {
  const double s = p.b * p.sigma1 * p.sigma1;
  return std::exp(-0.5 * s * s) / (2.0 * std::numbers::pi * p.sigma1);
}

inline SampleMatrix sample_univariate(const std::string& density, std::size_t n, Rng& rng, double param = 0.0) {
  std::vector<double> x(n);
  if (density == "cauchy") {
    for (auto& v : x) v = std::tan(std::numbers::pi * (rng.uniform() - 0.5));
  } else if (density == "gaussian") {
    for (auto& v : x) v = rng.normal();
  } else if (density == "laplace") {
    for (auto& v : x) v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.exponential(1.0);
  } else if (density == "scale_mixture") {
    return sample_scale_mixture(n, param > 0.0 ? param : 4.0, rng);
  } else {
    throw ValidationError("no sampler for density '" + density + "'");
  }
  return SampleMatrix::column(std::move(x));
}

// ---------------------------------------------------------------------------
// Experiments

inline ReplicationResult run_theta_experiment(const ExperimentSpec& spec, unsigned threads = 1) {
  spec.validate();
  const CyclicKernel kernel = make_builtin(spec.kernel);
  const EstimatorConfig cfg{kernel, spec.R};
  const double root2pi = std::sqrt(2.0 * std::numbers::pi);
  std::vector<double> est(spec.reps);
  parallel_for(spec.reps, threads, [&](std::size_t rep) {
    Rng rng(spec.seed, rep);
    const auto s = sample_scale_mixture(spec.n, spec.theta0, rng);
    est[rep] = estimate_at(s, cfg, 0.0) * root2pi;
  });
  return summarize(std::move(est));
}

struct BananaResult {
  ReplicationResult fourier;
  ReplicationResult baseline;
  double truth = 0.0;
};

inline BananaResult run_banana_experiment(const ExperimentSpec& spec, unsigned threads = 1) {
  spec.validate();
  if (spec.n < 2) throw ValidationError("banana experiment: n must be >= 2 for the baseline bandwidth");
  const EstimatorConfig cfg{fourier_kernel(), spec.R};
  const std::vector<double> origin{0.0, 0.0};
  std::vector<double> est(spec.reps), base(spec.reps);
  parallel_for(spec.reps, threads, [&](std::size_t rep) {
    Rng rng(spec.seed, rep);
    const auto s = sample_banana(spec.n, spec.banana, rng);
    est[rep] = estimate_at(s, cfg, origin);
    base[rep] = gaussian_kde_baseline(s, origin);
  });
  return {summarize(std::move(est)), summarize(std::move(base)), banana_density_at_origin(spec.banana)};
}

struct VarianceRow {
  std::string kernel;
  double mean = 0.0;
  double empirical_var = 0.0;
  double n_var = 0.0;          // n * empirical_var
  double predicted_n_var = 0.0;
  double ratio = 0.0;          // empirical / predicted
  ReplicationResult result;
};

struct VarianceComparison {
  std::string density;
  std::vector<VarianceRow> rows;
};

// The same samples feed every kernel, so their variances are compared on
// common random numbers.
inline VarianceComparison run_variance_comparison(const ExperimentSpec& spec, unsigned threads = 1) {
  spec.validate();
  if (spec.reps < 2) throw ValidationError("variance experiment: reps must be >= 2");
  const DensityFn m = density_by_name(spec.density);
  std::vector<std::string> names = spec.kernels;
  if (names.empty()) names = {"fourier", "cauchy_optimal"};
  std::vector<CyclicKernel> kernels;
  for (const auto& k : names) kernels.push_back(make_builtin(k));

  std::vector<std::vector<double>> est(kernels.size(), std::vector<double>(spec.reps));
  parallel_for(spec.reps, threads, [&](std::size_t rep) {
    Rng rng(spec.seed, rep);
    const auto s = sample_univariate(spec.density, spec.n, rng);
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      est[k][rep] = estimate_at(s, EstimatorConfig{kernels[k], spec.R}, spec.y);
    }
  });

  VarianceComparison out;
  out.density = spec.density;
  const double n = static_cast<double>(spec.n);
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    VarianceRow row;
    row.kernel = kernels[k].name();
    row.result = summarize(std::move(est[k]));
    row.mean = row.result.mean;
    row.empirical_var = row.result.sd * row.result.sd;
    row.n_var = n * row.empirical_var;
    row.predicted_n_var = n * predicted_variance(m, kernels[k], spec.R, spec.y, spec.n);
    row.ratio = row.n_var / row.predicted_n_var;
    out.rows.push_back(std::move(row));
  }
  return out;
}

struct ConvergenceRow {
  std::string kernel;
  double R = 0.0;
  double bias = 0.0;
};

struct ConvergenceTable {
  std::string density;
  std::vector<ConvergenceRow> rows;
  std::vector<std::string> kernels;
  std::vector<bool> decreasing;  // per kernel, strictly decreasing in R
};

// Deterministic (quadrature only); the seed plays no role. Two consecutive
// biases that have both underflowed to zero do not break monotonicity.
inline ConvergenceTable run_convergence_experiment(const ExperimentSpec& spec, unsigned threads = 1) {
  spec.validate();
  const DensityFn m = density_by_name(spec.density);
  std::vector<double> Rs = spec.R_list;
  if (Rs.empty()) Rs = {5.0, 10.0, 20.0, 40.0};
  std::vector<std::string> names = spec.kernels;
  if (names.empty()) names = {"fourier", "haar", "spline"};

  std::vector<std::vector<BiasPoint>> curves(names.size());
  parallel_for(names.size(), threads, [&](std::size_t k) {
    curves[k] = bias_decay_curve(m, make_builtin(names[k]), spec.y, Rs);
  });

  ConvergenceTable t;
  t.density = spec.density;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto& c = curves[k];
    bool dec = true;
    for (std::size_t i = 1; i < c.size(); ++i) {
      const bool both_zero = c[i].bias == 0.0 && c[i - 1].bias == 0.0;
      if (!(c[i].bias < c[i - 1].bias) && !both_zero) dec = false;
    }
    for (const auto& p : c) t.rows.push_back({names[k], p.R, p.bias});
    t.kernels.push_back(names[k]);
    t.decreasing.push_back(dec);
  }
  return t;
}

}  // namespace cyclic
