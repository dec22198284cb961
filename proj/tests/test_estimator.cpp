#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cyclic/builtins.hpp"
#include "cyclic/estimator.hpp"
#include "cyclic/experiments.hpp"
#include "cyclic/rng.hpp"

using namespace cyclic;
using std::numbers::pi;

namespace {

EstimatorConfig config(double R, const std::string& kernel = "fourier") { return {make_builtin(kernel), R}; }

SampleMatrix gaussian_sample(std::size_t n, Rng& rng) { return sample_univariate("gaussian", n, rng); }

}  // namespace

TEST(EstimateAt, CoincidenceGivesROverPi) {
  const auto s = SampleMatrix::column({0.7});
  EXPECT_NEAR(estimate_at(s, config(3.0), 0.7), 3.0 / pi, 1e-15);
  EXPECT_NEAR(estimate_at(s, config(pi), 0.7), 1.0, 1e-15);
}

TEST(EstimateAt, SymmetricPairCancels) {
  const auto s = SampleMatrix::column({1.0, -1.0});
  EXPECT_NEAR(estimate_at(s, config(pi), 0.0), 0.0, 1e-15);
}

TEST(EstimateAt, BivariateProductOracle) {
  Rng rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    const double a = (rng.uniform() - 0.5) * 8.0, b = (rng.uniform() - 0.5) * 8.0;
    const double R = 0.5 + 10.0 * rng.uniform();
    const SampleMatrix s(1, 2, {a, b});
    const std::vector<double> y{0.0, 0.0};
    const double expected = std::sin(R * a) / (pi * a) * std::sin(R * b) / (pi * b);
    EXPECT_NEAR(estimate_at(s, config(R), y), expected, 1e-12);
  }
}

TEST(EstimateAt, SineFormulaOnRandomInputs) {
  Rng rng(4, 0);
  std::vector<double> x(40);
  for (auto& v : x) v = rng.normal() * 2.0;
  const auto s = SampleMatrix::column(x);
  for (int i = 0; i < 20; ++i) {
    const double y = rng.normal(), R = 1.0 + 30.0 * rng.uniform();
    double direct = 0.0;
    for (double xi : x) direct += std::sin(R * (y - xi)) / (pi * (y - xi));
    EXPECT_NEAR(estimate_at(s, config(R), y), direct / 40.0, 1e-12);
  }
}

TEST(EstimateAt, CanBeNegative) {
  const auto s = SampleMatrix::column({0.0});
  EXPECT_LT(estimate_at(s, config(1.0), 4.0), 0.0);
}

TEST(EstimateAt, Validation) {
  const SampleMatrix s(1, 2, {0.0, 0.0});
  EXPECT_THROW(estimate_at(s, config(1.0), 0.0), ValidationError);
  EXPECT_THROW(estimate_at(s, config(-1.0), std::vector<double>{0.0, 0.0}), ValidationError);
  EstimatorConfig bad = config(1.0);
  bad.coincidence_eps = 1e-3;
  EXPECT_THROW(estimate_at(s, bad, std::vector<double>{0.0, 0.0}), ValidationError);
  EXPECT_THROW(SampleMatrix(2, 1, {0.0, NAN}), ValidationError);
  EXPECT_THROW(SampleMatrix(0, 1, {}), ValidationError);
}

TEST(EstimateAt, LinearInSample) {
  Rng rng(5, 0);
  std::vector<double> a(37), b(91);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal();
  std::vector<double> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const auto cfg = config(4.0, "haar");
  for (double y : {-1.0, 0.0, 0.3}) {
    const double ea = estimate_at(SampleMatrix::column(a), cfg, y);
    const double eb = estimate_at(SampleMatrix::column(b), cfg, y);
    const double eab = estimate_at(SampleMatrix::column(ab), cfg, y);
    EXPECT_NEAR(eab, (37.0 * ea + 91.0 * eb) / 128.0, 1e-14);
  }
}

TEST(EstimateAt, ProductFactorization) {
  Rng rng(6, 0);
  for (auto name : {"fourier", "spline"}) {
    const auto cfg = config(3.0, name);
    for (int i = 0; i < 20; ++i) {
      const double a = rng.normal(), b = rng.normal(), c = rng.normal();
      const SampleMatrix s(1, 3, {a, b, c});
      const std::vector<double> y{0.1, -0.2, 0.4};
      const double prod = estimate_at(SampleMatrix::column({a}), cfg, 0.1) *
                          estimate_at(SampleMatrix::column({b}), cfg, -0.2) *
                          estimate_at(SampleMatrix::column({c}), cfg, 0.4);
      EXPECT_DOUBLE_EQ(estimate_at(s, cfg, y), prod);
    }
  }
}

TEST(EstimateAt, TranslationInvariant) {
  Rng rng(7, 0);
  std::vector<double> d(2 * 50);
  for (auto& v : d) v = rng.normal();
  const SampleMatrix s(50, 2, d);
  const double shift[2] = {0.375, -1.25};
  std::vector<double> moved = d;
  for (std::size_t i = 0; i < 50; ++i) {
    moved[2 * i] += shift[0];
    moved[2 * i + 1] += shift[1];
  }
  const SampleMatrix t(50, 2, moved);
  const auto cfg = config(2.5);
  const std::vector<double> y{0.2, 0.1}, z{0.2 + shift[0], 0.1 + shift[1]};
  EXPECT_NEAR(estimate_at(s, cfg, y), estimate_at(t, cfg, z), 1e-12);
}

TEST(EstimateGrid, MatchesPointwiseAndPermutes) {
  Rng rng(8, 0);
  const auto s = gaussian_sample(200, rng);
  const auto cfg = config(5.0);
  std::vector<std::vector<double>> grid;
  for (int i = 0; i < 30; ++i) grid.push_back({rng.normal()});
  const auto one = estimate_grid(s, cfg, {grid[0]});
  EXPECT_EQ(one[0], estimate_at(s, cfg, grid[0]));
  const auto all = estimate_grid(s, cfg, grid, 1);
  auto rev = grid;
  std::reverse(rev.begin(), rev.end());
  const auto back = estimate_grid(s, cfg, rev, 1);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(all[i], back[grid.size() - 1 - i]);
}

TEST(EstimateGrid, IdenticalAcrossThreadCounts) {
  Rng rng(9, 0);
  const auto s = gaussian_sample(5000, rng);
  const auto cfg = config(7.0, "haar");
  std::vector<std::vector<double>> grid;
  for (int i = 0; i < 64; ++i) grid.push_back({-3.0 + 6.0 * i / 63.0});
  const auto a = estimate_grid(s, cfg, grid, 1);
  const auto b = estimate_grid(s, cfg, grid, 4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(EstimateGrid, ApproximatelyNormalized) {
  Rng rng(10, 0);
  const auto s = gaussian_sample(1000, rng);
  std::vector<std::vector<double>> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back({-3.0 + 0.06 * i});
  const auto v = estimate_grid(s, config(10.0), grid);
  double area = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    ASSERT_TRUE(std::isfinite(v[i]));
    area += (i == 0 || i + 1 == v.size() ? 0.5 : 1.0) * v[i] * 0.06;
  }
  EXPECT_NEAR(area, 1.0, 0.1);
}

TEST(Baseline, SingleSampleAtPoint) {
  const auto s = SampleMatrix::column({0.3});
  const std::vector<double> y{0.3}, h{0.7};
  EXPECT_NEAR(gaussian_kde(s, y, h), 1.0 / (0.7 * std::sqrt(2.0 * pi)), 1e-15);
}

TEST(Baseline, BivariateExponent) {
  Rng rng(12, 0);
  const auto s = sample_banana(4096, {}, rng);
  const auto h = silverman_bandwidths(s);
  for (std::size_t j = 0; j < 2; ++j) {
    CompensatedSum m, q;
    for (std::size_t i = 0; i < s.n(); ++i) m += s(i, j);
    const double mean = m.value() / 4096.0;
    for (std::size_t i = 0; i < s.n(); ++i) q += (s(i, j) - mean) * (s(i, j) - mean);
    const double sd = std::sqrt(q.value() / 4095.0);
    EXPECT_NEAR(h[j], std::pow(4096.0, -1.0 / 6.0) * sd, 1e-12);
  }
}

TEST(Baseline, ZeroVarianceRejected) {
  EXPECT_THROW(silverman_bandwidths(SampleMatrix::column({1.0, 1.0, 1.0})), ValidationError);
}

TEST(Baseline, BiasedDownwardAtTheMode) {
  const double truth = 1.0 / std::sqrt(2.0 * pi);
  CompensatedSum mean;
  for (std::size_t rep = 0; rep < 20; ++rep) {
    Rng rng(13, rep);
    const auto s = gaussian_sample(20000, rng);
    mean += gaussian_kde_baseline(s, std::vector<double>{0.0});
  }
  EXPECT_LT(mean.value() / 20.0, truth);
}

TEST(Smoothed, GaussianFourierAtLargeR) {
  EXPECT_NEAR(smoothed_density(gaussian_density(), fourier_kernel(), 50.0, 0.0), 1.0 / std::sqrt(2.0 * pi), 1e-4);
}

TEST(Smoothed, CauchyHaarConverges) {
  const auto m = cauchy_density();
  const auto k = make_builtin("haar");
  double prev = 1.0;
  for (double R : {2.0, 5.0, 10.0, 20.0, 40.0}) {
    const double b = std::abs(smoothed_density(m, k, R, 0.0) - 1.0 / pi);
    EXPECT_LT(b, prev) << R;
    prev = b;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(Smoothed, CauchyFourierClosedForm) {
  // Smoothing the Cauchy density with sin(Ru)/(pi u) removes e^{-R}/pi at 0.
  for (double R : {1.0, 3.0, 8.0}) {
    EXPECT_NEAR(smoothed_density(cauchy_density(), fourier_kernel(), R, 0.0), (1.0 - std::exp(-R)) / pi, 1e-10);
  }
}

TEST(Smoothed, RoutesAgree) {
  const auto k = make_builtin("spline");
  for (const auto& m : {cauchy_density(), gaussian_density()}) {
    for (double y : {0.0, 0.7}) {
      const double folded = smoothed_density(m, k, 3.0, y, SmoothingRoute::folded);
      const double spectral = smoothed_density(m, k, 3.0, y, SmoothingRoute::spectral);
      EXPECT_NEAR(folded, spectral, 1e-9) << m.name << " y=" << y;
    }
  }
}

// A transform decaying like w^-2 leaves the truncated sine expansion short by
// far more than rounding, so the route declines.
TEST(Smoothed, SpectralDeclinesSlowTransforms) {
  const auto k = make_builtin("spline");
  EXPECT_FALSE(spectral_route_available(laplace_density(), sine_expansion(k), 3.0));
  EXPECT_THROW(smoothed_density(laplace_density(), k, 3.0, 0.0, SmoothingRoute::spectral), ValidationError);
  EXPECT_NEAR(smoothed_density(laplace_density(), k, 3.0, 0.7, SmoothingRoute::automatic),
              smoothed_density(laplace_density(), k, 3.0, 0.7, SmoothingRoute::folded), 1e-15);
}

TEST(Smoothed, ProductForm) {
  const std::vector<DensityFn> ms{gaussian_density(), cauchy_density()};
  const std::vector<double> y{0.1, -0.3};
  const auto k = fourier_kernel();
  EXPECT_NEAR(smoothed_density(ms, k, 4.0, y),
              smoothed_density(ms[0], k, 4.0, 0.1) * smoothed_density(ms[1], k, 4.0, -0.3), 1e-15);
}

TEST(Smoothed, SpectralNeedsOddKernel) {
  const CyclicKernel skew("skew", [](double r) { return std::sin(r) / pi + 0.01 * (std::cos(2 * r) - std::cos(r)); },
                          1.0 / pi);
  EXPECT_FALSE(spectral_route_available(gaussian_density(), sine_expansion(skew), 3.0));
  EXPECT_THROW(smoothed_density(gaussian_density(), skew, 3.0, 0.0, SmoothingRoute::spectral), ValidationError);
  // Other routes still work.
  EXPECT_NO_THROW(smoothed_density(gaussian_density(), skew, 3.0, 0.0, SmoothingRoute::automatic));
}

TEST(Smoothed, MonteCarloConsistency) {
  struct Case {
    std::string density, kernel;
    double R;
  };
  for (const Case& c : {Case{"gaussian", "haar", 3.0}, Case{"cauchy", "fourier", 2.0},
                        Case{"scale_mixture", "fourier", 50.0}}) {
    const auto m = density_by_name(c.density);
    const auto cfg = config(c.R, c.kernel);
    std::vector<double> est(200);
    for (std::size_t rep = 0; rep < est.size(); ++rep) {
      Rng rng(14, rep);
      est[rep] = estimate_at(sample_univariate(c.density, 10000, rng), cfg, 0.0);
    }
    const auto r = summarize(est);
    const double target = smoothed_density(m, cfg.kernel, c.R, 0.0);
    EXPECT_LT(std::abs(r.mean - target), 3.0 * r.se()) << c.density << " mean=" << r.mean << " target=" << target;
  }
}

TEST(BiasDecay, GaussianOrderAtLeastTwo) {
  for (auto name : {"fourier", "haar", "spline"}) {
    const auto c = bias_decay_curve(gaussian_density(), make_builtin(name), 0.0, {20.0, 40.0});
    EXPECT_LE(c[1].bias, c[0].bias / 4.0) << name;
  }
}

TEST(BiasDecay, CauchyFourierStrictlyDecreasing) {
  const auto c = bias_decay_curve(cauchy_density(), fourier_kernel(), 0.0, {10.0, 20.0, 40.0, 80.0});
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LT(c[i].bias, c[i - 1].bias);
  EXPECT_GT(c.back().bias, 0.0);
}

TEST(BiasDecay, LaplaceSlowerThanGaussian) {
  for (auto name : {"fourier", "haar"}) {
    const auto k = make_builtin(name);
    for (double R : {5.0, 10.0, 20.0}) {
      const double lap = bias_decay_curve(laplace_density(), k, 0.0, {R})[0].bias;
      const double gau = bias_decay_curve(gaussian_density(), k, 0.0, {R})[0].bias;
      EXPECT_GT(lap, gau) << name << " R=" << R;
    }
  }
}

TEST(BiasDecay, FoldedAndSpectralAgreeAtModerateR) {
  for (auto name : {"fourier", "haar", "spline"}) {
    const auto k = make_builtin(name);
    const auto a = bias_decay_curve(gaussian_density(), k, 0.0, {4.0}, SmoothingRoute::folded);
    const auto b = bias_decay_curve(gaussian_density(), k, 0.0, {4.0}, SmoothingRoute::spectral);
    EXPECT_NEAR(a[0].bias, b[0].bias, 1e-10 + 1e-6 * b[0].bias) << name;
  }
}

TEST(BiasDecay, RejectsUnsortedR) {
  EXPECT_THROW(bias_decay_curve(gaussian_density(), fourier_kernel(), 0.0, {10.0, 5.0}), ValidationError);
}

// Var(m_hat) = Var(phi(R(y - X))/(y - X)) / n. With 8000 replications the
// relative standard error of the empirical variance is about 1.6%.
TEST(Variance, IdentityWithinFivePercent) {
  const auto m = cauchy_density();
  const auto cfg = config(20.0);
  const std::size_t n = 10000, reps = 8000;
  std::vector<double> est(reps);
  parallel_for(reps, 0, [&](std::size_t rep) {
    Rng rng(15, rep);
    est[rep] = estimate_at(sample_univariate("cauchy", n, rng), cfg, 0.0);
  });
  const auto r = summarize(est);
  const double predicted = predicted_variance(m, cfg.kernel, 20.0, 0.0, n);
  EXPECT_NEAR(r.sd * r.sd / predicted, 1.0, 0.05);
}

TEST(Variance, BelowSupNormBound) {
  for (const std::string d : {"cauchy", "gaussian", "laplace"}) {
    const auto m = density_by_name(d);
    for (auto name : {"fourier", "spline"}) {
      const auto k = make_builtin(name);
      const std::size_t n = 2000;
      const double R = 10.0;
      std::vector<double> est(2000);
      for (std::size_t rep = 0; rep < est.size(); ++rep) {
        Rng rng(16, rep);
        est[rep] = estimate_at(sample_univariate(d, n, rng), EstimatorConfig{k, R}, 0.0);
      }
      const auto r = summarize(est);
      const double bound = R * m.sup_norm / static_cast<double>(n) * square_norm(k);
      EXPECT_LE(r.sd * r.sd, bound * 1.05) << d << " " << name;
      EXPECT_LE(predicted_variance(m, k, R, 0.0, n), bound) << d << " " << name;
    }
  }
}

TEST(Variance, SecondMomentMatchesMonteCarlo) {
  const auto m = gaussian_density();
  const auto k = make_builtin("haar");
  const double R = 6.0;
  Rng rng(17, 0);
  CompensatedSum s;
  const long N = 2000000;
  for (long i = 0; i < N; ++i) {
    const double w = R * k.psi(R * (0.25 - rng.normal()));
    s += w * w;
  }
  const double mc = s.value() / N;
  EXPECT_NEAR(second_moment(m, k, R, 0.25) / mc, 1.0, 0.01);
}
