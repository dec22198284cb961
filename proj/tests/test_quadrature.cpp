#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cyclic/builtins.hpp"
#include "cyclic/quadrature.hpp"
#include "cyclic/summation.hpp"

using namespace cyclic;
using std::numbers::pi;

TEST(Fundamental, SineIntegratesToZero) {
  EXPECT_NEAR(integrate_fundamental([](double x) { return std::sin(x); }), 0.0, 1e-12);
}

TEST(Fundamental, CosSquaredHalf) {
  EXPECT_NEAR(integrate_fundamental([](double x) { return std::pow(std::cos(0.5 * x), 2); }), pi, 1e-12);
  EXPECT_NEAR(integrate_fundamental([](double x) { return (pi / 4) * std::pow(std::cos(0.5 * x), 2); }),
              pi * pi / 4, 1e-12);
}

TEST(Fundamental, SineLineIntegralIsOne) {
  auto f = [](double x) { return std::sin(x) / pi * 0.5 * std::cos(0.5 * x) / std::sin(0.5 * x); };
  EXPECT_NEAR(integrate_fundamental(f), 1.0, 1e-12);
}

TEST(Fundamental, Quadratic) {
  const double exact = std::pow(kTwoPi, 3) / 3.0;
  EXPECT_NEAR(integrate_fundamental([](double x) { return x * x; }) / exact, 1.0, 1e-10);
}

TEST(Fundamental, OpenModeNeverTouchesEndpoints) {
  auto f = [](double x) {
    if (x == 0.0 || x == kTwoPi) throw std::logic_error("endpoint evaluated");
    return std::log(x);
  };
  EXPECT_NO_THROW(integrate_fundamental(f, {1e-10, 1e-8, 20000}));
}

TEST(Fundamental, ClosedModeChecksEndpoints) {
  QuadSpec q;
  q.endpoint_mode = EndpointMode::closed;
  EXPECT_THROW(integrate_fundamental([](double x) { return 1.0 / x; }, q), NumericError);
}

TEST(Adaptive, KinkBreakpointsHelp) {
  auto f = [](double x) { return std::abs(x - 1.0); };
  const auto r = integrate_adaptive(f, 0.0, 3.0, {}, {1.0});
  EXPECT_NEAR(r.value, 0.5 + 2.0, 1e-13);
}

TEST(Adaptive, ReportsNonConvergence) {
  auto f = [](double x) { return std::sin(1.0 / x); };
  EXPECT_THROW(integrate_adaptive(f, 1e-8, 1.0, {1e-15, 1e-15, 20}), NumericError);
}

TEST(Adaptive, RejectsNonFinite) {
  EXPECT_THROW(integrate_adaptive([](double) { return NAN; }, 0.0, 1.0, {}), NumericError);
}

TEST(Adaptive, ValidatesSpec) {
  EXPECT_THROW(integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0, {0.0, 1e-8, 10}), ValidationError);
  EXPECT_THROW(integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0, {1e-8, 1e-8, 0}), ValidationError);
}

TEST(Line, SincSquared) {
  auto f = [](double x) {
    if (x == 0.0) return 1.0 / (pi * pi);
    const double s = std::sin(x) / (pi * x);
    return s * s;
  };
  EXPECT_NEAR(integrate_line(f, 1e4, {1e-12, 1e-10, 400000}, pi), 1.0 / pi, 1e-4);
}

TEST(Line, GaussianMass) {
  auto f = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * pi); };
  EXPECT_NEAR(integrate_line(f, 8.0), 1.0, 1e-12);
}

TEST(Line, CauchyTruncatedMass) {
  auto f = [](double x) { return 1.0 / (pi * (1 + x * x)); };
  for (double T : {10.0, 100.0, 1000.0}) {
    const double expected = 1.0 - 2.0 / (pi * T);
    EXPECT_NEAR(integrate_line(f, T, {1e-14, 1e-13, 20000}), expected, 3.0 / (T * T * T));
  }
}

TEST(HalfLine, Exponential) {
  EXPECT_NEAR(integrate_half_line([](double x) { return std::exp(-x); }, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(integrate_half_line([](double x) { return std::exp(-x); }, 2.0), std::exp(-2.0), 1e-13);
}

// int (phi(x)/x)^2 over [-2 pi K, 2 pi K] against its folded form on (0, 2 pi).
TEST(Folding, LineMatchesFundamentalForBuiltins) {
  const long K = 10000;
  for (auto which : {BuiltinKernel::fourier, BuiltinKernel::haar, BuiltinKernel::spline}) {
    const auto k = make_builtin(which);
    // Sum per period so each panel is smooth; the line integral is even in x.
    CompensatedSum line;
    for (long j = 0; j < K; ++j) {
      const double a = kTwoPi * static_cast<double>(j);
      auto f = [&](double t) {
        const double p = k.psi(a + t);
        return p * p;
      };
      line += 2.0 * integrate_adaptive(f, 0.0, kTwoPi, {1e-16, 1e-10, 2000}, k.kinks()).value;
    }
    EXPECT_NEAR(line.value(), square_norm(k), 1e-4) << k.name();
  }
}

TEST(Summation, PairwiseMatchesCompensated) {
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
  CompensatedSum c;
  for (double x : v) c += x;
  EXPECT_NEAR(pairwise_sum(v), c.value(), 1e-12);
}

TEST(Summation, CompensatedRecoversSmallTerms) {
  CompensatedSum c;
  c += 1.0;
  for (int i = 0; i < 1000; ++i) c += 1e-17;
  c += -1.0;
  EXPECT_NEAR(c.value(), 1e-14, 1e-20);
}
