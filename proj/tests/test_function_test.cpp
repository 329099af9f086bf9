#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "freerhs/test_function.hpp"

namespace freerhs {
namespace {

const PhysicalScale unit;
const TestFunction gauss1{{1.0, 1, 1.0}};  // r e^{-r^2/2}

TEST(TestFunctionTest, EvaluationAndDerivatives) {
  EXPECT_NEAR(testfn_eval(gauss1, 1.0, 0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(testfn_eval(gauss1, 1.0, 2), -2.0 * std::exp(-0.5), 1e-15);
  EXPECT_EQ(testfn_eval(gauss1, 0.0, 0), 0.0);
  // (r^3 - 3r) e^{-r^2/2} at r = 1.7
  const double r = 1.7;
  EXPECT_NEAR(testfn_eval(gauss1, r, 2), (r * r * r - 3 * r) * std::exp(-r * r / 2), 1e-14);
}

TEST(TestFunctionTest, DerivativesAgreeWithFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto phi = random_test_function(rng);
    for (int order = 0; order < 4; ++order) {
      for (double r : {0.3, 1.1, 2.4}) {
        const double h = 1e-3;
        const auto lower = [&](double x) { return phi.eval(x, order); };
        const double fd = (lower(r - 2 * h) - 8 * lower(r - h) + 8 * lower(r + h) - lower(r + 2 * h)) / (12 * h);
        EXPECT_NEAR(phi.eval(r, order + 1), fd, 1e-8 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(TestFunctionTest, H0Apply) {
  const auto h = h0_apply(gauss1, 1, unit);
  EXPECT_NEAR(h(1.0), 2.0 * std::exp(-0.5), 1e-15);
  const double r = 0.8;
  EXPECT_NEAR(h(r), (3 * r - r * r * r) * std::exp(-r * r / 2), 1e-15);
  EXPECT_TRUE(h0_apply(TestFunction{}, 3, unit).is_zero());
  // c rescales h0 by 1/c
  const auto hc = h0_apply(gauss1, 1, PhysicalScale::from_c(4.0));
  EXPECT_NEAR(hc(r), 0.25 * h(r), 1e-15);
}

TEST(TestFunctionTest, H0PowersVanishAtOrigin) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const auto phi = random_test_function(rng);
    for (int n = 0; n <= 4; ++n) {
      const auto h = h0_apply(phi, n, unit);
      EXPECT_TRUE(h.odd_powers_only());
      EXPECT_EQ(h(0.0), 0.0);
    }
  }
}

TEST(TestFunctionTest, RejectsEvenPowersAndBadWidths) {
  EXPECT_THROW((TestFunction{{1.0, 2, 1.0}}), SpectralError);
  EXPECT_THROW((TestFunction{{1.0, 1, 0.0}}), SpectralError);
  EXPECT_THROW((TestFunction{{1.0, 1, -1.0}}), SpectralError);
  const auto even = TestFunction::unchecked({{1.0, 2, 1.0}});
  EXPECT_FALSE(even.odd_powers_only());
}

TEST(TestFunctionTest, Algebra) {
  const TestFunction a{{1.0, 1, 1.0}, {2.0, 3, 0.5}};
  const TestFunction b{{-1.0, 1, 1.0}};
  const auto s = a + b;
  EXPECT_EQ(s.blocks().size(), 1u);
  EXPECT_NEAR(s(1.3), 2.0 * std::pow(1.3, 3) * std::exp(-0.25 * 1.69), 1e-15);
  EXPECT_TRUE((a - a).is_zero());
  const auto w = gauss1.times_linear_power(2);
  EXPECT_NEAR(w(0.7), std::pow(1.7, 2) * gauss1(0.7), 1e-15);
}

TEST(TestFunctionTest, ParseSpecString) {
  const auto f = parse_test_function("1,1,1");
  EXPECT_NEAR(f(1.0), std::exp(-0.5), 1e-15);
  const auto g = parse_test_function("1,1,1; 3,2,-0.5");
  EXPECT_NEAR(g(1.0), std::exp(-0.5) - 0.5 * std::exp(-1.0), 1e-15);
  EXPECT_THROW(parse_test_function("2,1,1"), SpectralError);
  EXPECT_THROW(parse_test_function("1,1"), SpectralError);
  EXPECT_THROW(parse_test_function(""), SpectralError);
  EXPECT_THROW(parse_test_function("1,1,1x"), SpectralError);
}

TEST(TestFunctionTest, ComplexCoefficients) {
  const ComplexTestFunction f{{cplx(0.0, 1.0), 1, 1.0}};
  EXPECT_NEAR(std::abs(f(1.0) - cplx(0.0, std::exp(-0.5))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f.conj()(1.0) - cplx(0.0, -std::exp(-0.5))), 0.0, 1e-15);
}

}  // namespace
}  // namespace freerhs
