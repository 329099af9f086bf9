#include <chrono>
#include <cmath>

#include <gtest/gtest.h>

#include "freerhs/spectral_measure.hpp"

namespace freerhs {
namespace {

const PhysicalScale unit;

TEST(RhoDensityTest, Fixtures) {
  EXPECT_NEAR(rho_density(1.0, unit), 0.318309886183791, 1e-15);
  EXPECT_NEAR(rho_density(4.0, unit), 0.159154943091895, 1e-15);
  EXPECT_NEAR(rho_density(1.0, PhysicalScale::from_c(4.0)), 0.636619772367581, 1e-15);
  EXPECT_THROW(rho_density(0.0, unit), SpectralError);
  EXPECT_THROW(rho_density(-1.0, unit), SpectralError);
}

TEST(RhoDensityTest, PowerLawOnLogGrid) {
  for (const double c : {1.0, 3.0}) {
    const SpectralDensity rho(PhysicalScale::from_c(c));
    for (int j = 0; j <= 60; ++j) {
      const double e = std::pow(10.0, -3.0 + 0.1 * j);
      EXPECT_GT(rho(e), 0.0);
      EXPECT_NEAR(rho(e) * std::sqrt(e), std::sqrt(c) / pi, 1e-15);
    }
  }
}

TEST(SpectralJumpTest, MatchesDensityOnSpectrum) {
  const LimitSpec spec;
  for (double e : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const cplx jump = spectral_jump(e, spec, unit);
    EXPECT_LE(std::abs(jump.real() - rho_density(e, unit)), 1e-8 * rho_density(e, unit)) << e;
    EXPECT_LE(std::abs(jump.imag()), 1e-10);
  }
  const PhysicalScale scaled = PhysicalScale::from_c(2.7);
  EXPECT_NEAR(spectral_jump(1.3, spec, scaled).real(), rho_density(1.3, scaled), 1e-9);
}

TEST(SpectralJumpTest, VanishesOnResolventSet) {
  const LimitSpec spec;
  for (double e : {-0.5, -1.0, -2.0, -8.0}) {
    EXPECT_LE(std::abs(spectral_jump(e, spec, unit)), 1e-10) << e;
  }
  EXPECT_THROW(spectral_jump(0.0, spec, unit), SpectralError);
}

TEST(StieltjesMeasureTest, Fixtures) {
  const LimitSpec spec;
  const QuadratureSpec quad;
  EXPECT_NEAR(stieltjes_measure(1.0, 4.0, spec, quad, unit), 2.0 / pi, 1e-6);
  EXPECT_NEAR(stieltjes_measure(-2.0, -1.0, spec, quad, unit), 0.0, 1e-10);
  EXPECT_NEAR(stieltjes_measure(-1.0, 1.0, spec, quad, unit), 2.0 / pi, 1e-6);
  EXPECT_THROW(stieltjes_measure(2.0, 1.0, spec, quad, unit), SpectralError);
}

TEST(StieltjesMeasureTest, AgreesWithIntegratedDensity) {
  const LimitSpec spec;
  const QuadratureSpec quad;
  const PhysicalScale scale = PhysicalScale::from_c(2.0);
  // int_a^b rho = (2 sqrt(c) / pi) (sqrt(b) - sqrt(a))
  const double exact = 2.0 * std::sqrt(2.0) / pi * (std::sqrt(3.5) - std::sqrt(0.2));
  EXPECT_NEAR(stieltjes_measure(0.2, 3.5, spec, quad, scale), exact, 1e-6);
}

TEST(ClassifyPointTest, Verdicts) {
  const LimitSpec spec;
  EXPECT_EQ(classify_point(2.0, spec, unit).verdict, SpectrumVerdict::ContinuousSpectrum);
  EXPECT_EQ(classify_point(-3.0, spec, unit).verdict, SpectrumVerdict::ResolventSet);
  const auto origin = classify_point(0.0, spec, unit);
  EXPECT_EQ(origin.verdict, SpectrumVerdict::SpectrumBoundary);
  EXPECT_EQ(origin.jump_value, cplx{});
}

}  // namespace
}  // namespace freerhs
