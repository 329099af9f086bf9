#include <chrono>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "freerhs/green.hpp"
#include "freerhs/transform.hpp"

namespace freerhs {
namespace {

const PhysicalScale unit;
const TestFunction gauss1{{1.0, 1, 1.0}};

void expect_close(cplx actual, cplx expected, double tol) {
  EXPECT_LE(std::abs(actual - expected), tol) << actual << " vs " << expected;
}

TEST(GreenEvalTest, Fixtures) {
  const auto neg = green_eval(1.0, 2.0, -1.0, unit);
  expect_close(neg.value, cplx(-0.159046186401789, 0.0), 1e-14);
  EXPECT_EQ(neg.region, Region::NegRe);
  EXPECT_EQ(neg.ordering, Ordering::RLessS);
  const auto up = green_eval(1.0, 2.0, cplx(0.0, 2.0), unit);
  expect_close(up.value, cplx(0.0136197474263576, -0.137647214655523), 1e-14);
  EXPECT_EQ(up.region, Region::UpperHalf);
  const auto swapped = green_eval(2.0, 1.0, cplx(0.0, 2.0), unit);
  EXPECT_EQ(swapped.value, up.value);
  EXPECT_EQ(swapped.ordering, Ordering::RGreaterS);
  EXPECT_EQ(green_eval(1.5, 1.5, cplx(1.0, 1.0), unit).ordering, Ordering::Diagonal);
}

TEST(GreenEvalTest, RejectsSpectrum) {
  for (double e : {1.0, 0.0, 4.0}) {
    try {
      green_eval(1.0, 2.0, e, unit);
      FAIL();
    } catch (const SpectralError& err) {
      EXPECT_EQ(err.code(), ErrorCode::OnRealAxis);
      EXPECT_NE(std::string(err.what()).find("on real axis"), std::string::npos);
    }
  }
  EXPECT_THROW(green_eval(0.0, 1.0, cplx(1.0, 1.0), unit), SpectralError);
}

TEST(GreenEvalTest, SymmetryAndConjugateSymmetry) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ur(0.05, 6.0);
  std::uniform_real_distribution<double> ue(-8.0, 8.0);
  for (int i = 0; i < 300; ++i) {
    const double r = ur(rng);
    const double s = ur(rng);
    const cplx e(ue(rng), ue(rng));
    const cplx g = green_eval(r, s, e, unit).value;
    expect_close(green_eval(s, r, e, unit).value, g, 1e-15 * std::max(1.0, std::abs(g)));
    expect_close(green_eval(r, s, std::conj(e), unit).value, std::conj(g), 1e-13 * std::max(1.0, std::abs(g)));
  }
}

TEST(GreenEvalTest, ContinuousAcrossNegativeAxis) {
  const cplx above = green_eval(0.7, 1.9, cplx(-2.0, 1e-12), unit).value;
  const cplx below = green_eval(0.7, 1.9, cplx(-2.0, -1e-12), unit).value;
  const cplx on = green_eval(0.7, 1.9, -2.0, unit).value;
  expect_close(above, on, 1e-11);
  expect_close(below, on, 1e-11);
}

TEST(ThetaTest, Fixtures) {
  const auto m1 = theta_minus(-1.0, unit);
  expect_close(m1(0, 1), -0.5, 1e-15);
  expect_close(m1(1, 1), 0.5, 1e-15);
  EXPECT_EQ(m1(0, 0), cplx{});
  EXPECT_EQ(m1(1, 0), cplx{});
  EXPECT_EQ(m1.basis, SigmaBasis::SigmaBasisNegative);
  const auto m4 = theta_minus(-4.0, unit);
  expect_close(m4(0, 1), -0.25, 1e-15);
  expect_close(m4(1, 1), 0.25, 1e-15);

  const auto above = theta_plus(cplx(1.0, 1e-14), unit);
  const auto below = theta_plus(cplx(1.0, -1e-14), unit);
  expect_close(above(0, 0), cplx(0.0, -1.0), 1e-13);
  expect_close(above(0, 1), -1.0, 1e-13);
  expect_close(below(0, 0), cplx(0.0, 1.0), 1e-13);
  expect_close(below(0, 1), -1.0, 1e-13);
  expect_close(above(0, 1), below(0, 1), 1e-13);
  EXPECT_EQ(above(1, 0), cplx{});
  EXPECT_EQ(above(1, 1), cplx{});
  EXPECT_EQ(above.half_plane, HalfPlane::Upper);
  EXPECT_EQ(below.half_plane, HalfPlane::Lower);
}

TEST(ThetaTest, WrongRegion) {
  try {
    theta_minus(cplx(1.0, 1.0), unit);
    FAIL();
  } catch (const SpectralError& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongRegion);
  }
  EXPECT_THROW(theta_plus(cplx(-1.0, 1.0), unit), SpectralError);
  EXPECT_THROW(theta_plus(2.0, unit), SpectralError);
}

TEST(ThetaTest, ReconstructsKernelInEveryRegion) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ur(0.01, 5.0);
  std::uniform_real_distribution<double> mag(0.05, 6.0);
  const PhysicalScale scales[] = {unit, PhysicalScale::from_c(2.5)};
  for (const auto& scale : scales) {
    for (int region = 0; region < 3; ++region) {
      for (int i = 0; i < 200; ++i) {
        double r = ur(rng);
        double s = ur(rng);
        if (r > s) std::swap(r, s);
        const double x = mag(rng);
        const double y = mag(rng);
        const cplx e = region == 0 ? cplx(-x, y * (i % 2 ? 1 : -1)) : (region == 1 ? cplx(x, y) : cplx(x, -y));
        const cplx closed = green_eval(r, s, e, scale).value;
        const cplx expanded = green_from_theta(r, s, e, scale);
        EXPECT_LE(std::abs(closed - expanded), 1e-12 * std::abs(closed)) << "E=" << e << " r=" << r << " s=" << s;
      }
    }
  }
}

// Fourth-order central second derivative. The step balances the quadrature
// error of g (~1e-12) against the h^4 truncation term.
template <class F>
cplx second_derivative(const F& g, double r, double h) {
  return (-g(r - 2 * h) + 16.0 * g(r - h) - 30.0 * g(r) + 16.0 * g(r + h) - g(r + 2 * h)) / (12.0 * h * h);
}

TEST(ResolventTest, ZeroInputGivesZero) {
  const auto g = resolvent_apply(TestFunction{}, cplx(0.0, 2.0), {0.5, 1.0}, unit);
  for (const auto& v : g) EXPECT_EQ(v, cplx{});
  EXPECT_THROW(resolvent_apply(gauss1, 1.0, {0.5}, unit), SpectralError);
}

TEST(ResolventTest, SolvesInhomogeneousEquation) {
  QuadratureSpec quad;
  for (const cplx e : {cplx(0.0, 2.0), cplx(-1.0, 1.0), cplx(3.0, 2.0)}) {
    auto g = [&](double r) { return resolvent_at(gauss1, e, r, unit, quad); };
    for (double r = 0.25; r <= 6.0; r += 0.25) {
      const cplx h0g = -second_derivative(g, r, 0.01) / unit.c();
      EXPECT_LE(std::abs(e * g(r) - h0g - gauss1(r)), 1e-6) << "E=" << e << " r=" << r;
    }
  }
}

TEST(ResolventTest, DiagonalInEnergyRepresentation) {
  QuadratureSpec quad;
  const cplx e(0.0, 2.0);
  const auto image = resolvent_energy_image(gauss1, e, {1.0}, quad, unit);
  expect_close(image[0], cplx(-0.0857763884960707, -0.171552776992141), 1e-9);

  std::vector<double> nodes;
  for (int j = 0; j < 20; ++j) nodes.push_back(0.1 + 0.45 * j);
  const auto many = resolvent_energy_image(gauss1, cplx(-1.0, 1.0), nodes, quad, unit);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const cplx expected = forward_transform_at(gauss1, nodes[j], quad, unit) / (cplx(-1.0, 1.0) - nodes[j]);
    EXPECT_LE(std::abs(many[j] - expected), 1e-6 * std::abs(expected)) << nodes[j];
  }
}

}  // namespace
}  // namespace freerhs
