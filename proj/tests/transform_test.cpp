#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "freerhs/transform.hpp"

namespace freerhs {
namespace {

const PhysicalScale unit;
const QuadratureSpec quad;
const TestFunction gauss1{{1.0, 1, 1.0}};

double l2_norm_squared(const TestFunction& phi) {
  return integrate_semi_infinite([&](double r) { return phi(r) * phi(r); }, quad).value;
}

TEST(SigmaTest, Fixtures) {
  EXPECT_NEAR(sigma_eval(pi / 2, 1.0, unit), 1.0 / std::sqrt(pi), 1e-15);
  EXPECT_EQ(sigma_eval(0.0, 3.0, unit), 0.0);
  EXPECT_NEAR(sigma_eval(pi / 4, 4.0, unit), 1.0 / std::sqrt(2 * pi), 1e-15);
  EXPECT_THROW(sigma_eval(1.0, 0.0, unit), SpectralError);
}

TEST(ForwardTransformTest, Fixtures) {
  EXPECT_NEAR(forward_transform_at(gauss1, 1.0, quad, unit).real(), 0.428881942480353, 1e-12);
  EXPECT_NEAR(forward_transform_at(gauss1, 4.0, quad, unit).real(), 0.135335283236613, 1e-12);
  EXPECT_NEAR(forward_transform_rho_at(gauss1, 1.0, quad, unit).real(), 0.760173450533140, 1e-12);
  EXPECT_NEAR(std::sqrt(rho_density(1.0, unit)) * forward_transform_rho_at(gauss1, 1.0, quad, unit).real(),
              forward_transform_at(gauss1, 1.0, quad, unit).real(), 1e-14);
  const auto grid = EnergyGrid::linear_in_k(0.1, 3.0, 8, unit);
  const auto zero = forward_transform(TestFunction{}, grid, quad, unit);
  for (const auto& v : zero.values()) EXPECT_EQ(v, cplx{});
  EXPECT_THROW(forward_transform_at(gauss1, 0.0, quad, unit), SpectralError);
}

TEST(ForwardTransformTest, MatchesAnalyticSineTransform) {
  // c = 2: k = sqrt(2E), phi_hat = sqrt(rho) sqrt(pi/2) k e^{-k^2/2}
  const PhysicalScale scale = PhysicalScale::from_c(2.0);
  const auto grid = EnergyGrid::linear_in_k(0.05, 6.0, 40, scale);
  const auto image = forward_transform(gauss1, grid, quad, scale);
  for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
    const double e = grid.nodes[j];
    const double k = std::sqrt(2.0 * e);
    const double exact = std::sqrt(rho_density(e, scale)) * std::sqrt(pi / 2) * k * std::exp(-k * k / 2);
    EXPECT_NEAR(image.values()[j].real(), exact, 1e-12);
  }
}

TEST(ForwardTransformTest, IntertwinesH0WithMultiplication) {
  std::mt19937_64 rng(8);
  const auto grid = EnergyGrid::linear_in_k(0.2, 5.0, 20, unit);
  for (int i = 0; i < 5; ++i) {
    const auto phi = random_test_function(rng);
    const auto a = forward_transform(h0_apply(phi, 1, unit), grid, quad, unit);
    const auto b = forward_transform(phi, grid, quad, unit);
    for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
      const cplx expected = grid.nodes[j] * b.values()[j];
      EXPECT_LE(std::abs(a.values()[j] - expected), 1e-6 * std::max(1e-3, std::abs(expected)));
    }
  }
}

TEST(InverseTransformTest, ClosedFormFixture) {
  const auto f_hat = EnergyFunction::closed_form([](double e) {
    const double k = std::sqrt(e);
    return cplx(std::sqrt(k / 2) * std::exp(-k * k / 2));
  });
  const auto values = inverse_transform(f_hat, {1.0, 0.0}, quad, unit);
  EXPECT_NEAR(values[0].real(), std::exp(-0.5), 1e-10);
  EXPECT_NEAR(std::abs(values[1]), 0.0, 1e-15);
  const auto zero = inverse_transform(EnergyFunction::closed_form([](double) { return cplx{}; }), {1.0}, quad, unit);
  EXPECT_EQ(zero[0], cplx{});
}

TEST(InverseTransformTest, SingularEndpointIsRejected) {
  const auto bad = EnergyFunction::closed_form([](double e) { return cplx(1.0 / e); });
  try {
    inverse_transform(bad, {1.0}, quad, unit);
    FAIL();
  } catch (const SpectralError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularEndpoint);
  }
}

TEST(InverseTransformTest, RoundTripAndParseval) {
  std::mt19937_64 rng(42);
  const PositionRule rule = PositionRule::on(20.0);
  for (int i = 0; i < 10; ++i) {
    const auto phi = random_test_function(rng);
    const EnergyRepresentation rep(phi, 12.0, quad, unit);
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double r = rule.nodes[j];
      diff += rule.weights[j] * std::norm(rep.reconstruct(r) - phi(r));
      norm += rule.weights[j] * phi(r) * phi(r);
    }
    EXPECT_LE(std::sqrt(diff / norm), 1e-6) << i;
    const double position = l2_norm_squared(phi);
    EXPECT_LE(std::abs(rep.energy_norm_squared() + rep.truncated_mass() - position), 1e-6 * position) << i;
    EXPECT_LE(rep.truncated_mass(), 1e-12 * position);
  }
}

TEST(InverseTransformTest, SampledGridInterpolates) {
  const auto grid = EnergyGrid::linear_in_k(1e-3, 12.0, 256, unit);
  const auto image = forward_transform(gauss1, grid, quad, unit);
  const auto back = inverse_transform(image, {0.5, 1.0, 2.0}, quad, unit);
  for (std::size_t j = 0; j < 3; ++j) {
    const double r = std::vector<double>{0.5, 1.0, 2.0}[j];
    EXPECT_NEAR(back[j].real(), gauss1(r), 1e-6);
  }
}

TEST(BorelCalculusTest, IdentityAndMultiplication) {
  const std::vector<double> grid{0.5, 1.0, 2.5};
  const auto same = apply_borel_function(BorelSymbol::constant(1.0), gauss1, grid, quad, unit);
  const auto h = apply_borel_function(BorelSymbol::power(1), gauss1, grid, quad, unit);
  const auto h0phi = h0_apply(gauss1, 1, unit);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    EXPECT_NEAR(std::abs(same[j] - gauss1(grid[j])), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(h[j] - h0phi(grid[j])), 0.0, 1e-6);
  }
  EXPECT_NEAR(h[1].real(), 2.0 * std::exp(-0.5), 1e-6);
}

TEST(BorelCalculusTest, UnboundedSymbolIsRejected) {
  try {
    apply_borel_function(BorelSymbol::power(4), gauss1, {1.0}, quad, unit);
    FAIL();
  } catch (const SpectralError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundedSymbol);
  }
}

TEST(BorelCalculusTest, BandProjection) {
  const auto band = BorelSymbol::indicator(1.0, 4.0);
  const EnergyRepresentation rep(gauss1, 12.0, quad, unit, band.breakpoints);
  const double projected = rep.energy_norm_squared(band);
  EXPECT_NEAR(projected, 0.233252710671984, 1e-10);
  // (P phi, P phi) = (phi, P phi) and P^2 = P on the position side
  const std::vector<double> r_grid{0.3, 1.0, 2.0, 3.5};
  const auto once = apply_borel_function(band, gauss1, r_grid, quad, unit);
  const auto twice = apply_borel_function(BorelSymbol::product(band, band), gauss1, r_grid, quad, unit);
  for (std::size_t j = 0; j < r_grid.size(); ++j) {
    EXPECT_LE(std::abs(once[j] - twice[j]), 2.0 * quad.rel_tol * std::max(1.0, std::abs(once[j])));
    EXPECT_LE(std::abs(rep.apply(band, r_grid[j]) - once[j]), 1e-8);
  }
}

TEST(PropagationTest, IdentityAtZeroAndConservation) {
  const PositionRule rule = PositionRule::on(40.0);
  const EnergyRepresentation rep(gauss1, 12.0, quad, unit);
  const auto at0 = propagate(rep, 0.0, {0.5, 1.0, 2.0}, unit);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(std::abs(at0.values[j] - gauss1(std::vector<double>{0.5, 1.0, 2.0}[j])), 0.0, 1e-6);
  }
  const double norm0 = l2_norm_squared(gauss1);
  const double energy0 = integrate_semi_infinite(
      [&](double r) { return gauss1(r) * h0_apply(gauss1, 1, unit)(r); }, quad).value;
  for (double t : {0.5, 1.0, 2.0}) {
    const auto psi = propagate(rep, t, rule.nodes, unit);
    EXPECT_FALSE(psi.under_resolved);
    double norm = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) norm += rule.weights[j] * std::norm(psi.values[j]);
    EXPECT_NEAR(norm, norm0, 1e-5) << t;
    const auto phase = BorelSymbol::phase(t, unit);
    const double energy = rep.energy_norm_squared(BorelSymbol::product(phase, {[](double e) { return cplx(std::sqrt(e)); }, {}}));
    EXPECT_NEAR(energy, energy0, 1e-5) << t;
  }
}

TEST(PropagationTest, WarnsWhenPhaseIsUnderResolved) {
  const EnergyRepresentation rep(gauss1, 12.0, quad, unit);
  const auto psi = propagate(rep, 500.0, {1.0}, unit);
  EXPECT_TRUE(psi.under_resolved);
  EXPECT_FALSE(psi.warning.empty());
}

}  // namespace
}  // namespace freerhs
