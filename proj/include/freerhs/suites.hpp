#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "freerhs/core_model.hpp"
#include "freerhs/green.hpp"
#include "freerhs/quadrature.hpp"
#include "freerhs/report.hpp"
#include "freerhs/rhs_space.hpp"
#include "freerhs/spectral_measure.hpp"
#include "freerhs/test_function.hpp"
#include "freerhs/transform.hpp"

namespace freerhs {

/// Everything a verification suite depends on. Random sweeps draw from
/// std::mt19937_64 seeded with `seed`, so a suite is a pure function of
/// this struct.
struct SuiteConfig {
  PhysicalScale scale;
  QuadratureSpec quad;
  LimitSpec limit;
  double k_max = 12.0;
  std::uint64_t seed = 42;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"norms", "spectrum", "green", "transform", "rhs"};
  return names;
}

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

inline std::string fmt(cplx z) {
  if (z.imag() == 0.0) return fmt(z.real());
  if (z.real() == 0.0) return fmt(z.imag()) + "i";
  return fmt(z.real()) + (z.imag() < 0.0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

inline std::string index_id(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%02zu", i);
  return buf;
}

inline std::vector<TestFunction> seeded_family(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i) out.push_back(random_test_function(rng));
  return out;
}

inline double l2_norm_squared(const TestFunction& phi, const QuadratureSpec& quad) {
  if (phi.is_zero()) return 0.0;
  return integrate_semi_infinite([&](double r) { return phi(r) * phi(r); }, quad).value;
}

/// Fourth-order central second derivative.
template <class F>
cplx second_derivative(const F& g, double r, double h) {
  return (-g(r - 2 * h) + 16.0 * g(r - h) - 30.0 * g(r) + 16.0 * g(r + h) - g(r + 2 * h)) / (12.0 * h * h);
}

inline const TestFunction& gauss1() {
  static const TestFunction phi{{1.0, 1, 1.0}};
  return phi;
}

}  // namespace detail

/// Density against the Stieltjes jump, jump on the resolvent set, interval
/// measures and point classification.
inline SpectralReport spectrum_suite(const SuiteConfig& cfg) {
  SpectralReport rep;
  rep.suite = "spectrum";
  const auto& s = cfg.scale;
  for (double e : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double rho = rho_density(e, s);
    rep.add_equality("rho(" + detail::fmt(e) + ") vs stieltjes jump", "E=" + detail::fmt(e), rho,
                     spectral_jump(e, cfg.limit, s).real(), 1e-8 * rho,
                     "rho(E) = lim [theta11(E - i eps) - theta11(E + i eps)] / (2 pi i)");
  }
  for (double e : {-0.5, -2.0, -8.0}) {
    rep.add_equality("jump on resolvent set E=" + detail::fmt(e), "E=" + detail::fmt(e), 0.0,
                     std::abs(spectral_jump(e, cfg.limit, s)), 1e-10, "theta11 is continuous across E < 0");
  }
  auto exact_measure = [&](double a, double b) {
    if (b <= 0.0) return 0.0;
    return 2.0 * std::sqrt(s.c()) / pi * (std::sqrt(b) - std::sqrt(std::max(a, 0.0)));
  };
  for (auto [a, b] : {std::pair{1.0, 4.0}, std::pair{-2.0, -1.0}, std::pair{-1.0, 1.0}}) {
    rep.add_equality("stieltjes measure (" + detail::fmt(a) + "," + detail::fmt(b) + ")",
                     "E1=" + detail::fmt(a) + " E2=" + detail::fmt(b), exact_measure(a, b),
                     stieltjes_measure(a, b, cfg.limit, cfg.quad, s), 1e-6,
                     "mu(E1, E2) = int rho dE from the boundary values of theta11");
  }
  const std::pair<double, SpectrumVerdict> points[] = {{-1.0, SpectrumVerdict::ResolventSet},
                                                       {0.0, SpectrumVerdict::SpectrumBoundary},
                                                       {1.0, SpectrumVerdict::ContinuousSpectrum}};
  for (auto [e, verdict] : points) {
    rep.add_flag("classify E=" + detail::fmt(e), std::string("expected ") + to_string(verdict),
                 classify_point(e, cfg.limit, s).verdict == verdict, "spectrum = [0, inf)");
  }
  return rep;
}

/// Kernel fixtures, theta reconstruction, the resolvent equation, the
/// diagonal action in the energy representation and the ODE cross-check.
inline SpectralReport green_suite(const SuiteConfig& cfg) {
  SpectralReport rep;
  rep.suite = "green";
  const auto& s = cfg.scale;
  if (s.c() == 1.0) {
    const cplx g1 = green_eval(1.0, 2.0, -1.0, s).value;
    rep.add_equality("green fixture E=-1 re", "r=1 s=2", -0.159046186401789, g1.real(), 1e-12,
                     "G0 = -(c/k-) chi~(r<) f~(r>) / 2");
    const cplx g2 = green_eval(1.0, 2.0, cplx(0.0, 2.0), s).value;
    rep.add_equality("green fixture E=2i re", "r=1 s=2", 0.0136197474263576, g2.real(), 1e-12,
                     "G0 = -(c/k) chi(r<) f+(r>)");
    rep.add_equality("green fixture E=2i im", "r=1 s=2", -0.137647214655523, g2.imag(), 1e-12,
                     "G0 = -(c/k) chi(r<) f+(r>)");
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ur(0.01, 5.0);
  std::uniform_real_distribution<double> mag(0.05, 6.0);
  const char* names[] = {"NegRe", "UpperHalf", "LowerHalf"};
  for (int region = 0; region < 3; ++region) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double r = ur(rng);
      const double t = ur(rng);
      const double x = mag(rng);
      const double y = mag(rng);
      const cplx e = region == 0 ? cplx(-x, i % 2 ? y : -y) : (region == 1 ? cplx(x, y) : cplx(x, -y));
      const cplx closed = green_eval(r, t, e, s).value;
      worst = std::max(worst, std::abs(closed - green_from_theta(r, t, e, s)) / std::abs(closed));
    }
    rep.add_equality(std::string("theta expansion ") + names[region], "200 points", 0.0, worst, 1e-12,
                     "G0 = sum theta_ij sigma_i(r<) conj(sigma_j(r>; conj E))");
  }

  const auto& phi = detail::gauss1();
  for (const cplx e : {cplx(0.0, 2.0), cplx(-1.0, 1.0), cplx(3.0, 2.0)}) {
    auto g = [&](double r) { return resolvent_at(phi, e, r, s, cfg.quad); };
    double worst = 0.0;
    for (int j = 1; j <= 24; ++j) {
      const double r = 0.25 * j;
      const cplx h0g = -detail::second_derivative(g, r, 0.01) / s.c();
      worst = std::max(worst, std::abs(e * g(r) - h0g - phi(r)));
    }
    rep.add_equality("resolvent residual E=" + detail::fmt(e), "f = r exp(-r^2/2), r in [0.25, 6]", 0.0, worst,
                     1e-6, "(E - h0) (E - H0)^-1 f = f");
  }
  {
    const cplx z(-1.0, 1.0);
    std::vector<double> nodes;
    for (int j = 0; j < 20; ++j) nodes.push_back(0.1 + 0.45 * j);
    const auto image = resolvent_energy_image(phi, z, nodes, cfg.quad, s);
    double worst = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const cplx expected = forward_transform_at(phi, nodes[j], cfg.quad, s) / (z - nodes[j]);
      worst = std::max(worst, std::abs(image[j] - expected) / std::abs(expected));
    }
    rep.add_equality("resolvent diagonal E=" + detail::fmt(z), "20 energies in [0.1, 8.65]", 0.0, worst, 1e-6,
                     "U0 (E - H0)^-1 f = f^ / (E - .)");
  }

  for (double e : {0.25, 1.0, 4.0, 9.0}) {
    const auto sol = solve_chi_numeric(e, 20.0, s);
    const double k = std::sqrt(s.c() * e);
    double sup = 0.0;
    for (int j = 0; j <= 20000; ++j) {
      const double r = 20.0 * j / 20000.0;
      sup = std::max(sup, std::abs(sol(r) - std::sin(k * r)));
    }
    rep.add_equality("ode chi vs sin E=" + detail::fmt(e), "r in [0, 20]", 0.0, sup, 1e-8,
                     "-chi'' = c E chi, chi(0) = 0, chi'(0) = k");
  }
  return rep;
}

/// Transform fixtures, round trip and Parseval on seeded members, band
/// projection and propagation.
inline SpectralReport transform_suite(const SuiteConfig& cfg) {
  SpectralReport rep;
  rep.suite = "transform";
  const auto& s = cfg.scale;
  const auto& quad = cfg.quad;
  const auto& phi = detail::gauss1();
  if (s.c() == 1.0) {
    rep.add_equality("forward fixture E=1", "phi = r exp(-r^2/2)", 0.428881942480353,
                     forward_transform_at(phi, 1.0, quad, s).real(), 1e-10, "(U0 phi)(E) = int phi sigma dr");
    rep.add_equality("forward fixture E=4", "phi = r exp(-r^2/2)", 0.135335283236613,
                     forward_transform_at(phi, 4.0, quad, s).real(), 1e-10, "(U0 phi)(E) = int phi sigma dr");
    rep.add_equality("rho-normalized fixture E=1", "phi = r exp(-r^2/2)", 0.760173450533140,
                     forward_transform_rho_at(phi, 1.0, quad, s).real(), 1e-10,
                     "(U0~ phi)(E) = int phi chi dr");
  }

  const PositionRule rule = PositionRule::on(20.0);
  const auto family = detail::seeded_family(cfg.seed, 10);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& f = family[i];
    const EnergyRepresentation er(f, cfg.k_max, quad, s);
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double r = rule.nodes[j];
      diff += rule.weights[j] * std::norm(er.reconstruct(r) - f(r));
      norm += rule.weights[j] * f(r) * f(r);
    }
    const std::string inputs = detail::describe(f);
    rep.add_equality("round trip member " + detail::index_id(i), inputs, 0.0, std::sqrt(diff / norm), 1e-6,
                     "U0^-1 U0 phi = phi");
    const double position = detail::l2_norm_squared(f, quad);
    rep.add_equality("parseval member " + detail::index_id(i), inputs, position,
                     er.energy_norm_squared() + er.truncated_mass(), 1e-6 * position,
                     "||phi||^2 = int |U0 phi|^2 dE");
  }

  const auto band = BorelSymbol::indicator(1.0, 4.0);
  if (s.c() == 1.0) {
    const EnergyRepresentation er(phi, cfg.k_max, quad, s, band.breakpoints);
    rep.add_equality("band projection [1,4]", "phi = r exp(-r^2/2)", 0.233252710671984,
                     er.energy_norm_squared(band), 1e-8, "||P phi||^2 = int_1^4 |U0 phi|^2 dE");
  }
  {
    const std::vector<double> r_grid{0.3, 1.0, 2.0, 3.5};
    const auto once = apply_borel_function(band, phi, r_grid, quad, s);
    const auto twice = apply_borel_function(BorelSymbol::product(band, band), phi, r_grid, quad, s);
    double worst = 0.0;
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      worst = std::max(worst, std::abs(once[j] - twice[j]) / std::max(1.0, std::abs(once[j])));
    }
    rep.add_equality("band projection idempotent", "r in {0.3, 1, 2, 3.5}", 0.0, worst, 2.0 * quad.rel_tol,
                     "P^2 = P");
  }
  {
    const EnergyRepresentation er(phi, cfg.k_max, quad, s);
    const PositionRule wide = PositionRule::on(40.0);
    const double norm0 = detail::l2_norm_squared(phi, quad);
    const auto hphi = h0_apply(phi, 1, s);
    const double energy0 = integrate_semi_infinite([&](double r) { return phi(r) * hphi(r); }, quad).value;
    const BorelSymbol root{[](double e) { return cplx(std::sqrt(e)); }, {}};
    for (double t : {0.5, 1.0, 2.0}) {
      const auto psi = propagate(er, t, wide.nodes, s);
      double norm = 0.0;
      for (std::size_t j = 0; j < wide.nodes.size(); ++j) norm += wide.weights[j] * std::norm(psi.values[j]);
      rep.add_equality("propagation norm t=" + detail::fmt(t), "phi = r exp(-r^2/2)", norm0, norm, 1e-5,
                       "||exp(-i H0 t) phi|| = ||phi||");
      const auto phase = BorelSymbol::phase(t, s);
      rep.add_equality("propagation energy t=" + detail::fmt(t), "phi = r exp(-r^2/2)", energy0,
                       er.energy_norm_squared(BorelSymbol::product(phase, root)), 1e-5,
                       "(psi_t, H0 psi_t) = (phi, H0 phi)");
    }
  }
  return rep;
}

/// Norm fixtures, seminorm axioms on seeded pairs, monotonicity and
/// membership.
inline SpectralReport norms_suite(const SuiteConfig& cfg) {
  SpectralReport rep;
  rep.suite = "norms";
  const auto& s = cfg.scale;
  const auto& quad = cfg.quad;
  const auto& phi = detail::gauss1();
  if (s.c() == 1.0) {
    rep.add_equality("norm fixture (0,0)", "phi = r exp(-r^2/2)", 0.665667681900195, norm_nm(phi, 0, 0, quad, s),
                     1e-12, "||phi||_{0,0} = ||phi||");
    rep.add_equality("norm fixture (1,0)", "phi = r exp(-r^2/2)", 1.45182080740563, norm_nm(phi, 1, 0, quad, s),
                     1e-12, "||phi||_{1,0} = ||(1 + r) phi||");
  }
  rep.add_equality("norm of zero", "phi = 0", 0.0, norm_nm(TestFunction{}, 3, 3, quad, s), 0.0,
                   "||0||_{n,m} = 0");
  const auto sample = detail::seeded_family(cfg.seed, 50);
  for (int n = 0; n <= default_n_max; ++n) {
    for (int m = 0; m <= default_n_max; ++m) rep.append(check_norm_axioms(sample, n, m, quad, s));
  }
  for (std::size_t i = 0; i < 10; ++i) {
    const auto table = norm_table(sample[i], quad, s);
    double worst = 0.0;
    for (int n = 0; n < default_n_max; ++n) {
      for (int m = 0; m <= default_n_max; ++m) worst = std::max(worst, table(n, m) - table(n + 1, m));
    }
    rep.add_upper_bound("norm monotone in n member " + detail::index_id(i), detail::describe(sample[i]), 0.0, worst,
                        1e-12 * table(default_n_max, default_n_max), "||phi||_{n,m} <= ||phi||_{n+1,m}");
  }
  rep.add_flag("membership r exp(-r^2/2)", "phi = r exp(-r^2/2)", phi0_membership(phi, quad, s).verdict,
               "(h0^n phi)(0) = 0 and ||phi||_{n,m} < inf");
  rep.add_flag("membership r^3 exp(-r^2)", "phi = r^3 exp(-r^2)",
               phi0_membership(TestFunction{{1.0, 3, 2.0}}, quad, s).verdict,
               "(h0^n phi)(0) = 0 and ||phi||_{n,m} < inf");
  rep.add_flag("membership rejects r^2 exp(-r^2/2)", "phi = r^2 exp(-r^2/2)",
               !phi0_membership(TestFunction::unchecked({{1.0, 2, 1.0}}), quad, s).verdict,
               "(h0 phi)(0) != 0 for even powers");
  return rep;
}

/// Kets, generalized eigenvectors, continuity bounds, the nuclear spectral
/// theorem and the energy delta functional.
inline SpectralReport rhs_suite(const SuiteConfig& cfg) {
  SpectralReport rep;
  rep.suite = "rhs";
  const auto& s = cfg.scale;
  const auto& quad = cfg.quad;
  const auto& phi = detail::gauss1();
  if (s.c() == 1.0) {
    rep.add_equality("ket fixture E=1", "phi = r exp(-r^2/2)", 0.428881942480353,
                     ket_action(phi, 1.0, quad, s).value.real(), 1e-10, "<phi|E> = int conj(phi) sigma dr");
    const cplx self1 = energy_inner_product(phi, phi, 1, quad, s);
    rep.add_equality("nuclear self n=1", "phi = r exp(-r^2/2)", 3.0 * std::sqrt(pi) / 8.0, self1.real(), 1e-6,
                     "(phi, H0 phi) = int E |<phi|E>|^2 dE");
  }
  const auto family = detail::seeded_family(cfg.seed, 10);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& f = family[i];
    const double bound = norm_nm(f, 1, 0, quad, s);
    for (double e : {0.5, 1.0, 2.0, 5.0}) {
      for (int n : {1, 2}) {
        rep.add_upper_bound("eigen residual member " + detail::index_id(i) + " E=" + detail::fmt(e) +
                                " n=" + std::to_string(n),
                            detail::describe(f), 1e-7 * (1.0 + std::pow(e, n)) * bound,
                            eigen_residual(f, e, n, quad, s), 0.0, "<h0^n phi|E> = E^n <phi|E>");
      }
      rep.append(continuity_bound_check(f, e, quad, s));
    }
  }
  const auto wide = detail::seeded_family(cfg.seed + 1, 20);
  for (const auto& f : wide) {
    for (int n = 0; n <= 1; ++n) {
      for (int m = 0; m <= 1; ++m) rep.append(h0_continuity_check(f, n, m, quad, s));
    }
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (int n = 0; n <= 2; ++n) {
      rep.append(nuclear_spectral_check(family[i], family[(i + 1) % family.size()], n, quad, s));
    }
  }
  for (double e : {1.0, 4.0}) rep.append(energy_delta_check(phi, e, quad, s));
  return rep;
}

inline SpectralReport run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (name == "norms") return norms_suite(cfg);
  if (name == "spectrum") return spectrum_suite(cfg);
  if (name == "green") return green_suite(cfg);
  if (name == "transform") return transform_suite(cfg);
  if (name == "rhs") return rhs_suite(cfg);
  throw SpectralError(ErrorCode::InvalidArgument, "unknown suite '" + name + "'");
}

}  // namespace freerhs
