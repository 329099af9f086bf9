#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "freerhs/core_model.hpp"
#include "freerhs/error.hpp"
#include "freerhs/quadrature.hpp"
#include "freerhs/report.hpp"
#include "freerhs/spectral_measure.hpp"
#include "freerhs/test_function.hpp"
#include "freerhs/transform.hpp"

namespace freerhs {

inline constexpr int default_n_max = 3;

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

/// ||phi||_{n,m} = sqrt(int_0^inf |(r+1)^n (h0+1)^m phi(r)|^2 dr); the
/// weighted function is built exactly in the family before squaring.
template <class Scalar>
double norm_nm(const BasicTestFunction<Scalar>& phi, int n, int m, const QuadratureSpec& quad,
               const PhysicalScale& scale, int n_max = default_n_max) {
  if (n < 0 || m < 0 || n > n_max || m > n_max) {
    throw SpectralError(ErrorCode::InvalidArgument, "norm indices must lie in [0, N_max]");
  }
  if (phi.is_zero()) return 0.0;
  const auto weighted = h0_plus_one_apply(phi, m, scale).times_linear_power(n, 1.0);
  auto f = [&](double r) { return std::norm(weighted(r)); };
  return std::sqrt(integrate_semi_infinite(f, quad).value);
}

struct NormTable {
  int n_max = default_n_max;
  std::map<std::pair<int, int>, double> values;

  double operator()(int n, int m) const { return values.at({n, m}); }
};

template <class Scalar>
NormTable norm_table(const BasicTestFunction<Scalar>& phi, const QuadratureSpec& quad,
                     const PhysicalScale& scale, int n_max = default_n_max) {
  NormTable t;
  t.n_max = n_max;
  for (int n = 0; n <= n_max; ++n) {
    for (int m = 0; m <= n_max; ++m) t.values[{n, m}] = norm_nm(phi, n, m, quad, scale, n_max);
  }
  return t;
}

namespace detail {

template <class Scalar>
std::string describe(const BasicTestFunction<Scalar>& phi) {
  std::ostringstream out;
  out.precision(6);
  bool first = true;
  for (const auto& t : phi.terms()) {
    if (!first) out << ';';
    first = false;
    out << t.power << ',' << t.width << ',' << t.coefficient;
  }
  if (first) out << "0";
  return out.str();
}

}  // namespace detail

/// Triangle inequality, homogeneity, nonnegativity and definiteness of
/// ||.||_{n,m} on the cyclic pairs (sample[i], sample[i+1]).
inline SpectralReport check_norm_axioms(const std::vector<TestFunction>& sample, int n, int m,
                                        const QuadratureSpec& quad, const PhysicalScale& scale,
                                        int n_max = default_n_max) {
  if (sample.empty()) throw SpectralError(ErrorCode::InvalidArgument, "sample must be nonempty");
  SpectralReport report;
  report.suite = "norm-axioms";
  const std::string nm = "(n,m)=(" + std::to_string(n) + "," + std::to_string(m) + ")";
  const double alpha = -2.5;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& phi = sample[i];
    const auto& psi = sample[(i + 1) % sample.size()];
    const std::string tag = nm + " pair " + std::to_string(i);
    const double a = norm_nm(phi, n, m, quad, scale, n_max);
    const double b = norm_nm(psi, n, m, quad, scale, n_max);
    const double sum = norm_nm(phi + psi, n, m, quad, scale, n_max);
    const double slack = 1e-10 * (a + b);
    report.add_upper_bound("norms.triangle " + tag, detail::describe(phi) + " | " + detail::describe(psi),
                           a + b, sum, slack, "||phi+psi|| <= ||phi|| + ||psi||");
    const double scaled = norm_nm(alpha * phi, n, m, quad, scale, n_max);
    report.add_equality("norms.homogeneity " + tag, detail::describe(phi), std::abs(alpha) * a, scaled,
                        1e-10 * std::max(1.0, std::abs(alpha) * a), "||alpha phi|| = |alpha| ||phi||");
    report.add_flag("norms.nonnegative " + tag, detail::describe(phi), a >= 0.0 && std::isfinite(a),
                    "||phi|| >= 0");
    report.add_flag("norms.definite " + tag, detail::describe(phi), phi.is_zero() == (a == 0.0),
                    "||phi|| = 0 iff phi = 0 (coefficient level)");
  }
  const TestFunction zero;
  report.add_flag("norms.definite zero " + nm, "0", zero.is_zero() && norm_nm(zero, n, m, quad, scale, n_max) == 0.0,
                  "||0|| = 0");
  return report;
}

// ---------------------------------------------------------------------------
// Membership certification
// ---------------------------------------------------------------------------

struct MembershipCheck {
  std::string condition;
  bool passed;
  std::string detail;
};

template <class Scalar>
struct MembershipReport {
  BasicTestFunction<Scalar> candidate;
  std::vector<MembershipCheck> checks;
  bool verdict = false;
};

namespace detail {

/// Exact value at r = 0: the constant coefficient of every block.
template <class Scalar>
Scalar value_at_origin(const BasicTestFunction<Scalar>& f) {
  Scalar v{};
  for (const auto& b : f.blocks()) {
    if (!b.coeffs.empty()) v += b.coeffs[0];
  }
  return v;
}

}  // namespace detail

/// Finitely many certifiable membership conditions: (h0^n phi)(0) = 0 for
/// n <= N_max, positive Gaussian widths, and finite ||phi||_{n,m} for
/// n, m <= N_max.
template <class Scalar>
MembershipReport<Scalar> phi0_membership(const BasicTestFunction<Scalar>& phi, const QuadratureSpec& quad = {},
                                         const PhysicalScale& scale = {}, int n_max = default_n_max) {
  MembershipReport<Scalar> report;
  report.candidate = phi;
  for (int n = 0; n <= n_max; ++n) {
    const Scalar v = detail::value_at_origin(h0_apply(phi, n, scale));
    std::ostringstream d;
    d << "value " << std::abs(v);
    report.checks.push_back({"(h0^" + std::to_string(n) + " phi)(0) = 0", v == Scalar{}, d.str()});
  }
  report.checks.push_back({"Gaussian widths > 0", phi.widths_positive(), ""});
  for (int n = 0; n <= n_max; ++n) {
    for (int m = 0; m <= n_max; ++m) {
      double value = 0.0;
      bool ok = true;
      try {
        value = norm_nm(phi, n, m, quad, scale, n_max);
        ok = std::isfinite(value);
      } catch (const SpectralError&) {
        ok = false;
      }
      report.checks.push_back({"||phi||_{" + std::to_string(n) + "," + std::to_string(m) + "} finite", ok,
                               std::to_string(value)});
    }
  }
  report.verdict = std::all_of(report.checks.begin(), report.checks.end(),
                               [](const MembershipCheck& c) { return c.passed; });
  return report;
}

// ---------------------------------------------------------------------------
// Kets
// ---------------------------------------------------------------------------

struct KetAction {
  double energy;
  cplx value;
};

/// <phi|E> = int_0^inf conj(phi(r)) sigma(r; E) dr.
template <class Scalar>
KetAction ket_action(const BasicTestFunction<Scalar>& phi, double energy, const QuadratureSpec& quad,
                     const PhysicalScale& scale) {
  if (!(energy > 0.0)) throw SpectralError(ErrorCode::NonPositiveEnergy, "ket |E> requires E > 0");
  if (phi.is_zero()) return {energy, cplx{}};
  auto f = [&](double r) { return std::conj(cplx(phi(r))) * sigma_eval(r, energy, scale); };
  return {energy, integrate_semi_infinite(f, quad).value};
}

/// M(E) = sup_r |sigma(r; E)| = sqrt(rho(E)).
inline double ket_bound_constant(double energy, const PhysicalScale& scale) {
  return std::sqrt(rho_density(energy, scale));
}

/// |<h0^n phi|E> - E^n <phi|E>|.
template <class Scalar>
double eigen_residual(const BasicTestFunction<Scalar>& phi, double energy, int n, const QuadratureSpec& quad,
                      const PhysicalScale& scale) {
  if (n < 1 || n > 3) throw SpectralError(ErrorCode::InvalidArgument, "eigen_residual supports 1 <= n <= 3");
  if (!(energy > 0.0)) throw SpectralError(ErrorCode::NonPositiveEnergy, "ket |E> requires E > 0");
  if (phi.is_zero()) return 0.0;
  const cplx lhs = ket_action(h0_apply(phi, n, scale), energy, quad, scale).value;
  const cplx rhs = std::pow(energy, n) * ket_action(phi, energy, quad, scale).value;
  return std::abs(lhs - rhs);
}

/// |<phi|E>| <= M(E) ||phi||_{1,0}.
template <class Scalar>
SpectralReport continuity_bound_check(const BasicTestFunction<Scalar>& phi, double energy,
                                      const QuadratureSpec& quad, const PhysicalScale& scale) {
  SpectralReport report;
  report.suite = "ket-continuity";
  const double lhs = std::abs(ket_action(phi, energy, quad, scale).value);
  const double rhs = ket_bound_constant(energy, scale) * norm_nm(phi, 1, 0, quad, scale);
  report.add_upper_bound("rhs.ket_continuity E=" + std::to_string(energy), detail::describe(phi),
                         rhs, lhs, 1e-10 * std::max(1.0, rhs), "|<phi|E>| <= M(E) ||phi||_{1,0}");
  return report;
}

/// ||H0 phi||_{n,m} <= ||phi||_{n,m+1} + ||phi||_{n,m}.
template <class Scalar>
SpectralReport h0_continuity_check(const BasicTestFunction<Scalar>& phi, int n, int m, const QuadratureSpec& quad,
                                   const PhysicalScale& scale, int n_max = default_n_max) {
  if (m + 1 > n_max) throw SpectralError(ErrorCode::InvalidArgument, "m must be at most N_max - 1");
  SpectralReport report;
  report.suite = "h0-continuity";
  const double lhs = norm_nm(h0_apply(phi, 1, scale), n, m, quad, scale, n_max);
  const double rhs = norm_nm(phi, n, m + 1, quad, scale, n_max) + norm_nm(phi, n, m, quad, scale, n_max);
  report.add_upper_bound("rhs.h0_continuity (n,m)=(" + std::to_string(n) + "," + std::to_string(m) + ")",
                         detail::describe(phi), rhs, lhs, 1e-10 * std::max(1.0, rhs),
                         "||H0 phi||_{n,m} <= ||phi||_{n,m+1} + ||phi||_{n,m}");
  return report;
}

// ---------------------------------------------------------------------------
// Spectral theorem and Dirac expansion
// ---------------------------------------------------------------------------

/// (phi, H0^n psi) in position space.
template <class Scalar>
cplx position_inner_product(const BasicTestFunction<Scalar>& phi, const BasicTestFunction<Scalar>& psi, int n,
                            const QuadratureSpec& quad, const PhysicalScale& scale) {
  if (phi.is_zero() || psi.is_zero()) return {};
  const auto hpsi = h0_apply(psi, n, scale);
  auto f = [&](double r) { return std::conj(cplx(phi(r))) * cplx(hpsi(r)); };
  return integrate_semi_infinite(f, quad).value;
}

/// int_0^inf E^n <phi|E><E|psi> dE, integrated in k = sqrt(cE).
template <class Scalar>
cplx energy_inner_product(const BasicTestFunction<Scalar>& phi, const BasicTestFunction<Scalar>& psi, int n,
                          const QuadratureSpec& quad, const PhysicalScale& scale) {
  if (phi.is_zero() || psi.is_zero()) return {};
  const double c = scale.c();
  auto f = [&](double k) -> cplx {
    if (k <= 0.0) return {};
    const double e = k * k / c;
    const cplx bra = ket_action(phi, e, quad, scale).value;    // <phi|E>
    const cplx ket = forward_transform_at(psi, e, quad, scale);  // <E|psi>
    return std::pow(e, n) * bra * ket * (2.0 * k / c);
  };
  return integrate_semi_infinite(f, outer_spec(quad)).value;
}

struct NuclearCheckOptions {
  double relative_tolerance = 1e-6;
  double reconstruction_tolerance = 1e-6;
  std::vector<double> reconstruction_points = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
};

/// Compares (phi, H0^n psi) with int E^n <phi|E><E|psi> dE and checks the
/// pointwise Dirac reconstruction psi(r) = int <r|E><E|psi> dE.
template <class Scalar>
SpectralReport nuclear_spectral_check(const BasicTestFunction<Scalar>& phi, const BasicTestFunction<Scalar>& psi,
                                      int n, const QuadratureSpec& quad, const PhysicalScale& scale,
                                      const NuclearCheckOptions& options = {}) {
  if (n < 0 || n > 2) throw SpectralError(ErrorCode::InvalidArgument, "nuclear_spectral_check supports n <= 2");
  SpectralReport report;
  report.suite = "nuclear-spectral";
  const std::string inputs = detail::describe(phi) + " | " +
                             detail::describe(psi) + " | n=" + std::to_string(n);
  const cplx position = position_inner_product(phi, psi, n, quad, scale);
  const cplx energy = energy_inner_product(phi, psi, n, quad, scale);
  const double reference = std::max(std::abs(position), norm_nm(phi, 0, 0, quad, scale) *
                                                            norm_nm(h0_apply(psi, n, scale), 0, 0, quad, scale));
  report.add_equality("rhs.nuclear.re n=" + std::to_string(n), inputs, position.real(), energy.real(),
                      options.relative_tolerance * reference, "(phi, H0^n psi) = int E^n <phi|E><E|psi> dE");
  report.add_equality("rhs.nuclear.im n=" + std::to_string(n), inputs, position.imag(), energy.imag(),
                      options.relative_tolerance * reference, "(phi, H0^n psi) = int E^n <phi|E><E|psi> dE");

  const auto image = energy_image(psi, quad, scale);
  double peak = 0.0;
  std::vector<cplx> exact;
  for (double r : options.reconstruction_points) {
    exact.push_back(cplx(psi(r)));
    peak = std::max(peak, std::abs(exact.back()));
  }
  const auto rebuilt = inverse_transform(image, options.reconstruction_points, quad, scale);
  for (std::size_t j = 0; j < rebuilt.size(); ++j) {
    report.add_equality("rhs.dirac_expansion r=" + std::to_string(options.reconstruction_points[j]), inputs,
                        0.0, std::abs(rebuilt[j] - exact[j]), options.reconstruction_tolerance * std::max(peak, 1e-300),
                        "psi(r) = int <r|E><E|psi> dE");
  }
  return report;
}

/// The energy-representation ket acts as conjugated point evaluation:
/// conj((U0 phi)(E)) = <phi|E>.
template <class Scalar>
SpectralReport energy_delta_check(const BasicTestFunction<Scalar>& phi, double energy, const QuadratureSpec& quad,
                                  const PhysicalScale& scale, double tolerance = 1e-8) {
  SpectralReport report;
  report.suite = "energy-delta";
  const auto image = energy_image(phi, quad, scale);
  const cplx point_eval = std::conj(image(energy));
  const cplx ket = ket_action(phi, energy, quad, scale).value;
  const std::string inputs = detail::describe(phi) + " | E=" + std::to_string(energy);
  report.add_equality("rhs.energy_delta.re E=" + std::to_string(energy), inputs, ket.real(), point_eval.real(),
                      tolerance, "<phi^|E^> = conj(phi^(E)) = <phi|E>");
  report.add_equality("rhs.energy_delta.im E=" + std::to_string(energy), inputs, ket.imag(), point_eval.imag(),
                      tolerance, "<phi^|E^> = conj(phi^(E)) = <phi|E>");
  return report;
}

}  // namespace freerhs
