#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "freerhs/core_model.hpp"
#include "freerhs/error.hpp"
#include "freerhs/green.hpp"
#include "freerhs/quadrature.hpp"

namespace freerhs {

/// rho(E) = (1/pi) c / sqrt(cE) on E > 0.
inline double rho_density(double energy, const PhysicalScale& scale) {
  if (!(energy > 0.0)) {
    throw SpectralError(ErrorCode::NonPositiveEnergy, "spectral density requires E > 0");
  }
  return scale.c() / (pi * std::sqrt(scale.c() * energy));
}

class SpectralDensity {
 public:
  explicit SpectralDensity(PhysicalScale scale = {}) : scale_(scale) {}

  double operator()(double energy) const { return rho_density(energy, scale_); }
  const PhysicalScale& scale() const noexcept { return scale_; }

 private:
  PhysicalScale scale_;
};

/// [theta_11(E - i eps) - theta_11(E + i eps)] / (2 pi i) at fixed eps > 0,
/// using theta+ for Re E >= 0 and theta- for Re E < 0.
inline cplx regularized_jump(double energy, double eps, const PhysicalScale& scale) {
  const ComplexEnergy below(energy, -eps);
  const ComplexEnergy above(energy, eps);
  const cplx below11 = theta_matrix(below, scale)(0, 0);
  const cplx above11 = theta_matrix(above, scale)(0, 0);
  return (below11 - above11) / (2.0 * pi * cplx(0.0, 1.0));
}

/// lim eps->0+ of the regularized jump. The first eps used is
/// min(spec.start, |E|/4) so the sequence starts inside the region where
/// theta is analytic in eps.
inline cplx spectral_jump(double energy, LimitSpec spec, const PhysicalScale& scale) {
  if (energy == 0.0) {
    throw SpectralError(ErrorCode::InvalidArgument, "the jump is singular at E = 0");
  }
  spec.start = std::min(spec.start, 0.25 * std::abs(energy));
  auto g = [&](double eps) { return regularized_jump(energy, eps, scale); };
  return limit_extrapolate(g, spec).value;
}

namespace detail {

/// int_a^b of the eps-regularized jump; the positive part is integrated in
/// u = sqrt(E) so the E^(-1/2) growth near 0 stays smooth.
inline double regularized_measure(double a, double b, double eps, const PhysicalScale& scale,
                                  const QuadratureSpec& quad) {
  double total = 0.0;
  if (a < 0.0) {
    const double hi = std::min(b, 0.0);
    auto f = [&](double e) { return regularized_jump(e, eps, scale).real(); };
    total += integrate(f, a, hi, quad).value;
  }
  if (b > 0.0) {
    const double lo = std::sqrt(std::max(a, 0.0));
    const double hi = std::sqrt(b);
    auto f = [&](double u) { return regularized_jump(u * u, eps, scale).real() * 2.0 * u; };
    total += integrate(f, lo, hi, quad, 4).value;
  }
  return total;
}

}  // namespace detail

/// Measure of (E1, E2) recovered from the boundary values of theta_11:
/// integrate over [E1 + delta, E2 - delta], take eps -> 0 first, then
/// delta -> 0. Both limits are extrapolated in powers of sqrt(eps) and
/// sqrt(delta), which covers intervals with an endpoint at the threshold.
inline double stieltjes_measure(double e1, double e2, LimitSpec spec, const QuadratureSpec& quad,
                                const PhysicalScale& scale) {
  if (!(e1 < e2)) throw SpectralError(ErrorCode::InvalidArgument, "stieltjes_measure requires E1 < E2");
  spec.exponent_step = 0.5;
  LimitSpec delta_spec = spec;
  delta_spec.start = std::min(spec.start, (e2 - e1) / 8.0);
  auto at_delta = [&](double delta) {
    auto at_eps = [&](double eps) {
      return detail::regularized_measure(e1 + delta, e2 - delta, eps, scale, quad);
    };
    return limit_extrapolate(at_eps, spec).value;
  };
  return limit_extrapolate(at_delta, delta_spec).value;
}

enum class SpectrumVerdict { ResolventSet, ContinuousSpectrum, SpectrumBoundary };

inline const char* to_string(SpectrumVerdict v) {
  switch (v) {
    case SpectrumVerdict::ResolventSet: return "ResolventSet";
    case SpectrumVerdict::ContinuousSpectrum: return "ContinuousSpectrum";
    case SpectrumVerdict::SpectrumBoundary: return "SpectrumBoundary";
  }
  return "Unknown";
}

struct SpectrumClassification {
  double point;
  SpectrumVerdict verdict;
  cplx jump_value;
};

/// Detection threshold for a nonzero jump, in units of sqrt(c)/pi.
inline constexpr double jump_detection_threshold = 1e-6;

inline SpectrumClassification classify_point(double energy, const LimitSpec& spec,
                                             const PhysicalScale& scale) {
  if (energy == 0.0) return {energy, SpectrumVerdict::SpectrumBoundary, cplx{}};
  const cplx jump = spectral_jump(energy, spec, scale);
  const double threshold = jump_detection_threshold * std::sqrt(scale.c()) / pi;
  const auto verdict =
      std::abs(jump) > threshold ? SpectrumVerdict::ContinuousSpectrum : SpectrumVerdict::ResolventSet;
  return {energy, verdict, jump};
}

}  // namespace freerhs
