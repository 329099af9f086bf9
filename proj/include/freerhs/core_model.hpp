#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "freerhs/error.hpp"

namespace freerhs {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

/// hbar and mass enter every formula only through c = 2m/hbar^2.
class PhysicalScale {
 public:
  PhysicalScale() : PhysicalScale(1.0, 0.5) {}

  PhysicalScale(double hbar, double mass) : hbar_(hbar), mass_(mass) {
    if (!(hbar > 0.0) || !(mass > 0.0) || !std::isfinite(hbar) ||
        !std::isfinite(mass)) {
      throw SpectralError(ErrorCode::InvalidArgument,
                          "hbar and mass must be positive and finite");
    }
    c_ = 2.0 * mass_ / (hbar_ * hbar_);
  }

  /// Scale with hbar = 1 and the mass chosen so that 2m/hbar^2 == c.
  static PhysicalScale from_c(double c) { return PhysicalScale(1.0, 0.5 * c); }

  double hbar() const noexcept { return hbar_; }
  double mass() const noexcept { return mass_; }
  double c() const noexcept { return c_; }

 private:
  double hbar_;
  double mass_;
  double c_;
};

// ---------------------------------------------------------------------------
// Complex energies
// ---------------------------------------------------------------------------

enum class Region { NegRe, UpperHalf, LowerHalf, PositiveAxis, NegativeAxis, Origin };

inline const char* to_string(Region region) {
  switch (region) {
    case Region::NegRe: return "NegRe";
    case Region::UpperHalf: return "UpperHalf";
    case Region::LowerHalf: return "LowerHalf";
    case Region::PositiveAxis: return "PositiveAxis";
    case Region::NegativeAxis: return "NegativeAxis";
    case Region::Origin: return "Origin";
  }
  return "Unknown";
}

/// Purely imaginary energies are sorted into UpperHalf/LowerHalf by the sign
/// of the imaginary part.
inline Region classify(cplx energy) {
  const double re = energy.real();
  const double im = energy.imag();
  if (im == 0.0) {
    if (re > 0.0) return Region::PositiveAxis;
    if (re < 0.0) return Region::NegativeAxis;
    return Region::Origin;
  }
  if (re < 0.0) return Region::NegRe;
  return im > 0.0 ? Region::UpperHalf : Region::LowerHalf;
}

class ComplexEnergy {
 public:
  ComplexEnergy(cplx value)  // NOLINT(google-explicit-constructor)
      : value_(value), region_(classify(value)) {}
  ComplexEnergy(double re, double im = 0.0) : ComplexEnergy(cplx(re, im)) {}

  cplx value() const noexcept { return value_; }
  Region region() const noexcept { return region_; }

  bool on_real_axis() const noexcept { return value_.imag() == 0.0; }
  bool positive_side() const noexcept {
    return region_ == Region::UpperHalf || region_ == Region::LowerHalf ||
           region_ == Region::PositiveAxis;
  }
  bool negative_side() const noexcept {
    return region_ == Region::NegRe || region_ == Region::NegativeAxis;
  }

 private:
  cplx value_;
  Region region_;
};

/// Square root with arg(E) in (-pi, pi] mapped onto arg in (-pi/2, pi/2].
/// A signed zero imaginary part is read as +0 so the negative real axis
/// belongs to the upper side of the cut.
inline cplx branch_sqrt(cplx energy) {
  if (energy.imag() == 0.0) {
    energy = cplx(energy.real(), 0.0);
  }
  return std::sqrt(energy);
}

// ---------------------------------------------------------------------------
// Closed-form solutions of -u'' = cE u
// ---------------------------------------------------------------------------

enum class EigenfunctionKind { ChiTilde, FTilde, Chi, FPlus, FMinus, Sigma2Cos, Sigma1Tilde };

inline const char* to_string(EigenfunctionKind kind) {
  switch (kind) {
    case EigenfunctionKind::ChiTilde: return "ChiTilde";
    case EigenfunctionKind::FTilde: return "FTilde";
    case EigenfunctionKind::Chi: return "Chi";
    case EigenfunctionKind::FPlus: return "FPlus";
    case EigenfunctionKind::FMinus: return "FMinus";
    case EigenfunctionKind::Sigma2Cos: return "Sigma2Cos";
    case EigenfunctionKind::Sigma1Tilde: return "Sigma1Tilde";
  }
  return "Unknown";
}

inline bool kind_valid_for(EigenfunctionKind kind, const ComplexEnergy& energy) {
  switch (kind) {
    case EigenfunctionKind::ChiTilde:
    case EigenfunctionKind::FTilde:
    case EigenfunctionKind::Sigma1Tilde:
      return energy.negative_side();
    case EigenfunctionKind::Chi:
    case EigenfunctionKind::FPlus:
    case EigenfunctionKind::FMinus:
    case EigenfunctionKind::Sigma2Cos:
      return energy.positive_side();
  }
  return false;
}

namespace detail {

inline void require_kind(EigenfunctionKind kind, const ComplexEnergy& energy) {
  if (!kind_valid_for(kind, energy)) {
    throw SpectralError(ErrorCode::KindRegionMismatch,
                        std::string(to_string(kind)) + " is not defined in region " +
                            to_string(energy.region()));
  }
}

}  // namespace detail

/// k = sqrt(cE), the wave number on the positive side.
inline cplx wave_number(const ComplexEnergy& energy, const PhysicalScale& scale) {
  return branch_sqrt(scale.c() * energy.value());
}

/// k_- = sqrt(-cE), the decay constant on the negative side.
inline cplx decay_constant(const ComplexEnergy& energy, const PhysicalScale& scale) {
  return branch_sqrt(-scale.c() * energy.value());
}

/// Derivative of the given order (0, 1 or 2) of a closed-form solution.
inline cplx eigenfunction_derivative(EigenfunctionKind kind, double r, const ComplexEnergy& energy,
                                     const PhysicalScale& scale, int order) {
  detail::require_kind(kind, energy);
  if (order < 0 || order > 2) {
    throw SpectralError(ErrorCode::InvalidArgument, "derivative order must be 0, 1 or 2");
  }
  const cplx i(0.0, 1.0);
  switch (kind) {
    case EigenfunctionKind::ChiTilde: {
      const cplx km = decay_constant(energy, scale);
      const cplx ep = std::exp(km * r);
      const cplx em = std::exp(-km * r);
      if (order == 0) return ep - em;
      if (order == 1) return km * (ep + em);
      return km * km * (ep - em);
    }
    case EigenfunctionKind::FTilde: {
      const cplx km = decay_constant(energy, scale);
      const cplx em = std::exp(-km * r);
      if (order == 0) return em;
      if (order == 1) return -km * em;
      return km * km * em;
    }
    case EigenfunctionKind::Sigma1Tilde: {
      const cplx km = decay_constant(energy, scale);
      const cplx ep = std::exp(km * r);
      if (order == 0) return ep;
      if (order == 1) return km * ep;
      return km * km * ep;
    }
    case EigenfunctionKind::Chi: {
      const cplx k = wave_number(energy, scale);
      if (order == 0) return std::sin(k * r);
      if (order == 1) return k * std::cos(k * r);
      return -k * k * std::sin(k * r);
    }
    case EigenfunctionKind::Sigma2Cos: {
      const cplx k = wave_number(energy, scale);
      if (order == 0) return std::cos(k * r);
      if (order == 1) return -k * std::sin(k * r);
      return -k * k * std::cos(k * r);
    }
    case EigenfunctionKind::FPlus: {
      const cplx k = wave_number(energy, scale);
      const cplx e = std::exp(i * k * r);
      if (order == 0) return e;
      if (order == 1) return i * k * e;
      return -k * k * e;
    }
    case EigenfunctionKind::FMinus: {
      const cplx k = wave_number(energy, scale);
      const cplx e = std::exp(-i * k * r);
      if (order == 0) return e;
      if (order == 1) return -i * k * e;
      return -k * k * e;
    }
  }
  return {};
}

inline cplx eigenfunction(EigenfunctionKind kind, double r, const ComplexEnergy& energy,
                          const PhysicalScale& scale) {
  return eigenfunction_derivative(kind, r, energy, scale, 0);
}

enum class WronskianPair { ChiTilde_FTilde, Chi_FPlus, Chi_FMinus };

inline cplx wronskian_closed(WronskianPair pair, const ComplexEnergy& energy,
                             const PhysicalScale& scale) {
  switch (pair) {
    case WronskianPair::ChiTilde_FTilde:
      detail::require_kind(EigenfunctionKind::ChiTilde, energy);
      return -2.0 * decay_constant(energy, scale);
    case WronskianPair::Chi_FPlus:
    case WronskianPair::Chi_FMinus:
      detail::require_kind(EigenfunctionKind::Chi, energy);
      return -wave_number(energy, scale);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Wronskians of arbitrary function handles
// ---------------------------------------------------------------------------

/// Five-point central first derivative with h = eps^(1/3) * max(1, |r|).
template <class F>
auto central_derivative(const F& f, double r) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(r));
  return (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h);
}

/// u v' - u' v with both derivatives supplied.
template <class U, class DU, class V, class DV>
cplx wronskian_numeric(const U& u, const DU& du, const V& v, const DV& dv, double r) {
  return cplx(u(r)) * cplx(dv(r)) - cplx(du(r)) * cplx(v(r));
}

/// u v' - u' v with derivatives from the central stencil.
template <class U, class V>
cplx wronskian_numeric(const U& u, const V& v, double r) {
  const cplx du = central_derivative(u, r);
  const cplx dv = central_derivative(v, r);
  return cplx(u(r)) * dv - du * cplx(v(r));
}

// ---------------------------------------------------------------------------
// Numerical integration of the regular solution
// ---------------------------------------------------------------------------

/// Regular solution sampled on a uniform grid, with cubic Hermite
/// interpolation between samples.
class SampledSolution {
 public:
  SampledSolution(std::vector<double> r, std::vector<double> u, std::vector<double> du)
      : r_(std::move(r)), u_(std::move(u)), du_(std::move(du)) {}

  const std::vector<double>& nodes() const noexcept { return r_; }
  const std::vector<double>& values() const noexcept { return u_; }
  const std::vector<double>& derivatives() const noexcept { return du_; }

  double operator()(double r) const {
    if (r < r_.front() || r > r_.back()) {
      throw SpectralError(ErrorCode::InvalidArgument, "r outside the integrated range");
    }
    auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t j = it == r_.begin() ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
    if (j + 1 >= r_.size()) j = r_.size() - 2;
    const double h = r_[j + 1] - r_[j];
    const double t = (r - r_[j]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * u_[j] + h10 * h * du_[j] + h01 * u_[j + 1] + h11 * h * du_[j + 1];
  }

 private:
  std::vector<double> r_;
  std::vector<double> u_;
  std::vector<double> du_;
};

struct OdeOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  double sample_step = 0.005;
  std::size_t max_steps = 2'000'000;
};

/// Integrates -u'' = cE u from u(0) = 0, u'(0) = sqrt(cE) with an adaptive
/// Dormand-Prince 5(4) pair and dense output.
inline SampledSolution solve_chi_numeric(double energy, double r_max, const PhysicalScale& scale,
                                         const OdeOptions& options = {}) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  if (!(energy > 0.0)) {
    throw SpectralError(ErrorCode::NonPositiveEnergy, "solve_chi_numeric requires E > 0");
  }
  if (!(r_max > 0.0)) {
    throw SpectralError(ErrorCode::InvalidArgument, "solve_chi_numeric requires r_max > 0");
  }
  const double k2 = scale.c() * energy;
  const auto n_steps = static_cast<std::size_t>(std::ceil(r_max / options.sample_step));
  const std::size_t n = std::max<std::size_t>(n_steps, 1) + 1;
  std::vector<double> grid(n);
  for (std::size_t j = 0; j < n; ++j) {
    grid[j] = r_max * static_cast<double>(j) / static_cast<double>(n - 1);
  }
  std::vector<double> u(n), du(n);
  State state{0.0, std::sqrt(k2)};
  std::size_t sample = 0;
  auto rhs = [k2](const State& y, State& dydr, double) {
    dydr[0] = y[1];
    dydr[1] = -k2 * y[0];
  };
  auto observer = [&](const State& y, double) {
    u[sample] = y[0];
    du[sample] = y[1];
    ++sample;
  };
  try {
    auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol,
                                             odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, rhs, state, grid.begin(), grid.end(),
                            options.sample_step, observer,
                            odeint::max_step_checker(static_cast<int>(
                                std::min<std::size_t>(options.max_steps, 1u << 30))));
  } catch (const std::exception& e) {
    throw SpectralError(ErrorCode::StepSizeUnderflow,
                        std::string("ODE integration could not reach tolerance: ") + e.what());
  }
  if (sample != n) {
    throw SpectralError(ErrorCode::StepSizeUnderflow, "ODE integration stopped early");
  }
  u[0] = 0.0;
  return SampledSolution(std::move(grid), std::move(u), std::move(du));
}

}  // namespace freerhs
