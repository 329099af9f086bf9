#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/multiprecision/cpp_complex.hpp>

#include "freerhs/core_model.hpp"
#include "freerhs/error.hpp"
#include "freerhs/quadrature.hpp"
#include "freerhs/test_function.hpp"

namespace freerhs {

enum class Ordering { RLessS, RGreaterS, Diagonal };

inline const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::RLessS: return "r_less_s";
    case Ordering::RGreaterS: return "r_greater_s";
    case Ordering::Diagonal: return "diagonal";
  }
  return "unknown";
}

struct GreenEvaluation {
  cplx value;
  Region region;
  Ordering ordering;
};

namespace detail {

// The negative real axis lies in the resolvent set and the Re E < 0 form is
// analytic across it, so only the spectrum [0, inf) is rejected.
inline void require_off_axis(const ComplexEnergy& energy) {
  if (energy.on_real_axis() && energy.value().real() >= 0.0) {
    throw SpectralError(ErrorCode::OnRealAxis, "energy is on real axis; the resolvent kernel "
                                               "is not defined on the spectrum [0, inf)");
  }
}

inline Region kernel_region(const ComplexEnergy& energy) {
  return energy.region() == Region::NegativeAxis ? Region::NegRe : energy.region();
}

}  // namespace detail

/// Resolvent kernel G0(r, s; E) of the free radial Hamiltonian with u(0) = 0.
///   Re E < 0:           -(c / k_-) chi~(r<) f~(r>) / 2
///   Re E >= 0, Im E > 0: -(c / k)  chi(r<)  f+(r>)
///   Re E >= 0, Im E < 0: -(c / k)  chi(r<)  f-(r>)
/// with k_- = sqrt(-cE), k = sqrt(cE). The diagonal r == s is filled by
/// continuity.
inline GreenEvaluation green_eval(double r, double s, const ComplexEnergy& energy,
                                  const PhysicalScale& scale) {
  detail::require_off_axis(energy);
  if (!(r > 0.0) || !(s > 0.0)) {
    throw SpectralError(ErrorCode::InvalidArgument, "green_eval requires r, s > 0");
  }
  const double lo = std::min(r, s);
  const double hi = std::max(r, s);
  const Ordering ordering = r < s ? Ordering::RLessS : (r > s ? Ordering::RGreaterS : Ordering::Diagonal);
  const double c = scale.c();
  cplx value;
  const Region region = detail::kernel_region(energy);
  switch (region) {
    case Region::NegRe: {
      const cplx km = decay_constant(energy, scale);
      value = -(c / km) * eigenfunction(EigenfunctionKind::ChiTilde, lo, energy, scale) *
              eigenfunction(EigenfunctionKind::FTilde, hi, energy, scale) * 0.5;
      break;
    }
    case Region::UpperHalf: {
      const cplx k = wave_number(energy, scale);
      value = -(c / k) * eigenfunction(EigenfunctionKind::Chi, lo, energy, scale) *
              eigenfunction(EigenfunctionKind::FPlus, hi, energy, scale);
      break;
    }
    case Region::LowerHalf: {
      const cplx k = wave_number(energy, scale);
      value = -(c / k) * eigenfunction(EigenfunctionKind::Chi, lo, energy, scale) *
              eigenfunction(EigenfunctionKind::FMinus, hi, energy, scale);
      break;
    }
    default:
      throw SpectralError(ErrorCode::OnRealAxis, "energy is on real axis");
  }
  return {value, region, ordering};
}

// ---------------------------------------------------------------------------
// Titchmarsh-Kodaira coefficients
// ---------------------------------------------------------------------------

enum class HalfPlane { Upper, Lower, NegReUpper, NegReLower };
enum class SigmaBasis { SigmaBasisPositive, SigmaBasisNegative };

struct ThetaMatrix {
  std::array<std::array<cplx, 2>, 2> entries{};
  HalfPlane half_plane{};
  SigmaBasis basis{};

  cplx operator()(int i, int j) const { return entries[i][j]; }
};

namespace detail {

template <class C>
C to_complex(cplx z) {
  return C(z.real(), z.imag());
}

/// Branch-cut square root in any complex type (see branch_sqrt).
template <class C>
C generic_branch_sqrt(C z) {
  if (imag(z) == 0) z = C(real(z), 0);
  return sqrt(z);
}

/// Theta entries computed in the complex type C, so the expansion can be
/// evaluated in extended precision.
template <class C>
std::array<std::array<C, 2>, 2> theta_entries(const ComplexEnergy& energy, const PhysicalScale& scale) {
  const C e = to_complex<C>(energy.value());
  const C c = to_complex<C>(scale.c());
  const C zero = to_complex<C>(0.0);
  if (energy.negative_side()) {
    const C a = c / (to_complex<C>(2.0) * generic_branch_sqrt(-c * e));
    return {{{zero, -a}, {zero, a}}};
  }
  const C a = c / generic_branch_sqrt(c * e);
  const C i = to_complex<C>(cplx(0.0, 1.0));
  const bool upper = energy.region() == Region::UpperHalf;
  return {{{upper ? -i * a : i * a, -a}, {zero, zero}}};
}

template <class C>
C sigma_basis_in(int i, double r, const ComplexEnergy& energy, const PhysicalScale& scale) {
  const C e = to_complex<C>(energy.value());
  const C c = to_complex<C>(scale.c());
  const C x = to_complex<C>(r);
  if (energy.negative_side()) {
    const C km = generic_branch_sqrt(-c * e);
    return i == 0 ? exp(km * x) : exp(-km * x);
  }
  const C k = generic_branch_sqrt(c * e);
  return i == 0 ? sin(k * x) : cos(k * x);
}

}  // namespace detail

/// Coefficients on the negative side in the basis sigma~1 = e^{k_- r},
/// sigma~2 = e^{-k_- r}; only the second column is nonzero.
inline ThetaMatrix theta_minus(const ComplexEnergy& energy, const PhysicalScale& scale) {
  if (!energy.negative_side()) {
    throw SpectralError(ErrorCode::WrongRegion, "theta_minus requires Re E < 0");
  }
  ThetaMatrix t;
  t.entries = detail::theta_entries<cplx>(energy, scale);
  t.half_plane = energy.value().imag() >= 0.0 ? HalfPlane::NegReUpper : HalfPlane::NegReLower;
  t.basis = SigmaBasis::SigmaBasisNegative;
  return t;
}

/// Coefficients on the positive side in the basis sigma1 = sin(kr),
/// sigma2 = cos(kr); the second row vanishes.
inline ThetaMatrix theta_plus(const ComplexEnergy& energy, const PhysicalScale& scale) {
  const Region region = energy.region();
  if (region != Region::UpperHalf && region != Region::LowerHalf) {
    throw SpectralError(ErrorCode::WrongRegion, "theta_plus requires Re E > 0, Im E != 0");
  }
  ThetaMatrix t;
  t.entries = detail::theta_entries<cplx>(energy, scale);
  t.half_plane = region == Region::UpperHalf ? HalfPlane::Upper : HalfPlane::Lower;
  t.basis = SigmaBasis::SigmaBasisPositive;
  return t;
}

inline ThetaMatrix theta_matrix(const ComplexEnergy& energy, const PhysicalScale& scale) {
  return energy.negative_side() ? theta_minus(energy, scale) : theta_plus(energy, scale);
}

/// sigma_i(r; E) of the basis matching the region of E (i = 0, 1).
inline cplx sigma_basis(int i, double r, const ComplexEnergy& energy, const PhysicalScale& scale) {
  if (energy.negative_side()) {
    return eigenfunction(i == 0 ? EigenfunctionKind::Sigma1Tilde : EigenfunctionKind::FTilde, r,
                         energy, scale);
  }
  return eigenfunction(i == 0 ? EigenfunctionKind::Chi : EigenfunctionKind::Sigma2Cos, r, energy,
                       scale);
}

/// sum_ij theta_ij(E) sigma_i(x; E) conj(sigma_j(y; conj E)) with
/// x = min(r, s), y = max(r, s). In both bases this reproduces the kernel
/// for x < y, so by symmetry it is comparable with green_eval(r, s) for
/// either ordering.
///
/// The terms grow like e^{|Im k| y} while their sum decays, so the sum is
/// formed in 113-bit arithmetic and rounded once at the end.
inline cplx green_from_theta(double r, double s, const ComplexEnergy& energy,
                             const PhysicalScale& scale) {
  using Wide = boost::multiprecision::cpp_complex_quad;
  detail::require_off_axis(energy);
  if (!energy.negative_side()) theta_plus(energy, scale);  // region check
  const auto theta = detail::theta_entries<Wide>(energy, scale);
  const double x = std::min(r, s);
  const double y = std::max(r, s);
  const ComplexEnergy conj_energy(std::conj(energy.value()));
  Wide sum = detail::to_complex<Wide>(0.0);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (theta[i][j] == 0) continue;
      sum += theta[i][j] * detail::sigma_basis_in<Wide>(i, x, energy, scale) *
             conj(detail::sigma_basis_in<Wide>(j, y, conj_energy, scale));
    }
  }
  return {static_cast<double>(real(sum)), static_cast<double>(imag(sum))};
}

// ---------------------------------------------------------------------------
// Resolvent action
// ---------------------------------------------------------------------------

/// g(r) = int_0^inf G0(r, s; E) f(s) ds, split at s = r where the kernel
/// has a kink.
template <class Scalar>
cplx resolvent_at(const BasicTestFunction<Scalar>& f, const ComplexEnergy& energy, double r,
                  const PhysicalScale& scale, const QuadratureSpec& quad) {
  detail::require_off_axis(energy);
  if (f.is_zero()) return {};
  auto integrand = [&](double s) -> cplx {
    if (s <= 0.0) return {};
    return green_eval(r, s, energy, scale).value * cplx(f(s));
  };
  const auto inner = integrate(integrand, 0.0, r, quad, 4);
  auto shifted = [&](double t) -> cplx { return integrand(r + t); };
  const auto outer = integrate_semi_infinite(shifted, quad);
  return inner.value + outer.value;
}

template <class Scalar>
std::vector<cplx> resolvent_apply(const BasicTestFunction<Scalar>& f, const ComplexEnergy& energy,
                                  const std::vector<double>& r_grid, const PhysicalScale& scale,
                                  const QuadratureSpec& quad = {}) {
  detail::require_off_axis(energy);
  std::vector<cplx> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    if (!(r > 0.0)) {
      throw SpectralError(ErrorCode::InvalidArgument, "resolvent grid points must be positive");
    }
    out.push_back(resolvent_at(f, energy, r, scale, quad));
  }
  return out;
}

}  // namespace freerhs
