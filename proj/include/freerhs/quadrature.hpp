#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "freerhs/error.hpp"

namespace freerhs {

struct QuadratureSpec {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  /// Integrand magnitude below which the tail of [0, inf) is dropped.
  double truncation_threshold = 1e-18;
  int max_subdivisions = 20000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(truncation_threshold > 0.0) ||
        max_subdivisions < 1) {
      throw SpectralError(ErrorCode::InvalidArgument, "invalid QuadratureSpec");
    }
  }
};

/// Tolerances for an integral whose integrand is itself computed by
/// quadrature with `inner`: the integrand carries noise at the inner
/// tolerance, so the outer request and the tail cut are loosened by two
/// orders (a tail probe cannot see below the integrand's noise).
inline QuadratureSpec outer_spec(const QuadratureSpec& inner) {
  QuadratureSpec out = inner;
  out.rel_tol = 100.0 * inner.rel_tol;
  out.abs_tol = 100.0 * inner.abs_tol;
  out.truncation_threshold = std::max(inner.truncation_threshold, out.abs_tol);
  return out;
}

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  int panels = 0;
  /// Upper end of the integrated range (the truncation point for [0, inf)).
  double cutoff = 0.0;
};

namespace detail {

inline std::string format_error(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", e);
  return buf;
}

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& x) { return std::abs(x); }

inline bool finite_value(double x) { return std::isfinite(x); }
inline bool finite_value(const std::complex<double>& x) {
  return std::isfinite(x.real()) && std::isfinite(x.imag());
}

// 15-point Kronrod nodes with the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  double roundoff;
};

template <class T>
struct PanelOrder {
  bool operator()(const Panel<T>& x, const Panel<T>& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

template <class F, class T>
Panel<T> kronrod_panel(const F& f, double a, double b, int& evaluations) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kronrod_w[7];
  T gauss = fc * gauss_w[3];
  double abs_sum = magnitude(fc) * kronrod_w[7];
  bool finite = finite_value(fc);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kronrod_x[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    finite = finite && finite_value(f1) && finite_value(f2);
    kronrod += (f1 + f2) * kronrod_w[j];
    abs_sum += (magnitude(f1) + magnitude(f2)) * kronrod_w[j];
    if (j % 2 == 1) gauss += (f1 + f2) * gauss_w[j / 2];
  }
  evaluations += 15;
  if (!finite) {
    throw SpectralError(ErrorCode::NonFiniteIntegrand,
                        "integrand is not finite on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
  }
  kronrod *= half;
  gauss *= half;
  const double roundoff = 200.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::abs(half);
  const double error = std::max(magnitude(kronrod - gauss), roundoff);
  return {a, b, kronrod, error, roundoff};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration over the segments
/// delimited by `points` (sorted, at least two entries). Each initial
/// segment is further cut into `pieces_per_segment` equal panels.
template <class F>
auto integrate_panels(const F& f, const std::vector<double>& points, const QuadratureSpec& spec,
                      int pieces_per_segment = 1) {
  using T = std::decay_t<decltype(f(0.0))>;
  spec.validate();
  QuadratureResult<T> result;
  if (points.size() < 2) return result;

  std::vector<detail::Panel<T>> queue;  // max-heap on error
  const detail::PanelOrder<T> order;
  std::vector<detail::Panel<T>> finished;
  T total{};
  double total_error = 0.0;
  double total_roundoff = 0.0;
  for (std::size_t s = 0; s + 1 < points.size(); ++s) {
    const double a = points[s];
    const double b = points[s + 1];
    if (!(b > a)) continue;
    for (int p = 0; p < pieces_per_segment; ++p) {
      const double lo = a + (b - a) * p / pieces_per_segment;
      const double hi = p + 1 == pieces_per_segment ? b : a + (b - a) * (p + 1) / pieces_per_segment;
      auto panel = detail::kronrod_panel<F, T>(f, lo, hi, result.evaluations);
      total += panel.value;
      total_error += panel.error;
      total_roundoff += panel.roundoff;
      queue.push_back(panel);
    }
  }
  std::make_heap(queue.begin(), queue.end(), order);

  // Accuracy below the accumulated rounding floor cannot be requested.
  auto target = [&] {
    return std::max({spec.abs_tol, spec.rel_tol * detail::magnitude(total), 1.0001 * total_roundoff});
  };
  int panels = static_cast<int>(queue.size());
  // The running totals drift as large panels are replaced by small ones,
  // so they are recomputed before convergence is accepted.
  auto resync = [&] {
    total = T{};
    total_error = 0.0;
    total_roundoff = 0.0;
    for (const auto* group : {&queue, &finished}) {
      for (const auto& p : *group) {
        total += p.value;
        total_error += p.error;
        total_roundoff += p.roundoff;
      }
    }
  };
  while (!queue.empty()) {
    if (total_error <= target()) {
      resync();
      if (total_error <= target()) break;
    }
    if (panels >= spec.max_subdivisions) {
      throw ToleranceError("adaptive quadrature exhausted its panel budget (achieved error " +
                               detail::format_error(total_error) + ")",
                           total_error);
    }
    std::pop_heap(queue.begin(), queue.end(), order);
    auto worst = queue.back();
    queue.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    // A panel whose estimate sits at its rounding floor cannot improve.
    if (worst.error <= worst.roundoff || !(mid > worst.a && mid < worst.b) ||
        worst.b - worst.a < 1e3 * std::numeric_limits<double>::epsilon() *
                                std::max(std::abs(worst.a), std::abs(worst.b))) {
      finished.push_back(worst);
      if (queue.empty()) break;
      continue;
    }
    auto left = detail::kronrod_panel<F, T>(f, worst.a, mid, result.evaluations);
    auto right = detail::kronrod_panel<F, T>(f, mid, worst.b, result.evaluations);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    total_roundoff += left.roundoff + right.roundoff - worst.roundoff;
    queue.push_back(left);
    std::push_heap(queue.begin(), queue.end(), order);
    queue.push_back(right);
    std::push_heap(queue.begin(), queue.end(), order);
    ++panels;
  }

  finished.insert(finished.end(), queue.begin(), queue.end());
  std::sort(finished.begin(), finished.end(),
            [](const auto& x, const auto& y) { return x.a < y.a; });
  T sum{};
  double err = 0.0;
  double floor = 0.0;
  for (const auto& p : finished) {
    sum += p.value;
    err += p.error;
    floor += p.roundoff;
  }
  result.value = sum;
  result.error = err;
  result.panels = static_cast<int>(finished.size());
  result.cutoff = points.back();
  if (err > std::max({spec.abs_tol, spec.rel_tol * detail::magnitude(sum), 1.0001 * floor}) * (1.0 + 1e-9)) {
    throw ToleranceError("adaptive quadrature could not resolve the integrand (achieved error " +
                             detail::format_error(err) + ")",
                         err);
  }
  return result;
}

template <class F>
auto integrate(const F& f, double a, double b, const QuadratureSpec& spec,
               int pieces = 1) {
  return integrate_panels(f, std::vector<double>{a, b}, spec, pieces);
}

/// Finds R such that |f| stays below the truncation threshold on a probe
/// of [R, 2R]. The probe starts at `start` and doubles.
template <class F>
double find_truncation_point(const F& f, const QuadratureSpec& spec, double start = 1.0,
                             double limit = 1e6) {
  static constexpr std::array<double, 7> probe = {1.0, 1.093, 1.271, 1.414, 1.618, 1.847, 2.0};
  for (double r = std::max(start, 1e-3); r <= limit; r *= 2.0) {
    bool small = true;
    for (double t : probe) {
      const auto v = f(r * t);
      if (!detail::finite_value(v)) {
        throw SpectralError(ErrorCode::NonFiniteIntegrand, "integrand is not finite in the tail");
      }
      if (detail::magnitude(v) >= spec.truncation_threshold) {
        small = false;
        break;
      }
    }
    if (small) return r;
  }
  throw ToleranceError("integrand does not decay below the truncation threshold", spec.truncation_threshold);
}

/// Integral over [0, inf): the tail beyond the probed truncation point is
/// dropped and [0, R] is integrated adaptively. `breakpoints` (interior
/// points where f has kinks or jumps) become panel boundaries; the probe
/// starts beyond the last one.
template <class F>
auto integrate_semi_infinite(const F& f, const QuadratureSpec& spec,
                             std::vector<double> breakpoints = {}) {
  spec.validate();
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::remove_if(breakpoints.begin(), breakpoints.end(),
                                   [](double x) { return !(x > 0.0) || !std::isfinite(x); }),
                    breakpoints.end());
  const double start = breakpoints.empty() ? 1.0 : std::max(1.0, breakpoints.back());
  const double cutoff = find_truncation_point(f, spec, start);
  std::vector<double> points{0.0};
  for (double x : breakpoints) {
    if (x < cutoff && x > points.back()) points.push_back(x);
  }
  points.push_back(cutoff);
  const int pieces = static_cast<int>(std::clamp(std::ceil(cutoff / static_cast<double>(points.size() - 1)), 2.0, 64.0));
  auto result = integrate_panels(f, points, spec, pieces);
  result.error += spec.truncation_threshold;
  result.cutoff = cutoff;
  return result;
}

// ---------------------------------------------------------------------------
// Limits along a geometric sequence
// ---------------------------------------------------------------------------

struct LimitSpec {
  double start = 0.1;
  double ratio = 0.5;
  int max_steps = 16;
  int extrapolation_order = 6;
  /// The error is assumed to expand in powers eps^(m * exponent_step).
  double exponent_step = 1.0;
  double tolerance = 1e-12;

  void validate() const {
    if (!(start > 0.0) || !(ratio > 0.0 && ratio < 1.0) || max_steps < 2 ||
        extrapolation_order < 0 || !(exponent_step > 0.0) || !(tolerance > 0.0)) {
      throw SpectralError(ErrorCode::InvalidArgument, "invalid LimitSpec");
    }
  }
};

template <class T>
struct LimitResult {
  T value{};
  double error = 0.0;
  int steps = 0;
};

/// Richardson extrapolation of g(eps) to eps -> 0 along eps_j = start*ratio^j.
template <class G>
auto limit_extrapolate(const G& g, const LimitSpec& spec) {
  using T = std::decay_t<decltype(g(1.0))>;
  spec.validate();
  std::vector<std::vector<T>> table;
  std::vector<double> raw;
  std::vector<double> errors;
  LimitResult<T> best;
  best.error = std::numeric_limits<double>::infinity();
  double eps = spec.start;
  for (int j = 0; j < spec.max_steps; ++j, eps *= spec.ratio) {
    const T value = g(eps);
    if (!detail::finite_value(value)) {
      throw SpectralError(ErrorCode::LimitDiverges, "g(eps) is not finite");
    }
    raw.push_back(detail::magnitude(value));
    std::vector<T> row{value};
    const int order = std::min(j, spec.extrapolation_order);
    for (int m = 1; m <= order; ++m) {
      const double factor = std::pow(spec.ratio, -m * spec.exponent_step) - 1.0;
      row.push_back(row[m - 1] + (row[m - 1] - table[j - 1][m - 1]) / factor);
    }
    table.push_back(row);
    if (j == 0) continue;
    const T estimate = row.back();
    const T previous = table[j - 1].back();
    const double err = detail::magnitude(estimate - previous);
    errors.push_back(err);
    if (err < best.error) {
      best.value = estimate;
      best.error = err;
      best.steps = j + 1;
    }
    if (err <= spec.tolerance * std::max(1.0, detail::magnitude(estimate))) {
      best.value = estimate;
      best.error = err;
      best.steps = j + 1;
      return best;
    }
    const std::size_t n = errors.size();
    if (n >= 4) {
      bool growing = true;
      for (std::size_t q = n - 3; q < n; ++q) {
        growing = growing && errors[q] > 1.05 * errors[q - 1] && raw[q + 1] > 1.05 * raw[q];
      }
      if (growing) {
        throw SpectralError(ErrorCode::LimitDiverges,
                            "successive extrapolants grow without bound");
      }
    }
  }
  throw SpectralError(ErrorCode::NoConvergence,
                      "limit did not settle within max_steps (best error " +
                          detail::format_error(best.error) + ")");
}

}  // namespace freerhs
