#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/barycentric_rational.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "freerhs/core_model.hpp"
#include "freerhs/error.hpp"
#include "freerhs/green.hpp"
#include "freerhs/quadrature.hpp"
#include "freerhs/spectral_measure.hpp"
#include "freerhs/test_function.hpp"

namespace freerhs {

/// sigma(r; E) = sqrt(rho(E)) sin(sqrt(cE) r), the delta-normalized
/// regular solution.
inline double sigma_eval(double r, double energy, const PhysicalScale& scale) {
  if (!(energy > 0.0)) {
    throw SpectralError(ErrorCode::NonPositiveEnergy, "sigma requires E > 0");
  }
  return std::sqrt(rho_density(energy, scale)) * std::sin(std::sqrt(scale.c() * energy) * r);
}

// ---------------------------------------------------------------------------
// Energy grids
// ---------------------------------------------------------------------------

enum class GridMapping { LinearInE, LinearInK, GaussInK };

inline const char* to_string(GridMapping m) {
  switch (m) {
    case GridMapping::LinearInE: return "LinearInE";
    case GridMapping::LinearInK: return "LinearInK";
    case GridMapping::GaussInK: return "GaussInK";
  }
  return "Unknown";
}

/// Nodes are energies. GaussInK grids also carry dE-weights of a composite
/// Gauss-Legendre rule in k = sqrt(cE), so they double as a quadrature rule.
struct EnergyGrid {
  std::vector<double> nodes;
  GridMapping mapping = GridMapping::LinearInK;
  std::vector<double> weights;

  void validate() const {
    if (nodes.size() < 2) throw SpectralError(ErrorCode::InvalidArgument, "energy grid needs >= 2 nodes");
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (!(nodes[j] > 0.0) || (j > 0 && !(nodes[j] > nodes[j - 1]))) {
        throw SpectralError(ErrorCode::InvalidArgument,
                            "energy grid nodes must be positive and strictly increasing");
      }
    }
  }

  static EnergyGrid linear_in_k(double k_min, double k_max, std::size_t n, const PhysicalScale& scale) {
    EnergyGrid g;
    g.mapping = GridMapping::LinearInK;
    for (std::size_t j = 0; j < n; ++j) {
      const double k = n == 1 ? k_min : k_min + (k_max - k_min) * static_cast<double>(j) / static_cast<double>(n - 1);
      g.nodes.push_back(k * k / scale.c());
    }
    g.validate();
    return g;
  }

  static EnergyGrid linear_in_e(double e_min, double e_max, std::size_t n) {
    EnergyGrid g;
    g.mapping = GridMapping::LinearInE;
    for (std::size_t j = 0; j < n; ++j) {
      g.nodes.push_back(n == 1 ? e_min : e_min + (e_max - e_min) * static_cast<double>(j) / static_cast<double>(n - 1));
    }
    g.validate();
    return g;
  }

  /// Composite 20-point Gauss-Legendre rule on k in [0, k_max] with panels no
  /// wider than `panel_width`; energies in `breakpoints` become panel edges.
  static EnergyGrid gauss_in_k(double k_max, const PhysicalScale& scale, double panel_width = 0.1,
                               std::vector<double> breakpoints = {}) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> edges{0.0};
    std::vector<double> ks;
    for (double e : breakpoints) {
      if (e > 0.0) ks.push_back(std::sqrt(scale.c() * e));
    }
    std::sort(ks.begin(), ks.end());
    for (double k : ks) {
      if (k < k_max && k > edges.back()) edges.push_back(k);
    }
    edges.push_back(k_max);
    EnergyGrid g;
    g.mapping = GridMapping::GaussInK;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
      const double len = edges[s + 1] - edges[s];
      const int panels = std::max(1, static_cast<int>(std::ceil(len / panel_width)));
      for (int p = 0; p < panels; ++p) {
        const double a = edges[s] + len * p / panels;
        const double b = edges[s] + len * (p + 1) / panels;
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t q = 0; q < x.size(); ++q) {
          pts.emplace_back(-x[q], w[q]);
          if (x[q] != 0.0) pts.emplace_back(x[q], w[q]);
        }
        std::sort(pts.begin(), pts.end());
        for (auto [xi, wi] : pts) {
          const double k = mid + half * xi;
          g.nodes.push_back(k * k / scale.c());
          g.weights.push_back(half * wi * 2.0 * k / scale.c());
        }
      }
    }
    g.validate();
    return g;
  }
};

// ---------------------------------------------------------------------------
// Energy-representation functions
// ---------------------------------------------------------------------------

/// A function of E on (0, inf): either a closed-form handle or samples on an
/// EnergyGrid. Sampled functions are interpolated in k by a barycentric
/// rational interpolant of sqrt(k) f (for images of the family this is the
/// rho-normalized transform, smooth and odd in k, whereas f itself behaves
/// like sqrt(k) at threshold); outside the sampled range they are zero.
class EnergyFunction {
 public:
  using Handle = std::function<cplx(double)>;

  static EnergyFunction closed_form(Handle f, std::vector<double> breakpoints = {}) {
    EnergyFunction out;
    out.handle_ = std::move(f);
    out.breakpoints_ = std::move(breakpoints);
    return out;
  }

  static EnergyFunction sampled(EnergyGrid grid, std::vector<cplx> values, const PhysicalScale& scale) {
    grid.validate();
    if (values.size() != grid.nodes.size()) {
      throw SpectralError(ErrorCode::InvalidArgument, "sample count does not match grid");
    }
    EnergyFunction out;
    out.grid_ = std::move(grid);
    out.values_ = std::move(values);
    out.c_ = scale.c();
    return out;
  }

  bool is_sampled() const noexcept { return grid_.has_value(); }
  const EnergyGrid& grid() const { return *grid_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

  cplx operator()(double energy) const {
    if (handle_) return handle_(energy);
    return interpolate(energy);
  }

 private:
  cplx interpolate(double energy) const {
    const auto& nodes = grid_->nodes;
    if (energy < nodes.front() || energy > nodes.back()) return {};
    if (!interp_re_) build_interpolants();
    const double k = std::sqrt(c_ * energy);
    return cplx((*interp_re_)(k), (*interp_im_)(k)) / std::sqrt(k);
  }

  void build_interpolants() const {
    std::vector<double> ks, re, im;
    for (std::size_t j = 0; j < grid_->nodes.size(); ++j) {
      const double k = std::sqrt(c_ * grid_->nodes[j]);
      ks.push_back(k);
      re.push_back(values_[j].real() * std::sqrt(k));
      im.push_back(values_[j].imag() * std::sqrt(k));
    }
    const std::size_t order = std::min<std::size_t>(3, ks.size() - 1);
    auto ks2 = ks;
    interp_re_ = std::make_shared<boost::math::barycentric_rational<double>>(ks.begin(), ks.end(), re.begin(), order);
    interp_im_ = std::make_shared<boost::math::barycentric_rational<double>>(ks2.begin(), ks2.end(), im.begin(), order);
  }

  Handle handle_;
  std::vector<double> breakpoints_;
  std::optional<EnergyGrid> grid_;
  std::vector<cplx> values_;
  double c_ = 1.0;
  mutable std::shared_ptr<boost::math::barycentric_rational<double>> interp_re_;
  mutable std::shared_ptr<boost::math::barycentric_rational<double>> interp_im_;
};

// ---------------------------------------------------------------------------
// Forward transforms
// ---------------------------------------------------------------------------

/// U0 phi at one energy: int_0^inf phi(r) sigma(r; E) dr (sigma is real).
template <class Scalar>
cplx forward_transform_at(const BasicTestFunction<Scalar>& phi, double energy,
                          const QuadratureSpec& quad, const PhysicalScale& scale) {
  if (!(energy > 0.0)) throw SpectralError(ErrorCode::NonPositiveEnergy, "transform requires E > 0");
  if (phi.is_zero()) return {};
  const double k = std::sqrt(scale.c() * energy);
  const double amplitude = std::sqrt(rho_density(energy, scale));
  auto f = [&](double r) { return cplx(phi(r)) * std::sin(k * r); };
  return amplitude * integrate_semi_infinite(f, quad).value;
}

/// rho-normalized transform: int_0^inf phi(r) chi(r; E) dr.
template <class Scalar>
cplx forward_transform_rho_at(const BasicTestFunction<Scalar>& phi, double energy,
                              const QuadratureSpec& quad, const PhysicalScale& scale) {
  if (!(energy > 0.0)) throw SpectralError(ErrorCode::NonPositiveEnergy, "transform requires E > 0");
  if (phi.is_zero()) return {};
  const double k = std::sqrt(scale.c() * energy);
  auto f = [&](double r) { return cplx(phi(r)) * std::sin(k * r); };
  return integrate_semi_infinite(f, quad).value;
}

template <class Scalar>
EnergyFunction forward_transform(const BasicTestFunction<Scalar>& phi, const EnergyGrid& grid,
                                 const QuadratureSpec& quad, const PhysicalScale& scale) {
  grid.validate();
  std::vector<cplx> values;
  values.reserve(grid.nodes.size());
  for (double e : grid.nodes) values.push_back(forward_transform_at(phi, e, quad, scale));
  return EnergyFunction::sampled(grid, std::move(values), scale);
}

template <class Scalar>
EnergyFunction forward_transform_rho(const BasicTestFunction<Scalar>& phi, const EnergyGrid& grid,
                                     const QuadratureSpec& quad, const PhysicalScale& scale) {
  grid.validate();
  std::vector<cplx> values;
  values.reserve(grid.nodes.size());
  for (double e : grid.nodes) values.push_back(forward_transform_rho_at(phi, e, quad, scale));
  return EnergyFunction::sampled(grid, std::move(values), scale);
}

/// U0 phi as a closed-form handle evaluated on demand by quadrature.
template <class Scalar>
EnergyFunction energy_image(const BasicTestFunction<Scalar>& phi, const QuadratureSpec& quad,
                            const PhysicalScale& scale) {
  return EnergyFunction::closed_form(
      [phi, quad, scale](double e) { return forward_transform_at(phi, e, quad, scale); });
}

// ---------------------------------------------------------------------------
// Inverse transform
// ---------------------------------------------------------------------------

namespace detail {

inline void check_endpoint(const EnergyFunction& f_hat) {
  const double tiny = std::abs(f_hat(1e-10));
  const double small = std::abs(f_hat(1e-8));
  if (tiny > 1e-3 && tiny > 2.0 * small) {
    throw SpectralError(ErrorCode::SingularEndpoint,
                        "energy function grows as E -> 0+; the inverse transform is not defined");
  }
}

}  // namespace detail

/// f(r) = int_0^inf f_hat(E) sigma(r; E) dE, integrated in k = sqrt(cE).
inline cplx inverse_transform_at(const EnergyFunction& f_hat, double r, const QuadratureSpec& quad,
                                 const PhysicalScale& scale) {
  const double c = scale.c();
  auto integrand = [&](double k) -> cplx {
    if (k <= 0.0) return {};
    const double e = k * k / c;
    return f_hat(e) * sigma_eval(r, e, scale) * (2.0 * k / c);
  };
  if (f_hat.is_sampled()) {
    const auto& grid = f_hat.grid();
    if (grid.mapping == GridMapping::GaussInK) {
      cplx sum{};
      for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
        sum += grid.weights[j] * f_hat.values()[j] * sigma_eval(r, grid.nodes[j], scale);
      }
      return sum;
    }
    const double k_lo = std::sqrt(c * grid.nodes.front());
    const double k_hi = std::sqrt(c * grid.nodes.back());
    const int pieces = static_cast<int>(std::clamp(std::ceil(k_hi - k_lo), 1.0, 64.0));
    return integrate(integrand, k_lo, k_hi, outer_spec(quad), pieces).value;
  }
  std::vector<double> kbreaks;
  for (double e : f_hat.breakpoints()) {
    if (e > 0.0) kbreaks.push_back(std::sqrt(c * e));
  }
  return integrate_semi_infinite(integrand, outer_spec(quad), kbreaks).value;
}

inline std::vector<cplx> inverse_transform(const EnergyFunction& f_hat, const std::vector<double>& r_grid,
                                           const QuadratureSpec& quad, const PhysicalScale& scale) {
  if (!f_hat.is_sampled()) detail::check_endpoint(f_hat);
  std::vector<cplx> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    if (r < 0.0) throw SpectralError(ErrorCode::InvalidArgument, "r must be nonnegative");
    out.push_back(inverse_transform_at(f_hat, r, quad, scale));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Functional calculus
// ---------------------------------------------------------------------------

/// A function of energy together with the energies where it jumps or kinks.
struct BorelSymbol {
  std::function<cplx(double)> g;
  std::vector<double> breakpoints;

  cplx operator()(double e) const { return g(e); }

  static BorelSymbol constant(cplx value) {
    return {[value](double) { return value; }, {}};
  }
  static BorelSymbol indicator(double e1, double e2) {
    return {[e1, e2](double e) { return e >= e1 && e <= e2 ? cplx(1.0) : cplx(0.0); }, {e1, e2}};
  }
  static BorelSymbol power(int n) {
    return {[n](double e) { return cplx(std::pow(e, n)); }, {}};
  }
  /// exp(-i E t / hbar)
  static BorelSymbol phase(double t, const PhysicalScale& scale) {
    const double hbar = scale.hbar();
    return {[t, hbar](double e) { return std::exp(cplx(0.0, -e * t / hbar)); }, {}};
  }
  static BorelSymbol product(const BorelSymbol& a, const BorelSymbol& b) {
    auto bp = a.breakpoints;
    bp.insert(bp.end(), b.breakpoints.begin(), b.breakpoints.end());
    return {[ga = a.g, gb = b.g](double e) { return ga(e) * gb(e); }, bp};
  }
};

struct CalculusOptions {
  /// Largest admissible |G| on the probe grid.
  double symbol_bound = 1e6;
  double probe_k_max = 12.0;
  std::size_t probe_nodes = 256;
};

inline void check_symbol_bound(const BorelSymbol& g, const CalculusOptions& options,
                               const PhysicalScale& scale) {
  const auto probe = EnergyGrid::linear_in_k(1e-3, options.probe_k_max, options.probe_nodes, scale);
  for (double e : probe.nodes) {
    if (!(std::abs(g(e)) <= options.symbol_bound)) {
      throw SpectralError(ErrorCode::UnboundedSymbol,
                          "|G(E)| exceeds the configured bound at E = " + std::to_string(e));
    }
  }
}

/// G(H0) phi = U0^{-1} [G U0 phi] sampled on r_grid.
template <class Scalar>
std::vector<cplx> apply_borel_function(const BorelSymbol& g, const BasicTestFunction<Scalar>& phi,
                                       const std::vector<double>& r_grid, const QuadratureSpec& quad,
                                       const PhysicalScale& scale, const CalculusOptions& options = {}) {
  check_symbol_bound(g, options, scale);
  const auto image = energy_image(phi, quad, scale);
  const auto product = EnergyFunction::closed_form(
      [image, g](double e) { return g(e) == cplx{} ? cplx{} : g(e) * image(e); }, g.breakpoints);
  return inverse_transform(product, r_grid, quad, scale);
}

// ---------------------------------------------------------------------------
// Precomputed energy representation
// ---------------------------------------------------------------------------

/// U0 phi tabulated on a Gauss-in-k rule truncated at k_max. Evaluating
/// U0^{-1}[G U0 phi] at many r then costs one weighted sum per point.
class EnergyRepresentation {
 public:
  template <class Scalar>
  EnergyRepresentation(const BasicTestFunction<Scalar>& phi, double k_max, const QuadratureSpec& quad,
                       const PhysicalScale& scale, std::vector<double> breakpoints = {},
                       double panel_width = 0.1)
      : scale_(scale),
        grid_(EnergyGrid::gauss_in_k(k_max, scale, panel_width, std::move(breakpoints))),
        k_max_(k_max) {
    values_.reserve(grid_.nodes.size());
    for (double e : grid_.nodes) values_.push_back(forward_transform_at(phi, e, quad, scale));
    auto tail = [&](double t) -> double {
      const double k = k_max + t;
      const double e = k * k / scale.c();
      return std::norm(forward_transform_at(phi, e, quad, scale)) * 2.0 * k / scale.c();
    };
    truncated_mass_ = integrate_semi_infinite(tail, outer_spec(quad)).value;
  }

  const EnergyGrid& grid() const noexcept { return grid_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  double k_max() const noexcept { return k_max_; }

  /// int_{k > k_max} |U0 phi|^2 dE, the mass dropped by the truncation.
  double truncated_mass() const noexcept { return truncated_mass_; }

  EnergyFunction as_function() const { return EnergyFunction::sampled(grid_, values_, scale_); }

  /// (U0^{-1} [G U0 phi])(r)
  cplx apply(const BorelSymbol& g, double r) const {
    cplx sum{};
    for (std::size_t j = 0; j < grid_.nodes.size(); ++j) {
      const double e = grid_.nodes[j];
      sum += grid_.weights[j] * g(e) * values_[j] * sigma_eval(r, e, scale_);
    }
    return sum;
  }

  cplx reconstruct(double r) const {
    cplx sum{};
    for (std::size_t j = 0; j < grid_.nodes.size(); ++j) {
      sum += grid_.weights[j] * values_[j] * sigma_eval(r, grid_.nodes[j], scale_);
    }
    return sum;
  }

  /// int |G|^2 |U0 phi|^2 dE over the tabulated range.
  double energy_norm_squared(const BorelSymbol& g = BorelSymbol::constant(1.0)) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < grid_.nodes.size(); ++j) {
      sum += grid_.weights[j] * std::norm(g(grid_.nodes[j]) * values_[j]);
    }
    return sum;
  }

 private:
  PhysicalScale scale_;
  EnergyGrid grid_;
  std::vector<cplx> values_;
  double k_max_;
  double truncated_mass_ = 0.0;
};

// ---------------------------------------------------------------------------
// Position-side rule for sampled functions
// ---------------------------------------------------------------------------

/// Composite 20-point Gauss-Legendre rule on [0, r_max].
struct PositionRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static PositionRule on(double r_max, double panel_width = 0.25) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    PositionRule out;
    const int panels = std::max(1, static_cast<int>(std::ceil(r_max / panel_width)));
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    for (int p = 0; p < panels; ++p) {
      const double a = r_max * p / panels;
      const double b = r_max * (p + 1) / panels;
      const double mid = 0.5 * (a + b);
      const double half = 0.5 * (b - a);
      for (std::size_t q = 0; q < x.size(); ++q) {
        out.nodes.push_back(mid - half * x[q]);
        out.weights.push_back(half * w[q]);
        if (x[q] != 0.0) {
          out.nodes.push_back(mid + half * x[q]);
          out.weights.push_back(half * w[q]);
        }
      }
    }
    return out;
  }

  /// sum_j w_j conj(a_j) b_j
  cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) const {
    cplx sum{};
    for (std::size_t j = 0; j < nodes.size(); ++j) sum += weights[j] * std::conj(a[j]) * b[j];
    return sum;
  }
};

/// U0 of a function known only by its samples at the nodes of `rule`.
inline std::vector<cplx> forward_transform_samples(const PositionRule& rule, const std::vector<cplx>& samples,
                                                   const std::vector<double>& energies,
                                                   const PhysicalScale& scale) {
  if (samples.size() != rule.nodes.size()) {
    throw SpectralError(ErrorCode::InvalidArgument, "one sample per rule node is required");
  }
  std::vector<cplx> out;
  out.reserve(energies.size());
  for (double e : energies) {
    cplx sum{};
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      sum += rule.weights[j] * samples[j] * sigma_eval(rule.nodes[j], e, scale);
    }
    out.push_back(sum);
  }
  return out;
}

/// U0[(z - H0)^{-1} f] at the given energies. The resolvent output is
/// tabulated on a position rule reaching far enough for its exponential
/// tail (rate Im k, or Re k_- on the negative side) to drop below 1e-16.
template <class Scalar>
std::vector<cplx> resolvent_energy_image(const BasicTestFunction<Scalar>& f, const ComplexEnergy& z,
                                         const std::vector<double>& energies, const QuadratureSpec& quad,
                                         const PhysicalScale& scale) {
  detail::require_off_axis(z);
  if (f.is_zero()) return std::vector<cplx>(energies.size());
  double rate = 0.0;
  if (z.negative_side()) {
    rate = decay_constant(z, scale).real();
  } else {
    rate = std::abs(wave_number(z, scale).imag());
  }
  const double support = find_truncation_point([&](double r) { return std::abs(f(r)); }, quad);
  const double r_max = support + 37.0 / rate;
  const PositionRule rule = PositionRule::on(r_max);
  const auto g = resolvent_apply(f, z, rule.nodes, scale, quad);
  return forward_transform_samples(rule, g, energies, scale);
}

// ---------------------------------------------------------------------------
// Time evolution
// ---------------------------------------------------------------------------

struct PropagationOptions {
  double k_max = 12.0;
  double panel_width = 0.1;
};

struct PropagationResult {
  std::vector<cplx> values;
  /// int_{k > k_max} |U0 phi|^2 dE, dropped by the cutoff.
  double truncated_mass = 0.0;
  /// Set when the phase at the cutoff turns faster than the k-rule resolves.
  bool under_resolved = false;
  std::string warning;
};

/// psi(r, t) = int_0^inf exp(-i E t / hbar) (U0 phi)(E) sigma(r; E) dE,
/// truncated at k_max.
inline PropagationResult propagate(const EnergyRepresentation& rep, double t,
                                   const std::vector<double>& r_grid, const PhysicalScale& scale,
                                   double panel_width = 0.1) {
  PropagationResult out;
  const auto phase = BorelSymbol::phase(t, scale);
  out.values.reserve(r_grid.size());
  for (double r : r_grid) out.values.push_back(rep.apply(phase, r));
  out.truncated_mass = rep.truncated_mass();
  // d(E t / hbar)/dk at the cutoff against the spacing of 20 nodes per panel
  const double rate = 2.0 * rep.k_max() * std::abs(t) / (scale.c() * scale.hbar());
  const double period = rate > 0.0 ? 2.0 * pi / rate : std::numeric_limits<double>::infinity();
  if (period < 2.0 * panel_width / 20.0) {
    out.under_resolved = true;
    out.warning = "phase period at the energy cutoff is below the grid resolution";
  }
  return out;
}

template <class Scalar>
PropagationResult propagate(const BasicTestFunction<Scalar>& phi, double t, const std::vector<double>& r_grid,
                            const QuadratureSpec& quad, const PhysicalScale& scale,
                            const PropagationOptions& options = {}) {
  const EnergyRepresentation rep(phi, options.k_max, quad, scale, {}, options.panel_width);
  return propagate(rep, t, r_grid, scale, options.panel_width);
}

}  // namespace freerhs
