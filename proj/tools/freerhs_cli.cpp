#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freerhs/freerhs.hpp"

namespace {

using freerhs::cplx;
using freerhs::ErrorCode;
using freerhs::SpectralError;
using json = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_domain = 3;

struct RunConfig {
  double hbar = 1.0;
  double mass = 0.5;
  std::optional<double> scale_c;
  freerhs::QuadratureSpec quad;
  freerhs::LimitSpec limit;
  double grid_k_max = 12.0;
  std::size_t grid_n = 256;
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 42;
  bool parallel = false;

  freerhs::PhysicalScale scale() const {
    return scale_c ? freerhs::PhysicalScale::from_c(*scale_c) : freerhs::PhysicalScale(hbar, mass);
  }

  json echo(const std::string& command) const {
    const auto s = scale();
    json j;
    j["command"] = command;
    j["scale"] = {{"hbar", s.hbar()}, {"mass", s.mass()}, {"c", s.c()}};
    j["quad"] = {{"rel_tol", quad.rel_tol},
                 {"abs_tol", quad.abs_tol},
                 {"truncation_threshold", quad.truncation_threshold},
                 {"max_subdivisions", quad.max_subdivisions}};
    j["limit"] = {{"start", limit.start},
                  {"ratio", limit.ratio},
                  {"max_steps", limit.max_steps},
                  {"extrapolation_order", limit.extrapolation_order},
                  {"tolerance", limit.tolerance}};
    j["grid"] = {{"mapping", "LinearInK"}, {"k_max", grid_k_max}, {"n", grid_n}};
    j["format"] = format;
    j["out"] = out.empty() ? json(nullptr) : json(out);
    j["seed"] = seed;
    return j;
  }
};

// ---------------------------------------------------------------------------
// Complex literals: a, bi, a+bi, a-bi
// ---------------------------------------------------------------------------

cplx parse_complex(const std::string& text) {
  static const std::string real = R"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
  static const std::regex pure_real("^([+-]?" + real + ")$");
  static const std::regex pure_imag("^([+-]?)(" + real + ")?i$");
  static const std::regex full("^([+-]?" + real + ")([+-])(" + real + ")?i$");
  std::smatch m;
  auto num = [](const std::string& s) { return std::stod(s); };
  if (std::regex_match(text, m, pure_real)) return {num(m[1]), 0.0};
  if (std::regex_match(text, m, pure_imag)) {
    const double b = m[2].matched ? num(m[2]) : 1.0;
    return {0.0, m[1] == "-" ? -b : b};
  }
  if (std::regex_match(text, m, full)) {
    const double b = m[3].matched ? num(m[3]) : 1.0;
    return {num(m[1]), m[2] == "-" ? -b : b};
  }
  throw SpectralError(ErrorCode::InvalidArgument,
                      "cannot parse complex literal '" + text + "' (expected a, bi, a+bi or a-bi)");
}

// ---------------------------------------------------------------------------
// Tabular output
// ---------------------------------------------------------------------------

using Value = std::variant<long long, double, cplx, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  json meta = json::object();
};

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json to_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, cplx>) {
          return json{{"re", x.real()}, {"im", x.imag()}};
        } else {
          return json(x);
        }
      },
      v);
}

std::string render(const Table& t, const RunConfig& cfg, const std::string& command) {
  std::ostringstream out;
  if (cfg.format == "json") {
    json j;
    j["config"] = cfg.echo(command);
    if (!t.meta.empty()) j["meta"] = t.meta;
    json rows = json::array();
    for (const auto& row : t.rows) {
      json r;
      for (std::size_t c = 0; c < t.columns.size(); ++c) r[t.columns[c]] = to_json(row[c]);
      rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << '\n';
    return out.str();
  }
  // a complex column expands into <name>_re,<name>_im
  std::vector<std::string> header;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    const bool complex_column = !t.rows.empty() && std::holds_alternative<cplx>(t.rows.front()[c]);
    if (complex_column) {
      header.push_back(t.columns[c] + "_re");
      header.push_back(t.columns[c] + "_im");
    } else {
      header.push_back(t.columns[c]);
    }
  }
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << csv_field(header[c]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, cplx>) {
              out << format_double(x.real()) << ',' << format_double(x.imag());
            } else if constexpr (std::is_same_v<T, double>) {
              out << format_double(x);
            } else if constexpr (std::is_same_v<T, long long>) {
              out << x;
            } else {
              out << csv_field(x);
            }
          },
          row[c]);
    }
    out << '\n';
  }
  return out.str();
}

void emit(const std::string& text, const RunConfig& cfg) {
  if (cfg.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw SpectralError(ErrorCode::InvalidArgument, "cannot open output file '" + cfg.out + "'");
  file << text;
}

// ---------------------------------------------------------------------------
// Abscissae
// ---------------------------------------------------------------------------

std::vector<double> energy_abscissae(const std::vector<double>& at, const RunConfig& cfg) {
  if (!at.empty()) return at;
  return freerhs::EnergyGrid::linear_in_k(1e-3, cfg.grid_k_max, cfg.grid_n, cfg.scale()).nodes;
}

/// r_j = j r_max / n for j = 1..n
std::vector<double> position_abscissae(const std::vector<double>& at, double r_max, const RunConfig& cfg) {
  if (!at.empty()) return at;
  std::vector<double> out;
  for (std::size_t j = 1; j <= cfg.grid_n; ++j) out.push_back(r_max * static_cast<double>(j) / cfg.grid_n);
  return out;
}

Table indexed(const std::vector<double>& xs, const std::vector<cplx>& values) {
  Table t;
  t.columns = {"index", "abscissa", "value"};
  for (std::size_t j = 0; j < xs.size(); ++j) {
    t.rows.push_back({static_cast<long long>(j), xs[j], values[j]});
  }
  return t;
}

void validate(const RunConfig& cfg) {
  cfg.quad.validate();
  cfg.limit.validate();
  if (cfg.grid_n < 2) throw SpectralError(ErrorCode::InvalidArgument, "--grid-n must be at least 2");
  if (!(cfg.grid_k_max > 0.0)) throw SpectralError(ErrorCode::InvalidArgument, "--grid-k-max must be positive");
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct SuiteCase {
  std::string suite;
  freerhs::ReportCase c;
};

freerhs::SpectralReport run_guarded(const std::string& name, const freerhs::SuiteConfig& sc) {
  try {
    return freerhs::run_suite(name, sc);
  } catch (const SpectralError& e) {
    freerhs::SpectralReport rep;
    rep.suite = name;
    rep.add_flag("suite error", freerhs::to_string(e.code()), false, e.what());
    return rep;
  }
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, std::optional<double> tol) {
  freerhs::SuiteConfig sc;
  sc.scale = cfg.scale();
  sc.quad = cfg.quad;
  sc.limit = cfg.limit;
  sc.k_max = cfg.grid_k_max;
  sc.seed = cfg.seed;

  std::vector<std::string> names;
  if (suite == "all") {
    names = freerhs::suite_names();
  } else {
    names = {suite};
  }
  std::vector<freerhs::SpectralReport> reports;
  if (cfg.parallel && names.size() > 1) {
    std::vector<std::future<freerhs::SpectralReport>> jobs;
    for (const auto& n : names) jobs.push_back(std::async(std::launch::async, run_guarded, n, sc));
    for (auto& j : jobs) reports.push_back(j.get());
  } else {
    for (const auto& n : names) reports.push_back(run_guarded(n, sc));
  }

  std::vector<SuiteCase> cases;
  for (const auto& rep : reports) {
    for (const auto& c : rep.cases) cases.push_back({rep.suite, c});
  }
  if (tol) {
    for (auto& sc_case : cases) {
      auto& c = sc_case.c;
      if (c.tolerance > 0.0) {
        c.tolerance = *tol;
        c.pass = std::isfinite(c.abs_error) && c.abs_error <= *tol;
      }
    }
  }
  std::stable_sort(cases.begin(), cases.end(), [](const SuiteCase& a, const SuiteCase& b) {
    return a.c.id != b.c.id ? a.c.id < b.c.id : a.suite < b.suite;
  });
  std::size_t passed = 0;
  for (const auto& c : cases) passed += c.c.pass ? 1 : 0;
  const std::size_t failed = cases.size() - passed;

  std::string text;
  if (cfg.format == "json") {
    json j;
    j["suite"] = suite;
    auto echo = cfg.echo("verify");
    echo["tol"] = tol ? json(*tol) : json(nullptr);
    j["config"] = std::move(echo);
    j["summary"] = {{"total", cases.size()}, {"passed", passed}, {"failed", failed}};
    json arr = json::array();
    for (const auto& [name, c] : cases) {
      arr.push_back({{"suite", name},
                     {"id", c.id},
                     {"inputs", c.inputs},
                     {"expected", c.expected},
                     {"actual", c.actual},
                     {"abs_error", c.abs_error},
                     {"tolerance", c.tolerance},
                     {"status", c.pass ? "pass" : "fail"},
                     {"relation", c.relation}});
    }
    j["cases"] = std::move(arr);
    text = j.dump(2) + "\n";
  } else {
    Table t;
    t.columns = {"suite", "id", "inputs", "expected", "actual", "abs_error", "tolerance", "status", "relation"};
    for (const auto& [name, c] : cases) {
      t.rows.push_back({name, c.id, c.inputs, c.expected, c.actual, c.abs_error, c.tolerance,
                        std::string(c.pass ? "pass" : "fail"), c.relation});
    }
    text = render(t, cfg, "verify");
  }
  emit(text, cfg);
  std::cerr << "verify " << suite << ": " << passed << " passed, " << failed << " failed\n";
  for (const auto& [name, c] : cases) {
    if (!c.pass) {
      std::cerr << "FAIL [" << name << "] " << c.id << ": achieved error " << format_double(c.abs_error)
                << " > tolerance " << format_double(c.tolerance) << "\n";
    }
  }
  return failed == 0 ? exit_ok : exit_verify_failed;
}

int error_exit(ErrorCode code) { return code == ErrorCode::InvalidArgument ? exit_usage : exit_domain; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of the free Hamiltonian on the half-line"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;

  auto* hbar = app.add_option("--hbar", cfg.hbar, "Reduced Planck constant")->capture_default_str();
  auto* mass = app.add_option("--mass", cfg.mass, "Particle mass")->capture_default_str();
  auto* scale_c = app.add_option("--scale-c", cfg.scale_c, "Set c = 2m/hbar^2 directly");
  scale_c->excludes(hbar)->excludes(mass);
  app.add_option("--rel-tol", cfg.quad.rel_tol, "Quadrature relative tolerance")->capture_default_str();
  app.add_option("--abs-tol", cfg.quad.abs_tol, "Quadrature absolute tolerance")->capture_default_str();
  app.add_option("--grid-k-max", cfg.grid_k_max, "Largest wave number of default grids")->capture_default_str();
  app.add_option("--grid-n", cfg.grid_n, "Number of default grid nodes")->capture_default_str();
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", cfg.out, "Write output to PATH instead of stdout");
  app.add_option("--seed", cfg.seed, "Seed for random sweeps")->capture_default_str();
  app.add_flag("--parallel", cfg.parallel, "Run independent suites concurrently");

  // green
  auto* green = app.add_subcommand("green", "Resolvent kernel G0(r, s; E)");
  double g_r = 0.0;
  double g_s = 0.0;
  std::string g_energy;
  green->add_option("--r", g_r, "First radius")->required();
  green->add_option("--s", g_s, "Second radius")->required();
  green->add_option("--energy", g_energy, "Complex energy a, bi, a+bi or a-bi")->required();

  // rho
  auto* rho = app.add_subcommand("rho", "Spectral density rho(E)");
  std::vector<double> rho_at;
  rho->add_option("--at", rho_at, "Energies (default: the k-linear grid)");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "Classify energies or measure an interval by Stieltjes inversion");
  std::vector<double> sp_at;
  std::vector<double> sp_interval;
  auto* sp_at_opt = spectrum->add_option("--at", sp_at, "Energies to classify");
  auto* sp_int_opt = spectrum->add_option("--interval", sp_interval, "E1 E2")->expected(2);
  sp_at_opt->excludes(sp_int_opt);

  // transform
  auto* transform = app.add_subcommand("transform", "Energy transforms of a family member");
  std::string tr_fn;
  std::string tr_direction = "forward";
  std::vector<double> tr_at;
  double tr_r_max = 10.0;
  transform->add_option("--fn", tr_fn, "Function spec p,w,a;p,w,a;...")->required();
  transform->add_option("--direction", tr_direction, "forward, rho or inverse")
      ->check(CLI::IsMember({"forward", "inverse", "rho"}))
      ->capture_default_str();
  transform->add_option("--at", tr_at, "Energies (forward, rho) or radii (inverse)");
  transform->add_option("--r-max", tr_r_max, "Largest radius of the default inverse grid")->capture_default_str();

  // norms
  auto* norms = app.add_subcommand("norms", "Norm table ||phi||_{n,m}");
  std::string nm_fn;
  int nm_max = freerhs::default_n_max;
  norms->add_option("--fn", nm_fn, "Function spec p,w,a;p,w,a;...")->required();
  norms->add_option("--n-max", nm_max, "Largest n and m")->capture_default_str()->check(CLI::Range(0, 8));

  // ket
  auto* ket = app.add_subcommand("ket", "Dirac ket action <phi|E>");
  std::string k_fn;
  std::vector<double> k_energy;
  ket->add_option("--fn", k_fn, "Function spec p,w,a;p,w,a;...")->required();
  ket->add_option("--energy", k_energy, "Positive energies")->required();

  // propagate
  auto* prop = app.add_subcommand("propagate", "Free evolution exp(-i H0 t / hbar) phi");
  std::string p_fn;
  double p_t = 0.0;
  std::vector<double> p_at;
  double p_r_max = 10.0;
  prop->add_option("--fn", p_fn, "Function spec p,w,a;p,w,a;...")->required();
  prop->add_option("--t", p_t, "Time")->required();
  prop->add_option("--at", p_at, "Radii (default: n points on (0, r-max])");
  prop->add_option("--r-max", p_r_max, "Largest radius of the default grid")->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "Run verification suites");
  std::string v_suite = "all";
  std::optional<double> v_tol;
  verify->add_option("--suite", v_suite, "norms, spectrum, green, transform, rhs or all")
      ->check(CLI::IsMember({"norms", "spectrum", "green", "transform", "rhs", "all"}))
      ->capture_default_str();
  verify->add_option("--tol", v_tol, "Override every case tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    validate(cfg);
    const auto scale = cfg.scale();
    const auto& quad = cfg.quad;

    if (*green) {
      const freerhs::ComplexEnergy e(parse_complex(g_energy));
      const auto g = freerhs::green_eval(g_r, g_s, e, scale);
      Table t;
      t.columns = {"r", "s", "energy", "value", "region", "ordering"};
      t.rows.push_back({g_r, g_s, e.value(), g.value, std::string(freerhs::to_string(g.region)),
                        std::string(freerhs::to_string(g.ordering))});
      emit(render(t, cfg, "green"), cfg);
      return exit_ok;
    }
    if (*rho) {
      const auto xs = energy_abscissae(rho_at, cfg);
      Table t;
      t.columns = {"index", "abscissa", "value"};
      for (std::size_t j = 0; j < xs.size(); ++j) {
        t.rows.push_back({static_cast<long long>(j), xs[j], freerhs::rho_density(xs[j], scale)});
      }
      emit(render(t, cfg, "rho"), cfg);
      return exit_ok;
    }
    if (*spectrum) {
      Table t;
      if (!sp_interval.empty()) {
        t.columns = {"e1", "e2", "measure"};
        t.rows.push_back({sp_interval[0], sp_interval[1],
                          freerhs::stieltjes_measure(sp_interval[0], sp_interval[1], cfg.limit, quad, scale)});
      } else {
        if (sp_at.empty()) throw SpectralError(ErrorCode::InvalidArgument, "spectrum needs --at or --interval");
        t.columns = {"index", "abscissa", "verdict", "jump"};
        for (std::size_t j = 0; j < sp_at.size(); ++j) {
          const auto cls = freerhs::classify_point(sp_at[j], cfg.limit, scale);
          t.rows.push_back({static_cast<long long>(j), sp_at[j], std::string(freerhs::to_string(cls.verdict)),
                            cls.jump_value});
        }
      }
      emit(render(t, cfg, "spectrum"), cfg);
      return exit_ok;
    }
    if (*transform) {
      const auto phi = freerhs::parse_test_function(tr_fn);
      std::vector<cplx> values;
      std::vector<double> xs;
      if (tr_direction == "inverse") {
        xs = position_abscissae(tr_at, tr_r_max, cfg);
        values = freerhs::inverse_transform(freerhs::energy_image(phi, quad, scale), xs, quad, scale);
      } else {
        xs = energy_abscissae(tr_at, cfg);
        for (double e : xs) {
          values.push_back(tr_direction == "rho" ? freerhs::forward_transform_rho_at(phi, e, quad, scale)
                                                 : freerhs::forward_transform_at(phi, e, quad, scale));
        }
      }
      auto t = indexed(xs, values);
      t.meta["direction"] = tr_direction;
      t.meta["fn"] = tr_fn;
      emit(render(t, cfg, "transform"), cfg);
      return exit_ok;
    }
    if (*norms) {
      const auto phi = freerhs::parse_test_function(nm_fn);
      const auto table = freerhs::norm_table(phi, quad, scale, nm_max);
      Table t;
      t.columns = {"n", "m", "value"};
      for (int n = 0; n <= nm_max; ++n) {
        for (int m = 0; m <= nm_max; ++m) t.rows.push_back({static_cast<long long>(n), static_cast<long long>(m), table(n, m)});
      }
      emit(render(t, cfg, "norms"), cfg);
      return exit_ok;
    }
    if (*ket) {
      const auto phi = freerhs::parse_test_function(k_fn);
      const double norm10 = freerhs::norm_nm(phi, 1, 0, quad, scale);
      Table t;
      t.columns = {"index", "abscissa", "value", "bound"};
      for (std::size_t j = 0; j < k_energy.size(); ++j) {
        const auto a = freerhs::ket_action(phi, k_energy[j], quad, scale);
        t.rows.push_back({static_cast<long long>(j), k_energy[j], a.value,
                          freerhs::ket_bound_constant(k_energy[j], scale) * norm10});
      }
      emit(render(t, cfg, "ket"), cfg);
      return exit_ok;
    }
    if (*prop) {
      const auto phi = freerhs::parse_test_function(p_fn);
      const auto xs = position_abscissae(p_at, p_r_max, cfg);
      freerhs::PropagationOptions opts;
      opts.k_max = cfg.grid_k_max;
      const auto res = freerhs::propagate(phi, p_t, xs, quad, scale, opts);
      auto t = indexed(xs, res.values);
      t.meta["t"] = p_t;
      t.meta["truncated_mass"] = res.truncated_mass;
      t.meta["under_resolved"] = res.under_resolved;
      if (res.under_resolved) std::cerr << "warning: " << res.warning << "\n";
      emit(render(t, cfg, "propagate"), cfg);
      return exit_ok;
    }
    if (*verify) return cmd_verify(cfg, v_suite, v_tol);
  } catch (const SpectralError& e) {
    std::cerr << "error [" << freerhs::to_string(e.code()) << "]: " << e.what() << "\n";
    return error_exit(e.code());
  }
  return exit_usage;
}
