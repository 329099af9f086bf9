#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace freerhs {

/// One checked relation. `status` is pass iff abs_error <= tolerance; for
/// inequalities `expected` holds the bound and abs_error the amount by
/// which `actual` exceeds it (zero when the bound holds).
struct ReportCase {
  std::string id;
  std::string inputs;
  double expected = 0.0;
  double actual = 0.0;
  double abs_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string relation;
};

struct SpectralReport {
  std::string suite;
  std::vector<ReportCase> cases;
  std::string config_echo;

  void add_equality(std::string id, std::string inputs, double expected, double actual,
                    double tolerance, std::string relation) {
    ReportCase c;
    c.id = std::move(id);
    c.inputs = std::move(inputs);
    c.expected = expected;
    c.actual = actual;
    c.abs_error = std::abs(actual - expected);
    c.tolerance = tolerance;
    c.pass = std::isfinite(c.abs_error) && c.abs_error <= tolerance;
    c.relation = std::move(relation);
    cases.push_back(std::move(c));
  }

  /// Records actual <= bound, allowing `slack` for quadrature error.
  void add_upper_bound(std::string id, std::string inputs, double bound, double actual,
                       double slack, std::string relation) {
    ReportCase c;
    c.id = std::move(id);
    c.inputs = std::move(inputs);
    c.expected = bound;
    c.actual = actual;
    c.abs_error = std::max(0.0, actual - bound);
    c.tolerance = slack;
    c.pass = std::isfinite(actual) && std::isfinite(bound) && c.abs_error <= slack;
    c.relation = std::move(relation);
    cases.push_back(std::move(c));
  }

  void add_flag(std::string id, std::string inputs, bool holds, std::string relation) {
    ReportCase c;
    c.id = std::move(id);
    c.inputs = std::move(inputs);
    c.expected = 1.0;
    c.actual = holds ? 1.0 : 0.0;
    c.abs_error = holds ? 0.0 : 1.0;
    c.tolerance = 0.0;
    c.pass = holds;
    c.relation = std::move(relation);
    cases.push_back(std::move(c));
  }

  void append(const SpectralReport& other) {
    cases.insert(cases.end(), other.cases.begin(), other.cases.end());
  }

  std::size_t passed() const {
    return static_cast<std::size_t>(
        std::count_if(cases.begin(), cases.end(), [](const ReportCase& c) { return c.pass; }));
  }
  std::size_t failed() const { return cases.size() - passed(); }
  bool all_pass() const { return failed() == 0; }

  void sort_by_id() {
    std::stable_sort(cases.begin(), cases.end(),
                     [](const ReportCase& a, const ReportCase& b) { return a.id < b.id; });
  }
};

}  // namespace freerhs
