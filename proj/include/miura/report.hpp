#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace miura {

struct ReportCase {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Structured residual record shared by the verification routines and the CLI.
struct Report {
  std::string command;
  std::vector<ReportCase> cases;
  double wall_time_s = 0.0;
  std::string config_digest;

  /// Appends a case; pass is residual <= tolerance (NaN never passes).
  void add(std::string name, double residual, double tolerance) {
    cases.push_back({std::move(name), residual, tolerance, residual <= tolerance});
  }

  void append(const Report& other, const std::string& prefix = {}) {
    for (const auto& c : other.cases) cases.push_back({prefix + c.name, c.residual, c.tolerance, c.pass});
  }

  bool all_pass() const {
    return std::all_of(cases.begin(), cases.end(), [](const ReportCase& c) { return c.pass; });
  }

  double max_residual() const {
    double worst = 0.0;
    for (const auto& c : cases) worst = std::isnan(c.residual) ? c.residual : std::max(worst, c.residual);
    return worst;
  }

  void sort_cases() {
    std::stable_sort(cases.begin(), cases.end(),
                     [](const ReportCase& a, const ReportCase& b) { return a.name < b.name; });
  }
};

}  // namespace miura
