#pragma once

// File formats:
//   matrix JSON     {"dim": n, "re": [[...]], "im": [[...]]}, row-major,
//                   written with 17 significant digits
//   generator JSON  the matrix object plus {"label": str}
//   field CSV       a column header "x,re,im", then one block per snapshot:
//                   "# t=<time>, L=<L>, n=<n>" followed by n rows "x,re,im"
//   report JSON     {"schema_version": 1, "command", "cases": [{name,
//                   residual, tolerance, pass}], "wall_time_s", "config_digest"}

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "miura/errors.hpp"
#include "miura/evolution.hpp"
#include "miura/matfun.hpp"
#include "miura/report.hpp"
#include "miura/soliton.hpp"

namespace miura {

inline constexpr int kReportSchemaVersion = 1;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void require_only_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                              const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(std::string(what) + ": unknown key \"" + key + "\"");
  }
}

inline std::vector<std::vector<double>> parse_rows(const nlohmann::json& j, std::size_t n, const char* key) {
  if (!j.is_array() || j.size() != n)
    throw ConfigError(std::string("matrix: \"") + key + "\" must have dim rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != n)
      throw ConfigError(std::string("matrix: every row of \"") + key + "\" must have dim entries");
    std::vector<double> r;
    for (const auto& x : row) {
      if (!x.is_number()) throw ConfigError(std::string("matrix: non-numeric entry in \"") + key + "\"");
      r.push_back(x.get<double>());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace detail

/// Parses the matrix object; `extra_keys` lists further keys the caller accepts.
inline ComplexMatrix matrix_from_json(const nlohmann::json& j,
                                      std::initializer_list<const char*> extra_keys = {}) {
  if (!j.is_object()) throw ConfigError("matrix: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = key == "dim" || key == "re" || key == "im";
    for (const char* a : extra_keys) known = known || key == a;
    if (!known) throw ConfigError("matrix: unknown key \"" + key + "\"");
  }
  if (!j.contains("dim") || !j.at("dim").is_number_integer() || j.at("dim").get<long>() <= 0)
    throw ConfigError("matrix: \"dim\" must be a positive integer");
  const auto n = static_cast<std::size_t>(j.at("dim").get<long>());
  if (!j.contains("re")) throw ConfigError("matrix: missing \"re\"");
  const auto re = detail::parse_rows(j.at("re"), n, "re");
  std::vector<std::vector<double>> im(n, std::vector<double>(n, 0.0));
  if (j.contains("im")) im = detail::parse_rows(j.at("im"), n, "im");
  ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = cplx{re[r][c], im[r][c]};
  if (!all_finite(m)) throw ConfigError("matrix: entries must be finite");
  return m;
}

inline std::string matrix_to_json(const ComplexMatrix& m) {
  std::ostringstream os;
  os << "{\"dim\": " << m.rows();
  for (const char* part : {"re", "im"}) {
    os << ", \"" << part << "\": [";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      os << (r ? ", [" : "[");
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double x = part[0] == 'r' ? m(r, c).real() : m(r, c).imag();
        os << (c ? ", " : "") << format_double(x);
      }
      os << "]";
    }
    os << "]";
  }
  os << "}";
  return os.str();
}

inline GeneratorSpec generator_from_json(const nlohmann::json& j) {
  GeneratorSpec g{matrix_from_json(j, {"label"}), ""};
  if (j.contains("label")) {
    if (!j.at("label").is_string()) throw ConfigError("generator: \"label\" must be a string");
    g.label = j.at("label").get<std::string>();
  }
  return g;
}

// ---------------------------------------------------------------------------

inline void write_field_csv(std::ostream& os, const std::vector<Snapshot>& snapshots) {
  os << "x,re,im\n";
  for (const auto& s : snapshots) {
    const Grid1D& g = s.field.grid;
    os << "# t=" << format_double(s.t) << ", L=" << format_double(g.length()) << ", n=" << g.n_points()
       << "\n";
    for (int j = 0; j < g.n_points(); ++j)
      os << format_double(g.x(j)) << "," << format_double(s.field.values(j).real()) << ","
         << format_double(s.field.values(j).imag()) << "\n";
  }
}

/// Reads blocks written by write_field_csv. Grids are rebuilt as periodic
/// with x_min taken from the first row of each block.
inline std::vector<Snapshot> read_field_csv(std::istream& is, Boundary boundary = Boundary::periodic) {
  std::string line;
  if (!std::getline(is, line) || line != "x,re,im") throw IOError("field CSV: missing column header");
  std::vector<Snapshot> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double t = 0.0, length = 0.0;
    int n = 0;
    if (std::sscanf(line.c_str(), "# t=%lf, L=%lf, n=%d", &t, &length, &n) != 3 || n <= 0)
      throw IOError("field CSV: malformed block header: " + line);
    ComplexVector values(n);
    double x_min = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!std::getline(is, line)) throw IOError("field CSV: truncated block");
      double x = 0.0, re = 0.0, im = 0.0;
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &re, &im) != 3)
        throw IOError("field CSV: malformed row: " + line);
      if (j == 0) x_min = x;
      values(j) = cplx{re, im};
    }
    out.push_back({t, Field(Grid1D(n, length, x_min, boundary), std::move(values))});
  }
  return out;
}

/// Writes the snapshots of a run as field CSV.
inline void emit_plot_data(const PDERun& run, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IOError("emit_plot_data: cannot open " + path);
  write_field_csv(os, run.snapshots);
  if (!os) throw IOError("emit_plot_data: write failed for " + path);
}

/// Writes report cases as CSV rows "name,residual,tolerance,pass".
inline void emit_plot_data(const Report& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IOError("emit_plot_data: cannot open " + path);
  os << "name,residual,tolerance,pass\n";
  for (const auto& c : report.cases)
    os << c.name << "," << format_double(c.residual) << "," << format_double(c.tolerance) << ","
       << (c.pass ? 1 : 0) << "\n";
  if (!os) throw IOError("emit_plot_data: write failed for " + path);
}

// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const Report& report) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : report.cases)
    cases.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  return {{"schema_version", kReportSchemaVersion},
          {"command", report.command},
          {"cases", cases},
          {"wall_time_s", report.wall_time_s},
          {"config_digest", report.config_digest}};
}

inline Report report_from_json(const nlohmann::json& j) {
  detail::require_only_keys(j, {"schema_version", "command", "cases", "wall_time_s", "config_digest"}, "report");
  if (j.value("schema_version", 0) != kReportSchemaVersion) throw ConfigError("report: unsupported schema_version");
  Report r;
  r.command = j.at("command").get<std::string>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  r.config_digest = j.at("config_digest").get<std::string>();
  for (const auto& c : j.at("cases")) {
    const double residual = c.at("residual").is_null() ? std::nan("") : c.at("residual").get<double>();
    r.cases.push_back({c.at("name").get<std::string>(), residual, c.at("tolerance").get<double>(),
                       c.at("pass").get<bool>()});
  }
  return r;
}

}  // namespace miura
