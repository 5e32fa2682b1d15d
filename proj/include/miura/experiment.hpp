#pragma once

// Batch experiments behind the command-line tool. Each command reads a
// strict JSON config, runs one verification suite, and writes report.json
// (plus CSV plot data) into the output directory.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "miura/errors.hpp"
#include "miura/evolution.hpp"
#include "miura/io.hpp"
#include "miura/matfun.hpp"
#include "miura/random.hpp"
#include "miura/report.hpp"
#include "miura/second_order.hpp"
#include "miura/soliton.hpp"

namespace miura {

// ---------------------------------------------------------------------------
// Logging, controlled by MIURA_LOG_LEVEL in {error, info, debug}.

enum class LogLevel { error = 0, info = 1, debug = 2 };

inline LogLevel log_level_from_env() {
  const char* env = std::getenv("MIURA_LOG_LEVEL");
  if (!env) return LogLevel::error;
  const std::string v(env);
  if (v == "debug") return LogLevel::debug;
  if (v == "info") return LogLevel::info;
  return LogLevel::error;
}

inline void log(LogLevel level, const std::string& message) {
  static const LogLevel threshold = log_level_from_env();
  if (level > threshold) return;
  static constexpr const char* names[] = {"error", "info", "debug"};
  std::cerr << "[miura " << names[static_cast<int>(level)] << "] " << message << "\n";
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands = {"matfun-check", "lemma1",  "abstract-miura",
                                                    "factorize",    "soliton", "transform-chain"};
  return commands;
}

struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::json parameters = nlohmann::json::object();
  std::string output_dir = ".";
};

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  detail::require_only_keys(j, {"command", "seed", "parameters", "output_dir"}, "config");
  ExperimentConfig cfg;
  if (j.contains("command")) {
    if (!j.at("command").is_string()) throw ConfigError("config: \"command\" must be a string");
    cfg.command = j.at("command").get<std::string>();
  }
  if (j.contains("seed")) {
    const auto& seed = j.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
      throw ConfigError("config: \"seed\" must be an unsigned integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("parameters")) {
    if (!j.at("parameters").is_object()) throw ConfigError("config: \"parameters\" must be an object");
    cfg.parameters = j.at("parameters");
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw ConfigError("config: \"output_dir\" must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

/// FNV-1a (64-bit) of the canonical JSON of command, seed and parameters.
inline std::string config_digest(const ExperimentConfig& cfg) {
  const nlohmann::json canonical = {{"command", cfg.command}, {"seed", cfg.seed}, {"parameters", cfg.parameters}};
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

/// Typed access to a command's parameter object; unread keys are rejected
/// by finish().
class Params {
 public:
  Params(const nlohmann::json& j, std::string command) : json_(j), command_(std::move(command)) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return json_.contains(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!json_.contains(key)) return fallback;
    try {
      return json_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(command_ + ": parameter \"" + key + "\" has the wrong type");
    }
  }

  const nlohmann::json& raw(const std::string& key) {
    used_.insert(key);
    return json_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : json_.items())
      if (!used_.count(key)) throw ConfigError(command_ + ": unknown parameter \"" + key + "\"");
  }

 private:
  const nlohmann::json& json_;
  std::string command_;
  std::set<std::string> used_;
};

inline std::vector<std::pair<double, double>> time_pairs(Params& p, std::vector<std::pair<double, double>> fallback) {
  if (!p.has("times")) return fallback;
  std::vector<std::pair<double, double>> out;
  for (const auto& pair : p.raw("times")) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw ConfigError("parameter \"times\" must be a list of [t, s] pairs");
    out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return out;
}

inline std::string case_name(const std::string& group, std::size_t index, const std::string& suffix = {}) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", index);
  return group + "/" + buf + (suffix.empty() ? "" : "/" + suffix);
}

inline std::string times_label(double t, double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t=%g,s=%g", t, s);
  return buf;
}

inline int random_dim(Xoshiro256& rng, int max_dim) {
  return 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_dim));
}

inline void require_positive(int value, const char* name) {
  if (value <= 0) throw ConfigError(std::string("parameter \"") + name + "\" must be positive");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random fixtures shared by the CLI suites and the acceptance tests.

/// Generator with complex unit-normal entries.
inline ComplexMatrix random_generator(Xoshiro256& rng, Eigen::Index n) {
  return random_complex_normal(rng, n);
}

/// Complex unit-normal matrix shifted right until every eigenvalue has real
/// part at least `margin`, so the spectrum keeps that distance from (-inf, 0].
inline ComplexMatrix random_sectorial(Xoshiro256& rng, Eigen::Index n, double margin = 0.1) {
  ComplexMatrix a = random_complex_normal(rng, n);
  double min_re = std::numeric_limits<double>::infinity();
  for (auto lambda : spectrum(a).eigenvalues) min_re = std::min(min_re, lambda.real());
  const double shift = std::max(0.0, margin - min_re) + rng.uniform(0.0, 1.0);
  return a + shift * identity(n);
}

/// Matrix with spectrum inside |Im z| <= 2.5, suitable for exp/log roundtrips.
inline ComplexMatrix random_strip_matrix(Xoshiro256& rng, Eigen::Index n) {
  return random_with_spectrum_in_disk(rng, n, 0.0, 2.5);
}

/// Matrix with spectrum in the disk |z - 3| <= 1, clear of the log branch cut.
inline ComplexMatrix random_log_admissible(Xoshiro256& rng, Eigen::Index n) {
  return random_with_spectrum_in_disk(rng, n, 3.0, 1.0);
}

/// V diag(e^lambda) V^{-1} from an independent eigendecomposition.
inline ComplexMatrix expm_by_eigendecomposition(const ComplexMatrix& a) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a);
  const ComplexMatrix& v = solver.eigenvectors();
  const ComplexVector e = solver.eigenvalues().array().exp();
  return v * e.asDiagonal() * v.inverse();
}

// ---------------------------------------------------------------------------
// Suites.

namespace suites {

inline Report matfun_check(const ExperimentConfig& cfg, detail::Params& p) {
  const int dim = p.get<int>("dim", 6);
  const int instances = p.get<int>("instances", 20);
  detail::require_positive(dim, "dim");
  detail::require_positive(instances, "instances");
  std::optional<ComplexMatrix> fixture;
  if (p.has("matrix")) fixture = matrix_from_json(p.raw("matrix"));
  p.finish();

  Report report;
  Xoshiro256 rng(cfg.seed);
  for (int i = 0; i < instances; ++i) {
    const ComplexMatrix a = random_strip_matrix(rng, dim);
    report.add(detail::case_name("exp_log_roundtrip", i), relative_difference(logm_principal(expm(a)), a), 1e-9);
    report.add(detail::case_name("expm_vs_eigendecomposition", i),
               relative_difference(expm(a), expm_by_eigendecomposition(a)), 1e-10);

    const ComplexMatrix m = random_log_admissible(rng, dim);
    const ComplexMatrix log_m = logm_principal(m);
    const ComplexMatrix by_contour = riesz_dunford(ScalarFunction::log, m, fit_contour(ScalarFunction::log, m));
    report.add(detail::case_name("logm_vs_riesz_dunford", i), relative_difference(by_contour, log_m), 1e-8);
    const ComplexMatrix root = sqrtm_principal(m);
    report.add(detail::case_name("sqrtm_square", i), (root * root - m).norm() / m.norm(), 1e-10);
    report.add(detail::case_name("sqrtm_vs_exp_half_log", i),
               relative_difference(root, expm(0.5 * log_m)), 1e-10);
  }

  if (fixture) {
    const ComplexMatrix& m = *fixture;
    const ComplexMatrix e = expm(m);
    report.add("fixture/expm_inverse", relative_difference(e * expm(-m), identity(m.rows())), 1e-10);
    if (spectrum(m).min_distance_to_branch_cut > 0.0) {
      const ComplexMatrix log_m = logm_principal(m);
      const ComplexMatrix root = sqrtm_principal(m);
      report.add("fixture/exp_of_logm", relative_difference(expm(log_m), m), 1e-9);
      report.add("fixture/sqrtm_square", (root * root - m).norm() / (1.0 + m.norm()), 1e-10);
      std::ofstream(std::filesystem::path(cfg.output_dir) / "logm.json") << matrix_to_json(log_m) << "\n";
      std::ofstream(std::filesystem::path(cfg.output_dir) / "sqrtm.json") << matrix_to_json(root) << "\n";
    }
    std::ofstream(std::filesystem::path(cfg.output_dir) / "expm.json") << matrix_to_json(e) << "\n";
  }
  return report;
}

/// Reconstructs a generator from its shifted logarithm and reports the
/// relative error; with `kappa_check` also compares two admissible shifts.
inline void lemma1_case(Report& report, const GeneratorSpec& g, const std::string& tag, double t, double s,
                        bool kappa_check) {
  const ComplexMatrix u = evolution_operator(g, t, s).U;
  const auto kappas = admissible_kappas(u);
  if (kappas.empty()) throw SelectionFailed("lemma1: no admissible kappa for " + tag);
  const ComplexMatrix first = reconstruct_generator(log_representation(g, kappas.front(), t, s));
  report.add("reconstruction/" + tag + "/" + detail::times_label(t, s), relative_difference(first, g.A), 1e-8);
  if (kappa_check) {
    if (kappas.size() < 2) throw SelectionFailed("lemma1: fewer than two admissible kappa for " + tag);
    const ComplexMatrix second = reconstruct_generator(log_representation(g, kappas[1], t, s));
    report.add("kappa_independence/" + tag + "/" + detail::times_label(t, s),
               relative_difference(second, first), 1e-8);
  }
}

inline Report lemma1(const ExperimentConfig& cfg, detail::Params& p) {
  Report report;
  if (p.has("generator")) {
    const GeneratorSpec g = generator_from_json(p.raw("generator"));
    const auto times = detail::time_pairs(p, {{1.0, 0.0}});
    const bool kappa_check = p.get<bool>("kappa_independence", false);
    p.finish();
    const std::string tag = g.label.empty() ? "fixture" : g.label;
    for (const auto& [t, s] : times) lemma1_case(report, g, tag, t, s, kappa_check);
    return report;
  }
  const int max_dim = p.get<int>("max_dim", 8);
  const int instances = p.get<int>("instances", 100);
  const int kappa_instances = p.get<int>("kappa_instances", 20);
  const auto times = detail::time_pairs(p, {{1.0, 0.0}, {2.0, 0.5}});
  p.finish();
  detail::require_positive(max_dim, "max_dim");
  detail::require_positive(instances, "instances");

  Xoshiro256 rng(cfg.seed);
  for (int i = 0; i < instances; ++i) {
    const GeneratorSpec g{random_generator(rng, detail::random_dim(rng, max_dim)), ""};
    char tag[16];
    std::snprintf(tag, sizeof tag, "%03d", i);
    for (const auto& [t, s] : times) lemma1_case(report, g, tag, t, s, i < kappa_instances);
  }
  return report;
}

inline void abstract_miura_case(Report& report, const SecondOrderGenerator& g, const std::string& tag, double t,
                                double s) {
  const PairLogRep rep = pair_log_representation(g, t, s);
  const std::string where = tag + "/" + detail::times_label(t, s);
  const ComplexMatrix u_first = abstract_miura(rep, OperatorOrder::U_first);
  const ComplexMatrix v_first = abstract_miura(rep, OperatorOrder::V_first);
  report.add("reconstruction_U_first/" + where, relative_difference(u_first, g.acal()), 1e-7);
  report.add("reconstruction_V_first/" + where, relative_difference(v_first, g.acal()), 1e-7);
  report.add("order_agreement/" + where, relative_difference(u_first, v_first), 1e-9);
  for (auto order : {OperatorOrder::V_first, OperatorOrder::U_first}) {
    const auto [plus, minus] = sqrt_generators(g, rep, order);
    const ComplexMatrix product = order == OperatorOrder::V_first ? v_first : u_first;
    report.add(std::string("sqrt_square_") + to_string(order) + "/" + where,
               (plus * plus - product).norm() / (1.0 + product.norm()), 1e-9);
    report.add(std::string("sqrt_vs_direct_") + to_string(order) + "/" + where,
               relative_difference(plus, g.sqrt_acal()), 1e-7);
    report.add(std::string("sqrt_pair_symmetry_") + to_string(order) + "/" + where,
               (plus + minus).norm() / (1.0 + plus.norm()), 1e-15);
  }
}

inline Report abstract_miura_suite(const ExperimentConfig& cfg, detail::Params& p) {
  Report report;
  if (p.has("generator")) {
    const GeneratorSpec spec = generator_from_json(p.raw("generator"));
    const auto times = detail::time_pairs(p, {{1.0, 0.0}});
    p.finish();
    const SecondOrderGenerator g(spec.A);
    const std::string tag = spec.label.empty() ? "fixture" : spec.label;
    for (const auto& [t, s] : times) abstract_miura_case(report, g, tag, t, s);
    return report;
  }
  const int max_dim = p.get<int>("max_dim", 8);
  const int instances = p.get<int>("instances", 50);
  const double margin = p.get<double>("spectral_margin", 0.1);
  const auto times = detail::time_pairs(p, {{1.0, 0.0}, {2.0, 0.5}});
  p.finish();
  detail::require_positive(max_dim, "max_dim");
  detail::require_positive(instances, "instances");

  Xoshiro256 rng(cfg.seed);
  for (int i = 0; i < instances; ++i) {
    const SecondOrderGenerator g(random_sectorial(rng, detail::random_dim(rng, max_dim), margin));
    char tag[16];
    std::snprintf(tag, sizeof tag, "%03d", i);
    for (const auto& [t, s] : times) abstract_miura_case(report, g, tag, t, s);
  }
  return report;
}

/// Max relative gap between the two-mode solution and the companion-matrix
/// solution on `points` equally spaced times in [0, t_max].
inline double completeness_residual(const SecondOrderGenerator& g, const ComplexVector& u0, const ComplexVector& v0,
                                    double t_max, int points) {
  const ModeDecomposition modes = decompose_solution(g, u0, v0);
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = points > 1 ? t_max * k / (points - 1) : 0.0;
    const ComplexVector two_mode = two_mode_solution(g, modes, t, 0.0);
    const ComplexVector oracle = solve_companion(g, u0, v0, t, 0.0).first;
    worst = std::max(worst, (two_mode - oracle).norm() / (1.0 + oracle.norm()));
  }
  return worst;
}

inline Report factorize(const ExperimentConfig& cfg, detail::Params& p) {
  Report report;
  const auto t_samples = p.get<std::vector<double>>("t_samples", {0.0, 0.5, 1.0, 1.5, 2.0});
  const int time_points = p.get<int>("time_points", 21);
  const double t_max = p.get<double>("t_max", 2.0);
  detail::require_positive(time_points, "time_points");
  Xoshiro256 rng(cfg.seed);

  const auto run_one = [&](const SecondOrderGenerator& g, const std::string& tag) {
    report.append(verify_factorization(g, t_samples), "factorization/" + tag + "/");
    const ComplexVector u0 = random_complex_vector(rng, g.dim());
    const ComplexVector v0 = random_complex_vector(rng, g.dim());
    report.add("completeness/" + tag, completeness_residual(g, u0, v0, t_max, time_points), 1e-9);
  };

  if (p.has("generator")) {
    const GeneratorSpec spec = generator_from_json(p.raw("generator"));
    p.finish();
    run_one(SecondOrderGenerator(spec.A), spec.label.empty() ? "fixture" : spec.label);
    return report;
  }
  const int max_dim = p.get<int>("max_dim", 8);
  const int instances = p.get<int>("instances", 20);
  p.finish();
  detail::require_positive(max_dim, "max_dim");
  detail::require_positive(instances, "instances");
  for (int i = 0; i < instances; ++i) {
    const SecondOrderGenerator g(random_sectorial(rng, detail::random_dim(rng, max_dim)));
    char tag[16];
    std::snprintf(tag, sizeof tag, "%03d", i);
    run_one(g, tag);
  }
  return report;
}

/// |after - before| / |before|, or |after| when before is zero.
inline double relative_drift(double before, double after) {
  return before == 0.0 ? std::abs(after) : std::abs(after - before) / std::abs(before);
}

inline Report soliton(const ExperimentConfig& cfg, detail::Params& p) {
  const std::string equation = p.get<std::string>("equation", "kdv");
  if (equation != "kdv" && equation != "mkdv") throw ConfigError("soliton: equation must be \"kdv\" or \"mkdv\"");
  const Equation eq = equation == "kdv" ? Equation::kdv : Equation::mkdv;
  const std::string initial = p.get<std::string>("initial", eq == Equation::kdv ? "soliton" : "kink-antikink");
  const double length = p.get<double>("L", eq == Equation::kdv ? 40.0 : 80.0);
  const int n = p.get<int>("n", 512);
  PDERun run;
  run.equation = eq;
  run.dt = p.get<double>("dt", 1e-4);
  run.t_end = p.get<double>("t_end", eq == Equation::kdv ? 1.0 : 0.5);
  run.snapshot_stride = p.get<int>("snapshot_stride", eq == Equation::kdv ? 0 : 50);
  const double c = p.get<double>("c", 4.0);
  const double b = p.get<double>("b", 1.0);
  const double x0 = p.get<double>("x0", 0.0);
  const double x1 = p.get<double>("x1", -20.0);
  const double x2 = p.get<double>("x2", 20.0);
  const double value = p.get<double>("value", 0.0);
  const double miura_tolerance = p.get<double>("miura_tolerance", 1e-4);
  p.finish();

  const Grid1D grid(n, length);
  Field u0(grid);
  if (initial == "soliton") {
    if (eq != Equation::kdv) throw ConfigError("soliton: initial \"soliton\" requires equation \"kdv\"");
    u0 = kdv_soliton(grid, c, x0);
  } else if (initial == "kink-antikink") {
    if (eq != Equation::mkdv) throw ConfigError("soliton: initial \"kink-antikink\" requires equation \"mkdv\"");
    u0 = mkdv_kink_antikink(grid, b, x1, x2);
  } else if (initial == "constant") {
    u0.values.setConstant(value);
  } else if (initial != "zero") {
    throw ConfigError("soliton: unknown initial data \"" + initial + "\"");
  }

  log(LogLevel::info, "soliton: integrating " + equation + " to t=" + format_double(run.t_end));
  run = integrate(run, u0);
  const Field& final_field = run.snapshots.back().field;
  emit_plot_data(run, (std::filesystem::path(cfg.output_dir) / "snapshots.csv").string());
  {
    const nlohmann::json manifest = {{"equation", equation}, {"initial", initial},     {"scheme", "ifrk4"},
                                     {"L", length},          {"n", n},                 {"dt", run.dt},
                                     {"t_end", run.t_end},   {"snapshot_stride", run.snapshot_stride},
                                     {"snapshots", run.snapshots.size()}, {"seed", cfg.seed}};
    std::ofstream(std::filesystem::path(cfg.output_dir) / "run.json") << manifest.dump(2) << "\n";
  }

  Report report;
  report.add("mass_drift", std::abs(final_field.integral() - u0.integral()) / (1.0 + std::abs(u0.integral())),
             1e-12);
  report.add("energy_drift", relative_drift(u0.integral_of_square(), final_field.integral_of_square()), 1e-6);
  if (initial == "soliton") {
    const Field exact = kdv_soliton(grid, c, x0 + c * run.t_end);
    report.add("soliton_error", linf(final_field.values - exact.values), 1e-5);
  } else if (initial == "zero" || initial == "constant") {
    report.add("stationarity", linf(final_field.values - u0.values), 1e-12);
  }
  if (eq == Equation::mkdv) {
    if (run.snapshots.size() >= 5) {
      report.add("miura_kdv_residual", miura_maps_solutions(run, miura_tolerance).max_residual(),
                 miura_tolerance);
    } else {
      log(LogLevel::info, "soliton: fewer than 5 snapshots, Miura residual skipped");
    }
  }
  return report;
}

struct NamedField {
  std::string name;
  Field field;
};

/// Smooth fields u on the window [0, 8) together with the initial data for
/// psi'' = u psi. Even indices draw a positive trigonometric u (psi starts
/// flat); odd indices draw a smooth v and set u = v' + v^2 in closed form,
/// starting psi with slope v(0).
struct RiccatiFixture {
  Field u;
  cplx psi0;
  cplx dpsi0;
};

inline std::vector<RiccatiFixture> riccati_fixtures(Xoshiro256& rng, int count, int n = 1024) {
  const double length = 8.0;
  const Grid1D grid(n, length, 0.0, Boundary::window);
  const double w = 2.0 * std::numbers::pi / length;
  std::vector<RiccatiFixture> out;
  for (int i = 0; i < count; ++i) {
    double amp[4], phase[4];
    for (int m = 0; m < 4; ++m) {
      amp[m] = rng.uniform(-1.0, 1.0);
      phase[m] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    if (i % 2 == 0) {
      const double base = 0.5 + rng.uniform();
      const auto u = [&](double x) {
        double sum = base;
        for (int m = 1; m < 4; ++m) sum += 0.15 * amp[m] * std::cos(m * w * x + phase[m]);
        return cplx{sum};
      };
      out.push_back({Field::sample(grid, u), 1.0, 0.0});
    } else {
      const auto v = [&](double x) {
        double sum = 0.5 * amp[0];
        for (int m = 1; m < 4; ++m) sum += 0.3 * amp[m] * std::sin(m * w * x + phase[m]);
        return sum;
      };
      const auto dv = [&](double x) {
        double sum = 0.0;
        for (int m = 1; m < 4; ++m) sum += 0.3 * amp[m] * m * w * std::cos(m * w * x + phase[m]);
        return sum;
      };
      const auto u = [&](double x) { return cplx{dv(x) + v(x) * v(x)}; };
      out.push_back({Field::sample(grid, u), 1.0, v(0.0)});
    }
  }
  return out;
}

/// Positive psi fields for the second log-derivative identity.
inline std::vector<NamedField> hirota_fixtures(int n = 512) {
  std::vector<NamedField> out;
  const Grid1D exp_window(n, 10.0, 0.0, Boundary::window);
  out.push_back({"exp_0.7", Field::sample(exp_window, [](double x) { return cplx{std::exp(0.7 * x)}; })});
  const Grid1D cosh_window(n, 8.0, -4.0, Boundary::window);
  for (double b : {0.5, 1.0, 2.0}) {
    char name[32];
    std::snprintf(name, sizeof name, "cosh_b%g", b);
    out.push_back({name, Field::sample(cosh_window, [b](double x) { return cplx{std::cosh(b * x)}; })});
  }
  const double length = 20.0;
  const double w = 2.0 * std::numbers::pi / length;
  const Grid1D periodic(n, length);
  out.push_back({"periodic_cos", Field::sample(periodic, [w](double x) { return cplx{1.0 + 0.1 * std::cos(w * x)}; })});
  out.push_back({"periodic_mixed", Field::sample(periodic, [w](double x) {
                   return cplx{2.0 + std::sin(w * x) + 0.5 * std::cos(2.0 * w * x)};
                 })});
  out.push_back({"periodic_exp_cos",
                 Field::sample(periodic, [w](double x) { return cplx{std::exp(0.5 * std::cos(w * x))}; })});
  return out;
}

/// max |v_x + v^2 - b^2| for the kink b tanh(b x) on the window [-10, 10).
inline double kink_image_deviation(double b, int n = 1024) {
  const Grid1D window(n, 20.0, Boundary::window);
  const Field image = miura_transform(mkdv_kink(window, b, 0.0));
  return linf(image.values - ComplexVector::Constant(n, b * b));
}

/// Riccati residual of cole_hopf(solve_linear_x(u)) against u, max norm.
inline double riccati_roundtrip_residual(const RiccatiFixture& f) {
  const Field psi = solve_linear_x(f.u, f.psi0, f.dpsi0);
  const Field v = cole_hopf(psi);
  return riccati_residual(f.u, v).cases.front().residual;
}

inline Report transform_chain(const ExperimentConfig& cfg, detail::Params& p) {
  const auto b_values = p.get<std::vector<double>>("b_values", {0.5, 1.0, 2.0});
  const int fields = p.get<int>("fields", 10);
  const int riccati_n = p.get<int>("riccati_n", 1024);
  const int hirota_n = p.get<int>("hirota_n", 512);
  const int kink_n = p.get<int>("kink_n", 1024);
  p.finish();
  detail::require_positive(fields, "fields");

  Report report;
  for (double b : b_values) {
    char name[48];
    std::snprintf(name, sizeof name, "kink_identity/b=%g", b);
    report.add(name, kink_image_deviation(b, kink_n), 1e-8);
  }
  Xoshiro256 rng(cfg.seed);
  const auto fixtures = riccati_fixtures(rng, fields, riccati_n);
  for (std::size_t i = 0; i < fixtures.size(); ++i)
    report.add(detail::case_name("riccati_roundtrip", i), riccati_roundtrip_residual(fixtures[i]), 1e-6);
  for (const auto& f : hirota_fixtures(hirota_n))
    report.add("hirota/" + f.name, hirota_identity_residual(f.field).cases.front().residual, 1e-7);
  return report;
}

}  // namespace suites

// ---------------------------------------------------------------------------

/// Runs one experiment, writes report.json and report.csv into the output
/// directory and returns the report (cases sorted by name).
inline Report run(const ExperimentConfig& cfg) {
  const auto& commands = known_commands();
  if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
    throw ConfigError("unknown command \"" + cfg.command + "\"");
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.output_dir))
    throw ConfigError("output directory " + cfg.output_dir + " is not writable");

  detail::Params params(cfg.parameters, cfg.command);
  const auto start = std::chrono::steady_clock::now();
  log(LogLevel::info, "running " + cfg.command + " (seed " + std::to_string(cfg.seed) + ")");

  Report report;
  if (cfg.command == "matfun-check") report = suites::matfun_check(cfg, params);
  else if (cfg.command == "lemma1") report = suites::lemma1(cfg, params);
  else if (cfg.command == "abstract-miura") report = suites::abstract_miura_suite(cfg, params);
  else if (cfg.command == "factorize") report = suites::factorize(cfg, params);
  else if (cfg.command == "soliton") report = suites::soliton(cfg, params);
  else report = suites::transform_chain(cfg, params);

  report.command = cfg.command;
  report.sort_cases();
  report.config_digest = config_digest(cfg);
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& c : report.cases)
    if (!c.pass) log(LogLevel::info, "FAIL " + c.name + " residual " + format_double(c.residual));
    else log(LogLevel::debug, "pass " + c.name + " residual " + format_double(c.residual));

  const std::filesystem::path dir(cfg.output_dir);
  std::ofstream os(dir / "report.json");
  if (!os) throw IOError("cannot write report.json in " + cfg.output_dir);
  os << report_to_json(report).dump(2) << "\n";
  emit_plot_data(report, (dir / "report.csv").string());
  return report;
}

/// 0 when every case passes, 1 otherwise.
inline int exit_code(const Report& report) { return report.all_pass() ? 0 : 1; }

inline constexpr int kExitFailedCases = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitComputeError = 3;

}  // namespace miura
