#pragma once

// First-order autonomous evolution operators U(t,s) = exp((t-s)A) and the
// shifted logarithm alpha(t,s) = Log(U(t,s) + kappa I), from which the
// generator is recovered as (I - kappa e^{-alpha})^{-1} d(alpha)/dt.

#include <array>
#include <complex>
#include <cstdio>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "miura/matfun.hpp"
#include "miura/report.hpp"

namespace miura {

struct GeneratorSpec {
  ComplexMatrix A;
  std::string label;
};

struct EvolutionSample {
  double t = 0.0;
  double s = 0.0;
  ComplexMatrix U;
};

struct LogRepresentation {
  cplx kappa{};
  ComplexMatrix alpha;      // Log(U + kappa I)
  ComplexMatrix dalpha_dt;  // (U + kappa I)^{-1} A U
  double t = 0.0;
  double s = 0.0;
};

/// Minimum distance of spectrum(U + kappa I) from (-inf, 0] in a LogRepresentation.
inline constexpr double kLogGuardMargin = 1e-6;

inline EvolutionSample evolution_operator(const GeneratorSpec& g, double t, double s) {
  if (!std::isfinite(t) || !std::isfinite(s)) throw Error("evolution_operator: times must be finite");
  if (t == s) return {t, s, identity(g.A.rows())};
  return {t, s, expm((t - s) * g.A)};
}

/// Candidate shifts in scan order: i 2^k, -i 2^k, (1+i) 2^k for k = 0..6,
/// each multiplied by (1 + ||U||_F).
inline std::vector<cplx> kappa_scan_set(const ComplexMatrix& u) {
  const double scale = 1.0 + u.norm();
  std::vector<cplx> out;
  for (int k = 0; k <= 6; ++k) {
    const double p = std::ldexp(1.0, k) * scale;
    out.push_back(cplx{0.0, p});
    out.push_back(cplx{0.0, -p});
    out.push_back(cplx{p, p});
  }
  return out;
}

/// Required distance of spectrum(U + kappa I) from the cut.
inline double kappa_margin(const ComplexMatrix& u) { return std::max(1e-3, 1e-3 * u.norm()); }

inline bool kappa_admissible(const std::vector<cplx>& eigenvalues, cplx kappa, double margin) {
  if (kappa == cplx{}) return false;
  for (auto lambda : eigenvalues)
    if (distance_to_branch_cut(lambda + kappa) < margin) return false;
  return true;
}

/// Every admissible shift for U, in scan order.
inline std::vector<cplx> admissible_kappas(const ComplexMatrix& u) {
  const auto eig = spectrum(u).eigenvalues;
  const double margin = kappa_margin(u);
  std::vector<cplx> out;
  for (auto kappa : kappa_scan_set(u))
    if (kappa_admissible(eig, kappa, margin)) out.push_back(kappa);
  return out;
}

inline cplx choose_kappa(const ComplexMatrix& u) {
  const auto eig = spectrum(u).eigenvalues;
  const double margin = kappa_margin(u);
  for (auto kappa : kappa_scan_set(u))
    if (kappa_admissible(eig, kappa, margin)) return kappa;
  SpectralInfo info;
  info.eigenvalues = eig;
  throw SelectionFailed("choose_kappa: no shift in the scan set qualifies; " + describe_spectrum(info));
}

inline LogRepresentation log_representation(const GeneratorSpec& g, cplx kappa, double t, double s) {
  if (kappa == cplx{}) throw Error("log_representation: kappa must be nonzero");
  const ComplexMatrix u = evolution_operator(g, t, s).U;
  const ComplexMatrix shifted = u + kappa * identity(u.rows());
  const SpectralInfo info = spectrum(shifted);
  if (info.min_distance_to_branch_cut < kLogGuardMargin)
    throw BranchCutViolation("log_representation: U + kappa I is too close to the cut; " +
                                 describe_spectrum(info),
                             info.min_distance_to_branch_cut);
  LogRepresentation rep;
  rep.kappa = kappa;
  rep.t = t;
  rep.s = s;
  rep.alpha = logm_principal(shifted);
  rep.dalpha_dt = solve(shifted, g.A * u);
  return rep;
}

/// (I - kappa e^{-alpha})^{-1} d(alpha)/dt.
inline ComplexMatrix reconstruct_generator(const LogRepresentation& rep) {
  const auto n = rep.alpha.rows();
  const ComplexMatrix factor = identity(n) - rep.kappa * expm(-rep.alpha);
  try {
    return solve(factor, rep.dalpha_dt);
  } catch (const SingularMatrix& e) {
    std::ostringstream os;
    os << "reconstruct_generator: I - kappa e^{-alpha} is singular (kappa = " << rep.kappa << "; "
       << describe_spectrum(spectrum(factor)) << ")";
    throw SingularMatrix(os.str(), e.condition());
  }
}

inline constexpr double kSemigroupTolerance = 1e-10;

/// Residual ||U(t,s) - U(t,r) U(r,s)||_F / (1 + ||U(t,s)||_F) per (s, r, t).
inline Report verify_semigroup(const GeneratorSpec& g, const std::vector<std::array<double, 3>>& times) {
  Report report;
  report.command = "verify_semigroup";
  for (const auto& [s, r, t] : times) {
    if (!(s <= r && r <= t)) throw Error("verify_semigroup: each triple must satisfy s <= r <= t");
    const ComplexMatrix direct = evolution_operator(g, t, s).U;
    const ComplexMatrix composed = evolution_operator(g, t, r).U * evolution_operator(g, r, s).U;
    char name[96];
    std::snprintf(name, sizeof name, "semigroup s=%g r=%g t=%g", s, r, t);
    report.add(name, relative_difference(composed, direct), kSemigroupTolerance);
  }
  return report;
}

}  // namespace miura
