#pragma once

// Second-order autonomous equations u'' = Acal u. The evolution operator is
// realized on the forward branch, Ucal(t,s) = exp((t-s) Acal^{1/2}), so that
// Vcal = d/dt Ucal stays invertible; Acal is recovered as the product of the
// logarithmic representations of Ucal and Vcal.

#include <optional>
#include <utility>
#include <vector>

#include "miura/evolution.hpp"
#include "miura/matfun.hpp"
#include "miura/report.hpp"

namespace miura {

/// Spectrum of a matrix must stay this far (relative to 1 + ||M||_F) from
/// (-inf, 0] before a principal square root is taken.
inline constexpr double kSectorialGuard = 1e-6;

inline bool sectorial(const ComplexMatrix& m) {
  return spectrum(m).min_distance_to_branch_cut >= kSectorialGuard * (1.0 + m.norm());
}

inline void require_sectorial(const ComplexMatrix& m, const char* op) {
  const SpectralInfo info = spectrum(m);
  if (info.min_distance_to_branch_cut < kSectorialGuard * (1.0 + m.norm()))
    throw BranchCutViolation(std::string(op) + ": spectrum too close to (-inf, 0]; " +
                                 describe_spectrum(info),
                             info.min_distance_to_branch_cut);
}

class SecondOrderGenerator {
 public:
  /// The principal square root is cached here when the spectrum of Acal
  /// keeps clear of the cut; otherwise only companion-matrix routes work.
  explicit SecondOrderGenerator(ComplexMatrix acal) : acal_(std::move(acal)) {
    detail::require_square_finite(acal_, "SecondOrderGenerator");
    if (sectorial(acal_)) sqrt_acal_ = sqrtm_principal(acal_);
  }

  const ComplexMatrix& acal() const { return acal_; }
  Eigen::Index dim() const { return acal_.rows(); }
  bool has_sqrt() const { return sqrt_acal_.has_value(); }

  const ComplexMatrix& sqrt_acal() const {
    if (!sqrt_acal_) require_sectorial(acal_, "SecondOrderGenerator::sqrt_acal");
    return *sqrt_acal_;
  }

 private:
  ComplexMatrix acal_;
  std::optional<ComplexMatrix> sqrt_acal_;
};

enum class OperatorOrder { U_first, V_first };

inline const char* to_string(OperatorOrder order) {
  return order == OperatorOrder::U_first ? "U_first" : "V_first";
}

struct PairLogRep {
  cplx kappa{};
  ComplexMatrix alpha;          // Log(Ucal + kappa I)
  ComplexMatrix hat_alpha;      // Log(Vcal + kappa I)
  ComplexMatrix dalpha_dt;
  ComplexMatrix dhat_alpha_dt;
  double t = 0.0;
  double s = 0.0;
};

struct ModeDecomposition {
  ComplexVector u_plus;
  ComplexVector u_minus;
};

/// [[0, I], [Acal, 0]]
inline ComplexMatrix companion_embed(const SecondOrderGenerator& g) {
  const auto n = g.dim();
  ComplexMatrix c = ComplexMatrix::Zero(2 * n, 2 * n);
  c.topRightCorner(n, n) = identity(n);
  c.bottomLeftCorner(n, n) = g.acal();
  return c;
}

/// (u(t), u'(t)) from the first-order companion system.
inline std::pair<ComplexVector, ComplexVector> solve_companion(const SecondOrderGenerator& g,
                                                               const ComplexVector& u0,
                                                               const ComplexVector& v0, double t,
                                                               double s) {
  const auto n = g.dim();
  if (u0.size() != n || v0.size() != n) throw Error("solve_companion: vector size mismatch");
  ComplexVector state(2 * n);
  state << u0, v0;
  const ComplexVector out = expm((t - s) * companion_embed(g)) * state;
  return {out.head(n), out.tail(n)};
}

inline ComplexMatrix evolution_U(const SecondOrderGenerator& g, double t, double s) {
  if (t == s) return identity(g.dim());
  return expm((t - s) * g.sqrt_acal());
}

inline ComplexMatrix evolution_V(const SecondOrderGenerator& g, double t, double s) {
  return g.sqrt_acal() * evolution_U(g, t, s);
}

/// First scan-set shift admissible for both Ucal and Vcal.
inline cplx choose_shared_kappa(const ComplexMatrix& u, const ComplexMatrix& v) {
  const auto eig_u = spectrum(u).eigenvalues;
  const auto eig_v = spectrum(v).eigenvalues;
  const double margin_u = kappa_margin(u);
  const double margin_v = kappa_margin(v);
  // Scan on the larger scale so both matrices see shifts of comparable size.
  const ComplexMatrix& reference = u.norm() >= v.norm() ? u : v;
  for (auto kappa : kappa_scan_set(reference))
    if (kappa_admissible(eig_u, kappa, margin_u) && kappa_admissible(eig_v, kappa, margin_v))
      return kappa;
  throw SelectionFailed("choose_shared_kappa: no shift is admissible for both Ucal and Vcal");
}

inline PairLogRep pair_log_representation(const SecondOrderGenerator& g, cplx kappa, double t, double s) {
  if (kappa == cplx{}) throw Error("pair_log_representation: kappa must be nonzero");
  const auto n = g.dim();
  const ComplexMatrix& root = g.sqrt_acal();
  const ComplexMatrix u = evolution_U(g, t, s);
  const ComplexMatrix v = root * u;
  const ComplexMatrix shift = kappa * identity(n);

  const auto check = [](const ComplexMatrix& m, const char* which) {
    const SpectralInfo info = spectrum(m);
    if (info.min_distance_to_branch_cut < kLogGuardMargin)
      throw BranchCutViolation(std::string("pair_log_representation: ") + which +
                                   " + kappa I too close to the cut; " + describe_spectrum(info),
                               info.min_distance_to_branch_cut);
  };
  check(u + shift, "Ucal");
  check(v + shift, "Vcal");

  PairLogRep rep;
  rep.kappa = kappa;
  rep.t = t;
  rep.s = s;
  rep.alpha = logm_principal(u + shift);
  rep.hat_alpha = logm_principal(v + shift);
  rep.dalpha_dt = solve(u + shift, root * u);
  rep.dhat_alpha_dt = solve(v + shift, root * v);
  return rep;
}

inline PairLogRep pair_log_representation(const SecondOrderGenerator& g, double t, double s) {
  const ComplexMatrix u = evolution_U(g, t, s);
  return pair_log_representation(g, choose_shared_kappa(u, g.sqrt_acal() * u), t, s);
}

/// Product of the two logarithmic representations. V_first puts the Vcal
/// factor on the left, U_first the Ucal factor.
inline ComplexMatrix abstract_miura(const PairLogRep& rep, OperatorOrder order) {
  const auto factor = [&](const ComplexMatrix& a, const ComplexMatrix& da, const char* which) {
    try {
      return reconstruct_generator(LogRepresentation{rep.kappa, a, da, rep.t, rep.s});
    } catch (const SingularMatrix& e) {
      throw SingularMatrix(std::string("abstract_miura[") + to_string(order) + ", " + which +
                               " factor]: " + e.what(),
                           e.condition());
    }
  };
  const ComplexMatrix from_u = factor(rep.alpha, rep.dalpha_dt, "Ucal");
  const ComplexMatrix from_v = factor(rep.hat_alpha, rep.dhat_alpha_dt, "Vcal");
  return order == OperatorOrder::V_first ? ComplexMatrix(from_v * from_u) : ComplexMatrix(from_u * from_v);
}

/// (+R, -R) with R the principal square root of the abstract Miura product.
inline std::pair<ComplexMatrix, ComplexMatrix> sqrt_generators(const SecondOrderGenerator& g,
                                                               const PairLogRep& rep,
                                                               OperatorOrder order) {
  if (rep.alpha.rows() != g.dim()) throw Error("sqrt_generators: representation does not match generator");
  const ComplexMatrix product = abstract_miura(rep, order);
  require_sectorial(product, "sqrt_generators");
  ComplexMatrix root = sqrtm_principal(product);
  return {root, -root};
}

inline ModeDecomposition decompose_solution(const SecondOrderGenerator& g, const ComplexVector& u0,
                                            const ComplexVector& v0) {
  if (u0.size() != g.dim() || v0.size() != g.dim()) throw Error("decompose_solution: vector size mismatch");
  const ComplexVector w = solve(g.sqrt_acal(), v0);
  return {0.5 * (u0 + w), 0.5 * (u0 - w)};
}

/// exp(+(t-s) Acal^{1/2}) u_plus + exp(-(t-s) Acal^{1/2}) u_minus
inline ComplexVector two_mode_solution(const SecondOrderGenerator& g, const ModeDecomposition& modes,
                                       double t, double s) {
  const ComplexMatrix step = (t - s) * g.sqrt_acal();
  return expm(step) * modes.u_plus + expm(-step) * modes.u_minus;
}

inline constexpr double kFactorizationTolerance = 1e-9;

/// Applies (d/dt - R)(d/dt + R), R = Acal^{1/2}, to the forward and backward
/// pure-mode propagators exp(+-tR) (all columns at once, s = 0) and to their
/// sum, using analytic time derivatives. Each case reports the residual
/// relative to (1 + ||Acal||_F ||u(t)||_F).
inline Report verify_factorization(const SecondOrderGenerator& g, const std::vector<double>& t_samples) {
  const ComplexMatrix& root = g.sqrt_acal();
  const ComplexMatrix& acal = g.acal();
  Report report;
  report.command = "verify_factorization";

  const auto factored = [&](const ComplexMatrix& u, const ComplexMatrix& du, const ComplexMatrix& ddu) {
    // w = (d/dt + R) u, then (d/dt - R) w.
    const ComplexMatrix w = du + root * u;
    const ComplexMatrix dw = ddu + root * du;
    return ComplexMatrix(dw - root * w);
  };

  for (double t : t_samples) {
    const ComplexMatrix forward = expm(t * root);
    const ComplexMatrix backward = expm(-t * root);
    const ComplexMatrix d_forward = root * forward;
    const ComplexMatrix d_backward = -(root * backward);
    const ComplexMatrix dd_forward = root * d_forward;
    const ComplexMatrix dd_backward = -(root * d_backward);

    const auto scale = [&](const ComplexMatrix& u) { return 1.0 + acal.norm() * u.norm(); };
    char name[64];
    std::snprintf(name, sizeof name, "forward t=%g", t);
    report.add(name, factored(forward, d_forward, dd_forward).norm() / scale(forward), kFactorizationTolerance);
    std::snprintf(name, sizeof name, "backward t=%g", t);
    report.add(name, factored(backward, d_backward, dd_backward).norm() / scale(backward),
               kFactorizationTolerance);

    const ComplexMatrix mixed = forward + backward;
    const ComplexMatrix dd_mixed = dd_forward + dd_backward;
    std::snprintf(name, sizeof name, "mixed t=%g", t);
    report.add(name, (dd_mixed - acal * mixed).norm() / scale(mixed), kFactorizationTolerance);
  }
  return report;
}

}  // namespace miura
