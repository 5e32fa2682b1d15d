#pragma once

// Dense complex matrix functions: exponential, principal logarithm,
// principal square root, contour-integral evaluation and the linear solves
// every other part of the library is built on.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "miura/errors.hpp"

namespace miura {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

inline double frobenius(const ComplexMatrix& m) { return m.norm(); }

/// ||a - b||_F / (1 + ||b||_F), the relative measure used by every contract.
inline double relative_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).norm() / (1.0 + b.norm());
}

inline double norm1(const ComplexMatrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

inline bool is_diagonal(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != cplx{}) return false;
  return true;
}

namespace detail {

inline void require_square_finite(const ComplexMatrix& m, const char* op) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(std::string(op) + ": matrix must be square and non-empty");
  if (!all_finite(m)) throw Error(std::string(op) + ": matrix has non-finite entries");
}

}  // namespace detail

/// Distance from z to the closed ray (-inf, 0].
inline double distance_to_branch_cut(cplx z) {
  return z.real() >= 0.0 ? std::abs(z) : std::abs(z.imag());
}

struct SpectralInfo {
  std::vector<cplx> eigenvalues;
  double min_distance_to_branch_cut = 0.0;
  /// 2-norm condition number of the computed eigenvector basis; infinite
  /// when the basis is numerically singular (defective matrix).
  double condition_estimate = 0.0;

  bool touches_branch_cut() const { return min_distance_to_branch_cut == 0.0; }
};

inline SpectralInfo spectrum(const ComplexMatrix& m) {
  detail::require_square_finite(m, "spectrum");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) throw NonConvergence("spectrum: eigensolver did not converge");

  SpectralInfo info;
  info.eigenvalues.assign(solver.eigenvalues().begin(), solver.eigenvalues().end());
  info.min_distance_to_branch_cut = std::numeric_limits<double>::infinity();
  for (auto lambda : info.eigenvalues)
    info.min_distance_to_branch_cut =
        std::min(info.min_distance_to_branch_cut, distance_to_branch_cut(lambda));

  Eigen::JacobiSVD<ComplexMatrix> svd(solver.eigenvectors());
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  info.condition_estimate =
      smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
  return info;
}

inline std::string describe_spectrum(const SpectralInfo& info) {
  std::ostringstream os;
  os.precision(6);
  os << "spectrum {";
  for (std::size_t i = 0; i < info.eigenvalues.size(); ++i)
    os << (i ? ", " : "") << info.eigenvalues[i].real() << (info.eigenvalues[i].imag() < 0 ? "" : "+")
       << info.eigenvalues[i].imag() << "i";
  os << "}, distance to cut " << info.min_distance_to_branch_cut;
  return os.str();
}

/// Reciprocal condition threshold below which a system is treated as singular.
inline constexpr double kSingularCondition = 1e12;

/// Solves M X = B by partial-pivot LU. Throws SingularMatrix when the 1-norm
/// condition estimate exceeds kSingularCondition.
inline ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& b) {
  detail::require_square_finite(m, "solve");
  if (b.rows() != m.rows()) throw Error("solve: right-hand side has wrong row count");
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  const double rcond = lu.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond <= kSingularCondition)) {
    std::ostringstream os;
    os << "solve: matrix is singular to working precision (condition estimate " << cond << ")";
    throw SingularMatrix(os.str(), cond);
  }
  ComplexMatrix x = lu.solve(b);
  if (!all_finite(x)) throw SingularMatrix("solve: non-finite solution", cond);
  return x;
}

inline ComplexMatrix inverse(const ComplexMatrix& m) { return solve(m, identity(m.rows())); }

// ---------------------------------------------------------------------------
// Exponential: scaling and squaring around diagonal Pade approximants of
// degree 3, 5, 7, 9 or 13, selected by 1-norm thresholds.

namespace detail {

inline constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
inline constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
inline constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                                 25200.0,    1512.0,    56.0,      1.0};
inline constexpr std::array<double, 10> kPade9 = {
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0,     110880.0,     3960.0,       90.0,        1.0};
inline constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Largest 1-norm for which the degree-m approximant meets unit roundoff.
inline constexpr double kTheta3 = 1.495585217958292e-2;
inline constexpr double kTheta5 = 2.539398330063230e-1;
inline constexpr double kTheta7 = 9.504178996162932e-1;
inline constexpr double kTheta9 = 2.097847961257068e0;
inline constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
ComplexMatrix pade_low_degree(const ComplexMatrix& a, const std::array<double, N>& b) {
  const auto n = a.rows();
  const ComplexMatrix a2 = a * a;
  ComplexMatrix even_power = identity(n);
  ComplexMatrix u_sum = ComplexMatrix::Zero(n, n);
  ComplexMatrix v = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j + 1 < N; j += 2) {
    v += b[j] * even_power;
    u_sum += b[j + 1] * even_power;
    if (j + 2 < N) even_power = even_power * a2;
  }
  const ComplexMatrix u = a * u_sum;
  return solve(v - u, v + u);
}

inline ComplexMatrix pade13(const ComplexMatrix& a) {
  const auto& b = kPade13;
  const auto n = a.rows();
  const ComplexMatrix id = identity(n);
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;
  const ComplexMatrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const ComplexMatrix v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return solve(v - u, v + u);
}

}  // namespace detail

inline ComplexMatrix expm(const ComplexMatrix& a) {
  detail::require_square_finite(a, "expm");
  if (is_diagonal(a)) {
    ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, i) = std::exp(a(i, i));
    if (!all_finite(out)) throw Overflow("expm: result overflows double precision");
    return out;
  }

  const double norm = norm1(a);
  if (norm <= detail::kTheta3) return detail::pade_low_degree(a, detail::kPade3);
  if (norm <= detail::kTheta5) return detail::pade_low_degree(a, detail::kPade5);
  if (norm <= detail::kTheta7) return detail::pade_low_degree(a, detail::kPade7);
  if (norm <= detail::kTheta9) return detail::pade_low_degree(a, detail::kPade9);

  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / detail::kTheta13))));
  // e^{||A||} beyond this cannot be represented whatever the matrix structure.
  if (squarings > 64) throw Overflow("expm: norm too large for the scaling policy");
  ComplexMatrix result = detail::pade13(a / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!all_finite(result)) throw Overflow("expm: result overflows double precision");
  return result;
}

// ---------------------------------------------------------------------------
// Principal square root: product-form Denman-Beavers iteration with
// determinant scaling.

struct SqrtIterationPolicy {
  double tolerance = 1e-13;
  int max_iterations = 60;
};

namespace detail {

// Spectrum distance below this (relative to 1 + ||M||_F) counts as on the cut.
inline constexpr double kCutTouch = 1e-14;

inline void require_off_branch_cut(const ComplexMatrix& m, const char* op) {
  const SpectralInfo info = spectrum(m);
  if (info.min_distance_to_branch_cut <= kCutTouch * (1.0 + m.norm()))
    throw BranchCutViolation(std::string(op) + ": " + describe_spectrum(info) +
                                 "; choose a different shift",
                             info.min_distance_to_branch_cut);
}

inline ComplexMatrix denman_beavers(const ComplexMatrix& a, const SqrtIterationPolicy& policy) {
  const auto n = a.rows();
  const ComplexMatrix id = identity(n);
  ComplexMatrix m = a;
  ComplexMatrix y = a;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < policy.max_iterations; ++k) {
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    const ComplexMatrix m_inv = lu.inverse();
    if (!all_finite(m_inv)) throw NonConvergence("sqrtm: iterate became singular");

    // Scaling is only worthwhile far from convergence.
    double mu = 1.0;
    if ((m - id).norm() > 1e-2) {
      double log_abs_det = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) log_abs_det += std::log(std::abs(lu.matrixLU()(i, i)));
      mu = std::exp(-log_abs_det / (2.0 * static_cast<double>(n)));
    }
    const double mu2 = mu * mu;
    y = 0.5 * mu * y * (id + m_inv / mu2);
    m = 0.5 * (id + 0.5 * (mu2 * m + m_inv / mu2));

    const double residual = (m - id).norm();
    if (residual <= policy.tolerance) return y;
    // Rounding floor reached: the iterate no longer improves.
    if (residual < 1e-10 && residual >= previous) return y;
    previous = residual;
  }
  throw NonConvergence("sqrtm: Denman-Beavers iteration did not converge");
}

}  // namespace detail

inline ComplexMatrix sqrtm_principal(const ComplexMatrix& m, const SqrtIterationPolicy& policy = {}) {
  detail::require_square_finite(m, "sqrtm_principal");
  if (is_diagonal(m)) {
    ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (distance_to_branch_cut(m(i, i)) == 0.0)
        throw BranchCutViolation("sqrtm_principal: diagonal entry on (-inf, 0]", 0.0);
      out(i, i) = std::sqrt(m(i, i));
    }
    return out;
  }
  detail::require_off_branch_cut(m, "sqrtm_principal");
  return detail::denman_beavers(m, policy);
}

// ---------------------------------------------------------------------------
// Principal logarithm: inverse scaling and squaring. Square roots are taken
// until the argument is within kLogSeriesRadius of I, then log(I + Y) is
// evaluated by Gauss-Legendre quadrature of Y (I + tY)^{-1} over [0, 1],
// which is the diagonal Pade approximant of matching degree.

namespace detail {

inline constexpr double kLogSeriesRadius = 0.25;
inline constexpr int kMaxSquareRoots = 64;

// 8-point Gauss-Legendre rule on [-1, 1], positive half.
inline constexpr std::array<double, 4> kGaussNodes = {0.1834346424956498, 0.5255324099163290,
                                                      0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGaussWeights = {0.3626837833783620, 0.3137066458778873,
                                                        0.2223810344533745, 0.1012285362903763};

inline ComplexMatrix log_near_identity(const ComplexMatrix& y) {
  const auto n = y.rows();
  const ComplexMatrix id = identity(n);
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j < kGaussNodes.size(); ++j) {
    for (double sign : {-1.0, 1.0}) {
      const double node = 0.5 * (1.0 + sign * kGaussNodes[j]);
      const double weight = 0.5 * kGaussWeights[j];
      sum += weight * solve(id + node * y, y);
    }
  }
  return sum;
}

}  // namespace detail

inline ComplexMatrix logm_principal(const ComplexMatrix& m, const SqrtIterationPolicy& policy = {}) {
  detail::require_square_finite(m, "logm_principal");
  if (is_diagonal(m)) {
    ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (distance_to_branch_cut(m(i, i)) == 0.0)
        throw BranchCutViolation("logm_principal: diagonal entry on (-inf, 0]", 0.0);
      out(i, i) = std::log(m(i, i));
    }
    return out;
  }
  detail::require_off_branch_cut(m, "logm_principal");

  const ComplexMatrix id = identity(m.rows());
  ComplexMatrix x = m;
  int roots = 0;
  while (norm1(x - id) > detail::kLogSeriesRadius) {
    if (++roots > detail::kMaxSquareRoots) throw NonConvergence("logm_principal: too many square roots");
    x = detail::denman_beavers(x, policy);
  }
  return std::ldexp(1.0, roots) * detail::log_near_identity(x - id);
}

// ---------------------------------------------------------------------------
// Riesz-Dunford (Cauchy) integral on a circle, trapezoidal rule.

enum class ScalarFunction { exp, log, sqrt };

inline cplx evaluate(ScalarFunction f, cplx z) {
  switch (f) {
    case ScalarFunction::exp: return std::exp(z);
    case ScalarFunction::log: return std::log(z);
    case ScalarFunction::sqrt: return std::sqrt(z);
  }
  return {};
}

inline bool has_branch_cut(ScalarFunction f) { return f != ScalarFunction::exp; }

struct Contour {
  cplx center{};
  double radius = 1.0;
  int node_count = 64;
};

/// Relative clearance every eigenvalue must keep from the contour.
inline constexpr double kContourGuard = 1e-3;

/// (1 / 2 pi i) * integral over the circle of f(z) (zI - M)^{-1} dz.
inline ComplexMatrix riesz_dunford(ScalarFunction f, const ComplexMatrix& m, const Contour& contour) {
  detail::require_square_finite(m, "riesz_dunford");
  if (!(contour.radius > 0.0) || contour.node_count <= 0)
    throw ContourViolation("riesz_dunford: radius and node count must be positive");
  if (has_branch_cut(f) && distance_to_branch_cut(contour.center) <= contour.radius)
    throw ContourViolation("riesz_dunford: contour meets the branch cut (-inf, 0]");

  const SpectralInfo info = spectrum(m);
  for (auto lambda : info.eigenvalues) {
    if (std::abs(lambda - contour.center) > contour.radius * (1.0 - kContourGuard)) {
      std::ostringstream os;
      os << "riesz_dunford: eigenvalue " << lambda << " is not strictly inside the contour";
      throw ContourViolation(os.str());
    }
  }

  const auto n = m.rows();
  const ComplexMatrix id = identity(n);
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  const int nodes = contour.node_count;
  for (int j = 0; j < nodes; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / nodes;
    const cplx direction = std::polar(1.0, theta);
    const cplx z = contour.center + contour.radius * direction;
    // dz / (2 pi i) = r e^{i theta} d(theta) / (2 pi)
    sum += (evaluate(f, z) * contour.radius * direction) * solve(z * id - m, id);
  }
  return sum / static_cast<double>(nodes);
}

/// Picks a circle around the spectrum of M that keeps clear of the branch cut
/// of f, with enough nodes for the trapezoidal error to fall below 1e-16.
inline Contour fit_contour(ScalarFunction f, const ComplexMatrix& m) {
  const SpectralInfo info = spectrum(m);
  double re_lo = std::numeric_limits<double>::infinity(), re_hi = -re_lo;
  double im_lo = re_lo, im_hi = -re_lo;
  for (auto lambda : info.eigenvalues) {
    re_lo = std::min(re_lo, lambda.real());
    re_hi = std::max(re_hi, lambda.real());
    im_lo = std::min(im_lo, lambda.imag());
    im_hi = std::max(im_hi, lambda.imag());
  }
  Contour contour;
  contour.center = {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)};
  double spread = 0.0;
  for (auto lambda : info.eigenvalues) spread = std::max(spread, std::abs(lambda - contour.center));

  double ratio = 0.0;  // geometric convergence factor of the trapezoidal rule
  if (has_branch_cut(f)) {
    const double clearance = distance_to_branch_cut(contour.center);
    if (spread >= clearance)
      throw ContourViolation("fit_contour: no circle separates the spectrum from the branch cut");
    contour.radius = std::sqrt(std::max(spread, 1e-3 * clearance) * clearance);
    ratio = std::max(spread / contour.radius, contour.radius / clearance);
  } else {
    contour.radius = std::max(2.0 * spread, 1.0);
    ratio = spread / contour.radius;
  }
  int nodes = 16;
  if (ratio > 0.0) nodes = std::max(nodes, static_cast<int>(std::ceil(std::log(1e-16) / std::log(ratio))));
  contour.node_count = std::min(nodes, 4096);
  return contour;
}

}  // namespace miura
