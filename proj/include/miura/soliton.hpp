#pragma once

// One-dimensional laboratory for KdV, u_t - 6 u u_x + u_xxx = 0, and the
// defocusing mKdV, v_t - 6 v^2 v_x + v_xxx = 0, together with the Miura map
// u = v_x + v^2, the Cole-Hopf map v = psi_x / psi and the linear problem
// psi_xx = u psi.
//
// Periodic grids use Fourier collocation with 2/3-rule dealiasing of every
// product. Window grids (one-shot non-periodic intervals, used for kinks and
// for the exponentially growing solutions of psi_xx = u psi) use centered
// finite-difference stencils that turn one-sided at the ends.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "miura/errors.hpp"
#include "miura/fft.hpp"
#include "miura/matfun.hpp"
#include "miura/report.hpp"

namespace miura {

enum class Boundary { periodic, window };

class Grid1D {
 public:
  /// Points x_j = x_min + j L / n for j = 0..n-1; x_min defaults to -L/2.
  Grid1D(int n_points, double length, Boundary boundary = Boundary::periodic)
      : Grid1D(n_points, length, -0.5 * length, boundary) {}

  Grid1D(int n_points, double length, double x_min, Boundary boundary)
      : n_(n_points), length_(length), x_min_(x_min), boundary_(boundary) {
    if (n_points < 4 || (n_points & (n_points - 1)) != 0)
      throw Error("Grid1D: point count must be a power of two >= 4");
    if (!(length > 0.0) || !std::isfinite(length)) throw Error("Grid1D: length must be positive");
    if (!std::isfinite(x_min)) throw Error("Grid1D: x_min must be finite");
  }

  int n_points() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / n_; }
  double x_min() const { return x_min_; }
  Boundary boundary() const { return boundary_; }
  bool periodic() const { return boundary_ == Boundary::periodic; }
  double x(int j) const { return x_min_ + j * dx(); }

  /// Signed mode index of FFT slot j, in {-n/2 .. n/2 - 1}.
  int mode(int j) const { return j < n_ / 2 ? j : j - n_; }
  double wavenumber(int j) const { return 2.0 * std::numbers::pi / length_ * mode(j); }

  /// Largest retained |mode| under the 2/3 rule.
  int dealias_cutoff() const { return n_ / 3; }

  Grid1D as_window() const { return Grid1D(n_, length_, x_min_, Boundary::window); }

  bool operator==(const Grid1D& o) const {
    return n_ == o.n_ && length_ == o.length_ && x_min_ == o.x_min_ && boundary_ == o.boundary_;
  }

 private:
  int n_;
  double length_;
  double x_min_;
  Boundary boundary_;
};

struct Field {
  Grid1D grid;
  ComplexVector values;

  Field(Grid1D g, ComplexVector v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n_points()) throw Error("Field: value count does not match grid");
  }

  explicit Field(Grid1D g) : grid(g), values(ComplexVector::Zero(g.n_points())) {}

  template <class F>
  static Field sample(const Grid1D& g, F&& f) {
    Field out(g);
    for (int j = 0; j < g.n_points(); ++j) out.values(j) = f(g.x(j));
    return out;
  }

  double max_abs() const { return values.cwiseAbs().maxCoeff(); }

  /// Rectangle-rule integral of the real part (exact for trigonometric
  /// polynomials on periodic grids).
  double integral() const { return grid.dx() * values.real().sum(); }

  double integral_of_square() const { return grid.dx() * values.squaredNorm(); }
};

namespace detail {

inline void require_same_grid(const Field& a, const Field& b, const char* op) {
  if (!(a.grid == b.grid)) throw Error(std::string(op) + ": fields live on different grids");
}

inline void require_periodic(const Grid1D& g, const char* op) {
  if (!g.periodic()) throw Error(std::string(op) + ": requires a periodic grid");
}

// Fornberg's recursion for finite-difference weights. Returns the weights
// of derivative `order` at z for nodes x[0..], in units where the nodes are
// given (divide by dx^order for physical spacing).
inline std::vector<double> fornberg_weights(double z, const std::vector<double>& x, int order) {
  const int count = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(count, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < count; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(count);
  for (int i = 0; i < count; ++i) w[i] = c[i][order];
  return w;
}

/// Stencil width for window-grid derivatives and interpolation.
inline constexpr int kWindowStencil = 11;

// First node of a width-w stencil centered on index j, clamped to the grid.
inline int stencil_start(int j, int n, int width) {
  return std::clamp(j - width / 2, 0, n - width);
}

inline ComplexVector window_derivative(const Field& f, int order) {
  const int n = f.grid.n_points();
  const int width = std::min(kWindowStencil, n);
  const double scale = std::pow(f.grid.dx(), -order);
  ComplexVector out(n);
  // Weights depend only on the offset of j inside its stencil.
  std::vector<std::vector<double>> table(width);
  for (int j = 0; j < n; ++j) {
    const int start = stencil_start(j, n, width);
    const int offset = j - start;
    if (table[offset].empty()) {
      std::vector<double> nodes(width);
      for (int i = 0; i < width; ++i) nodes[i] = i;
      table[offset] = fornberg_weights(offset, nodes, order);
    }
    cplx acc{};
    for (int i = 0; i < width; ++i) acc += table[offset][i] * f.values(start + i);
    out(j) = scale * acc;
  }
  return out;
}

// Values at x_j + dx/2 for j = 0..n-2 (window grids), or j = 0..n-1 (periodic).
inline ComplexVector midpoint_values(const Field& f) {
  const Grid1D& g = f.grid;
  const int n = g.n_points();
  if (g.periodic()) {
    const auto& plan = FourierPlan::cached(n);
    ComplexVector spec = plan.forward(f.values);
    for (int j = 0; j < n; ++j) {
      if (g.mode(j) == -n / 2) spec(j) = 0.0;
      else spec(j) *= std::polar(1.0, 0.5 * g.wavenumber(j) * g.dx());
    }
    return plan.backward(spec);
  }
  const int width = std::min(kWindowStencil + 1, n);  // even width centers the midpoint
  ComplexVector out(n - 1);
  std::vector<std::vector<double>> table(width);
  for (int j = 0; j + 1 < n; ++j) {
    const int start = std::clamp(j + 1 - width / 2, 0, n - width);
    const int offset = j - start;
    if (table[offset].empty()) {
      std::vector<double> nodes(width);
      for (int i = 0; i < width; ++i) nodes[i] = i;
      table[offset] = fornberg_weights(offset + 0.5, nodes, 0);
    }
    cplx acc{};
    for (int i = 0; i < width; ++i) acc += table[offset][i] * f.values(start + i);
    out(j) = acc;
  }
  return out;
}

}  // namespace detail

/// Zeroes every mode with |m| > n/3.
inline ComplexVector dealias_spectrum(const Grid1D& g, ComplexVector spec) {
  const int cutoff = g.dealias_cutoff();
  for (int j = 0; j < g.n_points(); ++j)
    if (std::abs(g.mode(j)) > cutoff) spec(j) = 0.0;
  return spec;
}

inline Field dealias(const Field& f) {
  detail::require_periodic(f.grid, "dealias");
  const auto& plan = FourierPlan::cached(f.grid.n_points());
  return {f.grid, plan.backward(dealias_spectrum(f.grid, plan.forward(f.values)))};
}

/// d^order f / dx^order by multiplication with (ik)^order; the Nyquist mode
/// is dropped for odd orders.
inline Field spectral_derivative(const Field& f, int order) {
  detail::require_periodic(f.grid, "spectral_derivative");
  if (order < 0) throw Error("spectral_derivative: order must be nonnegative");
  const Grid1D& g = f.grid;
  const int n = g.n_points();
  const auto& plan = FourierPlan::cached(n);
  ComplexVector spec = plan.forward(f.values);
  for (int j = 0; j < n; ++j) {
    if (order % 2 == 1 && g.mode(j) == -n / 2) {
      spec(j) = 0.0;
      continue;
    }
    spec(j) *= std::pow(cplx{0.0, g.wavenumber(j)}, order);
  }
  return {g, plan.backward(spec)};
}

/// Spectral on periodic grids, finite differences on windows.
inline Field derivative(const Field& f, int order) {
  if (f.grid.periodic()) return spectral_derivative(f, order);
  return {f.grid, detail::window_derivative(f, order)};
}

/// Pointwise product; on periodic grids both factors and the result are
/// truncated by the 2/3 rule.
inline Field product(const Field& a, const Field& b) {
  detail::require_same_grid(a, b, "product");
  if (!a.grid.periodic()) return {a.grid, a.values.cwiseProduct(b.values)};
  const Field ta = dealias(a);
  const Field tb = dealias(b);
  return dealias(Field{a.grid, ta.values.cwiseProduct(tb.values)});
}

// ---------------------------------------------------------------------------
// Right-hand sides, written as u_t = N(u) - u_xxx with a conservative
// nonlinearity: N = 3 (u^2)_x for KdV and N = 2 (v^3)_x for mKdV.

enum class Equation { kdv, mkdv };

inline const char* to_string(Equation e) { return e == Equation::kdv ? "kdv" : "mkdv"; }

namespace detail {

// Fourier coefficients of the dealiased nonlinear term for field spectrum `spec`.
inline ComplexVector nonlinear_spectrum(const Grid1D& g, Equation eq, const ComplexVector& spec,
                                        ComplexVector* physical = nullptr) {
  const auto& plan = FourierPlan::cached(g.n_points());
  const ComplexVector u = plan.backward(dealias_spectrum(g, spec));
  if (physical) *physical = u;
  const ComplexVector power = eq == Equation::kdv ? ComplexVector(u.cwiseProduct(u))
                                                  : ComplexVector(u.cwiseProduct(u).cwiseProduct(u));
  ComplexVector out = dealias_spectrum(g, plan.forward(power));
  const double coefficient = eq == Equation::kdv ? 3.0 : 2.0;
  for (int j = 0; j < g.n_points(); ++j) out(j) *= cplx{0.0, coefficient * g.wavenumber(j)};
  return out;
}

inline Field rhs(const Field& u, Equation eq) {
  require_periodic(u.grid, eq == Equation::kdv ? "kdv_rhs" : "mkdv_rhs");
  const Grid1D& g = u.grid;
  const auto& plan = FourierPlan::cached(g.n_points());
  const ComplexVector spec = plan.forward(u.values);
  ComplexVector out = nonlinear_spectrum(g, eq, spec);
  for (int j = 0; j < g.n_points(); ++j) {
    if (g.mode(j) == -g.n_points() / 2) continue;
    const double k = g.wavenumber(j);
    out(j) += cplx{0.0, k * k * k} * spec(j);  // -(ik)^3 = i k^3
  }
  return {g, plan.backward(out)};
}

}  // namespace detail

/// u_t = 6 u u_x - u_xxx
inline Field kdv_rhs(const Field& u) { return detail::rhs(u, Equation::kdv); }

/// v_t = 6 v^2 v_x - v_xxx
inline Field mkdv_rhs(const Field& v) { return detail::rhs(v, Equation::mkdv); }

// ---------------------------------------------------------------------------
// Time integration: integrating-factor RK4 with the dispersive term
// propagated exactly by e^{i k^3 t}.

enum class Scheme { ifrk4 };

struct Snapshot {
  double t = 0.0;
  Field field;
};

struct PDERun {
  Equation equation = Equation::kdv;
  double dt = 1e-4;
  double t_end = 1.0;
  Scheme scheme = Scheme::ifrk4;
  /// A snapshot is stored every `snapshot_stride` steps (0: first and last only).
  int snapshot_stride = 0;
  std::vector<Snapshot> snapshots;
};

/// Imaginary-axis stability bound of classical RK4.
inline constexpr double kRk4StabilityLimit = 2.8;
inline constexpr double kBlowUpAmplitude = 1e6;

/// dt * (largest nonlinear advection rate) for the dealiased field.
inline double nonlinear_cfl(Equation eq, const Field& u, double dt) {
  const double amp = u.max_abs();
  const double kmax = 2.0 * std::numbers::pi / u.grid.length() * u.grid.dealias_cutoff();
  const double speed = 6.0 * (eq == Equation::kdv ? amp : amp * amp);
  return dt * speed * kmax;
}

inline PDERun integrate(PDERun run, const Field& u0) {
  detail::require_periodic(u0.grid, "integrate");
  if (!(run.dt > 0.0) || !(run.t_end > 0.0)) throw Error("integrate: dt and t_end must be positive");
  const double ratio = run.t_end / run.dt;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
    throw Error("integrate: t_end must be an integer multiple of dt");
  if (run.snapshot_stride < 0 || (run.snapshot_stride > 0 && steps % run.snapshot_stride != 0))
    throw Error("integrate: snapshot stride must divide the step count");
  if (!u0.values.allFinite()) throw Error("integrate: initial data has non-finite values");
  const double cfl = nonlinear_cfl(run.equation, u0, run.dt);
  if (cfl > kRk4StabilityLimit) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "integrate: nonlinear CFL number %.3g exceeds %.3g", cfl, kRk4StabilityLimit);
    throw StabilityViolation(buf);
  }

  const Grid1D& g = u0.grid;
  const int n = g.n_points();
  const auto& plan = FourierPlan::cached(n);
  ComplexVector half(n), full(n);
  for (int j = 0; j < n; ++j) {
    const double k = g.wavenumber(j);
    half(j) = std::exp(cplx{0.0, k * k * k * 0.5 * run.dt});
    full(j) = half(j) * half(j);
  }

  const auto nonlinear = [&](const ComplexVector& spec, ComplexVector* phys = nullptr) {
    return ComplexVector(run.dt * detail::nonlinear_spectrum(g, run.equation, spec, phys));
  };

  run.snapshots.clear();
  run.snapshots.push_back({0.0, u0});
  ComplexVector spec = plan.forward(u0.values);
  ComplexVector physical(n);
  for (long step = 1; step <= steps; ++step) {
    const ComplexVector a = nonlinear(spec, &physical);
    const double amp = physical.cwiseAbs().maxCoeff();
    if (!(amp <= kBlowUpAmplitude)) {
      const double t = (step - 1) * run.dt;
      char buf[96];
      std::snprintf(buf, sizeof buf, "integrate: amplitude %.3g exceeds bound at t = %.6g", amp, t);
      throw BlowUp(buf, t);
    }
    const ComplexVector b = nonlinear(half.cwiseProduct(spec + 0.5 * a));
    const ComplexVector c = nonlinear(half.cwiseProduct(spec) + 0.5 * b);
    const ComplexVector d = nonlinear(full.cwiseProduct(spec) + half.cwiseProduct(c));
    spec = full.cwiseProduct(spec) +
           (full.cwiseProduct(a) + 2.0 * half.cwiseProduct(b + c) + d) / 6.0;

    const bool last = step == steps;
    if (last || (run.snapshot_stride > 0 && step % run.snapshot_stride == 0)) {
      Field f(g, plan.backward(spec));
      if (!f.values.allFinite() || !(f.max_abs() <= kBlowUpAmplitude))
        throw BlowUp("integrate: solution blew up", step * run.dt);
      run.snapshots.push_back({step * run.dt, std::move(f)});
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Closed-form profiles.

inline constexpr double kTailTolerance = 1e-12;

namespace detail {

inline double sech(double x) { return 1.0 / std::cosh(x); }

inline void require_decayed(double left, double right, const char* op) {
  if (std::max(std::abs(left), std::abs(right)) > kTailTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: profile tail %.3g at the domain edge exceeds %.1e", op,
                  std::max(std::abs(left), std::abs(right)), kTailTolerance);
    throw DomainTooSmall(buf);
  }
}

}  // namespace detail

/// -(c/2) sech^2(sqrt(c) (x - x0) / 2), the KdV traveling wave of speed c.
inline double kdv_soliton_value(double c, double x0, double x) {
  const double s = detail::sech(0.5 * std::sqrt(c) * (x - x0));
  return -0.5 * c * s * s;
}

inline Field kdv_soliton(const Grid1D& g, double c, double x0) {
  if (!(c > 0.0)) throw Error("kdv_soliton: speed must be positive");
  detail::require_decayed(kdv_soliton_value(c, x0, g.x_min()),
                          kdv_soliton_value(c, x0, g.x_min() + g.length()), "kdv_soliton");
  return Field::sample(g, [&](double x) { return cplx{kdv_soliton_value(c, x0, x)}; });
}

/// Speed of the defocusing mKdV kink b tanh(b (x - x0 - s t)).
inline double mkdv_kink_speed(double b) { return -2.0 * b * b; }

/// b tanh(b (x - x0)) on a window grid.
inline Field mkdv_kink(const Grid1D& g, double b, double x0) {
  if (!(b > 0.0)) throw Error("mkdv_kink: amplitude must be positive");
  if (g.periodic())
    throw Error("mkdv_kink: a single kink is not periodic; use a window grid or mkdv_kink_antikink");
  return Field::sample(g, [&](double x) { return cplx{b * std::tanh(b * (x - x0))}; });
}

/// b [tanh(b (x - x1)) - tanh(b (x - x2))] - b: a kink at x1 and an antikink
/// at x2 > x1 on the background -b, compatible with periodicity.
inline Field mkdv_kink_antikink(const Grid1D& g, double b, double x1, double x2) {
  if (!(b > 0.0)) throw Error("mkdv_kink_antikink: amplitude must be positive");
  if (!(x1 < x2)) throw Error("mkdv_kink_antikink: kink must lie left of the antikink");
  const auto value = [&](double x) { return b * (std::tanh(b * (x - x1)) - std::tanh(b * (x - x2))) - b; };
  detail::require_decayed(value(g.x_min()) + b, value(g.x_min() + g.length()) + b, "mkdv_kink_antikink");
  return Field::sample(g, [&](double x) { return cplx{value(x)}; });
}

// ---------------------------------------------------------------------------
// Transforms.

/// u = v_x + v^2
inline Field miura_transform(const Field& v) {
  const Field dv = derivative(v, 1);
  const Field sq = product(v, v);
  return {v.grid, dv.values + sq.values};
}

inline constexpr double kNearZeroPsi = 1e-8;

/// v = psi_x / psi
inline Field cole_hopf(const Field& psi) {
  const double biggest = psi.max_abs();
  for (int j = 0; j < psi.grid.n_points(); ++j) {
    if (!(std::abs(psi.values(j)) >= kNearZeroPsi * biggest) || biggest == 0.0) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "cole_hopf: psi nearly vanishes at index %d (x = %.6g)", j, psi.grid.x(j));
      throw NearZeroPsi(buf, static_cast<std::size_t>(j), psi.grid.x(j));
    }
  }
  const Field dpsi = derivative(psi, 1);
  return {psi.grid, dpsi.values.cwiseQuotient(psi.values)};
}

inline constexpr double kLinearBlowUp = 1e100;

/// Integrates psi'' = u psi from the left edge with classical RK4, step dx.
/// Values of u between grid points come from spectral (periodic) or
/// high-order polynomial (window) interpolation. The result lives on the
/// window version of u's grid since psi is generally not periodic.
inline Field solve_linear_x(const Field& u, cplx psi0, cplx dpsi0) {
  const Grid1D window = u.grid.as_window();
  const int n = window.n_points();
  const double h = window.dx();
  const ComplexVector mid = detail::midpoint_values(u);
  Field psi(window);
  cplx y = psi0, dy = dpsi0;
  psi.values(0) = y;
  for (int j = 0; j + 1 < n; ++j) {
    const cplx u0 = u.values(j), um = mid(j), u1 = u.values(j + 1);
    const cplx k1y = dy, k1d = u0 * y;
    const cplx k2y = dy + 0.5 * h * k1d, k2d = um * (y + 0.5 * h * k1y);
    const cplx k3y = dy + 0.5 * h * k2d, k3d = um * (y + 0.5 * h * k2y);
    const cplx k4y = dy + h * k3d, k4d = u1 * (y + h * k3y);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    if (!(std::abs(y) <= kLinearBlowUp)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "solve_linear_x: psi exceeds 1e100 at x = %.6g", window.x(j + 1));
      throw BlowUp(buf, window.x(j + 1));
    }
    psi.values(j + 1) = y;
  }
  return psi;
}

inline double linf(const ComplexVector& r) { return r.size() ? r.cwiseAbs().maxCoeff() : 0.0; }

inline double l2(const ComplexVector& r, double dx) { return std::sqrt(dx * r.squaredNorm()); }

/// ||v_x + v^2 - u|| in the max and L2 norms.
inline Report riccati_residual(const Field& u, const Field& v, double tolerance = 1e-6) {
  detail::require_same_grid(u, v, "riccati_residual");
  const ComplexVector r = miura_transform(v).values - u.values;
  Report report;
  report.command = "riccati_residual";
  report.add("linf", linf(r), tolerance);
  report.add("l2", l2(r, u.grid.dx()), tolerance);
  return report;
}

/// Compares (log psi)_xx against psi_xx / psi - (psi_x / psi)^2.
inline Report hirota_identity_residual(const Field& psi, double tolerance = 1e-7) {
  const double biggest = psi.values.real().cwiseAbs().maxCoeff();
  for (int j = 0; j < psi.grid.n_points(); ++j) {
    const cplx p = psi.values(j);
    if (!(p.real() > 0.0) || std::abs(p.imag()) > 1e-12 * biggest)
      throw NonPositivePsi("hirota_identity_residual: psi must be positive real on the grid");
  }
  Field log_psi(psi.grid);
  for (int j = 0; j < psi.grid.n_points(); ++j) log_psi.values(j) = std::log(psi.values(j).real());
  const ComplexVector lhs = derivative(log_psi, 2).values;
  const ComplexVector d1 = derivative(psi, 1).values.cwiseQuotient(psi.values);
  const ComplexVector d2 = derivative(psi, 2).values.cwiseQuotient(psi.values);
  const ComplexVector r = lhs - (d2 - d1.cwiseProduct(d1));
  Report report;
  report.command = "hirota_identity_residual";
  report.add("linf", linf(r), tolerance);
  report.add("l2", l2(r, psi.grid.dx()), tolerance);
  return report;
}

// ---------------------------------------------------------------------------
// Miura image of an mKdV run measured against KdV.

/// Fourth-order central difference in time over uniformly spaced snapshots.
inline ComplexVector snapshot_time_derivative(const std::vector<Snapshot>& s, std::size_t j, double spacing) {
  return (s[j - 2].field.values - 8.0 * s[j - 1].field.values + 8.0 * s[j + 1].field.values -
          s[j + 2].field.values) /
         (12.0 * spacing);
}

/// For each interior snapshot of an mKdV run, the max-norm KdV residual of
/// u = v_x + v^2 with u_t taken from the snapshot sequence.
inline Report miura_maps_solutions(const PDERun& run_v, double tolerance = 1e-5) {
  if (run_v.equation != Equation::mkdv) throw Error("miura_maps_solutions: run must solve mKdV");
  const auto& snaps = run_v.snapshots;
  if (snaps.size() < 5) throw InsufficientSnapshots("miura_maps_solutions: need at least 5 snapshots");
  const double spacing = snaps[1].t - snaps[0].t;
  for (std::size_t j = 1; j < snaps.size(); ++j)
    if (std::abs((snaps[j].t - snaps[j - 1].t) - spacing) > 1e-9 * spacing)
      throw InsufficientSnapshots("miura_maps_solutions: snapshots are not uniformly spaced");

  std::vector<Snapshot> images;
  images.reserve(snaps.size());
  for (const auto& s : snaps) images.push_back({s.t, miura_transform(s.field)});

  Report report;
  report.command = "miura_maps_solutions";
  for (std::size_t j = 2; j + 2 < images.size(); ++j) {
    const ComplexVector dudt = snapshot_time_derivative(images, j, spacing);
    const ComplexVector r = dudt - kdv_rhs(images[j].field).values;
    char name[48];
    std::snprintf(name, sizeof name, "kdv residual t=%.6f", images[j].t);
    report.add(name, linf(r), tolerance);
  }
  return report;
}

}  // namespace miura
