#pragma once

// Analytical solution path: the solution kernels P and Q are inverse Laplace
// transforms of
//
//   P~(x, s) = (1/2) sqrt(Phi(s)/s) exp(-|x| sqrt(s Phi(s)))
//   Q~(x, s) = (1/2) sgn(x) exp(-|x| sqrt(s Phi(s)))
//
// evaluated as real integrals along a contour that wraps the cut (-inf, 0].
// With the contour collapsed onto the two lips of the cut the integrals take
// the classical form
//
//   P = 1/(2 pi) int_0^inf Re(sqrt(Phi+) e^{-i|x| sqrt(p Phi+)}) e^{-pt} / sqrt(p) dp
//   Q = -sgn(x)/(2 pi) int_0^inf Im(e^{-i|x| sqrt(p Phi+)}) e^{-pt} dp
//
// but there the factor e^{-i|x| sqrt(p Phi+)} grows like exp(c |x| p^{(1+a_N)/2})
// and the result is left to cancellation. The default contour is rotated to
// s = r e^{+-i theta(r)} with Re sqrt(s Phi(s)) >= 0 along it, so both factors
// decay. Temperature and flux for a given initial profile are spatial
// convolutions with the kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fracheat/constitutive.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat {

enum class ContourKind {
  rotated,     ///< rays r e^{+-i theta(r)} inside the cut plane
  branch_cut,  ///< the two lips of (-inf, 0], theta = pi
};

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  /// The contour is truncated once the integrand envelope drops below
  /// exp(-decay_exponent); on the cut this is p_max = decay_exponent / t.
  double decay_exponent = 40.0;
  std::size_t max_panels = 20000;
  bool substitute_endpoint = true;  ///< integrate in u with r = u^2
  ContourKind contour = ContourKind::rotated;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be positive");
    if (!(decay_exponent >= 30.0)) throw std::invalid_argument("decay exponent must be at least 30");
    if (max_panels < 1) throw std::invalid_argument("max_panels must be positive");
  }
};

struct Dirac {
  double amplitude = 1.0;
};

/// T_0/(2 sqrt(pi eps)) exp(-x^2/(4 eps)), a unit-mass Gaussian of variance 2 eps.
struct Gaussian {
  double amplitude = 1.0;
  double epsilon = 5e-4;

  double operator()(double x) const {
    return amplitude / (2.0 * std::sqrt(std::numbers::pi * epsilon)) * std::exp(-x * x / (4.0 * epsilon));
  }
  double standard_deviation() const { return std::sqrt(2.0 * epsilon); }
};

using InitialCondition = std::variant<Dirac, Gaussian>;

inline void validate(const InitialCondition& ic) {
  std::visit(
      [](const auto& c) {
        if (!std::isfinite(c.amplitude)) throw std::invalid_argument("initial amplitude must be finite");
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, Gaussian>)
          if (!(c.epsilon > 0.0)) throw std::invalid_argument("Gaussian width epsilon must be positive");
      },
      ic);
}

struct Snapshot {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> T;
  std::vector<double> q;
};

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// ---------------------------------------------------------------------------
// Laplace-domain kernels

struct LaplaceKernel {
  Complex P;
  Complex Q;
};

inline LaplaceKernel laplace_kernel(const ConstitutiveModel& model, double x, Complex s) {
  if (!(s.real() > 0.0)) throw std::domain_error("Laplace kernels are defined for Re s > 0");
  const Complex f = phi(model, s);
  const Complex root = std::sqrt(s * f);
  const Complex decay = std::exp(-std::abs(x) * root);
  return {0.5 * std::sqrt(f / s) * decay, 0.5 * decay * sgn(x)};
}

// ---------------------------------------------------------------------------
// Contour geometry

namespace detail {

struct ContourPoint {
  Complex s;       ///< point on the upper half of the contour
  Complex ds_dr;   ///< derivative along the radial parameter
  Complex root;    ///< sqrt(s Phi(s)) continued from Re s > 0
  Complex sqrt_phi;
};

class Contour {
 public:
  Contour(const ConstitutiveModel& model, ContourKind kind) : model_(model), kind_(kind) {
    if (model.is<ClassicalCattaneo>() && std::get<ClassicalCattaneo>(model.law()).tau > 0.0)
      throw std::invalid_argument("kernels of the first-order Cattaneo law carry a delta wavefront");
    power_type_ = model.is<PowerType>();
    const double top = model.highest_order();
    // Midway between pi/2 (decay of e^{st}) and pi/(1 + a_N) (Re sqrt(s Phi) >= 0).
    fixed_offset_ = 0.5 * (std::numbers::pi / (1.0 + top) - 0.5 * std::numbers::pi);
  }

  ContourPoint at(double r) const {
    ContourPoint pt;
    if (kind_ == ContourKind::branch_cut) {
      pt.s = Complex{-r, 0.0};
      pt.ds_dr = Complex{-1.0, 0.0};
      pt.sqrt_phi = std::sqrt(phi_pm(model_, r, Lip::upper));
      pt.root = Complex{0.0, std::sqrt(r)} * pt.sqrt_phi;
      return pt;
    }
    const double theta = angle(r);
    const Complex dir = std::polar(1.0, theta);
    pt.s = r * dir;
    pt.ds_dr = dir * Complex{1.0, r * angle_derivative(r)};
    pt.sqrt_phi = std::sqrt(phi_unchecked(model_, pt.s));
    pt.root = std::polar(std::sqrt(r), 0.5 * theta) * pt.sqrt_phi;
    return pt;
  }

  double angle(double r) const {
    if (kind_ == ContourKind::branch_cut) return std::numbers::pi;
    if (power_type_) return 0.5 * std::numbers::pi + power_offset / (1.0 + std::log1p(r));
    return 0.5 * std::numbers::pi + fixed_offset_;
  }

  double angle_derivative(double r) const {
    if (kind_ == ContourKind::branch_cut || !power_type_) return 0.0;
    const double d = 1.0 + std::log1p(r);
    return -power_offset / (d * d * (1.0 + r));
  }

  ContourKind kind() const { return kind_; }

  static constexpr double power_offset = std::numbers::pi / 6.0;

 private:
  const ConstitutiveModel& model_;
  ContourKind kind_;
  bool power_type_ = false;
  double fixed_offset_ = 0.0;
};

// Real part of the exponent s t - |x| root; the integrand envelope.
inline double envelope_exponent(const ContourPoint& pt, double ax, double t) {
  return (pt.s * t - ax * pt.root).real();
}

inline double phase(const ContourPoint& pt, double ax, double t) { return (pt.s * t - ax * pt.root).imag(); }

// Combined integrand of the cut form of P at p; the two conjugate lips sum to
// a real number.
inline Complex cut_pair_integrand(const ConstitutiveModel& model, double x, double p) {
  const Complex up = std::sqrt(phi_pm(model, p, Lip::upper));
  const Complex lo = std::sqrt(phi_pm(model, p, Lip::lower));
  const double ax = std::abs(x);
  const double sp = std::sqrt(p);
  return up * std::exp(Complex{0.0, -1.0} * ax * sp * up) + lo * std::exp(Complex{0.0, 1.0} * ax * sp * lo);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Time-domain kernels

struct KernelValues {
  double P = 0.0;
  double Q = 0.0;
  double P_error = 0.0;
  double Q_error = 0.0;
  std::size_t panels = 0;
};

/// Evaluates P(x, t) and Q(x, t) with one contour quadrature.
inline KernelValues kernel_pair(const ConstitutiveModel& model, double x, double t, const QuadratureConfig& cfg = {}) {
  if (!(t > 0.0)) throw std::domain_error("kernels need t > 0");
  cfg.validate();
  const detail::Contour contour(model, cfg.contour);
  const double ax = std::abs(x);

  // Truncation radius.
  double r_max;
  if (cfg.contour == ContourKind::branch_cut) {
    r_max = cfg.decay_exponent / t;
  } else {
    r_max = 1.0 / t;
    for (int guard = 0; guard < 200; ++guard) {
      if (detail::envelope_exponent(contour.at(r_max), ax, t) < -cfg.decay_exponent) break;
      r_max *= 2.0;
    }
  }

  const bool subst = cfg.substitute_endpoint;
  const double upper = subst ? std::sqrt(r_max) : r_max;

  auto to_r = [subst](double u) { return subst ? u * u : u; };

  // Initial panels: bisect until the phase advances by less than pi per panel.
  std::vector<double> breaks;
  {
    const int initial = 16;
    std::function<void(double, double, double, double, int)> split = [&](double a, double b, double pa, double pb,
                                                                          int depth) {
      if (std::abs(pb - pa) <= std::numbers::pi || depth > 24) {
        breaks.push_back(b);
        return;
      }
      const double m = 0.5 * (a + b);
      const double pm = detail::phase(contour.at(to_r(m)), ax, t);
      split(a, m, pa, pm, depth + 1);
      split(m, b, pm, pb, depth + 1);
    };
    breaks.push_back(0.0);
    double prev_u = 0.0;
    double prev_phase = 0.0;
    for (int i = 1; i <= initial; ++i) {
      const double u = upper * static_cast<double>(i) / initial;
      const double ph = detail::phase(contour.at(to_r(u)), ax, t);
      split(prev_u, u, prev_phase, ph, 0);
      prev_u = u;
      prev_phase = ph;
    }
  }

  const double sign_x = sgn(x);
  auto integrand = [&](double u) -> std::array<double, 2> {
    const double r = to_r(u);
    const double jac = subst ? 2.0 * u : 1.0;
    // With r = u^2 the r^{-1/2} endpoint of P is cancelled by the Jacobian;
    // GK15 never samples the endpoint itself.
    if (r == 0.0) return {0.0, 0.0};
    const detail::ContourPoint pt = contour.at(r);
    const Complex e = std::exp(pt.s * t - ax * pt.root) * pt.ds_dr;
    const Complex p_val = e * pt.root / (2.0 * pt.s);
    const Complex q_val = 0.5 * e;
    return {p_val.imag() * jac / std::numbers::pi, sign_x * q_val.imag() * jac / std::numbers::pi};
  };

  AdaptiveOptions opt{cfg.rel_tol, cfg.abs_tol, cfg.max_panels};
  const auto res = integrate_adaptive<2>(integrand, breaks, opt);
  if (!res.converged || !std::isfinite(res.value[0]) || !std::isfinite(res.value[1])) {
    const double est = std::max(res.error[0], res.error[1]);
    throw NumericalError("kernel quadrature did not converge at x = " + std::to_string(x) +
                             ", t = " + std::to_string(t) + " (error estimate " + std::to_string(est) + ")",
                         est);
  }
  return {res.value[0], res.value[1], res.error[0], res.error[1], res.panels};
}

inline double kernel_P(const ConstitutiveModel& model, double x, double t, const QuadratureConfig& cfg = {}) {
  return kernel_pair(model, x, t, cfg).P;
}

inline double kernel_Q(const ConstitutiveModel& model, double x, double t, const QuadratureConfig& cfg = {}) {
  if (x == 0.0) {
    if (!(t > 0.0)) throw std::domain_error("kernels need t > 0");
    return 0.0;
  }
  return kernel_pair(model, x, t, cfg).Q;
}

// ---------------------------------------------------------------------------
// Responses to initial temperature profiles

namespace detail {

// End weights of the fourth-order Gregory rule on a half-line starting at a
// node; applied on both sides of y = 0 where the kernels have their cusp.
inline double gregory_weight(std::size_t k) {
  switch (k) {
    case 0:
      return 0.75;  // 3/8 from each side
    case 1:
      return 7.0 / 6.0;
    case 2:
      return 23.0 / 24.0;
    default:
      return 1.0;
  }
}

inline void require_increasing(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("response grid is empty");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("response grid must be strictly increasing");
}

}  // namespace detail

struct ResponseOptions {
  QuadratureConfig quadrature;
  std::size_t threads = 1;
  /// Convolution step; zero selects min(grid spacing, sigma/8).
  double convolution_step = 0.0;
};

/// Kernels sampled on y_k = k h, k = 0..K; negative y follow by symmetry.
struct KernelTable {
  double t = 0.0;
  double step = 0.0;
  std::vector<double> P;
  std::vector<double> Q;
};

inline KernelTable kernel_table(const ConstitutiveModel& model, double t, double step, std::size_t count,
                                const ResponseOptions& opt) {
  KernelTable table{t, step, std::vector<double>(count), std::vector<double>(count)};
  parallel_for(count, opt.threads, [&](std::size_t k) {
    const auto v = kernel_pair(model, static_cast<double>(k) * step, t, opt.quadrature);
    table.P[k] = v.P;
    table.Q[k] = k == 0 ? 0.0 : v.Q;
  });
  return table;
}

/// T = T_0 *_x P and q = T_0 *_x Q on the grid x at time t.
inline Snapshot analytic_response(const ConstitutiveModel& model, const InitialCondition& ic,
                                  std::span<const double> x, double t, const ResponseOptions& opt = {}) {
  if (!(t > 0.0)) throw std::domain_error("analytic response needs t > 0");
  validate(ic);
  detail::require_increasing(x);
  Snapshot snap{t, std::vector<double>(x.begin(), x.end()), std::vector<double>(x.size()),
                std::vector<double>(x.size())};

  if (const auto* d = std::get_if<Dirac>(&ic)) {
    parallel_for(x.size(), opt.threads, [&](std::size_t j) {
      const auto v = kernel_pair(model, x[j], t, opt.quadrature);
      snap.T[j] = d->amplitude * v.P;
      snap.q[j] = x[j] == 0.0 ? 0.0 : d->amplitude * v.Q;
    });
    return snap;
  }

  const auto& g = std::get<Gaussian>(ic);
  const double sigma = g.standard_deviation();
  const double reach = 8.0 * sigma;
  double h = opt.convolution_step;
  if (h <= 0.0) {
    h = sigma / 8.0;
    if (x.size() > 1) h = std::min(h, (x.back() - x.front()) / static_cast<double>(x.size() - 1));
  }
  const double extent = std::max(std::abs(x.front()), std::abs(x.back())) + reach;
  const auto count = static_cast<std::size_t>(std::ceil(extent / h)) + 1;
  const KernelTable table = kernel_table(model, t, h, count, opt);

  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    const auto k_lo = static_cast<std::int64_t>(std::ceil((xj - reach) / h));
    const auto k_hi = static_cast<std::int64_t>(std::floor((xj + reach) / h));
    double sum_t = 0.0;
    double sum_q = 0.0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      const auto ak = static_cast<std::size_t>(k < 0 ? -k : k);
      const double w = detail::gregory_weight(ak) * g(xj - static_cast<double>(k) * h);
      sum_t += w * table.P[ak];
      sum_q += (k < 0 ? -w : w) * table.Q[ak];
    }
    snap.T[j] = h * sum_t;
    snap.q[j] = h * sum_q;
  }
  return snap;
}

// ---------------------------------------------------------------------------
// Branch and zero checks for s Phi(s)

struct BranchReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  ///< smallest Im(s Phi)/|s Phi| (or Re on the real axis)
  Complex worst_point{};
  bool passed() const { return violations == 0; }
};

/// Samples s = rho e^{i phi}, rho log-uniform in [1e-6, 1e6], phi in (0, pi/2],
/// checking Im(s Phi(s)) > 0, plus Re(s Phi(s)) > 0 and Im = 0 on the real axis.
inline BranchReport verify_branch(const ConstitutiveModel& model, std::size_t samples, std::uint64_t seed = 20240615) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_rho(std::log(1e-6), std::log(1e6));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BranchReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  auto record = [&](Complex s, double margin, bool ok) {
    ++rep.samples;
    if (!ok) ++rep.violations;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_point = s;
    }
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const double rho = std::exp(log_rho(rng));
    const double angle = (1.0 - unit(rng)) * 0.5 * std::numbers::pi;  // (0, pi/2]
    const Complex s = std::polar(rho, angle);
    const Complex v = s * phi(model, s);
    const double margin = v.imag() / std::abs(v);
    record(s, margin, v.imag() > 0.0 && std::isfinite(margin));

    const Complex real_s{rho, 0.0};
    const Complex w = real_s * phi(model, real_s);
    const double real_margin = w.real() / std::abs(w);
    record(real_s, real_margin, w.real() > 0.0 && w.imag() == 0.0);
  }
  return rep;
}

struct Rectangle {
  double re_min = 0.01;
  double re_max = 100.0;
  double im_min = -100.0;
  double im_max = 100.0;
};

struct ZeroCountOptions {
  std::size_t samples_per_edge = 1024;
  int max_depth = 40;
};

/// Winding number of f along the counter-clockwise boundary of `rect`
/// (argument principle). Adjacent samples are refined until the argument
/// change between them is below pi/2.
template <class F>
int count_zeros(const F& f, const Rectangle& rect, const ZeroCountOptions& opt = {}) {
  if (!(rect.re_min < rect.re_max) || !(rect.im_min < rect.im_max))
    throw std::invalid_argument("degenerate rectangle");
  const std::array<Complex, 5> corners = {Complex{rect.re_min, rect.im_min}, Complex{rect.re_max, rect.im_min},
                                          Complex{rect.re_max, rect.im_max}, Complex{rect.re_min, rect.im_max},
                                          Complex{rect.re_min, rect.im_min}};
  double total = 0.0;
  std::function<double(Complex, Complex, Complex, Complex, int)> accumulate = [&](Complex za, Complex zb, Complex fa,
                                                                                  Complex fb, int depth) -> double {
    const double delta = std::arg(fb / fa);
    if (std::abs(delta) < 0.5 * std::numbers::pi) return delta;
    if (depth >= opt.max_depth)
      throw NumericalError("argument refinement exhausted near a boundary zero at " + std::to_string(za.real()) +
                           (za.imag() < 0 ? "" : "+") + std::to_string(za.imag()) + "i");
    const Complex zm = 0.5 * (za + zb);
    const Complex fm = f(zm);
    if (fm == Complex{0.0, 0.0} || !std::isfinite(std::abs(fm)))
      throw NumericalError("function vanishes or is singular on the contour");
    return accumulate(za, zm, fa, fm, depth + 1) + accumulate(zm, zb, fm, fb, depth + 1);
  };
  for (std::size_t e = 0; e < 4; ++e) {
    const Complex a = corners[e];
    const Complex b = corners[e + 1];
    Complex z_prev = a;
    Complex f_prev = f(a);
    if (f_prev == Complex{0.0, 0.0}) throw NumericalError("function vanishes on the contour");
    for (std::size_t i = 1; i <= opt.samples_per_edge; ++i) {
      const Complex z = a + (b - a) * (static_cast<double>(i) / static_cast<double>(opt.samples_per_edge));
      const Complex fz = f(z);
      if (fz == Complex{0.0, 0.0} || !std::isfinite(std::abs(fz)))
        throw NumericalError("function vanishes or is singular on the contour");
      total += accumulate(z_prev, z, f_prev, fz, 0);
      z_prev = z;
      f_prev = fz;
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

/// Zeros of psi(s) = s Phi(s) + xi^2 inside `rect` (expected: none).
inline int count_zeros(const ConstitutiveModel& model, double xi, const Rectangle& rect,
                       const ZeroCountOptions& opt = {}) {
  if (!(rect.re_min > 0.0)) throw std::invalid_argument("rectangle must stay off the imaginary axis");
  return count_zeros([&](Complex s) { return s * phi(model, s) + xi * xi; }, rect, opt);
}

}  // namespace fracheat
