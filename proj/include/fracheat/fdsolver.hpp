#pragma once

// Explicit finite differences for
//
//   T_t = -q_x,    sum_k W_k q^{n-k} = -(T_{j+1} - T_{j-1}) / (2 dx)
//
// on an open domain. Centered differences eat one node per field per step
// from each side, so the valid index window shrinks by two per time step.
// Outside the window the arrays hold NaN.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fracheat/constitutive.hpp"
#include "fracheat/kernels.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat {

struct GridSpec {
  double x_min = -2.0;
  double x_max = 2.0;
  double dx = 1e-3;
  double dt = 1e-4;
  std::size_t n_steps = 650;
  std::vector<double> record_times{0.01, 0.015, 0.02, 0.035, 0.05, 0.065};

  /// J, the last node index.
  std::size_t last_index() const {
    const double cells = (x_max - x_min) / dx;
    return static_cast<std::size_t>(std::llround(cells));
  }

  /// Node j; the two halves are generated from opposite ends so that a
  /// symmetric domain has exactly mirrored nodes.
  double node(std::size_t j) const {
    const std::size_t J = last_index();
    if (2 * j <= J) return x_min + static_cast<double>(j) * dx;
    return x_max - static_cast<double>(J - j) * dx;
  }

  std::vector<double> nodes(std::size_t lo, std::size_t hi) const {
    std::vector<double> x;
    x.reserve(hi - lo + 1);
    for (std::size_t j = lo; j <= hi; ++j) x.push_back(node(j));
    return x;
  }

  /// Step index of a record time, or an error if it is not a multiple of dt.
  std::size_t step_of(double t) const {
    const double ratio = t / dt;
    const double n = std::round(ratio);
    if (n < 0.0 || std::abs(n * dt - t) > 1e-9 * dt)
      throw std::invalid_argument("record time " + std::to_string(t) + " is not a multiple of dt");
    return static_cast<std::size_t>(n);
  }

  void validate() const {
    if (!(dx > 0.0) || !std::isfinite(dx)) throw std::invalid_argument("grid.dx must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("grid.dt must be positive");
    if (!(x_max > x_min)) throw std::invalid_argument("grid.x_max must exceed grid.x_min");
    const double cells = (x_max - x_min) / dx;
    if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells))
      throw std::invalid_argument("grid extent is not an integer number of dx");
    if (last_index() < 4 * n_steps + 2)
      throw std::invalid_argument("grid has " + std::to_string(last_index()) + " cells but " +
                                  std::to_string(n_steps) + " steps need at least " +
                                  std::to_string(4 * n_steps + 2));
    for (double t : record_times) {
      if (step_of(t) > n_steps) throw std::invalid_argument("record time " + std::to_string(t) + " exceeds the run");
    }
  }
};

struct AdamsBashforth3 {};
struct Euler {};
struct Centered {};
/// Centered leap-frog with the Robert-Asselin-Williams filter.
struct CenteredRAW {
  double nu = 0.2;
  double alpha_w = 0.53;
};

using SchemeKind = std::variant<AdamsBashforth3, Euler, Centered, CenteredRAW>;

inline std::string scheme_name(const SchemeKind& s) {
  switch (s.index()) {
    case 0:
      return "ab3";
    case 1:
      return "euler";
    case 2:
      return "centered";
    default:
      return "raw";
  }
}

inline void validate(const SchemeKind& s) {
  if (const auto* raw = std::get_if<CenteredRAW>(&s)) {
    if (!(raw->nu > 0.0 && raw->nu < 1.0)) throw std::invalid_argument("raw.nu must lie in (0, 1)");
    if (!(raw->alpha_w > 0.0 && raw->alpha_w <= 1.0)) throw std::invalid_argument("raw.alpha_w must lie in (0, 1]");
  }
}

struct IndexWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t size() const { return hi - lo + 1; }
  bool contains(std::size_t j) const { return j >= lo && j <= hi; }
  bool operator==(const IndexWindow&) const = default;
};

struct ValidRange {
  IndexWindow flux;
  IndexWindow temperature;
};

/// Windows at step n >= 1: flux 2n-1..J-(2n-1), temperature 2n..J-2n.
/// At n = 0 both fields are defined on the whole grid.
inline ValidRange valid_range(std::size_t n, std::size_t J) {
  if (n == 0) return {{0, J}, {0, J}};
  if (4 * n > J) throw std::out_of_range("step " + std::to_string(n) + " exhausts a grid of " + std::to_string(J) + " cells");
  return {{2 * n - 1, J - (2 * n - 1)}, {2 * n, J - 2 * n}};
}

class NumericalInstability : public NumericalError {
 public:
  NumericalInstability(std::size_t step)
      : NumericalError("solution unstable at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct SolverState {
  std::size_t n = 0;
  std::size_t J = 0;
  double dx = 0.0;
  double dt = 0.0;
  std::vector<double> T;       ///< T^n
  std::vector<double> T_prev;  ///< T^{n-1}, centered family only
  std::vector<double> q;       ///< q^0..q^n, row-major by time level
  ValidRange window;
  std::optional<std::size_t> first_unstable;

  std::span<const double> flux(std::size_t m) const { return {q.data() + m * (J + 1), J + 1}; }
  std::span<double> flux(std::size_t m) { return {q.data() + m * (J + 1), J + 1}; }
};

inline SolverState init(const GridSpec& grid, std::vector<double> T0) {
  grid.validate();
  const std::size_t J = grid.last_index();
  if (T0.size() != J + 1) throw std::invalid_argument("initial temperature does not match the grid");
  SolverState st;
  st.J = J;
  st.dx = grid.dx;
  st.dt = grid.dt;
  st.T = std::move(T0);
  st.T_prev = st.T;
  st.q.reserve((grid.n_steps + 1) * (J + 1));
  st.q.assign(J + 1, 0.0);
  st.window = valid_range(0, J);
  return st;
}

inline SolverState init(const GridSpec& grid, const InitialCondition& ic) {
  const auto* g = std::get_if<Gaussian>(&ic);
  if (!g) throw std::invalid_argument("finite differences need a Gaussian initial temperature");
  validate(ic);
  std::vector<double> T0(grid.last_index() + 1);
  for (std::size_t j = 0; j < T0.size(); ++j) T0[j] = (*g)(grid.node(j));
  return init(grid, std::move(T0));
}

/// q^{n+1} = -(g + sum_{k=1}^{n+1} W_k q^{n+1-k}) / W_0 on the nodes of `win`.
/// `history` holds q^0..q^n as rows of length `width`; the memory sum runs
/// from the oldest level to the newest.
inline void flux_update(const WeightTable& weights, std::span<const double> history, std::size_t width, std::size_t n,
                        std::span<const double> gradient, IndexWindow win, std::span<double> out) {
  if (weights.size() < n + 2) throw std::invalid_argument("weight table shorter than the flux memory");
  if (history.size() < (n + 1) * width) throw std::invalid_argument("flux history shorter than n + 1 levels");
  std::vector<double> memory(win.size(), 0.0);
  for (std::size_t m = 0; m <= n; ++m) {
    const double w = weights[n + 1 - m];
    const double* row = history.data() + m * width;
    for (std::size_t j = win.lo; j <= win.hi; ++j) memory[j - win.lo] += w * row[j];
  }
  const double w0 = weights[0];
  for (std::size_t j = win.lo; j <= win.hi; ++j) out[j] = -(gradient[j] + memory[j - win.lo]) / w0;
}

struct StepOptions {
  bool strict = false;
  double blowup_threshold = 1e12;
};

/// Advances to n+1: temperature first, then the flux from the new temperature
/// and the whole flux memory.
inline void step(SolverState& st, const SchemeKind& scheme, WeightTable& weights, const StepOptions& opt = {}) {
  const std::size_t n = st.n;
  const std::size_t J = st.J;
  const std::size_t width = J + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const IndexWindow tw = n == 0 ? IndexWindow{0, J} : valid_range(n, J).temperature;
  const IndexWindow fw = valid_range(n + 1, J).flux;

  // Temperature. With q^0 = 0 every scheme leaves T^1 = T^0.
  std::vector<double> next(width, nan);
  if (n == 0) {
    next = st.T;
  } else {
    const auto qn = st.flux(n);
    const auto q1 = st.flux(n - 1);
    const bool centered = std::holds_alternative<Centered>(scheme) || std::holds_alternative<CenteredRAW>(scheme);
    if (std::holds_alternative<AdamsBashforth3>(scheme)) {
      // Written as the Euler increment of the weighted difference, so equal
      // history levels reproduce Euler bit for bit.
      const double c = st.dt / (2.0 * st.dx);
      const bool has2 = n >= 2;
      for (std::size_t j = tw.lo; j <= tw.hi; ++j) {
        const double d0 = qn[j + 1] - qn[j - 1];
        const double d1 = q1[j + 1] - q1[j - 1];
        const double d2 = has2 ? st.flux(n - 2)[j + 1] - st.flux(n - 2)[j - 1] : 0.0;
        next[j] = st.T[j] - c * ((23.0 * d0 - 16.0 * d1 + 5.0 * d2) / 12.0);
      }
    } else if (!centered) {
      const double c = st.dt / (2.0 * st.dx);
      for (std::size_t j = tw.lo; j <= tw.hi; ++j) next[j] = st.T[j] - c * (qn[j + 1] - qn[j - 1]);
    } else {
      const double c = st.dt / st.dx;
      for (std::size_t j = tw.lo; j <= tw.hi; ++j) next[j] = st.T_prev[j] - c * (qn[j + 1] - qn[j - 1]);
      if (const auto* raw = std::get_if<CenteredRAW>(&scheme)) {
        for (std::size_t j = tw.lo; j <= tw.hi; ++j) {
          const double d = 0.5 * raw->nu * (st.T_prev[j] - 2.0 * st.T[j] + next[j]);
          st.T[j] += raw->alpha_w * d;
          next[j] += (raw->alpha_w - 1.0) * d;
        }
      }
    }
  }
  st.T_prev = std::move(st.T);
  st.T = std::move(next);

  weights.extend(n + 1);
  std::vector<double> gradient(width, 0.0);
  const double inv2dx = 1.0 / (2.0 * st.dx);
  for (std::size_t j = fw.lo; j <= fw.hi; ++j) gradient[j] = (st.T[j + 1] - st.T[j - 1]) * inv2dx;
  st.q.resize(st.q.size() + width, nan);
  flux_update(weights, st.q, width, n, gradient, fw, st.flux(n + 1));
  const auto qn1 = st.flux(n + 1);

  st.n = n + 1;
  st.window = valid_range(st.n, J);

  if (!st.first_unstable) {
    auto bad = [&](double v) { return !std::isfinite(v) || std::abs(v) > opt.blowup_threshold; };
    bool unstable = false;
    for (std::size_t j = st.window.temperature.lo; j <= st.window.temperature.hi && !unstable; ++j) unstable = bad(st.T[j]);
    for (std::size_t j = fw.lo; j <= fw.hi && !unstable; ++j) unstable = bad(qn1[j]);
    if (unstable) st.first_unstable = st.n;
  }
  if (opt.strict && st.first_unstable) throw NumericalInstability(*st.first_unstable);
}

struct FdSnapshot {
  double t = 0.0;
  std::size_t step = 0;
  ValidRange window;
  std::vector<double> T;  ///< over window.temperature
  std::vector<double> q;  ///< over window.flux
};

struct RunOutput {
  std::string model;
  std::string scheme;
  GridSpec grid;
  std::vector<FdSnapshot> snapshots;
  std::optional<std::size_t> first_unstable;
  double wall_seconds = 0.0;
};

inline FdSnapshot take_snapshot(const SolverState& st, double t) {
  FdSnapshot s{t, st.n, st.window, {}, {}};
  const auto& tw = st.window.temperature;
  const auto& fw = st.window.flux;
  s.T.assign(st.T.begin() + static_cast<std::ptrdiff_t>(tw.lo), st.T.begin() + static_cast<std::ptrdiff_t>(tw.hi) + 1);
  const auto qn = st.flux(st.n);
  s.q.assign(qn.begin() + static_cast<std::ptrdiff_t>(fw.lo), qn.begin() + static_cast<std::ptrdiff_t>(fw.hi) + 1);
  return s;
}

inline RunOutput run(const ConstitutiveModel& model, const GridSpec& grid, const SchemeKind& scheme,
                     const InitialCondition& ic, double dgamma = 0.0, const StepOptions& opt = {}) {
  validate(scheme);
  const auto start = std::chrono::steady_clock::now();
  SolverState st = init(grid, ic);
  WeightTable w(model, grid.dt, 0, dgamma);

  std::vector<std::pair<std::size_t, std::size_t>> order;  // (step, position in record_times)
  for (std::size_t i = 0; i < grid.record_times.size(); ++i) order.emplace_back(grid.step_of(grid.record_times[i]), i);
  std::sort(order.begin(), order.end());

  RunOutput out{model.name(), scheme_name(scheme), grid, std::vector<FdSnapshot>(grid.record_times.size()), {}, 0.0};
  auto next = order.begin();
  auto flush = [&] {
    for (; next != order.end() && next->first == st.n; ++next)
      out.snapshots[next->second] = take_snapshot(st, grid.record_times[next->second]);
  };
  flush();
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    step(st, scheme, w, opt);
    flush();
  }
  out.first_unstable = st.first_unstable;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace fracheat
