#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature for vector-valued
// integrands, QUADPACK QAG style: the panel with the largest error estimate
// is bisected until the summed estimate meets the tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracheat {

/// Raised when a numerical procedure cannot meet its accuracy target.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double error_estimate = 0.0)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  double error_estimate() const { return error_estimate_; }

 private:
  double error_estimate_;
};

namespace gk15 {

inline constexpr std::array<double, 8> nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace gk15

template <std::size_t N>
struct PanelEstimate {
  double a = 0.0;
  double b = 0.0;
  std::array<double, N> value{};
  std::array<double, N> error{};
  double worst = 0.0;  ///< max over components of error
};

/// One 15-point Kronrod panel with the embedded 7-point Gauss estimate.
template <std::size_t N, class F>
PanelEstimate<N> gauss_kronrod_panel(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, N> kronrod{};
  std::array<double, N> gauss{};
  for (std::size_t i = 0; i < gk15::nodes.size(); ++i) {
    const double offset = half * gk15::nodes[i];
    if (i == 7) {
      const std::array<double, N> fc = f(center);
      for (std::size_t c = 0; c < N; ++c) {
        kronrod[c] += gk15::kronrod_weights[i] * fc[c];
        gauss[c] += gk15::gauss_weights[3] * fc[c];
      }
      continue;
    }
    const std::array<double, N> f1 = f(center - offset);
    const std::array<double, N> f2 = f(center + offset);
    for (std::size_t c = 0; c < N; ++c) {
      const double pair = f1[c] + f2[c];
      kronrod[c] += gk15::kronrod_weights[i] * pair;
      if (i % 2 == 1) gauss[c] += gk15::gauss_weights[i / 2] * pair;
    }
  }
  PanelEstimate<N> est;
  est.a = a;
  est.b = b;
  for (std::size_t c = 0; c < N; ++c) {
    est.value[c] = kronrod[c] * half;
    est.error[c] = std::abs((kronrod[c] - gauss[c]) * half);
    est.worst = std::max(est.worst, est.error[c]);
  }
  return est;
}

struct AdaptiveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  std::size_t max_panels = 20000;
};

template <std::size_t N>
struct QuadratureResult {
  std::array<double, N> value{};
  std::array<double, N> error{};
  std::size_t panels = 0;
  bool converged = false;
};

/// Integrates f over the union of consecutive panels given by `breaks`
/// (ascending, at least two entries).
template <std::size_t N, class F>
QuadratureResult<N> integrate_adaptive(const F& f, const std::vector<double>& breaks,
                                       const AdaptiveOptions& opt) {
  if (breaks.size() < 2) throw std::invalid_argument("quadrature needs at least one panel");
  auto by_error = [](const PanelEstimate<N>& l, const PanelEstimate<N>& r) { return l.worst < r.worst; };
  std::priority_queue<PanelEstimate<N>, std::vector<PanelEstimate<N>>, decltype(by_error)> heap(by_error);

  QuadratureResult<N> out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    auto est = gauss_kronrod_panel<N>(f, breaks[i], breaks[i + 1]);
    for (std::size_t c = 0; c < N; ++c) {
      out.value[c] += est.value[c];
      out.error[c] += est.error[c];
    }
    heap.push(std::move(est));
  }

  auto satisfied = [&] {
    for (std::size_t c = 0; c < N; ++c)
      if (out.error[c] > std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value[c]))) return false;
    return true;
  };

  while (!satisfied()) {
    if (heap.size() >= opt.max_panels || heap.empty()) {
      out.panels = heap.size();
      return out;
    }
    const PanelEstimate<N> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel cannot be split further in floating point.
      out.panels = heap.size();
      return out;
    }
    heap.pop();
    auto left = gauss_kronrod_panel<N>(f, worst.a, mid);
    auto right = gauss_kronrod_panel<N>(f, mid, worst.b);
    for (std::size_t c = 0; c < N; ++c) {
      out.value[c] += left.value[c] + right.value[c] - worst.value[c];
      out.error[c] += left.error[c] + right.error[c] - worst.error[c];
    }
    heap.push(std::move(left));
    heap.push(std::move(right));
  }
  // Re-sum from the panels to shed the drift of the running updates.
  out.value = {};
  out.error = {};
  out.panels = heap.size();
  while (!heap.empty()) {
    const auto& p = heap.top();
    for (std::size_t c = 0; c < N; ++c) {
      out.value[c] += p.value[c];
      out.error[c] += p.error[c];
    }
    heap.pop();
  }
  out.converged = true;
  return out;
}

}  // namespace fracheat
