#pragma once
// Reference values computed without the library's kernels or weights.

#include <cmath>
#include <complex>
#include <numbers>

#include "fracheat/constitutive.hpp"

namespace oracle {

using cd = std::complex<double>;
using fracheat::ConstitutiveModel;

inline ConstitutiveModel mt() { return ConstitutiveModel::multi_term({0.0, 0.25, 0.5, 0.75}, {0.4, 0.6, 0.8}); }
inline ConstitutiveModel pt() { return ConstitutiveModel::power_type(); }

inline double heat_kernel(double x, double t) { return std::exp(-x * x / (4 * t)) / (2 * std::sqrt(std::numbers::pi * t)); }

// Laplace-domain kernel written out independently of the library.
inline cd symbol(bool power, cd s) {
  if (power) return std::abs(s - 1.0) < 1e-6 ? 1.0 + 0.5 * (s - 1.0) : (s - 1.0) / std::log(s);
  return 1.0 + 0.4 * std::pow(s, 0.25) + 0.6 * std::pow(s, 0.5) + 0.8 * std::pow(s, 0.75);
}

inline cd p_tilde(bool power, double x, cd s) {
  const cd f = symbol(power, s);
  const cd w = std::sqrt(s) * std::sqrt(f);
  return w / (2.0 * s) * std::exp(-std::abs(x) * w);
}

// Fixed Talbot contour (Abate and Valko).
inline double talbot(bool power, double x, double t, int M) {
  const double r = 2.0 * M / (5.0 * t);
  double sum = 0.5 * std::real(p_tilde(power, x, cd{r, 0.0})) * std::exp(r * t);
  for (int k = 1; k < M; ++k) {
    const double th = k * std::numbers::pi / M;
    const double cot = std::cos(th) / std::sin(th);
    const cd s = r * th * cd{cot, 1.0};
    const double sigma = th + (th * cot - 1.0) * cot;
    sum += std::real(std::exp(t * s) * p_tilde(power, x, s) * cd{1.0, sigma});
  }
  return r / M * sum;
}

// (-1)^k binom(g, k) from Gamma functions.
inline double binomial_coefficient(double g, int k) {
  if (k == 0) return 1.0;
  if (g == 0.0) return 0.0;
  return -std::exp(std::lgamma(k - g) - std::lgamma(-g) - std::lgamma(k + 1.0));
}

}  // namespace oracle
