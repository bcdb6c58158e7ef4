#pragma once

// Constitutive laws of the distributed-order Cattaneo heat conduction model:
// model definitions, their Laplace symbols, Grunwald-Letnikov coefficients
// and the finite-difference weight tables built from them.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace fracheat {

using Complex = std::complex<double>;

/// Tag required to construct the classical (single-term) laws, which exist
/// only as closed-form references for testing.
struct OracleMode {
  explicit OracleMode() = default;
};
inline constexpr OracleMode oracle_mode{};

/// phi(gamma) = delta(gamma - a_0) + sum_{v>=1} tau_v delta(gamma - a_v).
struct MultiTerm {
  std::vector<double> alphas;  ///< a_0 < a_1 < ... < a_N, all in [0, 1)
  std::vector<double> taus;    ///< tau_1..tau_N, coefficient of a_0 is 1

  double coefficient(std::size_t v) const { return v == 0 ? 1.0 : taus[v - 1]; }
};

/// phi(gamma) = 1 in dimensionless form.
struct PowerType {};

/// Fourier law, phi(gamma) = delta(gamma).
struct ClassicalFourier {};

/// Cattaneo law, phi(gamma) = delta(gamma) + tau delta(gamma - 1).
struct ClassicalCattaneo {
  double tau = 0.0;
};

class ConstitutiveModel {
 public:
  using Law = std::variant<MultiTerm, PowerType, ClassicalFourier, ClassicalCattaneo>;

  static ConstitutiveModel multi_term(std::vector<double> alphas, std::vector<double> taus) {
    if (alphas.size() < 2)
      throw std::invalid_argument("multi-term law needs at least two terms");
    if (taus.size() + 1 != alphas.size())
      throw std::invalid_argument("multi-term law needs one tau per order above alpha_0");
    for (std::size_t v = 0; v < alphas.size(); ++v) {
      if (!(alphas[v] >= 0.0 && alphas[v] < 1.0))
        throw std::invalid_argument("multi-term orders must lie in [0, 1)");
      if (v > 0 && !(alphas[v] > alphas[v - 1]))
        throw std::invalid_argument("multi-term orders must be strictly ascending");
    }
    for (double tau : taus)
      if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("multi-term coefficients must be positive");
    return ConstitutiveModel(MultiTerm{std::move(alphas), std::move(taus)});
  }

  static ConstitutiveModel power_type() { return ConstitutiveModel(PowerType{}); }

  static ConstitutiveModel fourier(OracleMode) { return ConstitutiveModel(ClassicalFourier{}); }

  static ConstitutiveModel cattaneo(double tau, OracleMode) {
    if (!(tau >= 0.0) || !std::isfinite(tau))
      throw std::invalid_argument("Cattaneo relaxation time must be non-negative");
    return ConstitutiveModel(ClassicalCattaneo{tau});
  }

  const Law& law() const { return law_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(law_);
  }

  /// Largest fractional order present, which controls the high-frequency
  /// growth of s Phi(s).
  double highest_order() const {
    return std::visit(
        [](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, MultiTerm>)
            return m.alphas.back();
          else if constexpr (std::is_same_v<M, ClassicalCattaneo>)
            return m.tau > 0.0 ? 1.0 : 0.0;
          else if constexpr (std::is_same_v<M, PowerType>)
            return 1.0;
          else
            return 0.0;
        },
        law_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& m) -> std::string {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, MultiTerm>)
            return "multi-term";
          else if constexpr (std::is_same_v<M, PowerType>)
            return "power-type";
          else if constexpr (std::is_same_v<M, ClassicalFourier>)
            return "fourier";
          else
            return "cattaneo";
        },
        law_);
  }

 private:
  explicit ConstitutiveModel(Law law) : law_(std::move(law)) {}
  Law law_;
};

// ---------------------------------------------------------------------------
// Nondimensionalization

struct PhysicalParameters {
  double density = 1.0;
  double specific_heat = 1.0;
  double conductivity = 1.0;
  double reference_temperature = 1.0;
  /// tau_0..tau_N for a multi-term law, or the single tau of the power-type law.
  std::vector<double> taus;
};

struct MultiTermOrders {
  std::vector<double> alphas;
};
struct PowerTypeShape {};
using ModelKind = std::variant<MultiTermOrders, PowerTypeShape>;

struct Scales {
  double length = 1.0;  ///< x*
  double time = 1.0;    ///< t*
};

struct Nondimensionalized {
  ConstitutiveModel model;
  Scales scales;
};

inline Nondimensionalized nondimensionalize(const PhysicalParameters& phys, const ModelKind& kind) {
  for (double v : {phys.density, phys.specific_heat, phys.conductivity, phys.reference_temperature})
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("physical parameters must be strictly positive");
  for (double tau : phys.taus)
    if (!(tau > 0.0) || !std::isfinite(tau))
      throw std::invalid_argument("time-scale parameters must be strictly positive");

  auto length_scale = [&](double t_star) {
    return std::sqrt(phys.conductivity * t_star / (phys.density * phys.specific_heat));
  };

  if (const auto* mt = std::get_if<MultiTermOrders>(&kind)) {
    if (phys.taus.size() != mt->alphas.size())
      throw std::invalid_argument("multi-term law needs tau_0..tau_N matching the orders");
    if (mt->alphas.empty() || !(mt->alphas.front() > 0.0))
      throw std::invalid_argument(
          "alpha_0 = 0 leaves the time scale undefined; supply a dimensionless model instead");
    const double a0 = mt->alphas.front();
    const double tau0 = phys.taus.front();
    const double t_star = std::pow(tau0, 1.0 / a0);
    std::vector<double> scaled;
    for (std::size_t v = 1; v < mt->alphas.size(); ++v)
      scaled.push_back(phys.taus[v] * std::pow(tau0, -mt->alphas[v] / a0));
    return {ConstitutiveModel::multi_term(mt->alphas, std::move(scaled)),
            Scales{length_scale(t_star), t_star}};
  }
  if (phys.taus.size() != 1)
    throw std::invalid_argument("power-type law takes exactly one tau");
  const double t_star = phys.taus.front();
  return {ConstitutiveModel::power_type(), Scales{length_scale(t_star), t_star}};
}

// ---------------------------------------------------------------------------
// Grunwald-Letnikov coefficients

/// omega_k(gamma) = (-1)^k binom(gamma, k), generated by the recurrence
/// omega_k = (1 - (1 + gamma)/k) omega_{k-1}.
class GLCoefficients {
 public:
  GLCoefficients(double order, std::size_t n) : order_(order) {
    if (!(order >= 0.0 && order < 1.0))
      throw std::invalid_argument("Grunwald-Letnikov order must lie in [0, 1)");
    values_.reserve(n + 1);
    values_.push_back(1.0);
    extend(n);
  }

  /// Grows the table so that it holds omega_0..omega_n.
  void extend(std::size_t n) {
    for (std::size_t k = values_.size(); k <= n; ++k)
      values_.push_back((1.0 - (1.0 + order_) / static_cast<double>(k)) * values_[k - 1]);
  }

  double order() const { return order_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

 private:
  double order_;
  std::vector<double> values_;
};

inline GLCoefficients gl_coefficients(double order, std::size_t n) { return GLCoefficients(order, n); }

// ---------------------------------------------------------------------------
// Weight tables

/// W_k = int phi(gamma) dt^{-gamma} omega_k(gamma) dgamma for k = 0..n.
class WeightTable {
 public:
  WeightTable(ConstitutiveModel model, double dt, std::size_t n, double dgamma = 0.0)
      : model_(std::move(model)), dt_(dt), dgamma_(dgamma) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, MultiTerm>) {
            for (std::size_t v = 0; v < m.alphas.size(); ++v)
              add_term(m.coefficient(v) * std::pow(dt_, -m.alphas[v]), m.alphas[v]);
          } else if constexpr (std::is_same_v<M, PowerType>) {
            if (!(dgamma > 0.0) || !(dgamma <= 1.0))
              throw std::invalid_argument("power-type weights need a quadrature step in (0, 1]");
            const double m_real = 1.0 / dgamma;
            const double m_count = std::round(m_real);
            if (std::abs(m_real - m_count) > 1e-9 * m_count)
              throw std::invalid_argument("1/dgamma must be an integer");
            for (std::size_t i = 0; i < static_cast<std::size_t>(m_count); ++i) {
              const double gamma = (2.0 * static_cast<double>(i) + 1.0) * dgamma / 2.0;
              add_term(std::pow(dt_, -gamma) * dgamma, gamma);
            }
          } else if constexpr (std::is_same_v<M, ClassicalFourier>) {
            add_term(1.0, 0.0);
          } else {
            throw std::invalid_argument("first-order relaxation is outside the GL weight family");
          }
        },
        model_.law());
    extend(n);
  }

  void extend(std::size_t n) {
    for (auto& term : terms_) term.coefficients.extend(n);
    for (std::size_t k = values_.size(); k <= n; ++k) {
      double sum = 0.0;
      for (const auto& term : terms_) sum += term.scale * term.coefficients[k];
      values_.push_back(sum);
    }
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }
  double dt() const { return dt_; }
  double dgamma() const { return dgamma_; }
  const ConstitutiveModel& model() const { return model_; }

 private:
  struct Term {
    double scale;
    GLCoefficients coefficients;
  };

  void add_term(double scale, double order) { terms_.push_back({scale, GLCoefficients(order, 0)}); }

  ConstitutiveModel model_;
  double dt_;
  double dgamma_;
  std::vector<Term> terms_;
  std::vector<double> values_;
};

inline WeightTable weights(const ConstitutiveModel& model, double dt, std::size_t n, double dgamma = 0.0) {
  return WeightTable(model, dt, n, dgamma);
}

// ---------------------------------------------------------------------------
// Laplace symbols

namespace detail {

// s^a on the principal branch; exact zero imaginary part for positive real s.
inline Complex principal_power(Complex s, double a) {
  if (a == 0.0) return {1.0, 0.0};
  return std::exp(a * std::log(s));
}

// (s - 1)/ln s with the removable singularity at s = 1 expanded.
inline Complex log_ratio(Complex s) {
  const Complex z = s - 1.0;
  if (std::abs(z) < 1e-3)
    return 1.0 + z * (0.5 + z * (-1.0 / 12.0 + z * (1.0 / 24.0 + z * (-19.0 / 720.0))));
  return z / std::log(s);
}

// Phi anywhere off the closed negative real axis; no argument checks.
inline Complex phi_unchecked(const ConstitutiveModel& model, Complex s) {
  return std::visit(
      [&](const auto& m) -> Complex {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MultiTerm>) {
          Complex sum{0.0, 0.0};
          for (std::size_t v = 0; v < m.alphas.size(); ++v)
            sum += m.coefficient(v) * principal_power(s, m.alphas[v]);
          return sum;
        } else if constexpr (std::is_same_v<M, PowerType>) {
          return log_ratio(s);
        } else if constexpr (std::is_same_v<M, ClassicalFourier>) {
          return {1.0, 0.0};
        } else {
          return 1.0 + m.tau * s;
        }
      },
      model.law());
}

}  // namespace detail

/// Phi(s) = int phi(gamma) s^gamma dgamma on the principal branch.
inline Complex phi(const ConstitutiveModel& model, Complex s) {
  if (s == Complex{0.0, 0.0}) throw std::domain_error("Phi is singular at s = 0");
  if (s.imag() == 0.0 && s.real() < 0.0) throw std::domain_error("s lies on the branch cut (-inf, 0]");
  return detail::phi_unchecked(model, s);
}

enum class Lip { upper, lower };

/// Boundary values Phi(p e^{+i pi}) (upper) and Phi(p e^{-i pi}) (lower) on the
/// two lips of the cut.
inline Complex phi_pm(const ConstitutiveModel& model, double p, Lip lip) {
  if (!(p > 0.0)) throw std::domain_error("cut boundary values need p > 0");
  const double sign = lip == Lip::upper ? 1.0 : -1.0;
  return std::visit(
      [&](const auto& m) -> Complex {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MultiTerm>) {
          Complex sum{0.0, 0.0};
          for (std::size_t v = 0; v < m.alphas.size(); ++v) {
            const double a = m.alphas[v];
            sum += m.coefficient(v) * std::pow(p, a) *
                   Complex{std::cos(std::numbers::pi * a), sign * std::sin(std::numbers::pi * a)};
          }
          return sum;
        } else if constexpr (std::is_same_v<M, PowerType>) {
          return Complex{-p - 1.0, 0.0} / Complex{std::log(p), sign * std::numbers::pi};
        } else if constexpr (std::is_same_v<M, ClassicalFourier>) {
          return {1.0, 0.0};
        } else {
          return {1.0 - m.tau * p, 0.0};
        }
      },
      model.law());
}

}  // namespace fracheat
