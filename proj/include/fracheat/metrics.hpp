#pragma once

// Error functionals between finite-difference snapshots and the analytic
// response: relative and absolute discrete l2 per record time, plus the
// max-norm over all record times.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracheat/fdsolver.hpp"
#include "fracheat/kernels.hpp"

namespace fracheat {

enum class Field { temperature, flux };

inline std::string field_name(Field f) { return f == Field::temperature ? "temperature" : "flux"; }

/// sqrt(sum_j u_j^2 / (j_max - j_min)), both ends of the window included.
inline double l2_norm(std::span<const double> u) {
  if (u.size() < 2) throw std::invalid_argument("l2 norm needs a window with j_max > j_min");
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s / static_cast<double>(u.size() - 1));
}

inline double linf_error(std::span<const std::vector<double>> analytic, std::span<const std::vector<double>> numerical) {
  if (analytic.size() != numerical.size()) throw std::invalid_argument("mismatched record times");
  double m = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    if (analytic[i].size() != numerical[i].size()) throw std::invalid_argument("mismatched grids");
    for (std::size_t j = 0; j < analytic[i].size(); ++j) m = std::max(m, std::abs(analytic[i][j] - numerical[i][j]));
  }
  return m;
}

struct ErrorReport {
  std::string model;
  std::string scheme;
  Field field = Field::temperature;
  std::vector<double> times;
  std::vector<double> relative_l2;  ///< delta
  std::vector<double> absolute_l2;  ///< Delta
  std::vector<IndexWindow> windows;
  double linf = 0.0;
};

/// Error of one field of `run` against analytic snapshots taken at the same
/// record times. Each analytic snapshot must sample a grid that contains the
/// field's window nodes contiguously.
inline ErrorReport compare(const RunOutput& run, std::span<const Snapshot> analytic, Field field) {
  if (analytic.size() != run.snapshots.size()) throw std::invalid_argument("record times differ");
  ErrorReport rep{run.model, run.scheme, field, {}, {}, {}, {}, 0.0};
  std::vector<std::vector<double>> exact;
  std::vector<std::vector<double>> numeric;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const FdSnapshot& fd = run.snapshots[i];
    const Snapshot& an = analytic[i];
    if (std::abs(fd.t - an.t) > 1e-9 * run.grid.dt) throw std::invalid_argument("record times differ");
    const IndexWindow w = field == Field::temperature ? fd.window.temperature : fd.window.flux;
    const double x0 = run.grid.node(w.lo);
    const auto it = std::find(an.x.begin(), an.x.end(), x0);
    if (it == an.x.end() || static_cast<std::size_t>(an.x.end() - it) < w.size())
      throw std::invalid_argument("analytic grid does not cover the window at t = " + std::to_string(fd.t));
    const auto off = static_cast<std::size_t>(it - an.x.begin());
    for (std::size_t k = 0; k < w.size(); ++k)
      if (an.x[off + k] != run.grid.node(w.lo + k)) throw std::invalid_argument("mismatched grids");
    const auto& src = field == Field::temperature ? an.T : an.q;
    std::vector<double> ex(src.begin() + static_cast<std::ptrdiff_t>(off),
                           src.begin() + static_cast<std::ptrdiff_t>(off + w.size()));
    const auto& num = field == Field::temperature ? fd.T : fd.q;
    std::vector<double> diff(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) diff[k] = ex[k] - num[k];
    const double abs_err = l2_norm(diff);
    const double norm = l2_norm(ex);
    rep.times.push_back(fd.t);
    rep.absolute_l2.push_back(abs_err);
    rep.relative_l2.push_back(norm > 0.0 ? abs_err / norm : (abs_err == 0.0 ? 0.0 : INFINITY));
    rep.windows.push_back(w);
    exact.push_back(std::move(ex));
    numeric.push_back(num);
  }
  rep.linf = linf_error(exact, numeric);
  return rep;
}

}  // namespace fracheat
