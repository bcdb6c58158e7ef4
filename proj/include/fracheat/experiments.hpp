#pragma once

// Orchestration behind the command-line subcommands. Each entry point writes
// its files into the configured output directory together with resolved.cfg.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracheat/config.hpp"
#include "fracheat/csv.hpp"
#include "fracheat/fdsolver.hpp"
#include "fracheat/kernels.hpp"
#include "fracheat/metrics.hpp"
#include "fracheat/parallel.hpp"

namespace fracheat {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int numeric = 3;
inline constexpr int validation = 4;
}  // namespace exit_code

class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunContext {
  std::size_t threads = 1;
  std::ostream* log = nullptr;

  void note(const std::string& s) const {
    if (log) *log << s << '\n';
  }
};

inline std::filesystem::path prepare_output(const ExperimentConfig& cfg) {
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("output.dir: cannot create '" + cfg.output_dir + "': " + ec.message());
  std::ofstream out(dir / "resolved.cfg", std::ios::binary);
  if (!out) throw ConfigError("output.dir: cannot write into '" + cfg.output_dir + "'");
  out << render_config(cfg);
  return dir;
}

/// Profiles over shrinking windows; rows span the widest window.
inline csv::Table window_table(const GridSpec& grid, const std::vector<FdSnapshot>& snaps, Field field) {
  csv::Table t;
  if (snaps.empty()) return t;
  auto window = [field](const FdSnapshot& s) { return field == Field::temperature ? s.window.temperature : s.window.flux; };
  std::size_t lo = window(snaps[0]).lo;
  std::size_t hi = window(snaps[0]).hi;
  for (const auto& s : snaps) {
    lo = std::min(lo, window(s).lo);
    hi = std::max(hi, window(s).hi);
  }
  t.x = grid.nodes(lo, hi);
  for (const auto& s : snaps)
    t.columns.push_back({csv::time_label(s.t), window(s).lo - lo, field == Field::temperature ? s.T : s.q});
  return t;
}

/// Profiles sharing one grid.
inline csv::Table grid_table(const std::vector<Snapshot>& snaps, Field field) {
  csv::Table t;
  if (snaps.empty()) return t;
  t.x = snaps[0].x;
  for (const auto& s : snaps) {
    if (s.x != t.x) throw std::invalid_argument("snapshots do not share a grid");
    t.columns.push_back({csv::time_label(s.t), 0, field == Field::temperature ? s.T : s.q});
  }
  return t;
}

inline std::string file_stem(const ExperimentConfig& cfg) { return cfg.model_kind; }

// ---------------------------------------------------------------------------
// kernels

inline std::vector<Snapshot> run_kernels(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto dir = prepare_output(cfg);
  const auto model = cfg.model();
  const auto ic = cfg.initial_condition();
  const std::vector<double> x = cfg.grid.nodes(0, cfg.grid.last_index());
  ResponseOptions opt{cfg.quadrature, ctx.threads, 0.0};
  std::vector<Snapshot> snaps;
  for (double t : cfg.grid.record_times) {
    if (!(t > 0.0)) {
      const auto* g = std::get_if<Gaussian>(&ic);
      if (!g) throw ConfigError("grid.record_times: a Dirac response has no profile at t = 0");
      Snapshot s{t, x, std::vector<double>(x.size()), std::vector<double>(x.size(), 0.0)};
      for (std::size_t j = 0; j < x.size(); ++j) s.T[j] = (*g)(x[j]);
      snaps.push_back(std::move(s));
      continue;
    }
    ctx.note("kernels: t = " + csv::number(t));
    snaps.push_back(analytic_response(model, ic, x, t, opt));
  }
  csv::write_file((dir / (file_stem(cfg) + "_kernels_temperature.csv")).string(), grid_table(snaps, Field::temperature));
  csv::write_file((dir / (file_stem(cfg) + "_kernels_flux.csv")).string(), grid_table(snaps, Field::flux));
  return snaps;
}

// ---------------------------------------------------------------------------
// simulate

inline nlohmann::json run_metadata(const RunOutput& r) {
  nlohmann::json j;
  j["model"] = r.model;
  j["scheme"] = r.scheme;
  j["dt"] = r.grid.dt;
  j["dx"] = r.grid.dx;
  j["x_min"] = r.grid.x_min;
  j["x_max"] = r.grid.x_max;
  j["n_steps"] = r.grid.n_steps;
  j["wall_seconds"] = r.wall_seconds;
  j["stable"] = !r.first_unstable.has_value();
  j["first_unstable_step"] = r.first_unstable ? nlohmann::json(*r.first_unstable) : nlohmann::json(nullptr);
  j["snapshots"] = nlohmann::json::array();
  for (const auto& s : r.snapshots)
    j["snapshots"].push_back({{"t", s.t},
                              {"step", s.step},
                              {"temperature_window", {s.window.temperature.lo, s.window.temperature.hi}},
                              {"flux_window", {s.window.flux.lo, s.window.flux.hi}}});
  return j;
}

inline std::vector<RunOutput> simulate_all(const ExperimentConfig& cfg, const RunContext& ctx) {
  if (cfg.ic_kind != "gaussian") throw ConfigError("initial.kind: finite differences need a gaussian initial temperature");
  if (cfg.schemes.empty()) throw ConfigError("run.schemes: at least one scheme is required");
  const auto model = cfg.model();
  const auto ic = cfg.initial_condition();
  StepOptions opt;
  opt.strict = cfg.strict_instability;
  std::vector<RunOutput> runs(cfg.schemes.size());
  parallel_for(cfg.schemes.size(), ctx.threads, [&](std::size_t i) {
    runs[i] = run(model, cfg.grid, cfg.scheme(cfg.schemes[i]), ic, cfg.weight_step(), opt);
  });
  for (const auto& r : runs) {
    std::string line = "simulate: " + r.model + " " + r.scheme + " " + csv::number(r.wall_seconds) + " s";
    if (r.first_unstable) line += ", unstable at step " + std::to_string(*r.first_unstable);
    ctx.note(line);
  }
  return runs;
}

inline void write_run(const std::filesystem::path& dir, const ExperimentConfig& cfg, const RunOutput& r) {
  const std::string stem = file_stem(cfg) + "_" + r.scheme;
  csv::write_file((dir / (stem + "_temperature.csv")).string(), window_table(cfg.grid, r.snapshots, Field::temperature));
  csv::write_file((dir / (stem + "_flux.csv")).string(), window_table(cfg.grid, r.snapshots, Field::flux));
  std::ofstream meta(dir / (stem + "_meta.json"), std::ios::binary);
  meta << run_metadata(r).dump(2) << '\n';
}

inline std::vector<RunOutput> run_simulate(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto dir = prepare_output(cfg);
  auto runs = simulate_all(cfg, ctx);
  for (const auto& r : runs) write_run(dir, cfg, r);
  return runs;
}

// ---------------------------------------------------------------------------
// compare

/// Analytic response on every record time's flux window (which contains the
/// temperature window).
inline std::vector<Snapshot> analytic_on_windows(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto model = cfg.model();
  const auto ic = cfg.initial_condition();
  const auto& g = std::get<Gaussian>(ic);
  const std::size_t J = cfg.grid.last_index();
  ResponseOptions opt{cfg.quadrature, ctx.threads, 0.0};
  std::vector<Snapshot> out;
  for (double t : cfg.grid.record_times) {
    const IndexWindow w = valid_range(cfg.grid.step_of(t), J).flux;
    const auto x = cfg.grid.nodes(w.lo, w.hi);
    if (!(t > 0.0)) {
      Snapshot s{t, x, std::vector<double>(x.size()), std::vector<double>(x.size(), 0.0)};
      for (std::size_t j = 0; j < x.size(); ++j) s.T[j] = g(x[j]);
      out.push_back(std::move(s));
      continue;
    }
    ctx.note("analytic: t = " + csv::number(t));
    out.push_back(analytic_response(model, ic, x, t, opt));
  }
  return out;
}

/// Analytic snapshots cut to the same windows as a run, for plotting against it.
inline std::vector<FdSnapshot> as_windowed(const GridSpec& grid, const std::vector<Snapshot>& analytic) {
  const std::size_t J = grid.last_index();
  std::vector<FdSnapshot> out;
  for (const auto& a : analytic) {
    const std::size_t n = grid.step_of(a.t);
    const ValidRange vr = valid_range(n, J);
    FdSnapshot s{a.t, n, vr, {}, {}};
    const std::size_t shift = vr.temperature.lo - vr.flux.lo;
    s.T.assign(a.T.begin() + static_cast<std::ptrdiff_t>(shift),
               a.T.begin() + static_cast<std::ptrdiff_t>(shift + vr.temperature.size()));
    s.q = a.q;
    out.push_back(std::move(s));
  }
  return out;
}

/// A run's own snapshots in analytic form (self-check reference). Nodes of
/// the flux window outside the temperature window get T = 0; compare never
/// reads them.
inline std::vector<Snapshot> as_snapshots(const GridSpec& grid, const RunOutput& r) {
  std::vector<Snapshot> out;
  for (const auto& s : r.snapshots) {
    Snapshot a{s.t, grid.nodes(s.window.flux.lo, s.window.flux.hi), std::vector<double>(s.window.flux.size(), 0.0),
               s.q};
    const std::size_t shift = s.window.temperature.lo - s.window.flux.lo;
    for (std::size_t k = 0; k < s.T.size(); ++k) a.T[shift + k] = s.T[k];
    out.push_back(std::move(a));
  }
  return out;
}

inline void write_errors(const std::filesystem::path& path, const std::vector<ErrorReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "kind,model,scheme,field,t_i,delta_l2_rel,delta_l2_abs,linf_abs,j_min,j_max\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.times.size(); ++i)
      out << "l2," << r.model << ',' << r.scheme << ',' << field_name(r.field) << ',' << csv::number(r.times[i]) << ','
          << csv::number(r.relative_l2[i]) << ',' << csv::number(r.absolute_l2[i]) << ",," << r.windows[i].lo << ','
          << r.windows[i].hi << '\n';
    out << "linf," << r.model << ',' << r.scheme << ',' << field_name(r.field) << ",,,," << csv::number(r.linf)
        << ",,\n";
  }
}

struct CompareOutput {
  std::vector<RunOutput> runs;
  std::vector<Snapshot> analytic;
  std::vector<ErrorReport> reports;
};

inline CompareOutput run_compare(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto dir = prepare_output(cfg);
  CompareOutput out;
  out.runs = simulate_all(cfg, ctx);
  for (const auto& r : out.runs) write_run(dir, cfg, r);
  if (!cfg.self_check) {
    out.analytic = analytic_on_windows(cfg, ctx);
    const auto windowed = as_windowed(cfg.grid, out.analytic);
    csv::write_file((dir / (file_stem(cfg) + "_analytic_temperature.csv")).string(),
                    window_table(cfg.grid, windowed, Field::temperature));
    csv::write_file((dir / (file_stem(cfg) + "_analytic_flux.csv")).string(),
                    window_table(cfg.grid, windowed, Field::flux));
  }
  for (const auto& r : out.runs) {
    const auto reference = cfg.self_check ? as_snapshots(cfg.grid, r) : out.analytic;
    for (Field f : {Field::temperature, Field::flux}) out.reports.push_back(compare(r, reference, f));
  }
  write_errors(dir / (file_stem(cfg) + "_errors.csv"), out.reports);
  return out;
}

// ---------------------------------------------------------------------------
// validate

struct ValidationSummary {
  BranchReport branch;
  std::vector<std::pair<double, int>> zeros;  ///< (xi, count)
  bool planted = false;
  bool passed() const {
    if (!branch.passed()) return false;
    for (const auto& [xi, n] : zeros)
      if (n != 0) return false;
    return true;
  }
};

inline ValidationSummary run_validate(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto dir = prepare_output(cfg);
  const auto model = cfg.model();
  const auto& v = cfg.validation;
  ValidationSummary sum;
  sum.planted = v.planted_zero;
  sum.branch = verify_branch(model, v.samples, v.seed);
  ctx.note("validate: " + std::to_string(sum.branch.samples) + " branch samples, " +
           std::to_string(sum.branch.violations) + " violations, worst margin " + csv::number(sum.branch.worst_margin));
  if (v.planted_zero) {
    const int n = count_zeros([](Complex s) { return s - 1.0; }, v.rectangle);
    sum.zeros.emplace_back(0.0, n);
    ctx.note("validate: planted control s - 1 winds " + std::to_string(n) + " time(s)");
  } else {
    for (double xi : v.xis) {
      const int n = count_zeros(model, xi, v.rectangle);
      sum.zeros.emplace_back(xi, n);
      ctx.note("validate: xi = " + csv::number(xi) + ", zeros = " + std::to_string(n));
    }
  }
  nlohmann::json j;
  j["model"] = model.name();
  j["branch"] = {{"samples", sum.branch.samples},
                 {"violations", sum.branch.violations},
                 {"worst_margin", sum.branch.worst_margin},
                 {"worst_point", {sum.branch.worst_point.real(), sum.branch.worst_point.imag()}}};
  j["planted_zero"] = v.planted_zero;
  j["zeros"] = nlohmann::json::array();
  for (const auto& [xi, n] : sum.zeros) j["zeros"].push_back({{"xi", xi}, {"count", n}});
  j["passed"] = sum.passed();
  std::ofstream(dir / (file_stem(cfg) + "_validation.json"), std::ios::binary) << j.dump(2) << '\n';
  if (!sum.passed()) throw ValidationFailure("validation failed for " + model.name());
  return sum;
}

}  // namespace fracheat
