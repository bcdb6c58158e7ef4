#pragma once

// Experiment configuration: a sectioned INI file. Full-line comments start
// with '#' or ';'. Lists are written as [a, b, c].

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fracheat/constitutive.hpp"
#include "fracheat/fdsolver.hpp"
#include "fracheat/kernels.hpp"

namespace fracheat {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ValidationSettings {
  std::size_t samples = 10000;
  std::uint64_t seed = 20240615;
  std::vector<double> xis{0.1, 1.0, 10.0};
  Rectangle rectangle{};
  bool planted_zero = false;  ///< replace psi by s - 1 (control run, must fail)
};

struct ExperimentConfig {
  std::string model_kind = "multi-term";
  std::vector<double> alphas{0.0, 0.25, 0.5, 0.75};
  std::vector<double> taus{0.4, 0.6, 0.8};
  double dgamma = 0.005;

  GridSpec grid{};

  std::string ic_kind = "gaussian";
  double T0 = 0.001;
  double epsilon = 5e-4;

  std::vector<std::string> schemes{"ab3", "raw", "centered", "euler"};
  CenteredRAW raw{};

  QuadratureConfig quadrature{};
  ValidationSettings validation{};

  std::string output_dir = "out";
  bool strict_instability = false;
  bool self_check = false;

  ConstitutiveModel model() const {
    if (model_kind == "multi-term") return ConstitutiveModel::multi_term(alphas, taus);
    return ConstitutiveModel::power_type();
  }

  InitialCondition initial_condition() const {
    if (ic_kind == "dirac") return Dirac{T0};
    return Gaussian{T0, epsilon};
  }

  SchemeKind scheme(const std::string& name) const {
    if (name == "ab3") return AdamsBashforth3{};
    if (name == "euler") return Euler{};
    if (name == "centered") return Centered{};
    return raw;
  }

  /// Dgamma only matters for the power-type law.
  double weight_step() const { return model_kind == "power-type" ? dgamma : 0.0; }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

inline std::vector<std::string> parse_list(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw ConfigError(key + ": expected a list [a, b, ...]");
  std::vector<std::string> items;
  const std::string body = t.substr(1, t.size() - 2);
  if (trim(body).empty()) return items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key + ": empty list element");
    items.push_back(item);
  }
  return items;
}

inline std::vector<double> parse_numbers(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : parse_list(key, text)) out.push_back(parse_double(key, s));
  return out;
}

inline std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string list_text(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + shortest(v[i]);
  return s + "]";
}

inline std::string list_text(const std::vector<std::string>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s + "]";
}

// section -> allowed keys
inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"kind", "alphas", "taus", "dgamma"}},
      {"grid", {"x_min", "x_max", "dx", "dt", "n_steps", "record_times"}},
      {"initial", {"kind", "T0", "epsilon"}},
      {"run", {"schemes", "strict_instability", "self_check"}},
      {"raw", {"nu", "alpha_w"}},
      {"quadrature", {"rel_tol", "abs_tol", "decay_exponent", "max_panels", "substitute_endpoint", "contour"}},
      {"validate", {"samples", "seed", "xis", "re_min", "re_max", "im_min", "im_max", "planted_zero"}},
      {"output", {"dir"}},
  };
  return keys;
}

}  // namespace detail

/// Checks every precondition the solver modules impose.
inline void validate(const ExperimentConfig& c) {
  if (c.model_kind != "multi-term" && c.model_kind != "power-type")
    throw ConfigError("model.kind: expected multi-term or power-type, got '" + c.model_kind + "'");
  try {
    (void)c.model();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  if (c.model_kind == "power-type") {
    try {
      (void)WeightTable(c.model(), 1.0, 0, c.dgamma);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("model.dgamma: ") + e.what());
    }
  }
  try {
    c.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  if (c.ic_kind != "gaussian" && c.ic_kind != "dirac")
    throw ConfigError("initial.kind: expected gaussian or dirac, got '" + c.ic_kind + "'");
  if (!std::isfinite(c.T0)) throw ConfigError("initial.T0: must be finite");
  if (c.ic_kind == "gaussian" && !(c.epsilon > 0.0)) throw ConfigError("initial.epsilon: must be positive");
  std::set<std::string> seen;
  for (const auto& s : c.schemes) {
    if (s != "ab3" && s != "euler" && s != "centered" && s != "raw")
      throw ConfigError("run.schemes: unknown scheme '" + s + "'");
    if (!seen.insert(s).second) throw ConfigError("run.schemes: duplicate scheme '" + s + "'");
  }
  try {
    validate(SchemeKind{c.raw});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  try {
    c.quadrature.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("quadrature: ") + e.what());
  }
  const auto& r = c.validation.rectangle;
  if (!(r.re_min > 0.0) || !(r.re_max > r.re_min) || !(r.im_max > r.im_min))
    throw ConfigError("validate: rectangle must satisfy 0 < re_min < re_max and im_min < im_max");
  if (c.validation.samples == 0) throw ConfigError("validate.samples: must be positive");
  if (c.output_dir.empty()) throw ConfigError("output.dir: must not be empty");
}

inline ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ExperimentConfig c;
  const auto& known = detail::known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) {
      if (body.empty()) throw ConfigError("unknown top-level key '" + section + "'");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      const std::string name = section + "." + key;
      if (!it->second.count(key)) throw ConfigError("unknown key '" + name + "'");
      const std::string v = detail::trim(node.data());
      using namespace detail;
      if (section == "model") {
        if (key == "kind") c.model_kind = v;
        else if (key == "alphas") c.alphas = parse_numbers(name, v);
        else if (key == "taus") c.taus = parse_numbers(name, v);
        else c.dgamma = parse_double(name, v);
      } else if (section == "grid") {
        if (key == "x_min") c.grid.x_min = parse_double(name, v);
        else if (key == "x_max") c.grid.x_max = parse_double(name, v);
        else if (key == "dx") c.grid.dx = parse_double(name, v);
        else if (key == "dt") c.grid.dt = parse_double(name, v);
        else if (key == "n_steps") c.grid.n_steps = parse_unsigned(name, v);
        else c.grid.record_times = parse_numbers(name, v);
      } else if (section == "initial") {
        if (key == "kind") c.ic_kind = v;
        else if (key == "T0") c.T0 = parse_double(name, v);
        else c.epsilon = parse_double(name, v);
      } else if (section == "run") {
        if (key == "schemes") c.schemes = parse_list(name, v);
        else if (key == "strict_instability") c.strict_instability = parse_bool(name, v);
        else c.self_check = parse_bool(name, v);
      } else if (section == "raw") {
        if (key == "nu") c.raw.nu = parse_double(name, v);
        else c.raw.alpha_w = parse_double(name, v);
      } else if (section == "quadrature") {
        if (key == "rel_tol") c.quadrature.rel_tol = parse_double(name, v);
        else if (key == "abs_tol") c.quadrature.abs_tol = parse_double(name, v);
        else if (key == "decay_exponent") c.quadrature.decay_exponent = parse_double(name, v);
        else if (key == "max_panels") c.quadrature.max_panels = parse_unsigned(name, v);
        else if (key == "substitute_endpoint") c.quadrature.substitute_endpoint = parse_bool(name, v);
        else if (v == "rotated") c.quadrature.contour = ContourKind::rotated;
        else if (v == "branch-cut") c.quadrature.contour = ContourKind::branch_cut;
        else throw ConfigError(name + ": expected rotated or branch-cut, got '" + v + "'");
      } else if (section == "validate") {
        auto& val = c.validation;
        if (key == "samples") val.samples = parse_unsigned(name, v);
        else if (key == "seed") val.seed = parse_unsigned(name, v);
        else if (key == "xis") val.xis = parse_numbers(name, v);
        else if (key == "re_min") val.rectangle.re_min = parse_double(name, v);
        else if (key == "re_max") val.rectangle.re_max = parse_double(name, v);
        else if (key == "im_min") val.rectangle.im_min = parse_double(name, v);
        else if (key == "im_max") val.rectangle.im_max = parse_double(name, v);
        else val.planted_zero = parse_bool(name, v);
      } else {
        c.output_dir = v;
      }
    }
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

/// The fully resolved configuration in the input format; parse_config of the
/// result reproduces `c`.
inline std::string render_config(const ExperimentConfig& c) {
  using detail::list_text;
  using detail::shortest;
  std::ostringstream o;
  o << "[model]\nkind = " << c.model_kind << "\nalphas = " << list_text(c.alphas) << "\ntaus = " << list_text(c.taus)
    << "\ndgamma = " << shortest(c.dgamma) << "\n\n";
  o << "[grid]\nx_min = " << shortest(c.grid.x_min) << "\nx_max = " << shortest(c.grid.x_max)
    << "\ndx = " << shortest(c.grid.dx) << "\ndt = " << shortest(c.grid.dt) << "\nn_steps = " << c.grid.n_steps
    << "\nrecord_times = " << list_text(c.grid.record_times) << "\n\n";
  o << "[initial]\nkind = " << c.ic_kind << "\nT0 = " << shortest(c.T0) << "\nepsilon = " << shortest(c.epsilon)
    << "\n\n";
  o << "[run]\nschemes = " << list_text(c.schemes) << "\nstrict_instability = " << (c.strict_instability ? "true" : "false")
    << "\nself_check = " << (c.self_check ? "true" : "false") << "\n\n";
  o << "[raw]\nnu = " << shortest(c.raw.nu) << "\nalpha_w = " << shortest(c.raw.alpha_w) << "\n\n";
  o << "[quadrature]\nrel_tol = " << shortest(c.quadrature.rel_tol) << "\nabs_tol = " << shortest(c.quadrature.abs_tol)
    << "\ndecay_exponent = " << shortest(c.quadrature.decay_exponent) << "\nmax_panels = " << c.quadrature.max_panels
    << "\nsubstitute_endpoint = " << (c.quadrature.substitute_endpoint ? "true" : "false") << "\ncontour = "
    << (c.quadrature.contour == ContourKind::rotated ? "rotated" : "branch-cut") << "\n\n";
  const auto& v = c.validation;
  o << "[validate]\nsamples = " << v.samples << "\nseed = " << v.seed << "\nxis = " << list_text(v.xis)
    << "\nre_min = " << shortest(v.rectangle.re_min) << "\nre_max = " << shortest(v.rectangle.re_max)
    << "\nim_min = " << shortest(v.rectangle.im_min) << "\nim_max = " << shortest(v.rectangle.im_max)
    << "\nplanted_zero = " << (v.planted_zero ? "true" : "false") << "\n\n";
  o << "[output]\ndir = " << c.output_dir << "\n";
  return o.str();
}

}  // namespace fracheat
