// fnls: experiment configuration (INI file sections + flag overrides).
//
//   [domain]        a b N
//   [model]         lambda zeta beta sigma
//   [wave]          omega c
//   [solver]        tol max_iter nu guess force continuation
//   [stepping]      T M scheme monitor_every blowup_linf_cap mass_drift_cap dealias
//   [run]           experiment r epsilon seed out_dir snapshots
//   [scan]          omega_max n_points margin
//   [semiclassical] amplitude phase
#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fnls/error.hpp"
#include "fnls/model.hpp"
#include "fnls/petviashvili.hpp"
#include "fnls/semiclassical.hpp"
#include "fnls/timestepper.hpp"

namespace fnls {

enum class Experiment { GroundState, Boosted, Evolve, Perturb, DScan, Semiclassical, Check };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::GroundState: return "ground-state";
    case Experiment::Boosted: return "boosted";
    case Experiment::Evolve: return "evolve";
    case Experiment::Perturb: return "perturb";
    case Experiment::DScan: return "d-scan";
    case Experiment::Semiclassical: return "semiclassical";
    case Experiment::Check: return "check";
  }
  return "?";
}

inline std::optional<Experiment> parse_experiment(const std::string& s) {
  for (auto e : {Experiment::GroundState, Experiment::Boosted, Experiment::Evolve, Experiment::Perturb,
                 Experiment::DScan, Experiment::Semiclassical, Experiment::Check}) {
    if (s == to_string(e)) return e;
  }
  return std::nullopt;
}

struct ExperimentConfig {
  Experiment experiment = Experiment::GroundState;
  double a = -50.0;
  double b = 50.0;
  std::size_t N = 4096;
  ModelParams model;
  WaveParams wave;
  // solver
  double tol = 1e-12;
  int max_iter = 1000;
  std::optional<double> nu;
  std::string guess = "gaussian";  ///< preset name or path to an FNLS file
  bool force = false;
  bool continuation = false;
  StepConfig stepping;
  // run
  double r = 1.0;
  double epsilon = 0.1;
  unsigned long seed = 1;
  std::string out_dir = "out";
  int snapshots = 11;  ///< snapshot profile files written by evolve/perturb
  // scan
  double omega_max = 3.0;
  int n_points = 50;
  double margin = 0.02;
  // semiclassical
  AmplitudeProfile amplitude = AmplitudeProfile::Sech;
  PhaseProfile phase = PhaseProfile::Zero;
};

namespace detail {

inline double parse_real(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
    throw Error(ErrorCode::ConfigInvalid, key + ": '" + v + "' is not a finite number");
  }
  return d;
}

inline long parse_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long n = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw Error(ErrorCode::ConfigInvalid, key + ": '" + v + "' is not an integer");
  }
  return n;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::ConfigInvalid, key + ": '" + v + "' is not a boolean");
}

}  // namespace detail

struct ConfigKey {
  std::string section;
  std::string name;
  std::string help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;

  std::string qualified() const { return section + "." + name; }
};

inline const std::vector<ConfigKey>& config_keys() {
  using C = ExperimentConfig;
  using detail::parse_bool;
  using detail::parse_int;
  using detail::parse_real;
  static const std::vector<ConfigKey> keys = [] {
    auto fmt = [](double v) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.15g", v);
      return std::string(buf);
    };
    std::vector<ConfigKey> k;
    auto add = [&](std::string s, std::string n, std::string h, auto set, auto get) {
      k.push_back(ConfigKey{std::move(s), std::move(n), std::move(h), set, get});
    };
    add("domain", "a", "left end of the periodic domain",
        [](C& c, const std::string& v) { c.a = parse_real("a", v); }, [fmt](const C& c) { return fmt(c.a); });
    add("domain", "b", "right end of the periodic domain",
        [](C& c, const std::string& v) { c.b = parse_real("b", v); }, [fmt](const C& c) { return fmt(c.b); });
    add("domain", "N", "number of grid points (power of two)",
        [](C& c, const std::string& v) {
          const long n = parse_int("N", v);
          if (n <= 0) throw Error(ErrorCode::ConfigInvalid, "N: must be positive");
          c.N = static_cast<std::size_t>(n);
        },
        [](const C& c) { return std::to_string(c.N); });
    add("model", "lambda", "dispersion coefficient",
        [](C& c, const std::string& v) { c.model.lambda = parse_real("lambda", v); },
        [fmt](const C& c) { return fmt(c.model.lambda); });
    add("model", "zeta", "nonlinearity sign (+1 focusing, -1 defocusing)",
        [](C& c, const std::string& v) { c.model.zeta = parse_real("zeta", v); },
        [fmt](const C& c) { return fmt(c.model.zeta); });
    add("model", "beta", "nonlocality exponent",
        [](C& c, const std::string& v) { c.model.beta = parse_real("beta", v); },
        [fmt](const C& c) { return fmt(c.model.beta); });
    add("model", "sigma", "nonlinearity power",
        [](C& c, const std::string& v) { c.model.sigma = parse_real("sigma", v); },
        [fmt](const C& c) { return fmt(c.model.sigma); });
    add("wave", "omega", "frequency",
        [](C& c, const std::string& v) { c.wave.omega = parse_real("omega", v); },
        [fmt](const C& c) { return fmt(c.wave.omega); });
    add("wave", "c", "speed",
        [](C& c, const std::string& v) { c.wave.c = parse_real("c", v); }, [fmt](const C& c) { return fmt(c.wave.c); });
    add("solver", "tol", "stop when Error(n) <= tol",
        [](C& c, const std::string& v) { c.tol = parse_real("tol", v); }, [fmt](const C& c) { return fmt(c.tol); });
    add("solver", "max_iter", "iteration limit",
        [](C& c, const std::string& v) { c.max_iter = static_cast<int>(parse_int("max_iter", v)); },
        [](const C& c) { return std::to_string(c.max_iter); });
    add("solver", "nu", "stabilization exponent (default (2 sigma+2)/(2 sigma+1))",
        [](C& c, const std::string& v) {
          if (v == "default") {
            c.nu.reset();
          } else {
            c.nu = parse_real("nu", v);
          }
        },
        [fmt](const C& c) { return c.nu ? fmt(*c.nu) : std::string("default"); });
    add("solver", "guess", "gaussian, sech, exact-beta0 or an FNLS file",
        [](C& c, const std::string& v) { c.guess = v; }, [](const C& c) { return c.guess; });
    add("solver", "force", "skip the existence-window guard",
        [](C& c, const std::string& v) { c.force = parse_bool("force", v); },
        [](const C& c) { return std::string(c.force ? "true" : "false"); });
    add("solver", "continuation", "reach beta by continuation from beta = 0",
        [](C& c, const std::string& v) { c.continuation = parse_bool("continuation", v); },
        [](const C& c) { return std::string(c.continuation ? "true" : "false"); });
    add("stepping", "T", "final time",
        [](C& c, const std::string& v) { c.stepping.T = parse_real("T", v); },
        [fmt](const C& c) { return fmt(c.stepping.T); });
    add("stepping", "M", "number of time steps",
        [](C& c, const std::string& v) { c.stepping.M = static_cast<int>(parse_int("M", v)); },
        [](const C& c) { return std::to_string(c.stepping.M); });
    add("stepping", "scheme", "strang2 or yoshida4",
        [](C& c, const std::string& v) {
          if (v == "strang2") c.stepping.scheme = Scheme::Strang2;
          else if (v == "yoshida4") c.stepping.scheme = Scheme::Yoshida4;
          else throw Error(ErrorCode::ConfigInvalid, "scheme: '" + v + "' is not strang2 or yoshida4");
        },
        [](const C& c) { return std::string(to_string(c.stepping.scheme)); });
    add("stepping", "monitor_every", "steps between diagnostics rows (0: M/100)",
        [](C& c, const std::string& v) { c.stepping.monitor_every = static_cast<int>(parse_int("monitor_every", v)); },
        [](const C& c) { return std::to_string(c.stepping.monitor_every); });
    add("stepping", "blowup_linf_cap", "L^inf level treated as blow-up",
        [](C& c, const std::string& v) { c.stepping.blowup_linf_cap = parse_real("blowup_linf_cap", v); },
        [fmt](const C& c) { return fmt(c.stepping.blowup_linf_cap); });
    add("stepping", "mass_drift_cap", "relative mass drift that stops the run",
        [](C& c, const std::string& v) { c.stepping.mass_drift_cap = parse_real("mass_drift_cap", v); },
        [fmt](const C& c) { return fmt(c.stepping.mass_drift_cap); });
    add("stepping", "dealias", "2/3-rule dealiasing of the nonlinear term",
        [](C& c, const std::string& v) { c.stepping.dealias = parse_bool("dealias", v); },
        [](const C& c) { return std::string(c.stepping.dealias ? "true" : "false"); });
    add("run", "experiment", "ground-state, boosted, evolve, perturb, d-scan, semiclassical or check",
        [](C& c, const std::string& v) {
          auto e = parse_experiment(v);
          if (!e) throw Error(ErrorCode::ConfigInvalid, "experiment: unknown experiment '" + v + "'");
          c.experiment = *e;
        },
        [](const C& c) { return std::string(to_string(c.experiment)); });
    add("run", "r", "perturbation factor applied to the profile",
        [](C& c, const std::string& v) { c.r = parse_real("r", v); }, [fmt](const C& c) { return fmt(c.r); });
    add("run", "epsilon", "semiclassical parameter",
        [](C& c, const std::string& v) { c.epsilon = parse_real("epsilon", v); },
        [fmt](const C& c) { return fmt(c.epsilon); });
    add("run", "seed", "seed for randomized checks",
        [](C& c, const std::string& v) {
          const long s = parse_int("seed", v);
          if (s < 0) throw Error(ErrorCode::ConfigInvalid, "seed: must be nonnegative");
          c.seed = static_cast<unsigned long>(s);
        },
        [](const C& c) { return std::to_string(c.seed); });
    add("run", "out_dir", "output directory",
        [](C& c, const std::string& v) { c.out_dir = v; }, [](const C& c) { return c.out_dir; });
    add("run", "snapshots", "number of snapshot profile files for evolve/perturb",
        [](C& c, const std::string& v) { c.snapshots = static_cast<int>(parse_int("snapshots", v)); },
        [](const C& c) { return std::to_string(c.snapshots); });
    add("scan", "omega_max", "upper end of the omega scan",
        [](C& c, const std::string& v) { c.omega_max = parse_real("omega_max", v); },
        [fmt](const C& c) { return fmt(c.omega_max); });
    add("scan", "n_points", "number of scan frequencies",
        [](C& c, const std::string& v) { c.n_points = static_cast<int>(parse_int("n_points", v)); },
        [](const C& c) { return std::to_string(c.n_points); });
    add("scan", "margin", "fraction of the range skipped above c^2/(4 lambda)",
        [](C& c, const std::string& v) { c.margin = parse_real("margin", v); },
        [fmt](const C& c) { return fmt(c.margin); });
    add("semiclassical", "amplitude", "sech, gaussian or zero",
        [](C& c, const std::string& v) {
          auto a = parse_amplitude(v);
          if (!a) throw Error(ErrorCode::ConfigInvalid, "amplitude: unknown profile '" + v + "'");
          c.amplitude = *a;
        },
        [](const C& c) { return std::string(to_string(c.amplitude)); });
    add("semiclassical", "phase", "zero or 2sech",
        [](C& c, const std::string& v) {
          auto s = parse_phase(v);
          if (!s) throw Error(ErrorCode::ConfigInvalid, "phase: unknown profile '" + v + "'");
          c.phase = *s;
        },
        [](const C& c) { return std::string(to_string(c.phase)); });
    return k;
  }();
  return keys;
}

/// Looks up "name" or "section.name".
inline const ConfigKey* find_config_key(const std::string& key) {
  for (const auto& k : config_keys()) {
    if (k.name == key || k.qualified() == key) return &k;
  }
  return nullptr;
}

inline void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto* k = find_config_key(key);
  if (!k) throw Error(ErrorCode::ConfigInvalid, "unknown key '" + key + "'");
  k->set(cfg, value);
}

/// Applies "key=value".
inline void apply_assignment(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::ConfigInvalid, "expected key=value, got '" + assignment + "'");
  }
  set_config_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

/// Reads an INI file on top of cfg. Keys outside the known sections are rejected.
inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    if (e.line() == 0) throw Error(ErrorCode::Io, "cannot read config " + path + ": " + e.message());
    throw Error(ErrorCode::ConfigInvalid, path + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw Error(ErrorCode::ConfigInvalid, "key '" + section + "' must sit inside a [section]");
    }
    for (const auto& [name, value] : body) {
      const std::string q = section + "." + name;
      const ConfigKey* key = nullptr;
      for (const auto& k : config_keys()) {
        if (k.qualified() == q) key = &k;
      }
      if (!key) throw Error(ErrorCode::ConfigInvalid, "unknown key '" + q + "'");
      key->set(cfg, value.get_value<std::string>());
    }
  }
}

/// Checks the combination of values against the owning modules' preconditions.
inline void validate_config(const ExperimentConfig& c) {
  auto bad = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::ConfigInvalid, field + ": " + why);
  };
  if (!(c.a < c.b)) bad("domain", "a must be below b");
  if (c.N < 8 || (c.N & (c.N - 1)) != 0) bad("N", "must be a power of two >= 8");
  if (!(c.model.lambda != 0.0)) bad("lambda", "must be nonzero");
  if (c.model.zeta != 1.0 && c.model.zeta != -1.0) bad("zeta", "must be +1 or -1");
  if (!(c.model.beta > -1.0 && c.model.beta < 2.0)) bad("beta", "must lie in (-1, 2)");
  if (!(c.model.sigma > 0.0)) bad("sigma", "must be positive");
  if (!(c.wave.omega > 0.0)) bad("omega", "must be positive");
  if (!(c.tol > 0.0)) bad("tol", "must be positive");
  if (c.max_iter < 1) bad("max_iter", "must be >= 1");
  if (!(c.stepping.T > 0.0)) bad("T", "must be positive");
  if (c.stepping.M < 1) bad("M", "must be >= 1");
  if (c.stepping.monitor_every < 0) bad("monitor_every", "must be >= 0");
  if (!(c.stepping.blowup_linf_cap > 0.0)) bad("blowup_linf_cap", "must be positive");
  if (!(c.stepping.mass_drift_cap > 0.0)) bad("mass_drift_cap", "must be positive");
  if (c.snapshots < 0) bad("snapshots", "must be >= 0");
  if (c.experiment == Experiment::DScan) {
    if (c.n_points < 5) bad("n_points", "must be >= 5");
    if (!(c.margin > 0.0 && c.margin < 1.0)) bad("margin", "must lie in (0, 1)");
    if (!(c.omega_max > c.wave.c * c.wave.c / (4.0 * c.model.lambda))) bad("omega_max", "must exceed c^2/(4 lambda)");
  }
  if (c.experiment == Experiment::Semiclassical && !(c.epsilon > 0.0 && c.epsilon <= 0.5)) {
    bad("epsilon", "must lie in (0, 0.5]");
  }
}

}  // namespace fnls
