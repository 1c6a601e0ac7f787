// fnls command-line tool: one subcommand per experiment.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fnls/fnls.hpp"

namespace {

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : list) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

void print_report(const fnls::RunReport& r) {
  for (const auto& [k, v] : r.facts) {
    if (k.rfind("config.", 0) == 0) continue;
    std::cout << k << ": " << v << '\n';
  }
  for (const auto& [name, hash] : r.files) std::cout << "artifact: " << (r.out_dir / name).string() << '\n';
  if (r.exit_code != 0) std::cerr << "error: " << r.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using fnls::Experiment;
  CLI::App app{"Solitary waves and dynamics of the nonlocal NLS equation i u_t - lambda u_xx = zeta D^beta(|u|^{2 sigma} u)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("fnls ") + fnls::kVersion);

  std::string config_file;
  std::optional<std::string> out_dir;
  std::string sweep;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> assignments;
  std::map<std::string, std::string> flag_values;

  const std::vector<std::pair<Experiment, std::string>> commands = {
      {Experiment::GroundState, "Petviashvili solve for a standing-wave profile"},
      {Experiment::Boosted, "Petviashvili solve for a boosted standing wave (speed wave.c)"},
      {Experiment::Evolve, "split-step evolution of r times a computed or stored profile"},
      {Experiment::Perturb, "evolution of r times a profile with a stability verdict"},
      {Experiment::DScan, "scan of d(omega) and d''(omega) at speed wave.c"},
      {Experiment::Semiclassical, "small-epsilon run with first-break detection"},
      {Experiment::Check, "randomized property checks on the configured grid and model"},
  };
  std::optional<Experiment> chosen;
  for (const auto& [exp, help] : commands) {
    auto* sub = app.add_subcommand(fnls::to_string(exp), help);
    sub->add_option("--config", config_file, "INI file with [domain], [model], ... sections; flags override it")
        ->check(CLI::ExistingFile);
    sub->add_option("--out-dir", out_dir, "output directory (default: $OUT_DIR, then 'out')");
    sub->add_option("--set", assignments, "section.key=value, repeatable");
    sub->add_option("--sweep", sweep, "section.key=v1,v2,... : one run per value in out-dir/section.key=value");
    sub->add_option("--threads", threads, "worker threads for --sweep")->check(CLI::PositiveNumber);
    for (const auto& key : fnls::config_keys()) {
      if (key.qualified() == "run.experiment" || key.qualified() == "run.out_dir") continue;
      const auto name = key.qualified();
      sub->add_option_function<std::string>(
          "--" + name, [&flag_values, name](const std::string& v) { flag_values[name] = v; }, key.help);
    }
    sub->callback([&chosen, e = exp] { chosen = e; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fnls::exit_code::config;
  }

  fnls::ExperimentConfig cfg;
  try {
    if (const char* env = std::getenv("OUT_DIR"); env && *env) cfg.out_dir = env;
    if (!config_file.empty()) fnls::load_config_file(cfg, config_file);
    for (const auto& [k, v] : flag_values) fnls::set_config_value(cfg, k, v);
    for (const auto& a : assignments) fnls::apply_assignment(cfg, a);
    if (out_dir) cfg.out_dir = *out_dir;
    cfg.experiment = *chosen;
  } catch (const fnls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fnls::exit_code_for(e.code());
  }

  if (sweep.empty()) {
    const auto report = fnls::run_experiment(cfg);
    print_report(report);
    return report.exit_code;
  }

  const auto eq = sweep.find('=');
  if (eq == std::string::npos || eq == 0) {
    std::cerr << "error: --sweep expects section.key=v1,v2,...\n";
    return fnls::exit_code::config;
  }
  const auto key = sweep.substr(0, eq);
  const auto values = split_values(sweep.substr(eq + 1));
  std::vector<fnls::RunReport> reports;
  try {
    reports = fnls::run_sweep(cfg, key, values, threads);
  } catch (const fnls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fnls::exit_code_for(e.code());
  }
  int rc = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::cout << key << '=' << values[i] << ": exit " << reports[i].exit_code << " (" << reports[i].out_dir.string()
              << ")";
    if (reports[i].exit_code != 0) std::cout << ": " << reports[i].message;
    std::cout << '\n';
    if (rc == 0) rc = reports[i].exit_code;
  }
  return rc;
}
