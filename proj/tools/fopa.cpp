#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fopa/app/figures.hpp"
#include "fopa/app/parallel.hpp"
#include "fopa/app/sweep.hpp"
#include "fopa/app/verify.hpp"

namespace {

using namespace fopa::app;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerify = 4;

// Flags of a single-point subcommand, forwarded as config keys.
struct PointFlags {
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::optional<std::string>>> keys;
  std::vector<std::string> eta;  // "--eta η_s η_i"
  std::optional<std::string> output;
  unsigned threads = 0;

  void add(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    keys.emplace_back(key, std::nullopt);
    cmd->add_option(flag, keys.back().second, help);
  }
};

void add_point_flags(CLI::App* cmd, PointFlags& f, const std::string& regime) {
  f.keys.reserve(32);
  f.add(cmd, "--gp,--Gp", "Gp", "normalized gain G'");
  f.add(cmd, "--g", "g", "target signal gain (solves for G')");
  f.add(cmd, "--eta-s", "eta_s", "signal detection efficiency");
  f.add(cmd, "--eta-i", "eta_i", "idler detection efficiency");
  cmd->add_option("--eta", f.eta, "signal and idler efficiencies")->expected(2);
  f.add(cmd, "--r", "r", "idler weight: number, fixed:x, opt or photon-ratio");
  f.add(cmd, "--excess", "excess_rel_variance", "relative intensity variance of the input");
  f.add(cmd, "--I0", "I0", "mean input photon number");
  if (regime == "factorable" || regime == "engine") {
    f.add(cmd, "--F", "F", "spectral matching |F|");
    f.add(cmd, "--F-phase", "F_phase", "phase of F (rad)");
  }
  if (regime == "broadband" || regime == "engine") {
    f.add(cmd, "--p", "p", "pump-to-signal bandwidth ratio");
    f.add(cmd, "--s", "s", "signal-to-filter bandwidth ratio (0: no filter)");
    f.add(cmd, "--n-trunc", "n_trunc", "series truncation order");
  }
  if (regime == "engine") {
    f.add(cmd, "--kernel", "engine.kernel", "broadband | factorable | delta | general");
    f.add(cmd, "--points", "engine.points", "grid points per axis");
    f.add(cmd, "--span", "engine.span", "grid span in units of sigma (0: auto)");
    f.add(cmd, "--engine-trunc", "engine.n_trunc", "operator series order");
    f.add(cmd, "--beta2", "engine.beta2", "group-velocity dispersion");
    f.add(cmd, "--beta3", "engine.beta3", "third-order dispersion");
    f.add(cmd, "--spm", "engine.spm", "2 gamma P_p");
    f.add(cmd, "--length", "engine.length", "fiber length");
    f.add(cmd, "--spontaneous", "engine.spontaneous", "include vacuum-seeded output (true/false)");
  }
  cmd->add_option("--config", f.config, "config file with key = value lines");
  cmd->add_option("--set", f.sets, "override a config key (key=value), repeatable");
  cmd->add_option("-o,--output", f.output, "write CSV (+ .gp, .meta) here instead of stdout");
  cmd->add_option("--threads", f.threads, "worker threads (default: FOPA_THREADS or all cores)");
}

ConfigMap gather(const PointFlags& f, const std::string& regime) {
  ConfigMap config = f.config.empty() ? ConfigMap{} : parse_config_file(f.config);
  if (!regime.empty()) apply_override(config, "regime=" + regime, "subcommand");
  for (const auto& [key, value] : f.keys)
    if (value) apply_override(config, key + "=" + *value, "--" + key);
  if (!f.eta.empty()) apply_override(config, "eta=" + f.eta[0] + " " + f.eta[1], "--eta");
  for (const auto& s : f.sets) apply_override(config, s, "--set " + s);
  return config;
}

int run_spec(const SweepSpec& spec, const std::optional<std::string>& output, unsigned threads) {
  const auto rows = run_sweep(spec, threads ? threads : default_threads());
  const std::string path = output ? *output : spec.output;
  if (path.empty() || path == "-") {
    write_csv(std::cout, rows);
  } else {
    write_outputs(spec, rows, path);
    std::cerr << "wrote " << path << " (" << rows.size() << " rows)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum noise of pulse-pumped fiber optical parametric amplifiers"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  std::vector<std::pair<std::string, PointFlags>> regimes{
      {"singlemode", {}}, {"factorable", {}}, {"broadband", {}}, {"engine", {}}};
  std::vector<CLI::App*> regime_cmds;
  for (auto& [name, flags] : regimes) {
    auto* cmd = app.add_subcommand(name, "evaluate the " + name + " model (sweeps allowed via --set sweep.<axis>=...)");
    add_point_flags(cmd, flags, name);
    regime_cmds.push_back(cmd);
  }

  PointFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "run a sweep described by a config file");
  sweep->add_option("config", sweep_flags.config, "config file")->required();
  sweep->add_option("--set", sweep_flags.sets, "override a config key (key=value), repeatable");
  sweep->add_option("-o,--output", sweep_flags.output, "output CSV path");
  sweep->add_option("--threads", sweep_flags.threads, "worker threads");

  std::string fig_dir = ".";
  unsigned fig_threads = 0;
  std::vector<std::pair<std::string, CLI::App*>> fig_cmds;
  for (const auto& id : figure_ids()) {
    auto* cmd = app.add_subcommand(id, "regenerate dataset " + id);
    cmd->add_option("--output-dir", fig_dir, "directory for CSV, .gp and .meta files");
    cmd->add_option("--threads", fig_threads, "worker threads");
    fig_cmds.emplace_back(id, cmd);
  }
  auto* figs = app.add_subcommand("figures", "regenerate every dataset");
  figs->add_option("--output-dir", fig_dir, "directory for CSV, .gp and .meta files");
  figs->add_option("--threads", fig_threads, "worker threads");

  VerifyOptions vopt;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--n-trunc", vopt.conservation_n_trunc, "series order for the conservation check");
  verify->add_option("--series-trunc", vopt.series_n_trunc, "series order for all other checks");
  verify->add_option("--points", vopt.engine_points, "engine grid points per axis");
  verify->add_option("--threads", vopt.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    for (std::size_t i = 0; i < regimes.size(); ++i) {
      if (!regime_cmds[i]->parsed()) continue;
      const auto& [name, flags] = regimes[i];
      return run_spec(spec_from_config(gather(flags, name)), flags.output, flags.threads);
    }
    if (sweep->parsed())
      return run_spec(spec_from_config(gather(sweep_flags, "")), sweep_flags.output,
                      sweep_flags.threads);
    const unsigned threads = fig_threads ? fig_threads : default_threads();
    for (const auto& [id, cmd] : fig_cmds)
      if (cmd->parsed()) {
        std::cerr << "wrote " << run_figure(id, fig_dir, threads) << '\n';
        return 0;
      }
    if (figs->parsed()) {
      for (const auto& id : figure_ids()) std::cerr << "wrote " << run_figure(id, fig_dir, threads) << '\n';
      return 0;
    }
    if (verify->parsed()) {
      if (vopt.threads == 0) vopt.threads = default_threads();
      const auto results = run_acceptance(
          vopt, [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; });
      return all_passed(results) ? 0 : kExitVerify;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fopa::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fopa::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
