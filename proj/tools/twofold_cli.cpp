#include "twofold/error.hpp"
#include "twofold/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace tx = twofold::experiment;

int main(int argc, char** argv) {
  CLI::App app{"Melnikov analysis and hybrid simulation of planar reversible Filippov systems"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 config error, 3 hypothesis violated (h1/h2), 4 numerical failure.\n"
      "Every CSV starts with a line '# twofold-cli <version> config-hash=<hex>'.");

  std::string config_path;
  int jobs = 1;
  std::string out_dir;
  std::vector<double> eps;

  struct Sub {
    tx::Command cmd;
    const char* help;
  };
  const Sub subs[] = {
      {tx::Command::Analyze, "Folds, sigma_v, q_v and the sigma_bar table of the unperturbed model"},
      {tx::Command::Melnikov, "Tabulate M(theta, x) on a grid"},
      {tx::Command::Predict, "Simple zeros of the Melnikov function and their classification"},
      {tx::Command::Simulate, "Hybrid trajectories for each epsilon"},
      {tx::Command::Verify, "Periodic orbits of the perturbed system near each prediction"},
  };
  std::vector<std::pair<CLI::App*, tx::Command>> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(std::string(tx::to_string(s.cmd)), s.help);
    sub->add_option("--config", config_path, "JSON experiment file")->required()->check(CLI::ExistingFile);
    sub->add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_option("--epsilon", eps, "Epsilon list, descending (overrides the config)");
    sub->footer("CSV columns:\n" + std::string(tx::csv_columns(s.cmd)));
    apps.emplace_back(sub, s.cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  tx::Command cmd = tx::Command::Analyze;
  for (const auto& [sub, c] : apps) {
    if (sub->parsed()) cmd = c;
  }

  tx::ExperimentConfig cfg;
  try {
    cfg = tx::load_config(config_path);
    if (!eps.empty()) tx::override_epsilons(cfg, eps);
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << '\n';
    return tx::exit_code_for(e);
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;

  const tx::RunResult res = tx::run(cmd, cfg, jobs);
  for (const auto& p : res.artifacts) std::cout << p.string() << '\n';
  if (!res.message.empty()) std::cerr << res.message << '\n';
  return res.exit_code;
}
