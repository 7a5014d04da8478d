// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ellik/experiments.hpp"

namespace {

int run_with(const std::string& config_path, const std::vector<std::string>& overrides,
             const std::string& forced_experiment) {
  try {
    ellik::RawConfig raw;
    if (!config_path.empty()) raw = ellik::parse_config_file(config_path);
    if (!forced_experiment.empty()) raw.sections["experiment"]["name"] = forced_experiment;
    for (const auto& assignment : overrides) ellik::apply_override(raw, assignment);
    const ellik::ExperimentConfig config = ellik::validate_config(raw);
    const auto artifacts = ellik::run_experiment(config);
    for (const auto& path : artifacts) std::cout << "wrote " << path << "\n";
    return 0;
  } catch (const ellik::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ellik: numerical experiments on the operator -div(gamma grad u) + i k u"};
  app.require_subcommand(0, 1);

  bool list_experiments = false;
  app.add_flag("--list-experiments", list_experiments, "Print the experiment names and exit");

  std::string run_config;
  std::vector<std::string> run_overrides;
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", run_config, "Path to the config file")->required();
  run->add_option("--set", run_overrides, "Override a key: section.key=value");

  struct Sub {
    CLI::App* cmd;
    std::string name;
    std::string config;
    std::vector<std::string> overrides;
  };
  std::vector<Sub> subs;
  subs.reserve(ellik::experiment_names().size());
  for (const auto& [exp, name] : ellik::experiment_names()) {
    Sub sub;
    sub.name = name;
    sub.cmd = app.add_subcommand(name, "Run the " + name + " experiment");
    subs.push_back(sub);
    Sub& stored = subs.back();
    stored.cmd->add_option("--config", stored.config, "Optional base config file");
    stored.cmd->add_option("--set", stored.overrides, "Override a key: section.key=value");
  }

  CLI11_PARSE(app, argc, argv);

  if (list_experiments) {
    for (const auto& [exp, name] : ellik::experiment_names()) std::cout << name << "\n";
    return 0;
  }
  if (run->parsed()) return run_with(run_config, run_overrides, "");
  for (const auto& sub : subs)
    if (sub.cmd->parsed()) return run_with(sub.config, sub.overrides, sub.name);

  std::cout << app.help();
  return 0;
}
