#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bubble-enriched finite elements for advection-dominated problems", "bubblezoom"};
  app.require_subcommand(1);

  app.add_subcommand("list", "List the built-in problems")->callback([] {
    for (const auto& name : bz::example_names()) std::cout << name << '\n';
    std::cout << "custom\n";
  });

  auto* run = app.add_subcommand("run", "Run a built-in example or a custom constant-coefficient problem");
  std::string target;
  std::string config_file;
  run->add_option("target", target, "example0 ... example4 or custom")->required();
  run->add_option("--config", config_file, "flat key = value file; flags override it")->check(CLI::ExistingFile);
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : bz::cli::config_keys()) {
    options[key.name] = run->add_option("--" + key.name, flags[key.name], key.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (!run->parsed()) return 0;

  try {
    bz::cli::ExperimentConfig cfg;
    std::map<std::string, std::string> settings;
    if (!config_file.empty()) settings = bz::cli::read_config_file(config_file);
    settings["target"] = target;
    for (const auto& [name, opt] : options)
      if (opt->count() > 0) settings[name] = flags[name];
    // a scheme list in the file must not survive a --scheme flag and vice versa
    if (options["scheme"]->count() > 0) settings.erase("schemes");
    if (options["schemes"]->count() > 0) settings.erase("scheme");
    for (const auto& [key, value] : settings) cfg.set(key, value);
    return bz::cli::run(cfg, std::cout);
  } catch (const bz::InvalidArgument& e) {
    std::cerr << "bubblezoom: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "bubblezoom: " << e.what() << '\n';
    return 1;
  }
}
