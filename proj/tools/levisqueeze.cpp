#include "levisqueeze/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace levisqueeze;
  CLI::App app{"Gaussian-state squeezing simulator for a levitated particle in a cavity"};
  app.require_subcommand(1, 1);

  Invocation inv;
  std::string out_path, format, figure;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", inv.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", inv.overrides, "Override a config key (key=value); repeatable")
        ->take_all()
        ->allow_extra_args(false);
    sub->add_option("--out", out_path, "Output file (a sidecar <out>.json is written next to it)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (name == "figure") {
      sub->add_option("--figure", figure, "Figure id")->check(CLI::IsMember(figure_ids()));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  inv.command = app.get_subcommands().front()->get_name();
  if (!out_path.empty()) inv.out_path = out_path;
  if (!format.empty()) inv.format = format;
  if (!figure.empty()) inv.figure = figure;
  return run(inv, std::cout, std::cerr);
}
