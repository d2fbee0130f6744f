#include "assortify/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"assortify — multimodal assortment generation pipeline"};
  app.get_formatter()->column_width(28);

  std::string command;
  std::string joined;
  for (const auto& name : assortify::pipeline::command_names()) {
    if (!joined.empty()) joined += ", ";
    joined += name;
  }
  app.add_option("command", command, "one of: " + joined)->required();

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (defaults apply)");

  std::vector<std::string> overrides;
  app.add_option("--set", overrides,
                 "dotted-path override, e.g. --set topicmodel.topics=10")
      ->take_all();

  std::uint64_t seed = 0;
  const auto* seed_opt =
      app.add_option("--seed", seed,
                     "shorthand for the command's rng seed (synth, train, infer)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (seed_opt->count() > 0) {
    if (command == "synth") {
      overrides.push_back("synth.seed=" + std::to_string(seed));
    } else if (command == "train" || command == "infer") {
      overrides.push_back("topicmodel.seed=" + std::to_string(seed));
    } else {
      std::cerr << "config error: --seed applies only to synth, train, infer\n";
      return 2;
    }
  }

  std::optional<std::filesystem::path> config_file;
  if (!config_path.empty()) config_file = config_path;
  return assortify::pipeline::run(command, config_file, overrides);
}
