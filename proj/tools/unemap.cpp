#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "unemap/config.hpp"
#include "unemap/pipeline.hpp"
#include "unemap/text_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spell-record classification pipeline: coding, SOM, Ward broad classes, "
               "profiles, transitions and MCA"};
  app.set_version_flag("--version", std::string(unemap::kVersion));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string output_dir;
  std::string seed;
  const char* help[] = {
      "ingest", "read and validate spell records from [input]",
      "synth", "generate a synthetic cohort from [synthetic]",
      "code", "discretize and standardize the individual records",
      "train", "train the self-organizing map",
      "cluster", "group map units into broad classes with Ward linkage",
      "profile", "class profiles, qualitative distributions, neighbor distances",
      "transitions", "transition tables, significant cells and RSS indicators",
      "mca", "multiple correspondence analysis of the qualitative variables",
      "plot", "write SVG figures from the stage artifacts",
      "all", "run every stage in order",
  };
  for (std::size_t i = 0; i < std::size(help); i += 2) {
    auto* sub = app.add_subcommand(help[i], help[i + 1]);
    sub->add_option("-c,--config", config_path, "configuration file (INI)")->required();
    sub->add_option("-o,--output-dir", output_dir, "override output.dir");
    sub->add_option("--seed", seed, "override run.seed");
  }

  CLI11_PARSE(app, argc, argv);

  const auto stage = unemap::stage_from_name(app.get_subcommands().front()->get_name());
  unemap::PipelineConfig config;
  try {
    config = unemap::load_config(config_path);
    unemap::apply_environment(config);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (!seed.empty()) {
      const auto v = unemap::text::parse_int(seed);
      if (!v || *v < 0) throw unemap::ConfigError("--seed", "expected a non-negative integer");
      config.seed = static_cast<std::uint64_t>(*v);
    }
    config.validate();
  } catch (const unemap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return unemap::run_command(*stage, config, std::cerr);
}
