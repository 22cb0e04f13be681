#include <CLI11.hpp>

#include <cstdint>
#include <string>

#include "aol/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Analysis operator learning experiments"};
  app.require_subcommand(1);

  aol::CommandOptions opts;
  std::uint64_t seed = 0;
  const char* commands[][2] = {
      {"recover-synthetic", "Operator recovery from synthetic cosparse data"},
      {"identifiability", "Sampled local identifiability conditions"},
      {"learn-patches", "Learn an operator from image patches"},
      {"denoise", "Patch-wise denoising with a given operator"},
      {"phantom", "Write a Shepp-Logan phantom as PGM"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "JSON config file")->required();
    sub->add_option("--out", opts.out, "Output directory")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--threads", opts.threads, "Worker threads for independent trials")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  aol::init_logging();
  opts.command = app.get_subcommands().front()->get_name();
  if (app.get_subcommands().front()->count("--seed") > 0) opts.seed = seed;
  return aol::run_command(opts);
}
