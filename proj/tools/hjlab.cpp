#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hjlab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hjlab: coupled forward-backward Boltzmann laboratory"};
  app.require_subcommand(1);

  hjlab::CommandOptions opts;
  std::string out;
  long long seed = -1;

  for (const char* name : {"verify", "solve", "functional", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "configuration file")->required();
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--threads", opts.threads, "worker threads (default: HJLAB_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for the initial preset; the terminal preset uses seed + 1")
        ->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hjlab::kExitValidation;
  }

  if (!out.empty()) opts.out_dir = out;
  if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
  const std::string command = app.get_subcommands().front()->get_name();
  return hjlab::run_command(command, opts, std::cout, std::cerr);
}
