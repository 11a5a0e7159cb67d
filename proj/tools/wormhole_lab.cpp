// wormhole-lab: experiment harness CLI.
//
//   wormhole-lab run --config cfg.json [--threads T] [--out DIR]
//   wormhole-lab validate --config cfg.json
//
// The WORMHOLE_LAB_OUT environment variable overrides the config's output
// directory; --out overrides both. Exit codes: 0 success, 2 config error,
// 3 runtime error.

#include <optional>
#include <string>

#include "CLI11.hpp"

#include "wormhole/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"MaxLikelihood linear-stack experiment harness"};
  app.require_subcommand(1);

  std::string run_config, validate_config;
  unsigned threads = 0;
  std::string out_dir;

  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config");
  run_cmd->add_option("--config", run_config, "path to the run config")->required();
  run_cmd->add_option("--threads", threads, "worker threads (overrides config)");
  run_cmd->add_option("--out", out_dir, "output directory (overrides config and env)");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "parse and validate a config, then exit");
  validate_cmd->add_option("--config", validate_config, "path to the run config")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run_cmd->parsed()) {
    std::optional<unsigned> threads_opt;
    if (threads > 0) threads_opt = threads;
    std::optional<std::string> out_opt;
    if (!out_dir.empty()) out_opt = out_dir;
    return wormhole::run(run_config, threads_opt, out_opt);
  }
  return wormhole::validate(validate_config);
}
