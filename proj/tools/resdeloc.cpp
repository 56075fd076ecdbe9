#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "resdeloc/config.hpp"
#include "resdeloc/errors.hpp"
#include "resdeloc/runner.hpp"

using namespace resdeloc;

int main(int argc, char** argv) {
  CLI::App app{"Green-function diagnostics for random Schroedinger operators on graphs"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  for (const char* name : {"green", "dos", "gamma-scan", "resonance", "lyapunov", "phase-scan", "verify-all"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return 1;
    }
    std::stringstream text;
    text << in.rdbuf();
    RunConfig config = parse_config(text.str(), command_from_string(command));
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    validate(config);

    RunOptions options;
    options.out_dir = out_dir;
    const RunResult r = run(config, options);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (r.exit_code != 0) std::cerr << "error: " << r.message << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
}
