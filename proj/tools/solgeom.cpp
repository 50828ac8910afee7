// solgeom: build word-metric balls and run geometry probes from a config file.

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "solgeom/experiment.hpp"

int main(int argc, char **argv) {
  using namespace solgeom;
  CLI::App app{"Word-metric experiments on K x| Z groups"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out = ".";
  unsigned workers = 1;
  double mem_gib = 2.0;

  std::string keys = "config keys:\n";
  for (const auto &[k, d] : config_keys())
    keys += "  " + k + ": " + d + "\n";
  app.footer(keys);

  const std::map<std::string, std::string> about = {
      {"ball", "enumerate the ball of radius R and write sphere sizes"},
      {"ac-probe", "restricted distance between witness pairs"},
      {"depth-probe", "dead-end depth of the pocket elements"},
      {"valuation-check", "sample the valuation axioms"},
      {"lemma-check", "fit and check the triangle lemma constant"},
      {"quarter-fit", "maximal valuation excess per sphere"}};
  for (const auto &name : kCommands) {
    CLI::App *sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out, "output directory (ball file and CSV)");
    sub->add_option("--workers", workers, "worker threads for ball enumeration")
        ->check(CLI::Range(1u, 1024u));
    sub->add_option("--mem-gib", mem_gib, "memory budget for ball enumeration, GiB")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  RunOptions opts;
  opts.out = out;
  opts.workers = workers;
  opts.memory_budget = static_cast<std::size_t>(mem_gib * double(std::size_t{1} << 30));
  return run_command(command, cfg, opts, std::cerr);
}
