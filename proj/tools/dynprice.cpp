// dynprice: scenario generation, policy runs and parameter sweeps.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynprice/cli.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::int64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "configuration file (defaults to the bundled scenario)");
  cmd->add_option("--out", opts.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", opts.seed, "master seed (overrides the file)");
}

dynprice::ConfigDocument load_document(const CommonOptions& opts) {
  auto doc = opts.config.empty() ? dynprice::ConfigDocument{} : dynprice::ConfigDocument::load(opts.config);
  if (opts.seed) doc.set_number("seed", static_cast<double>(*opts.seed));
  return doc;
}

dynprice::CliConfig load_config(const CommonOptions& opts) {
  auto cfg = dynprice::bind_config(load_document(opts));
  if (!opts.out.empty()) cfg.output_dir = opts.out;
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic pricing simulation and policy evaluation"};
  app.require_subcommand(1);

  CommonOptions gen_opts, run_opts, sweep_opts;
  auto* gen = app.add_subcommand("generate", "write the scenario as CSV");
  add_common(gen, gen_opts);
  auto* run = app.add_subcommand("run", "run the configured policy and write report, ledger and trajectory");
  add_common(run, run_opts);
  auto* sweep = app.add_subcommand("sweep", "run once per value of a numeric config key");
  add_common(sweep, sweep_opts);
  std::string axis;
  std::vector<double> values;
  sweep->add_option("--axis", axis, "config key, e.g. demand_model.rho")->required();
  sweep->add_option("--values", values, "values to sweep")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dynprice::cli::kExitError;
  }

  try {
    if (*gen) return dynprice::cli::cmd_generate(load_config(gen_opts), std::cout);
    if (*run) return dynprice::cli::cmd_run(load_config(run_opts), std::cout);
    if (*sweep) {
      const auto doc = load_document(sweep_opts);
      auto out_dir = dynprice::bind_config(doc).output_dir;
      if (!sweep_opts.out.empty()) out_dir = sweep_opts.out;
      return dynprice::cli::cmd_sweep(doc, out_dir, axis, values, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dynprice::cli::kExitError;
  }
  return dynprice::cli::kExitError;
}
