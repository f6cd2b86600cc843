// oamplex: run duplexer / tomography scenarios from a config file.
//
//   oamplex simulate   --config cfg.json [--out DIR]
//   oamplex tomography --config cfg.json [--out DIR] [--seed U64] [--exact]
//   oamplex render     --config cfg.json [--out DIR]
//   oamplex fidelity   TARGET.json MEASURED.json
//
// Errors are reported on stderr as a single JSON object
// {"error": <code>, "message": <text>} with a nonzero exit status.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "oamplex/error.hpp"
#include "oamplex/interchange.hpp"
#include "oamplex/scenario.hpp"

namespace {

int report_error(std::string_view code, const std::string& message, int status) {
  nlohmann::json record{{"error", code}, {"message", message}};
  std::cerr << record.dump() << "\n";
  return status;
}

struct ScenarioArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool exact = false;
};

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& args, bool measurement_flags) {
  cmd->add_option("--config", args.config, "Scenario config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "Output directory (overrides outputs.directory)");
  if (measurement_flags) {
    cmd->add_option("--seed", args.seed, "RNG seed (overrides measurement.seed)");
    cmd->add_flag("--exact", args.exact, "Use exact probabilities instead of simulated counts");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OAM even/odd duplexer simulator and tomography pipeline"};
  app.require_subcommand(1);

  ScenarioArgs simulate_args;
  ScenarioArgs tomography_args;
  ScenarioArgs render_args;
  auto* simulate = app.add_subcommand("simulate", "Push the sources through the duplexer; write port density matrices");
  auto* tomography = app.add_subcommand("tomography", "Simulate, then reconstruct the bright port by tomography");
  auto* render = app.add_subcommand("render", "Write bright/dark port intensity images only");
  add_scenario_flags(simulate, simulate_args, false);
  add_scenario_flags(tomography, tomography_args, true);
  add_scenario_flags(render, render_args, false);

  std::string target;
  std::string measured;
  auto* fid = app.add_subcommand("fidelity", "Compare two density-matrix files");
  fid->add_option("target", target, "Target density matrix")->required()->check(CLI::ExistingFile);
  fid->add_option("measured", measured, "Measured density matrix")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (fid->parsed()) {
      std::cout << oamplex::compare_density_files(target, measured);
      return 0;
    }

    auto run = [](const ScenarioArgs& args, oamplex::Command command) {
      const auto cfg = oamplex::parse_config(oamplex::read_text_file(args.config));
      oamplex::RunOptions options;
      options.command = command;
      if (!args.out.empty()) options.out_dir = args.out;
      options.seed = args.seed;
      options.exact = args.exact;
      const auto result = oamplex::run_scenario(cfg, options);
      for (const auto& path : result.written) std::cout << path.string() << "\n";
      if (result.dark_bright_ratio) std::cout << "dark/bright ratio: " << *result.dark_bright_ratio << "\n";
      if (result.fidelity) std::cout << "fidelity: " << *result.fidelity << "\n";
    };
    if (simulate->parsed()) run(simulate_args, oamplex::Command::Simulate);
    if (tomography->parsed()) run(tomography_args, oamplex::Command::Tomography);
    if (render->parsed()) run(render_args, oamplex::Command::Render);
  } catch (const oamplex::Error& e) {
    const bool config_error = e.code() == oamplex::ErrorCode::SyntaxError || e.code() == oamplex::ErrorCode::ValidationError;
    return report_error(oamplex::to_string(e.code()), e.what(), config_error ? 2 : 1);
  } catch (const std::exception& e) {
    return report_error("Internal", e.what(), 1);
  }
  return 0;
}
