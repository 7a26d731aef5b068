// Command-line front end: `decoh run <scenario.json>` computes and writes all
// artifacts, `decoh check <scenario.json>` validates without heavy work.  The
// JSON report goes to stdout; the exit status encodes the failure class.
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "decoh/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Reduced Weyl dynamics of a particle coupled to a massless Boson "
      "field: decoherence curves, spectral densities, superselection decay "
      "tables, and finite-mode oracle checks."};
  app.require_subcommand(1);

  std::string scenario;
  std::string output_dir;
  int oracle_modes = 0;
  int threads = 0;
  decoh::ScenarioOptions opts;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario, "Scenario JSON file")->required();
    sub->add_option("--output-dir", output_dir,
                    "Artifact directory (default: $DECOH_OUTPUT_DIR or .)");
    sub->add_option("--oracle-modes", oracle_modes,
                    "Override the oracle mode count");
    sub->add_option("--threads", threads, "Worker thread count");
    sub->add_flag("--strict", opts.strict, "Treat warnings as errors");
  };
  CLI::App* cmd_run =
      app.add_subcommand("run", "Run a scenario and write its artifacts");
  CLI::App* cmd_check =
      app.add_subcommand("check", "Validate a scenario (no heavy computation)");
  add_common(cmd_run);
  add_common(cmd_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return decoh::kExitConfigInvalid;
  }

  if (!output_dir.empty()) opts.output_dir = output_dir;
  if (oracle_modes > 0) opts.oracle_modes = oracle_modes;
  if (threads > 0) opts.threads = threads;

  const decoh::RunReport report = cmd_run->parsed()
                                      ? decoh::run_scenario(scenario, opts)
                                      : decoh::check_scenario(scenario, opts);
  std::fputs(report.report_json.c_str(), stdout);
  std::fputc('\n', stdout);
  return report.exit_code;
}
