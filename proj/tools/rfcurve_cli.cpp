#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rfc/experiments.hpp"
#include "rfc/records.hpp"

int main(int argc, char** argv) {
  CLI::App app{"random-field curve model toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "JSON config file")->required();

  std::string summarize_path;
  CLI::App* summarize =
      app.add_subcommand("summarize", "aggregate a record stream to CSV");
  summarize->add_option("records", summarize_path, "record file")->required();

  std::string verify_path;
  CLI::App* verify =
      app.add_subcommand("verify", "re-check record-stream invariants");
  verify->add_option("records", verify_path, "record file")->required();

  std::string plot_path, plot_experiment;
  CLI::App* plotdata =
      app.add_subcommand("plotdata", "emit per-sample CSV for plotting");
  plotdata->add_option("records", plot_path, "record file")->required();
  plotdata->add_option("--experiment", plot_experiment, "experiment name")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const rfc::RunOutcome out = rfc::run_experiment(config_path);
      std::cout << out.summary;
      std::cout << "records: " << out.records_path << " (written "
                << out.written << ", skipped " << out.skipped << ")\n";
      return out.exit_code;
    }
    if (summarize->parsed()) {
      std::cout << rfc::summarize_records_csv(
          rfc::load_records(summarize_path));
      return 0;
    }
    if (verify->parsed()) {
      const rfc::VerifyOutcome out = rfc::verify_records_file(verify_path);
      std::cout << out.report;
      return out.ok ? 0 : 1;
    }
    if (plotdata->parsed()) {
      std::cout << rfc::plotdata_csv(rfc::load_records(plot_path),
                                     plot_experiment);
      return 0;
    }
  } catch (const rfc::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
