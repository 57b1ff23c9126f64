// hcv-optctl: simulate and optimize interferon/ribavirin dosing in a
// four-compartment hepatitis C model. Scenarios: steady-state, simulate,
// optimize, followup, full. Configuration comes from a flat JSON file; every
// key has a default, so the tool runs out of the box.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hcv/config.hpp"
#include "hcv/integrator.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kNumericalFailure = 1;
constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Hepatitis C treatment simulator and dosing-schedule optimizer.\n"
      "Writes trajectory/schedule CSVs and a summary into the output directory."};

  std::string scenario_name;
  std::string config_path;
  std::string out_dir;
  app.add_option("scenario", scenario_name,
                 "One of: steady-state, simulate, optimize, followup, full "
                 "(overrides the config's scenario)");
  app.add_option("--config", config_path, "Path to a JSON config file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  bool print_config = false;
  app.add_flag("--print-config", print_config,
               "Print the fully resolved config as JSON and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message; the exit code contract is ours
    return kUsageError;
  }

  try {
    hcv::RunConfig config =
        config_path.empty() ? hcv::RunConfig{} : hcv::parse_config_file(config_path);
    if (!scenario_name.empty()) {
      config.scenario = hcv::scenario_from_string(scenario_name);
    }
    if (!out_dir.empty()) {
      config.output_dir = out_dir;
    }
    if (print_config) {
      std::cout << hcv::serialize_config(config);
      return kOk;
    }
    return static_cast<int>(hcv::run(config, std::cout));
  } catch (const hcv::IntegrationError& e) {
    std::cerr << "error: integration failed at t = " << e.time() << ": " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
