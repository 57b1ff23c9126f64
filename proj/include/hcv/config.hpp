#pragma once

#include <string>

#include "hcv/cost.hpp"
#include "hcv/integrator_settings.hpp"
#include "hcv/model.hpp"
#include "hcv/optimizer.hpp"

namespace hcv {

enum class Scenario { steady_state, simulate, optimize, followup, full };

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);  // throws std::invalid_argument

/// One run, fully described. Parsed from a flat JSON object; every field has
/// a default, so {} is a valid config that runs the full pipeline.
struct RunConfig {
  ModelParameters parameters;
  CostWeights weights;
  OptimizerSettings optimizer;
  IntegratorSettings integrator;
  Scenario scenario = Scenario::full;
  ControlInput dose = pvr_reference_dose();
  double horizon = 224.0;
  double followup_days = 180.0;
  double detection_threshold = 50.0;  // IU/ml
  std::string output_dir = "out";
  double output_cadence = 0.25;  // days

  void validate() const;  // throws std::invalid_argument with the offending bound
};

/// Parses a flat JSON object. Unknown keys and out-of-range values are fatal;
/// the error message names the key (and the violated bounds where they apply).
RunConfig parse_config(const std::string& json_text);
RunConfig parse_config_file(const std::string& path);

/// Inverse of parse_config: parse_config(serialize_config(c)) reproduces c
/// exactly (numbers are emitted with round-trip precision).
std::string serialize_config(const RunConfig& config);

enum class RunStatus : int {
  ok = 0,
  numerical_failure = 1,
  usage_error = 2,
};

/// Executes the configured scenario, writing CSV outputs and a human-readable
/// summary into config.output_dir. Progress and the summary also go to `out`.
RunStatus run(const RunConfig& config, std::ostream& out);

}  // namespace hcv
