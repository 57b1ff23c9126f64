#pragma once

#include <optional>
#include <string>

#include "hcv/cost.hpp"
#include "hcv/integrator.hpp"
#include "hcv/model.hpp"
#include "hcv/optimizer.hpp"
#include "hcv/steady_states.hpp"

namespace hcv {

enum class OutcomeLabel {
  svr,          // viral load below detection at end of treatment / follow-up
  pvr,          // initial response but detectable load at end of treatment
  relapse,      // load re-crossed the detection threshold during follow-up
  nonresponse,  // never dropped to half the initial load during treatment
};

const char* to_string(OutcomeLabel label);

/// Result of a treatment-phase run (optionally extended by a follow-up).
struct ScenarioOutcome {
  OutcomeLabel label = OutcomeLabel::nonresponse;
  Trajectory treatment;
  std::optional<Trajectory> followup;
  ModelParameters params_used;  // includes the t_end the run actually used
  double detection_threshold = 0.0;
  double initial_viral_load = 0.0;
  double nadir_viral_load = 0.0;  // minimum total load during treatment
  double end_of_treatment_viral_load = 0.0;
  std::optional<double> end_of_followup_viral_load;
  std::optional<OptimizationResult> optimization;
  std::optional<std::string> warning;  // e.g. line-search stall, never fatal
};

/// Follow-up fragment: the post-treatment window on its own.
struct FollowupResult {
  OutcomeLabel label = OutcomeLabel::svr;  // svr or relapse
  Trajectory trajectory;
  ModelParameters params_used;
  double peak_viral_load = 0.0;
  double end_viral_load = 0.0;
};

/// Minimum of the total viral load over the stored nodes and a fixed 0.25-day
/// sampling grid of the trajectory.
double viral_nadir(const Trajectory& trajectory);

/// Maximum analogue of viral_nadir, used for relapse detection.
double viral_peak(const Trajectory& trajectory);

OutcomeLabel classify_treatment(const Trajectory& trajectory, double detection_threshold);

/// Treatment at a fixed dose over [0, horizon], starting from the drug-free
/// chronic equilibrium. The efficacy decay is disabled inside the window by
/// setting t_end = horizon. Throws std::runtime_error when no chronic
/// equilibrium exists for the given parameters.
ScenarioOutcome run_constant_dose(const ModelParameters& params, const ControlInput& dose,
                                  double horizon, double detection_threshold,
                                  const IntegratorSettings& integ);

/// Optimizes the schedule (starting from a constant dose on a uniform mesh)
/// and classifies the resulting treatment trajectory. A line-search stall is
/// recorded as a warning on the outcome, not raised.
ScenarioOutcome run_optimized(const ModelParameters& params, const CostWeights& weights,
                              const OptimizerSettings& opt, const IntegratorSettings& integ,
                              double horizon, double detection_threshold,
                              const ControlInput& initial_dose = pvr_reference_dose(),
                              const IterationCallback& callback = {});

/// Post-treatment window [params.t_end, params.t_end + followup_days] with the
/// terminal control decaying exponentially. Labels relapse as soon as the
/// total viral load touches the detection threshold anywhere in the window.
FollowupResult run_followup(const State& end_state, const ControlInput& terminal_control,
                            const ModelParameters& params, double followup_days,
                            double detection_threshold, const IntegratorSettings& integ);

}  // namespace hcv
