#include "hcv/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hcv {

namespace {

constexpr double kScanCadence = 0.25;  // days, extrema scan resolution

// Node times plus a uniform grid, so extrema between widely spaced nodes are
// not missed.
template <typename Fold>
double scan_viral_load(const Trajectory& traj, double init, Fold fold) {
  double acc = init;
  for (const State& s : traj.states) acc = fold(acc, s.viral_load());
  const double t0 = traj.start_time();
  const double t1 = traj.end_time();
  const auto n = static_cast<std::size_t>((t1 - t0) / kScanCadence);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = t0 + kScanCadence * static_cast<double>(i);
    if (t >= t1) break;
    acc = fold(acc, traj.state_at(t).viral_load());
  }
  return acc;
}

}  // namespace

const char* to_string(OutcomeLabel label) {
  switch (label) {
    case OutcomeLabel::svr: return "SVR";
    case OutcomeLabel::pvr: return "PVR";
    case OutcomeLabel::relapse: return "relapse";
    case OutcomeLabel::nonresponse: return "nonresponse";
  }
  return "unknown";
}

double viral_nadir(const Trajectory& trajectory) {
  return scan_viral_load(trajectory, std::numeric_limits<double>::infinity(),
                         [](double a, double b) { return std::min(a, b); });
}

double viral_peak(const Trajectory& trajectory) {
  return scan_viral_load(trajectory, -std::numeric_limits<double>::infinity(),
                         [](double a, double b) { return std::max(a, b); });
}

OutcomeLabel classify_treatment(const Trajectory& trajectory, double detection_threshold) {
  const double end_load = trajectory.final_state().viral_load();
  if (end_load < detection_threshold) return OutcomeLabel::svr;
  const double initial_load = trajectory.initial_state().viral_load();
  // Partial response requires the nadir to undercut the starting load by at
  // least a factor of two.
  if (2.0 * viral_nadir(trajectory) <= initial_load) return OutcomeLabel::pvr;
  return OutcomeLabel::nonresponse;
}

namespace {

State chronic_start(const ModelParameters& params) {
  const InfectedEquilibrium eq = infected_steady_state(params, 0.0, 0.0);
  if (!eq.exists) {
    throw std::runtime_error(
        "treatment scenario needs a drug-free chronic equilibrium, but none exists "
        "for these parameters");
  }
  return eq.state;
}

void fill_treatment_numbers(ScenarioOutcome& outcome) {
  outcome.initial_viral_load = outcome.treatment.initial_state().viral_load();
  outcome.nadir_viral_load = viral_nadir(outcome.treatment);
  outcome.end_of_treatment_viral_load = outcome.treatment.final_state().viral_load();
  outcome.label = classify_treatment(outcome.treatment, outcome.detection_threshold);
}

}  // namespace

ScenarioOutcome run_constant_dose(const ModelParameters& params, const ControlInput& dose,
                                  double horizon, double detection_threshold,
                                  const IntegratorSettings& integ) {
  dose.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be strictly positive");
  }
  if (!(detection_threshold > 0.0) || !std::isfinite(detection_threshold)) {
    throw std::invalid_argument("detection_threshold must be strictly positive");
  }
  ModelParameters p = params;
  p.t_end = horizon;  // treatment covers the whole window, no decay inside it

  ScenarioOutcome outcome;
  outcome.params_used = p;
  outcome.detection_threshold = detection_threshold;
  outcome.treatment = integrate(chronic_start(p), dose, p, 0.0, horizon, integ);
  fill_treatment_numbers(outcome);
  return outcome;
}

ScenarioOutcome run_optimized(const ModelParameters& params, const CostWeights& weights,
                              const OptimizerSettings& opt, const IntegratorSettings& integ,
                              double horizon, double detection_threshold,
                              const ControlInput& initial_dose, const IterationCallback& callback) {
  initial_dose.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be strictly positive");
  }
  if (!(detection_threshold > 0.0) || !std::isfinite(detection_threshold)) {
    throw std::invalid_argument("detection_threshold must be strictly positive");
  }
  ModelParameters p = params;
  p.t_end = horizon;

  const ControlSchedule start =
      ControlSchedule::uniform(initial_dose, 0.0, horizon, opt.mesh_intervals);
  OptimizationResult opt_result =
      optimize(start, chronic_start(p), p, weights, opt, integ, callback);

  ScenarioOutcome outcome;
  outcome.params_used = p;
  outcome.detection_threshold = detection_threshold;
  outcome.treatment = opt_result.final_trajectory;
  fill_treatment_numbers(outcome);
  if (opt_result.termination == Termination::line_search_failure) {
    outcome.warning = "optimizer stopped on a line-search stall; schedule kept as-is";
  }
  outcome.optimization = std::move(opt_result);
  return outcome;
}

FollowupResult run_followup(const State& end_state, const ControlInput& terminal_control,
                            const ModelParameters& params, double followup_days,
                            double detection_threshold, const IntegratorSettings& integ) {
  terminal_control.validate();
  if (!(followup_days > 0.0) || !std::isfinite(followup_days)) {
    throw std::invalid_argument("followup_days must be strictly positive");
  }
  if (!(detection_threshold > 0.0) || !std::isfinite(detection_threshold)) {
    throw std::invalid_argument("detection_threshold must be strictly positive");
  }

  FollowupResult result;
  result.params_used = params;
  result.trajectory = integrate(end_state, terminal_control, params, params.t_end,
                                params.t_end + followup_days, integ);
  result.peak_viral_load = viral_peak(result.trajectory);
  result.end_viral_load = result.trajectory.final_state().viral_load();
  result.label =
      result.peak_viral_load >= detection_threshold ? OutcomeLabel::relapse : OutcomeLabel::svr;
  return result;
}

}  // namespace hcv
