#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hcv/cost.hpp"
#include "hcv/integrator.hpp"
#include "hcv/schedule.hpp"

namespace hcv {

/// Projected gradient descent over the box [0,1]^2 per interval.
/// A grad_tol of 0 selects the automatic rule: stop when the projected
/// gradient max-norm falls below 1e-3 times its initial value.
struct OptimizerSettings {
  int max_iters = 500;
  double grad_tol = 0.0;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  /// Length, in control units, of the largest coordinate move tried first in
  /// the line search; the actual step size is this divided by the gradient
  /// max-norm.
  double initial_step = 1.0;
  std::size_t mesh_intervals = 224;

  static OptimizerSettings defaults() { return {}; }
  void validate() const;  // throws std::invalid_argument
};

enum class Termination {
  converged,            // projected gradient dropped below the threshold
  max_iters,            // iteration budget exhausted
  line_search_failure,  // no acceptable step found; recorded, not thrown
};

const char* to_string(Termination t);

struct OptimizationResult {
  ControlSchedule schedule;                            // feasible by construction
  std::vector<double> cost_history;                    // J per accepted iterate, non-increasing
  std::vector<double> projected_grad_norm_history;     // one entry per cost_history entry
  Termination termination = Termination::max_iters;
  Trajectory final_trajectory;                         // state path under `schedule`
  StiSwitchCounts switch_counts;                       // descriptive on/off structure
};

/// Clamps every pair into [0,1]^2. Throws std::invalid_argument on non-finite
/// input values.
std::vector<ControlInput> project(std::vector<ControlInput> values);

/// Called once for the initial point (iter 0, step 0) and once per accepted
/// iterate; used by the CLI to stream the iteration log.
using IterationCallback = std::function<void(int iter, double cost, double proj_grad_norm, double step)>;

/// Minimizes total_cost over piecewise-constant schedules on the mesh of
/// `initial_schedule`, starting from its values. The initial state is held
/// fixed. Deterministic for identical inputs.
OptimizationResult optimize(const ControlSchedule& initial_schedule, const State& initial_state,
                            const ModelParameters& params, const CostWeights& weights,
                            const OptimizerSettings& opt, const IntegratorSettings& integ,
                            const IterationCallback& callback = {});

}  // namespace hcv
