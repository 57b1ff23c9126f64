#pragma once

#include <vector>

#include "hcv/integrator.hpp"
#include "hcv/model.hpp"
#include "hcv/schedule.hpp"

namespace hcv {

/// Weights of the running cost
///   w_V*(V_I + V_NI)^2 + w_I*I^2 - w_T*T^2 + w_eps*eps^2 + w_rho*rho^2.
/// The healthy-cell term enters negatively (it is a reward), so the total
/// cost is typically a large negative number at these population scales.
struct CostWeights {
  double w_V = 1.0;
  double w_I = 1.0;
  double w_T = 1.0;
  double w_eps = 1.0;
  double w_rho = 1.0;

  static CostWeights defaults() { return {}; }
  void validate() const;  // throws std::invalid_argument on non-finite/negative
};

/// Integrand of the objective at one instant. The control penalty uses the
/// raw schedule values, not the decayed efficacies.
double running_cost(const State& x, const ControlInput& control, const CostWeights& weights);

struct CostEvaluation {
  double cost = 0.0;
  Trajectory trajectory;  // the state path that produced the cost
};

/// Integrates the objective over the schedule span by carrying the running
/// cost as a fifth state component, so the quadrature error obeys the same
/// tolerance as the state itself.
CostEvaluation evaluate_cost(const ControlSchedule& schedule, const State& initial,
                             const ModelParameters& params, const CostWeights& weights,
                             const IntegratorSettings& settings);

double total_cost(const ControlSchedule& schedule, const State& initial,
                  const ModelParameters& params, const CostWeights& weights,
                  const IntegratorSettings& settings);

struct ControlGradient {
  double d_eps = 0.0;
  double d_rho = 0.0;
};

struct GradientResult {
  std::vector<ControlGradient> per_interval;  // dJ/d(eps_j), dJ/d(rho_j)
  double cost = 0.0;                          // objective at the same schedule
  Trajectory forward;                         // forward path, reusable by callers
};

/// Exact gradient of total_cost with respect to every interval's (eps, rho),
/// computed by one forward pass and one backward costate sweep. The backward
/// sweep integrates the costate with the same scheme and tolerances and reads
/// the forward state through the trajectory's dense output.
GradientResult cost_gradient(const ControlSchedule& schedule, const State& initial,
                             const ModelParameters& params, const CostWeights& weights,
                             const IntegratorSettings& settings);

}  // namespace hcv
