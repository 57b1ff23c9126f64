#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hcv/integrator_settings.hpp"
#include "hcv/model.hpp"
#include "hcv/schedule.hpp"

namespace hcv {

/// Hard numerical failure inside an integration, reported with the time at
/// which the run had to stop.
class IntegrationError : public std::runtime_error {
 public:
  enum class Kind {
    step_underflow,  // step size shrank below the resolvable limit
    non_finite,      // state left the finite range (blow-up)
    negative_state,  // a compartment fell below -10 * abs_tol
  };

  IntegrationError(Kind kind, double time, const std::string& message)
      : std::runtime_error(message), kind_(kind), time_(time) {}

  Kind kind() const { return kind_; }
  double time() const { return time_; }

 private:
  Kind kind_;
  double time_;
};

/// Accepted integration nodes with the derivative on each side of every node,
/// so a piecewise cubic Hermite interpolant stays valid across control
/// discontinuities. Times are strictly increasing; interpolation on
/// [times[i], times[i+1]] uses deriv_out[i] and deriv_in[i+1].
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<State> deriv_in;   // derivative at the node coming from the left
  std::vector<State> deriv_out;  // derivative at the node going to the right
  ControlSchedule controls_used;

  std::size_t size() const { return times.size(); }
  double start_time() const { return times.front(); }
  double end_time() const { return times.back(); }
  const State& initial_state() const { return states.front(); }
  const State& final_state() const { return states.back(); }

  /// Cubic Hermite interpolation; queries at stored nodes return the stored
  /// state bit-for-bit. Throws std::out_of_range outside the time span.
  State state_at(double t) const;
  std::vector<State> sample(const std::vector<double>& query_times) const;
};

/// Integrates the model under a piecewise-constant schedule. The run restarts
/// at every schedule breakpoint (and at params.t_end if it lies inside the
/// window), so controls are never smeared across a step. The state must start
/// in the nonnegative orthant and the schedule must cover [t0, t1].
Trajectory integrate(const State& initial, const ControlSchedule& schedule,
                     const ModelParameters& params, double t0, double t1,
                     const IntegratorSettings& settings);

/// Convenience overload for a constant dose over the whole window.
Trajectory integrate(const State& initial, const ControlInput& constant_control,
                     const ModelParameters& params, double t0, double t1,
                     const IntegratorSettings& settings);

}  // namespace hcv
