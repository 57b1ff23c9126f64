#include "hcv/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "hcv/detail/rk45.hpp"

namespace hcv {

void IntegratorSettings::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument(std::string(name) + " must be strictly positive");
    }
  };
  positive(rel_tol, "rel_tol");
  positive(abs_tol, "abs_tol");
  positive(max_step, "max_step");
  positive(initial_step, "initial_step");
  if (rel_tol > 1e-2) {
    throw std::invalid_argument("rel_tol must not exceed 1e-2");
  }
}

namespace {

State hermite(double t, double t0, double t1, const State& y0, const State& f0, const State& y1,
              const State& f1) {
  const double h = t1 - t0;
  const double u = (t - t0) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double c0 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double c1 = (u3 - 2.0 * u2 + u) * h;
  const double c2 = -2.0 * u3 + 3.0 * u2;
  const double c3 = (u3 - u2) * h;

  const auto a0 = y0.to_array(), d0 = f0.to_array(), a1 = y1.to_array(), d1 = f1.to_array();
  std::array<double, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = c0 * a0[i] + c1 * d0[i] + c2 * a1[i] + c3 * d1[i];
  }
  return State::from_array(out);
}

}  // namespace

State Trajectory::state_at(double t) const {
  if (times.empty()) throw std::out_of_range("empty trajectory");
  if (t < times.front() || t > times.back()) {
    // Tolerate rounding-level overshoot (stage times of a clipped step can
    // land an ulp past a boundary); anything beyond that is a caller error.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::abs(times.front()), std::abs(times.back())});
    if (t >= times.front() - slack && t <= times.back() + slack) {
      t = std::clamp(t, times.front(), times.back());
    } else {
      throw std::out_of_range("query time outside the trajectory span");
    }
  }
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  std::size_t idx = static_cast<std::size_t>(it - times.begin());
  if (idx < times.size() && times[idx] == t) return states[idx];
  // t lies strictly between times[idx-1] and times[idx].
  return hermite(t, times[idx - 1], times[idx], states[idx - 1], deriv_out[idx - 1], states[idx],
                 deriv_in[idx]);
}

std::vector<State> Trajectory::sample(const std::vector<double>& query_times) const {
  std::vector<State> out;
  out.reserve(query_times.size());
  for (double t : query_times) out.push_back(state_at(t));
  return out;
}

namespace {

using detail::Vec;

// Breakpoints of the integration window: schedule mesh points inside (t0, t1)
// plus t_end when it falls inside, with t0/t1 as the outer cuts.
std::vector<double> build_cuts(const ControlSchedule& schedule, const ModelParameters& params,
                               double t0, double t1) {
  std::vector<double> cuts;
  cuts.push_back(t0);
  for (double m : schedule.mesh) {
    if (m > t0 && m < t1) cuts.push_back(m);
  }
  if (params.t_end > t0 && params.t_end < t1) cuts.push_back(params.t_end);
  cuts.push_back(t1);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

[[noreturn]] void raise(const char* kind, double t) {
  if (std::strcmp(kind, "underflow") == 0) {
    throw IntegrationError(IntegrationError::Kind::step_underflow, t,
                           "step size underflow at t = " + std::to_string(t));
  }
  throw IntegrationError(IntegrationError::Kind::non_finite, t,
                         "state left the finite range near t = " + std::to_string(t));
}

}  // namespace

Trajectory integrate(const State& initial, const ControlSchedule& schedule,
                     const ModelParameters& params, double t0, double t1,
                     const IntegratorSettings& settings) {
  params.validate();
  settings.validate();
  schedule.validate();
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
    throw std::invalid_argument("integration window must satisfy t0 < t1");
  }
  if (schedule.start_time() > t0 || schedule.end_time() < t1) {
    throw std::invalid_argument("schedule does not cover the integration window");
  }
  for (double v : initial.to_array()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("initial state must be finite and nonnegative");
    }
  }

  const double floor = -10.0 * settings.abs_tol;
  Trajectory traj;
  traj.controls_used = schedule;

  State y = initial;
  const std::vector<double> cuts = build_cuts(schedule, params, t0, t1);
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double a = cuts[seg];
    const double b = cuts[seg + 1];
    const ControlInput u = schedule.value_at(a);

    auto f = [&](double t, const Vec<4>& v) -> Vec<4> {
      return rhs(State::from_array(v), u, params, t).to_array();
    };

    // Node at the segment start: entering derivative from the previous
    // segment (or the fresh one at the very beginning), outgoing derivative
    // under the new control.
    const State f_start = State::from_array(f(a, y.to_array()));
    if (traj.times.empty()) {
      traj.times.push_back(a);
      traj.states.push_back(y);
      traj.deriv_in.push_back(f_start);
      traj.deriv_out.push_back(f_start);
    } else {
      traj.deriv_out.back() = f_start;
    }

    auto on_accept = [&](double t, const Vec<4>& v, const Vec<4>& dv) {
      for (double comp : v) {
        if (comp < floor) {
          throw IntegrationError(
              IntegrationError::Kind::negative_state, t,
              "compartment fell below -10*abs_tol at t = " + std::to_string(t));
        }
      }
      const State st = State::from_array(v);
      const State d = State::from_array(dv);
      traj.times.push_back(t);
      traj.states.push_back(st);
      traj.deriv_in.push_back(d);
      traj.deriv_out.push_back(d);
    };

    Vec<4> yv = y.to_array();
    detail::rk45_segment<4>(f, a, b, yv, settings, on_accept, raise);
    y = State::from_array(yv);
  }
  return traj;
}

Trajectory integrate(const State& initial, const ControlInput& constant_control,
                     const ModelParameters& params, double t0, double t1,
                     const IntegratorSettings& settings) {
  constant_control.validate();
  return integrate(initial, ControlSchedule::constant(constant_control, t0, t1), params, t0, t1,
                   settings);
}

}  // namespace hcv
