#include "hcv/cost.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "hcv/detail/rk45.hpp"

// Costate derivation
// ------------------
// Objective: J = integral over the schedule span of
//   L = w_V*(V_I + V_NI)^2 + w_I*I^2 - w_T*T^2 + w_eps*eps_j^2 + w_rho*rho_j^2
// subject to the model dynamics x' = f(x, u, t), with piecewise-constant raw
// controls (eps_j, rho_j) and decayed efficacies
//   eb = eps_j * g(t),  rb = rho_j * g(t),  g(t) = exp(-k*(t - t_end)_+).
//
// With H = L + lambda . f, the costate solves lambda' = -dH/dx backward from
// lambda(end) = 0 (no terminal cost). Writing R = 1 - (T + I)/t_max:
//
//   -lambda_T' = -2*w_T*T + lambda_T*(r*R - r*T/t_max - d - beta*V_I)
//                + lambda_I*(beta*V_I - r*I/t_max)
//   -lambda_I' =  2*w_I*I - lambda_T*r*T/t_max
//                + lambda_I*(r*R - r*I/t_max - delta)
//                + lambda_V*(1-rb)*(1-eb)*p + lambda_W*rb*(1-eb)*p
//   -lambda_V' =  2*w_V*(V_I+V_NI) - lambda_T*beta*T + lambda_I*beta*T - lambda_V*c
//   -lambda_W' =  2*w_V*(V_I+V_NI) - lambda_W*c
//
// (lambda_V, lambda_W are the costates of V_I, V_NI.) The gradient entry of
// interval j is the integral of dH/du over that interval; since the decayed
// efficacies are linear in the raw values, d(eb)/d(eps_j) = g(t) and
//
//   dH/d(eps_j) = 2*w_eps*eps_j + g(t)*p*I*( -(1-rb)*lambda_V - rb*lambda_W )
//   dH/d(rho_j) = 2*w_rho*rho_j + g(t)*(1-eb)*p*I*( lambda_W - lambda_V )
//
// The backward sweep integrates (lambda, accum_eps, accum_rho) as one system,
// resetting the two accumulators at every mesh point, so each interval's
// integral falls out of the same adaptive run that advances the costate.

namespace hcv {

void CostWeights::validate() const {
  const auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string(name) + " must be finite and nonnegative");
    }
  };
  check(w_V, "w_V");
  check(w_I, "w_I");
  check(w_T, "w_T");
  check(w_eps, "w_eps");
  check(w_rho, "w_rho");
}

double running_cost(const State& x, const ControlInput& control, const CostWeights& weights) {
  const double v = x.V_I + x.V_NI;
  return weights.w_V * v * v + weights.w_I * x.I * x.I - weights.w_T * x.T * x.T +
         weights.w_eps * control.eps * control.eps + weights.w_rho * control.rho * control.rho;
}

namespace {

using detail::Vec;

[[noreturn]] void raise(const char* kind, double t) {
  if (std::strcmp(kind, "underflow") == 0) {
    throw IntegrationError(IntegrationError::Kind::step_underflow, t,
                           "step size underflow at t = " + std::to_string(t));
  }
  throw IntegrationError(IntegrationError::Kind::non_finite, t,
                         "state left the finite range near t = " + std::to_string(t));
}

}  // namespace

CostEvaluation evaluate_cost(const ControlSchedule& schedule, const State& initial,
                             const ModelParameters& params, const CostWeights& weights,
                             const IntegratorSettings& settings) {
  params.validate();
  settings.validate();
  schedule.validate();
  weights.validate();
  for (double v : initial.to_array()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("initial state must be finite and nonnegative");
    }
  }

  const double floor = -10.0 * settings.abs_tol;
  CostEvaluation out;
  out.trajectory.controls_used = schedule;
  Trajectory& traj = out.trajectory;

  Vec<5> y = {initial.T, initial.I, initial.V_I, initial.V_NI, 0.0};

  for (std::size_t j = 0; j < schedule.intervals(); ++j) {
    double a = schedule.mesh[j];
    double b = schedule.mesh[j + 1];
    const ControlInput u = schedule.values[j];

    auto f = [&](double t, const Vec<5>& v) -> Vec<5> {
      const State x{v[0], v[1], v[2], v[3]};
      const State dx = rhs(x, u, params, t);
      return {dx.T, dx.I, dx.V_I, dx.V_NI, running_cost(x, u, weights)};
    };

    // Split the interval at t_end so the kink of the decay law never sits
    // inside a step.
    std::vector<std::pair<double, double>> pieces;
    if (params.t_end > a && params.t_end < b) {
      pieces = {{a, params.t_end}, {params.t_end, b}};
    } else {
      pieces = {{a, b}};
    }

    for (const auto& [pa, pb] : pieces) {
      const Vec<5> f_start = f(pa, y);
      const State d_start{f_start[0], f_start[1], f_start[2], f_start[3]};
      if (traj.times.empty()) {
        traj.times.push_back(pa);
        traj.states.push_back(State{y[0], y[1], y[2], y[3]});
        traj.deriv_in.push_back(d_start);
        traj.deriv_out.push_back(d_start);
      } else {
        traj.deriv_out.back() = d_start;
      }

      auto on_accept = [&](double t, const Vec<5>& v, const Vec<5>& dv) {
        for (int i = 0; i < 4; ++i) {
          if (v[i] < floor) {
            throw IntegrationError(
                IntegrationError::Kind::negative_state, t,
                "compartment fell below -10*abs_tol at t = " + std::to_string(t));
          }
        }
        traj.times.push_back(t);
        traj.states.push_back(State{v[0], v[1], v[2], v[3]});
        const State d{dv[0], dv[1], dv[2], dv[3]};
        traj.deriv_in.push_back(d);
        traj.deriv_out.push_back(d);
      };

      detail::rk45_segment<5>(f, pa, pb, y, settings, on_accept, raise);
    }
  }
  out.cost = y[4];
  return out;
}

double total_cost(const ControlSchedule& schedule, const State& initial,
                  const ModelParameters& params, const CostWeights& weights,
                  const IntegratorSettings& settings) {
  return evaluate_cost(schedule, initial, params, weights, settings).cost;
}

GradientResult cost_gradient(const ControlSchedule& schedule, const State& initial,
                             const ModelParameters& params, const CostWeights& weights,
                             const IntegratorSettings& settings) {
  CostEvaluation forward = evaluate_cost(schedule, initial, params, weights, settings);

  GradientResult result;
  result.cost = forward.cost;
  result.per_interval.assign(schedule.intervals(), ControlGradient{});

  // Backward sweep state: four costates plus the two per-interval gradient
  // accumulators (reset at every mesh point).
  Vec<6> z{};
  const auto noop_accept = [](double, const Vec<6>&, const Vec<6>&) {};

  for (std::size_t jj = schedule.intervals(); jj-- > 0;) {
    const double a = schedule.mesh[jj];
    const double b = schedule.mesh[jj + 1];
    const ControlInput u = schedule.values[jj];

    auto f = [&](double t, const Vec<6>& zz) -> Vec<6> {
      const State x = forward.trajectory.state_at(t);
      const double g = std::exp(-params.k * positive_part(t - params.t_end));
      const double eb = u.eps * g;
      const double rb = u.rho * g;
      const double room = 1.0 - (x.T + x.I) / params.t_max;
      const double crowd = params.r / params.t_max;
      const double lam_T = zz[0], lam_I = zz[1], lam_V = zz[2], lam_W = zz[3];
      const double v_total = x.V_I + x.V_NI;

      Vec<6> dz;
      dz[0] = -(-2.0 * weights.w_T * x.T +
                lam_T * (params.r * room - crowd * x.T - params.d - params.beta * x.V_I) +
                lam_I * (params.beta * x.V_I - crowd * x.I));
      dz[1] = -(2.0 * weights.w_I * x.I - lam_T * crowd * x.T +
                lam_I * (params.r * room - crowd * x.I - params.delta) +
                lam_V * (1.0 - rb) * (1.0 - eb) * params.p + lam_W * rb * (1.0 - eb) * params.p);
      dz[2] = -(2.0 * weights.w_V * v_total - lam_T * params.beta * x.T +
                lam_I * params.beta * x.T - lam_V * params.c);
      dz[3] = -(2.0 * weights.w_V * v_total - lam_W * params.c);
      // dH/d(eps_j) and dH/d(rho_j)
      dz[4] = 2.0 * weights.w_eps * u.eps +
              g * params.p * x.I * (-(1.0 - rb) * lam_V - rb * lam_W);
      dz[5] = 2.0 * weights.w_rho * u.rho +
              g * (1.0 - eb) * params.p * x.I * (lam_W - lam_V);
      return dz;
    };

    z[4] = 0.0;
    z[5] = 0.0;

    // Keep the decay kink out of step interiors on the way back as well.
    if (params.t_end > a && params.t_end < b) {
      detail::rk45_segment<6>(f, b, params.t_end, z, settings, noop_accept, raise);
      detail::rk45_segment<6>(f, params.t_end, a, z, settings, noop_accept, raise);
    } else {
      detail::rk45_segment<6>(f, b, a, z, settings, noop_accept, raise);
    }

    // Integrating from b down to a accumulates the negative of the forward
    // integral, so flip the sign.
    result.per_interval[jj].d_eps = -z[4];
    result.per_interval[jj].d_rho = -z[5];
  }

  result.forward = std::move(forward.trajectory);
  return result;
}

}  // namespace hcv
