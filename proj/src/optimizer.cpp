#include "hcv/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcv {

void OptimizerSettings::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!std::isfinite(grad_tol) || grad_tol < 0.0) {
    throw std::invalid_argument("grad_tol must be nonnegative (0 = automatic)");
  }
  if (!std::isfinite(armijo_c) || armijo_c <= 0.0 || armijo_c >= 1.0) {
    throw std::invalid_argument("armijo_c must lie in (0,1)");
  }
  if (!std::isfinite(backtrack_factor) || backtrack_factor <= 0.0 || backtrack_factor >= 1.0) {
    throw std::invalid_argument("backtrack_factor must lie in (0,1)");
  }
  if (!std::isfinite(initial_step) || initial_step <= 0.0) {
    throw std::invalid_argument("initial_step must be strictly positive");
  }
  if (mesh_intervals == 0) throw std::invalid_argument("mesh_intervals must be at least 1");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iters: return "max_iters";
    case Termination::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

std::vector<ControlInput> project(std::vector<ControlInput> values) {
  for (ControlInput& v : values) {
    if (!std::isfinite(v.eps) || !std::isfinite(v.rho)) {
      throw std::invalid_argument("cannot project non-finite control values");
    }
    v.eps = std::clamp(v.eps, 0.0, 1.0);
    v.rho = std::clamp(v.rho, 0.0, 1.0);
  }
  return values;
}

namespace {

double grad_max_norm(const std::vector<ControlGradient>& g) {
  double m = 0.0;
  for (const ControlGradient& gi : g) {
    m = std::max({m, std::abs(gi.d_eps), std::abs(gi.d_rho)});
  }
  return m;
}

// Max-norm of x - P(x - g), the canonical stationarity measure for box
// constraints: zero exactly at a KKT point.
double projected_grad_norm(const std::vector<ControlInput>& x,
                           const std::vector<ControlGradient>& g) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pe = x[i].eps - std::clamp(x[i].eps - g[i].d_eps, 0.0, 1.0);
    const double pr = x[i].rho - std::clamp(x[i].rho - g[i].d_rho, 0.0, 1.0);
    m = std::max({m, std::abs(pe), std::abs(pr)});
  }
  return m;
}

std::vector<ControlInput> step_and_project(const std::vector<ControlInput>& x,
                                           const std::vector<ControlGradient>& g, double alpha) {
  std::vector<ControlInput> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i].eps = std::clamp(x[i].eps - alpha * g[i].d_eps, 0.0, 1.0);
    out[i].rho = std::clamp(x[i].rho - alpha * g[i].d_rho, 0.0, 1.0);
  }
  return out;
}

}  // namespace

OptimizationResult optimize(const ControlSchedule& initial_schedule, const State& initial_state,
                            const ModelParameters& params, const CostWeights& weights,
                            const OptimizerSettings& opt, const IntegratorSettings& integ,
                            const IterationCallback& callback) {
  opt.validate();
  initial_schedule.validate();

  ControlSchedule sched = initial_schedule;
  sched.values = project(std::move(sched.values));

  GradientResult eval = cost_gradient(sched, initial_state, params, weights, integ);

  OptimizationResult result;
  result.cost_history.push_back(eval.cost);
  double pg = projected_grad_norm(sched.values, eval.per_interval);
  result.projected_grad_norm_history.push_back(pg);
  if (callback) callback(0, eval.cost, pg, 0.0);

  const double tol = opt.grad_tol > 0.0 ? opt.grad_tol : 1e-3 * pg;
  result.termination = Termination::max_iters;
  if (pg <= tol) {
    result.termination = Termination::converged;
  } else {
    double alpha = opt.initial_step / std::max(grad_max_norm(eval.per_interval), 1e-300);
    for (int iter = 1; iter <= opt.max_iters; ++iter) {
      // Armijo backtracking along the projection arc.
      bool accepted = false;
      std::vector<ControlInput> trial;
      double trial_cost = 0.0;
      while (true) {
        trial = step_and_project(sched.values, eval.per_interval, alpha);
        double dir_deriv = 0.0;  // <g, trial - x>, nonpositive by projection
        double move = 0.0;
        for (std::size_t i = 0; i < trial.size(); ++i) {
          const double de = trial[i].eps - sched.values[i].eps;
          const double dr = trial[i].rho - sched.values[i].rho;
          dir_deriv += eval.per_interval[i].d_eps * de + eval.per_interval[i].d_rho * dr;
          move = std::max({move, std::abs(de), std::abs(dr)});
        }
        if (move == 0.0) break;  // step too small to change any coordinate

        ControlSchedule trial_sched = sched;
        trial_sched.values = trial;
        trial_cost = total_cost(trial_sched, initial_state, params, weights, integ);
        if (trial_cost <= result.cost_history.back() + opt.armijo_c * dir_deriv) {
          accepted = true;
          break;
        }
        alpha *= opt.backtrack_factor;
        if (!(alpha > 0.0) || !std::isfinite(alpha)) break;
      }

      if (!accepted) {
        result.termination = Termination::line_search_failure;
        break;
      }

      sched.values = std::move(trial);
      eval = cost_gradient(sched, initial_state, params, weights, integ);
      pg = projected_grad_norm(sched.values, eval.per_interval);
      result.cost_history.push_back(trial_cost);
      result.projected_grad_norm_history.push_back(pg);
      if (callback) callback(iter, trial_cost, pg, alpha);

      if (pg <= tol) {
        result.termination = Termination::converged;
        break;
      }
      // Let the step recover quickly after the gradient scale changes.
      alpha = std::max(alpha / opt.backtrack_factor,
                       opt.initial_step / std::max(grad_max_norm(eval.per_interval), 1e-300));
    }
  }

  result.schedule = std::move(sched);
  result.final_trajectory = std::move(eval.forward);
  result.switch_counts = sti_switch_count(result.schedule);
  return result;
}

}  // namespace hcv
