#include "hcv/steady_states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcv {

namespace {

// Steady states are evaluated at t = 0, i.e. with the raw efficacies active
// (no post-treatment decay).
constexpr double kEvalTime = 0.0;

double max_abs(const std::array<double, 4>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Larger root of x^2 + b*x - q = 0 with q >= 0, written to avoid cancellation
// for either sign of b.
double stable_quadratic_root(double b, double q) {
  const double disc = std::sqrt(b * b + 4.0 * q);
  if (b <= 0.0) return 0.5 * (-b + disc);
  return 2.0 * q / (b + disc);
}

// Solve J * dx = -f for a 4x4 system by Gaussian elimination with partial
// pivoting. Throws on a (numerically) singular matrix.
std::array<double, 4> solve4(StateMatrix a, std::array<double, 4> f) {
  std::array<double, 4> x{};
  std::array<int, 4> perm = {0, 1, 2, 3};
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 4; ++row) {
      if (std::abs(a[perm[row]][col]) > std::abs(a[perm[pivot]][col])) pivot = row;
    }
    std::swap(perm[col], perm[pivot]);
    const double diag = a[perm[col]][col];
    if (!(std::abs(diag) > 0.0) || !std::isfinite(diag)) {
      throw std::runtime_error("singular Jacobian in fixed-point solve");
    }
    for (int row = col + 1; row < 4; ++row) {
      const double m = a[perm[row]][col] / diag;
      if (m == 0.0) continue;
      for (int k = col; k < 4; ++k) a[perm[row]][k] -= m * a[perm[col]][k];
      f[perm[row]] -= m * f[perm[col]];
    }
  }
  for (int col = 3; col >= 0; --col) {
    double acc = f[perm[col]];
    for (int k = col + 1; k < 4; ++k) acc -= a[perm[col]][k] * x[k];
    x[col] = acc / a[perm[col]][col];
  }
  return x;
}

}  // namespace

ResidualReport verify_fixed_point(const State& candidate, const ControlInput& control,
                                  const ModelParameters& params, double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument("residual tolerance must be strictly positive");
  }
  const State f = rhs(candidate, control, params, kEvalTime);
  ResidualReport report;
  report.components = {std::abs(f.T), std::abs(f.I), std::abs(f.V_I), std::abs(f.V_NI)};
  report.max_norm = max_abs(report.components);
  report.pass = report.max_norm < tol * params.s;
  return report;
}

State uninfected_steady_state(const ModelParameters& params) {
  params.validate();
  // T solves s + r*T*(1 - T/t_max) - d*T = 0; with b = -(t_max/r)*(r - d) and
  // q = s*t_max/r this is the positive root of T^2 + b*T - q = 0.
  const double b = -(params.t_max / params.r) * (params.r - params.d);
  const double q = params.s * params.t_max / params.r;
  State eq;
  eq.T = stable_quadratic_root(b, q);
  return eq;
}

State solve_fixed_point_newton(const State& seed, const ControlInput& control,
                               const ModelParameters& params) {
  State x = seed;
  State f = rhs(x, control, params, kEvalTime);
  double fnorm = max_abs({std::abs(f.T), std::abs(f.I), std::abs(f.V_I), std::abs(f.V_NI)});
  const double target = 1e-9 * params.s;

  for (int iter = 0; iter < 60; ++iter) {
    if (fnorm <= target) return x;
    const StateMatrix jac = rhs_state_jacobian(x, control, params, kEvalTime);
    const std::array<double, 4> step =
        solve4(jac, {-f.T, -f.I, -f.V_I, -f.V_NI});

    // Backtrack on the residual norm so a long Newton step cannot diverge.
    double lambda = 1.0;
    bool improved = false;
    for (int cut = 0; cut < 40; ++cut) {
      const State trial{x.T + lambda * step[0], x.I + lambda * step[1],
                        x.V_I + lambda * step[2], x.V_NI + lambda * step[3]};
      const State ft = rhs(trial, control, params, kEvalTime);
      const double tnorm =
          max_abs({std::abs(ft.T), std::abs(ft.I), std::abs(ft.V_I), std::abs(ft.V_NI)});
      if (tnorm < fnorm) {
        x = trial;
        f = ft;
        fnorm = tnorm;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  if (fnorm <= target) return x;
  throw std::runtime_error("fixed-point Newton iteration stalled");
}

InfectedEquilibrium infected_steady_state(const ModelParameters& params, double eps, double rho) {
  params.validate();
  ControlInput{eps, rho}.validate();
  if (eps == 1.0 || rho == 1.0) {
    throw std::domain_error(
        "infected equilibrium is degenerate at eps == 1 or rho == 1 (zero infectious production)");
  }

  const double eps_star = 1.0 - eps;
  const double rho_star = 1.0 - rho;
  const double a = eps_star * rho_star * params.p * params.beta * params.t_max / params.c;
  if (!(a > 0.0)) {
    // Only reachable with p == 0: no virion production at all, hence no
    // chronic equilibrium.
    return InfectedEquilibrium{};
  }
  const double dcoef =
      (params.t_max / (params.r * params.r)) *
      (a * (params.r - params.delta) + params.r * (params.d - params.delta));

  const double b = params.r * params.r * dcoef / (a * a);
  const double q = params.r * params.s * params.t_max / (a * a);
  const double ti = stable_quadratic_root(b, q);
  const double ii = ti * (a / params.r - 1.0) + params.t_max - params.delta * params.t_max / params.r;

  InfectedEquilibrium result;
  if (!(ii > 0.0)) {
    return result;  // drug pressure clears the chronic state; not an error
  }
  result.exists = true;
  result.state.T = ti;
  result.state.I = ii;
  result.state.V_I = eps_star * rho_star * (params.p / params.c) * ii;
  result.state.V_NI = eps_star * rho * (params.p / params.c) * ii;

  const ControlInput control{eps, rho};
  const ResidualReport check = verify_fixed_point(result.state, control, params, 1e-6);
  result.closed_form_residual = check.max_norm;
  if (!check.pass) {
    // The closed form should be exact up to roundoff; if it is not, fall back
    // to a damped Newton solve seeded by it and report the discrepancy.
    result.state = solve_fixed_point_newton(result.state, control, params);
    result.newton_refined = true;
  }
  return result;
}

SteadyStateSet compute_steady_states(const ModelParameters& params, double eps, double rho) {
  SteadyStateSet set;
  set.uninfected = uninfected_steady_state(params);
  set.infected = infected_steady_state(params, eps, rho);
  set.epsilon_star = 1.0 - eps;
  set.rho_star = 1.0 - rho;
  set.aux_A = set.epsilon_star * set.rho_star * params.p * params.beta * params.t_max / params.c;
  set.aux_D = (params.t_max / (params.r * params.r)) *
              (set.aux_A * (params.r - params.delta) + params.r * (params.d - params.delta));
  return set;
}

}  // namespace hcv
