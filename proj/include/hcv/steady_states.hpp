#pragma once

#include <array>

#include "hcv/model.hpp"

namespace hcv {

/// Componentwise |rhs| at a candidate equilibrium. The pass flag compares the
/// max-norm against tol * s, the natural scale of the slowest source term.
struct ResidualReport {
  std::array<double, 4> components{};
  double max_norm = 0.0;
  bool pass = false;
};

ResidualReport verify_fixed_point(const State& candidate, const ControlInput& control,
                                  const ModelParameters& params, double tol);

/// Disease-free equilibrium: positive root of the healthy-cell balance,
/// all other compartments zero. Always exists for valid parameters.
State uninfected_steady_state(const ModelParameters& params);

/// Chronic-infection equilibrium for constant efficacies (eps, rho).
/// `exists` is false when the closed form yields a nonpositive infected
/// compartment, i.e. the drug pressure is strong enough that no chronic state
/// remains. That is a regular outcome, not an error.
struct InfectedEquilibrium {
  bool exists = false;
  State state{};
  /// Max-norm residual of the closed form before any refinement.
  double closed_form_residual = 0.0;
  /// True when the closed form failed its residual check and a damped Newton
  /// solve (seeded by the closed form) produced the returned state instead.
  bool newton_refined = false;
};

/// Throws std::invalid_argument for efficacies outside [0,1] and
/// std::domain_error for the degenerate inputs eps == 1 or rho == 1, where the
/// closed form is singular.
InfectedEquilibrium infected_steady_state(const ModelParameters& params, double eps, double rho);

/// Both equilibria plus the intermediate quantities of the closed form, kept
/// for reporting and debugging.
struct SteadyStateSet {
  State uninfected{};
  InfectedEquilibrium infected{};
  double epsilon_star = 1.0;  // 1 - eps
  double rho_star = 1.0;      // 1 - rho
  double aux_A = 0.0;         // epsilon_star * rho_star * p * beta * t_max / c
  double aux_D = 0.0;         // (t_max / r^2) * (aux_A * (r - delta) + r * (d - delta))
};

SteadyStateSet compute_steady_states(const ModelParameters& params, double eps, double rho);

/// Damped Newton solve of rhs(x) = 0 for fixed control, used as the fallback
/// when a closed-form candidate fails its residual check. Throws
/// std::runtime_error when the iteration stalls.
State solve_fixed_point_newton(const State& seed, const ControlInput& control,
                               const ModelParameters& params);

}  // namespace hcv
