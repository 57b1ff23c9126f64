#pragma once

#include <array>

namespace hcv {

/// Rate and capacity constants of the four-compartment model, plus the
/// end-of-treatment time used by the efficacy decay law.
///
/// Units: t_max in H/ml, s in H/ml/day, p in IU/day per infected cell,
/// beta in ml/IU/day, d, r, delta, c, k in 1/day, t_end in days.
struct ModelParameters {
  double t_max = 18.5e6;
  double s = 61.7e3;
  double d = 0.003;
  double r = 0.00562;
  double p = 25.1;
  double k = 0.0238;
  double beta = 4.1684e-9;
  double delta = 0.12110;
  double c = 2.7018;
  double t_end = 224.0;

  static ModelParameters defaults() { return {}; }

  /// Throws std::invalid_argument on non-finite or out-of-range fields.
  /// All rates and capacities must be strictly positive, except p which may
  /// be zero (production switched off) and t_end which may be zero.
  void validate() const;
};

/// Compartment concentrations: healthy hepatocytes (H/ml), infected
/// hepatocytes (H/ml), infectious virions (IU/ml), noninfectious virions
/// (IU/ml).
struct State {
  double T = 0.0;
  double I = 0.0;
  double V_I = 0.0;
  double V_NI = 0.0;

  double viral_load() const { return V_I + V_NI; }
  std::array<double, 4> to_array() const { return {T, I, V_I, V_NI}; }
  static State from_array(const std::array<double, 4>& a) {
    return State{a[0], a[1], a[2], a[3]};
  }
};

/// Raw (undecayed) drug efficacies, both in [0, 1]: eps scales down virion
/// production, rho diverts production into the noninfectious pool.
struct ControlInput {
  double eps = 0.0;
  double rho = 0.0;

  void validate() const;
};

/// (a)_+ = a if a >= 0, 0 otherwise.
double positive_part(double a);

/// base * exp(-k * (t - t_end)_+): constant while treatment is on, exponential
/// decay afterwards. Result is in [0, base] for base in [0, 1] and k > 0.
double effective_efficacy(double base, double t, double t_end, double k);

/// Both channels of `raw` passed through effective_efficacy.
ControlInput effective_control(const ControlInput& raw, const ModelParameters& params, double t);

/// Time derivative of the four compartments at time t. The raw control is
/// decayed internally before entering the production terms. Throws
/// std::invalid_argument when the state, control, or parameters contain
/// non-finite values.
State rhs(const State& x, const ControlInput& control, const ModelParameters& params, double t);

using StateMatrix = std::array<std::array<double, 4>, 4>;

/// Jacobian of rhs with respect to the state, evaluated at the decayed
/// controls. Row i holds the partial derivatives of component i.
StateMatrix rhs_state_jacobian(const State& x, const ControlInput& control,
                               const ModelParameters& params, double t);

/// The continuous reference dose that produces only a partial response.
ControlInput pvr_reference_dose();

}  // namespace hcv
