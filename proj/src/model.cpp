#include "hcv/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hcv {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " is not finite");
  }
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (v <= 0.0) {
    throw std::invalid_argument(std::string(name) + " must be strictly positive");
  }
}

}  // namespace

void ModelParameters::validate() const {
  require_positive(t_max, "t_max");
  require_positive(s, "s");
  require_positive(d, "d");
  require_positive(r, "r");
  require_positive(k, "k");
  require_positive(beta, "beta");
  require_positive(delta, "delta");
  require_positive(c, "c");
  // p = 0 is allowed: it shuts off virion production and leaves a pure decay
  // equation, which is useful as a calibration case.
  require_finite(p, "p");
  if (p < 0.0) throw std::invalid_argument("p must be nonnegative");
  require_finite(t_end, "t_end");
  if (t_end < 0.0) throw std::invalid_argument("t_end must be nonnegative");
}

void ControlInput::validate() const {
  require_finite(eps, "eps");
  require_finite(rho, "rho");
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("eps must lie in [0,1]");
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("rho must lie in [0,1]");
}

double positive_part(double a) { return a >= 0.0 ? a : 0.0; }

double effective_efficacy(double base, double t, double t_end, double k) {
  const double lag = t - t_end;
  if (lag <= 0.0) return base;  // exp(0) == 1, so this is the same value, minus the exp call
  return base * std::exp(-k * lag);
}

ControlInput effective_control(const ControlInput& raw, const ModelParameters& params, double t) {
  return ControlInput{effective_efficacy(raw.eps, t, params.t_end, params.k),
                      effective_efficacy(raw.rho, t, params.t_end, params.k)};
}

State rhs(const State& x, const ControlInput& control, const ModelParameters& params, double t) {
  require_finite(x.T, "state T");
  require_finite(x.I, "state I");
  require_finite(x.V_I, "state V_I");
  require_finite(x.V_NI, "state V_NI");
  require_finite(control.eps, "control eps");
  require_finite(control.rho, "control rho");
  require_finite(t, "time");
  params.validate();

  const ControlInput eff = effective_control(control, params, t);
  const double room = 1.0 - (x.T + x.I) / params.t_max;
  const double production = (1.0 - eff.eps) * params.p * x.I;

  State dx;
  dx.T = params.s + params.r * x.T * room - params.d * x.T - params.beta * x.V_I * x.T;
  dx.I = params.beta * x.V_I * x.T + params.r * x.I * room - params.delta * x.I;
  dx.V_I = (1.0 - eff.rho) * production - params.c * x.V_I;
  dx.V_NI = eff.rho * production - params.c * x.V_NI;
  return dx;
}

StateMatrix rhs_state_jacobian(const State& x, const ControlInput& control,
                               const ModelParameters& params, double t) {
  const ControlInput eff = effective_control(control, params, t);
  const double room = 1.0 - (x.T + x.I) / params.t_max;
  const double crowd = params.r / params.t_max;

  StateMatrix j{};
  // d(dT/dt)/d(T, I, V_I, V_NI)
  j[0][0] = params.r * room - crowd * x.T - params.d - params.beta * x.V_I;
  j[0][1] = -crowd * x.T;
  j[0][2] = -params.beta * x.T;
  j[0][3] = 0.0;
  // d(dI/dt)/d(...)
  j[1][0] = params.beta * x.V_I - crowd * x.I;
  j[1][1] = params.r * room - crowd * x.I - params.delta;
  j[1][2] = params.beta * x.T;
  j[1][3] = 0.0;
  // d(dV_I/dt)/d(...)
  j[2][0] = 0.0;
  j[2][1] = (1.0 - eff.rho) * (1.0 - eff.eps) * params.p;
  j[2][2] = -params.c;
  j[2][3] = 0.0;
  // d(dV_NI/dt)/d(...)
  j[3][0] = 0.0;
  j[3][1] = eff.rho * (1.0 - eff.eps) * params.p;
  j[3][2] = 0.0;
  j[3][3] = -params.c;
  return j;
}

ControlInput pvr_reference_dose() { return ControlInput{0.61382, 0.12216}; }

}  // namespace hcv
