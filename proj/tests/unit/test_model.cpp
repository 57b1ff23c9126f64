#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "hcv/model.hpp"
#include "hcv/steady_states.hpp"

using namespace hcv;

namespace {

// Independent re-statement of the four equations, written term by term in a
// different order and without any shared subexpressions, so a transcription
// slip in the library cannot cancel out here.
State rhs_oracle(const State& x, const ControlInput& u, const ModelParameters& pr, double t) {
  const double lag = t > pr.t_end ? t - pr.t_end : 0.0;
  const double eps_bar = u.eps * std::exp(-pr.k * lag);
  const double rho_bar = u.rho * std::exp(-pr.k * lag);

  State out;
  out.T = pr.s + pr.r * x.T - pr.r * x.T * x.T / pr.t_max - pr.r * x.T * x.I / pr.t_max -
          pr.d * x.T - pr.beta * x.V_I * x.T;
  out.I = pr.beta * x.V_I * x.T + pr.r * x.I - pr.r * x.I * x.T / pr.t_max -
          pr.r * x.I * x.I / pr.t_max - pr.delta * x.I;
  out.V_I = (1.0 - rho_bar) * (1.0 - eps_bar) * pr.p * x.I - pr.c * x.V_I;
  out.V_NI = rho_bar * (1.0 - eps_bar) * pr.p * x.I - pr.c * x.V_NI;
  return out;
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
  return std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("positive_part branches") {
  CHECK(positive_part(3.5) == 3.5);
  CHECK(positive_part(-2.0) == 0.0);
  CHECK(positive_part(0.0) == 0.0);
}

TEST_CASE("effective_efficacy holds steady during treatment") {
  CHECK(effective_efficacy(0.61382, 100.0, 224.0, 0.0238) == 0.61382);
  CHECK(effective_efficacy(0.61382, 224.0, 224.0, 0.0238) == 0.61382);
}

TEST_CASE("effective_efficacy decays by e^-1 after one time constant") {
  const double k = 0.0238;
  const double t_end = 224.0;
  const double v = effective_efficacy(1.0, t_end + 1.0 / k, t_end, k);
  CHECK(v == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(v == doctest::Approx(0.3678794).epsilon(1e-6));
}

TEST_CASE("effective_efficacy is monotone on the decay side") {
  const double k = 0.05;
  double prev = effective_efficacy(0.8, 10.0, 10.0, k);
  for (double t = 10.5; t < 80.0; t += 0.5) {
    const double cur = effective_efficacy(0.8, t, 10.0, k);
    CHECK(cur < prev);
    CHECK(cur >= 0.0);
    prev = cur;
  }
}

TEST_CASE("rhs at the origin produces only the source term") {
  const ModelParameters p = ModelParameters::defaults();
  const State dx = rhs(State{}, ControlInput{}, p, 0.0);
  CHECK(dx.T == 61.7e3);
  CHECK(dx.I == 0.0);
  CHECK(dx.V_I == 0.0);
  CHECK(dx.V_NI == 0.0);
}

TEST_CASE("rhs matches an independently coded evaluation on random inputs") {
  std::mt19937_64 gen(20240817);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.5, 1.5);

  for (int trial = 0; trial < 100; ++trial) {
    ModelParameters p = ModelParameters::defaults();
    p.t_max *= scale(gen);
    p.s *= scale(gen);
    p.d *= scale(gen);
    p.r *= scale(gen);
    p.p *= scale(gen);
    p.k *= scale(gen);
    p.beta *= scale(gen);
    p.delta *= scale(gen);
    p.c *= scale(gen);

    State x;
    x.T = unit(gen) * p.t_max;
    x.I = unit(gen) * p.t_max * 0.2;
    x.V_I = unit(gen) * 1e7;
    x.V_NI = unit(gen) * 1e6;
    const ControlInput u{unit(gen), unit(gen)};
    // Half the trials land after t_end so the decay path gets exercised too.
    const double t = unit(gen) * 2.0 * p.t_end;

    const State got = rhs(x, u, p, t);
    const State want = rhs_oracle(x, u, p, t);
    CHECK(rel_diff(got.T, want.T) < 1e-12);
    CHECK(rel_diff(got.I, want.I) < 1e-12);
    CHECK(rel_diff(got.V_I, want.V_I) < 1e-12);
    CHECK(rel_diff(got.V_NI, want.V_NI) < 1e-12);
  }
}

TEST_CASE("rhs vanishes to residual tolerance at both steady states") {
  const ModelParameters p = ModelParameters::defaults();
  const ControlInput off{0.0, 0.0};

  const State tu = uninfected_steady_state(p);
  const State du = rhs(tu, off, p, 0.0);
  const double mu = std::max({std::abs(du.T), std::abs(du.I), std::abs(du.V_I), std::abs(du.V_NI)});
  CHECK(mu < 1e-6 * p.s);

  const InfectedEquilibrium eq = infected_steady_state(p, 0.0, 0.0);
  REQUIRE(eq.exists);
  const State di = rhs(eq.state, off, p, 0.0);
  const double mi = std::max({std::abs(di.T), std::abs(di.I), std::abs(di.V_I), std::abs(di.V_NI)});
  CHECK(mi < 1e-6 * p.s);
}

TEST_CASE("infection-free face is exactly invariant") {
  const ModelParameters p = ModelParameters::defaults();
  for (double T : {0.0, 1e5, 5e6, 18.5e6}) {
    const State dx = rhs(State{T, 0.0, 0.0, 0.0}, ControlInput{0.3, 0.7}, p, 12.0);
    CHECK(dx.I == 0.0);
    CHECK(dx.V_I == 0.0);
    CHECK(dx.V_NI == 0.0);
  }
}

TEST_CASE("noninfectious pool stays empty when rho is zero") {
  const ModelParameters p = ModelParameters::defaults();
  const State x{2e6, 4e5, 1e6, 0.0};
  const State dx = rhs(x, ControlInput{0.5, 0.0}, p, 50.0);
  CHECK(dx.V_NI == 0.0);
}

TEST_CASE("rhs rejects non-finite input") {
  const ModelParameters p = ModelParameters::defaults();
  State bad{1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 0.0};
  CHECK_THROWS_AS(rhs(bad, ControlInput{}, p, 0.0), std::invalid_argument);

  ModelParameters bad_p = p;
  bad_p.c = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(rhs(State{1, 1, 1, 1}, ControlInput{}, bad_p, 0.0), std::invalid_argument);
}

TEST_CASE("parameter validation enforces signs") {
  ModelParameters p = ModelParameters::defaults();
  CHECK_NOTHROW(p.validate());

  p.p = 0.0;  // production switched off is a legal calibration case
  CHECK_NOTHROW(p.validate());

  p = ModelParameters::defaults();
  p.r = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = ModelParameters::defaults();
  p.t_end = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("state jacobian matches central differences") {
  const ModelParameters p = ModelParameters::defaults();
  const ControlInput u{0.4, 0.2};
  const State x{3.0e6, 5.7e5, 5.3e6, 1.2e5};
  const double t = 30.0;

  const StateMatrix jac = rhs_state_jacobian(x, u, p, t);

  for (int col = 0; col < 4; ++col) {
    auto arr = x.to_array();
    const double h = std::max(1.0, std::abs(arr[col])) * 1e-6;
    auto lo = arr, hi = arr;
    lo[col] -= h;
    hi[col] += h;
    const State f_lo = rhs(State::from_array(lo), u, p, t);
    const State f_hi = rhs(State::from_array(hi), u, p, t);
    const auto a_lo = f_lo.to_array(), a_hi = f_hi.to_array();
    for (int row = 0; row < 4; ++row) {
      const double fd = (a_hi[row] - a_lo[row]) / (2.0 * h);
      CHECK(jac[row][col] == doctest::Approx(fd).epsilon(1e-6).scale(1e-6));
    }
  }
}

TEST_CASE("reference dose carries the published efficacies") {
  const ControlInput dose = pvr_reference_dose();
  CHECK(dose.eps == 0.61382);
  CHECK(dose.rho == 0.12216);
}
