#include <cmath>

#include <doctest.h>

#include "hcv/cost.hpp"
#include "hcv/steady_states.hpp"

using namespace hcv;

// Constant-dose objective over [0, 224] from the drug-free infected state at
// the reference dose, computed once at rel_tol = 1e-12 / abs_tol = 1e-10 and
// frozen. Guards the whole forward-plus-quadrature path against regressions.
static constexpr double kFrozenReferenceCost = -2.111347579515e16;

TEST_CASE("running cost evaluates the quadratic form directly") {
  const CostWeights w = CostWeights::defaults();
  CHECK(running_cost(State{}, ControlInput{}, w) == 0.0);
  CHECK(running_cost(State{1, 0, 0, 0}, ControlInput{}, w) == -1.0);
  CHECK(running_cost(State{0, 1, 1, 1}, ControlInput{1, 1}, w) == 7.0);

  CostWeights scaled;
  scaled.w_V = 2.0;
  scaled.w_I = 3.0;
  scaled.w_T = 4.0;
  scaled.w_eps = 5.0;
  scaled.w_rho = 6.0;
  const double got = running_cost(State{1, 2, 3, 4}, ControlInput{0.5, 0.25}, scaled);
  CHECK(got == doctest::Approx(2 * 49 + 3 * 4 - 4 * 1 + 5 * 0.25 + 6 * 0.0625).epsilon(1e-14));
}

TEST_CASE("running cost sees only the total viral load") {
  const CostWeights w = CostWeights::defaults();
  const double a = running_cost(State{5, 7, 11, 13}, ControlInput{0.2, 0.9}, w);
  const double b = running_cost(State{5, 7, 13, 11}, ControlInput{0.2, 0.9}, w);
  CHECK(a == b);
}

TEST_CASE("weights validation") {
  CostWeights w;
  CHECK_NOTHROW(w.validate());
  w.w_I = -1.0;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}

TEST_CASE("constant trajectory integrates to horizon times the integrand") {
  const ModelParameters p = ModelParameters::defaults();
  const InfectedEquilibrium eq = infected_steady_state(p, 0.0, 0.0);
  REQUIRE(eq.exists);
  const CostWeights w = CostWeights::defaults();
  const double horizon = 224.0;

  const auto sched = ControlSchedule::constant(ControlInput{}, 0.0, horizon);
  const double J = total_cost(sched, eq.state, p, w, IntegratorSettings::defaults());
  const double want = horizon * running_cost(eq.state, ControlInput{}, w);
  CHECK(J == doctest::Approx(want).epsilon(1e-4));
}

TEST_CASE("zero weights zero the cost for any schedule") {
  const ModelParameters p = ModelParameters::defaults();
  const InfectedEquilibrium eq = infected_steady_state(p, 0.0, 0.0);
  REQUIRE(eq.exists);
  CostWeights none;
  none.w_V = none.w_I = none.w_T = none.w_eps = none.w_rho = 0.0;

  const auto sched = ControlSchedule::uniform(pvr_reference_dose(), 0.0, 224.0, 4);
  const double J = total_cost(sched, eq.state, p, none, IntegratorSettings::defaults());
  CHECK(J == 0.0);
}

TEST_CASE("reference dose cost matches the frozen regression value") {
  const ModelParameters p = ModelParameters::defaults();
  const InfectedEquilibrium eq = infected_steady_state(p, 0.0, 0.0);
  REQUIRE(eq.exists);

  const auto sched = ControlSchedule::constant(pvr_reference_dose(), 0.0, 224.0);
  const double J =
      total_cost(sched, eq.state, p, CostWeights::defaults(), IntegratorSettings::defaults());
  CHECK(J == doctest::Approx(kFrozenReferenceCost).epsilon(1e-6));
}

TEST_CASE("splitting intervals of a constant schedule leaves the cost alone") {
  const ModelParameters p = ModelParameters::defaults();
  const InfectedEquilibrium eq = infected_steady_state(p, 0.0, 0.0);
  REQUIRE(eq.exists);
  const CostWeights w = CostWeights::defaults();
  const IntegratorSettings s = IntegratorSettings::defaults();
  const ControlInput dose = pvr_reference_dose();

  const double j1 = total_cost(ControlSchedule::constant(dose, 0.0, 224.0), eq.state, p, w, s);
  const double j8 = total_cost(ControlSchedule::uniform(dose, 0.0, 224.0, 8), eq.state, p, w, s);
  const double j224 =
      total_cost(ControlSchedule::uniform(dose, 0.0, 224.0, 224), eq.state, p, w, s);
  CHECK(std::abs(j8 - j1) < 1e-8 * std::abs(j1));
  CHECK(std::abs(j224 - j1) < 1e-8 * std::abs(j1));
}

TEST_CASE("evaluate_cost returns the trajectory that produced the number") {
  const ModelParameters p = ModelParameters::defaults();
  const InfectedEquilibrium eq = infected_steady_state(p, 0.0, 0.0);
  REQUIRE(eq.exists);

  const auto sched = ControlSchedule::uniform(pvr_reference_dose(), 0.0, 56.0, 4);
  const CostEvaluation eval =
      evaluate_cost(sched, eq.state, p, CostWeights::defaults(), IntegratorSettings::defaults());
  CHECK(eval.trajectory.start_time() == 0.0);
  CHECK(eval.trajectory.end_time() == 56.0);
  CHECK(std::isfinite(eval.cost));

  const double direct = total_cost(sched, eq.state, p, CostWeights::defaults(),
                                   IntegratorSettings::defaults());
  CHECK(eval.cost == direct);  // same computation, same bits
}
