#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "hcv/scenarios.hpp"

using namespace hcv;

TEST_CASE("outcome labels print their clinical names") {
  CHECK(std::string(to_string(OutcomeLabel::svr)) == "SVR");
  CHECK(std::string(to_string(OutcomeLabel::pvr)) == "PVR");
  CHECK(std::string(to_string(OutcomeLabel::relapse)) == "relapse");
  CHECK(std::string(to_string(OutcomeLabel::nonresponse)) == "nonresponse");
}

TEST_CASE("no drug leaves the patient at the chronic equilibrium") {
  const ModelParameters p = ModelParameters::defaults();
  const ScenarioOutcome out =
      run_constant_dose(p, ControlInput{0.0, 0.0}, 224.0, 50.0, IntegratorSettings::defaults());
  CHECK(out.label == OutcomeLabel::nonresponse);
  CHECK(out.nadir_viral_load > 0.5 * out.initial_viral_load);
  CHECK(out.end_of_treatment_viral_load ==
        doctest::Approx(out.initial_viral_load).epsilon(1e-3));
}

TEST_CASE("reference dose gives a partial response") {
  const ModelParameters p = ModelParameters::defaults();
  const ScenarioOutcome out =
      run_constant_dose(p, pvr_reference_dose(), 224.0, 50.0, IntegratorSettings::defaults());
  CHECK(out.label == OutcomeLabel::pvr);
  CHECK(out.nadir_viral_load * 2.0 <= out.initial_viral_load);
  CHECK(out.end_of_treatment_viral_load > 50.0);
  CHECK(out.params_used.t_end == 224.0);
}

TEST_CASE("full production block clears the virus") {
  const ModelParameters p = ModelParameters::defaults();
  const ScenarioOutcome out =
      run_constant_dose(p, ControlInput{1.0, 0.0}, 224.0, 50.0, IntegratorSettings::defaults());
  CHECK(out.label == OutcomeLabel::svr);
  CHECK(out.end_of_treatment_viral_load < 50.0);
}

TEST_CASE("classification is a pure function of the stored trajectory") {
  const ModelParameters p = ModelParameters::defaults();
  for (const ControlInput dose : {ControlInput{0.0, 0.0}, pvr_reference_dose(),
                                  ControlInput{1.0, 0.0}}) {
    const ScenarioOutcome out =
        run_constant_dose(p, dose, 224.0, 50.0, IntegratorSettings::defaults());
    CHECK(classify_treatment(out.treatment, out.detection_threshold) == out.label);
  }
}

TEST_CASE("nadir and peak scan between nodes too") {
  const ModelParameters p = ModelParameters::defaults();
  const ScenarioOutcome out =
      run_constant_dose(p, pvr_reference_dose(), 224.0, 50.0, IntegratorSettings::defaults());
  const double nadir = viral_nadir(out.treatment);
  const double peak = viral_peak(out.treatment);
  CHECK(nadir <= out.treatment.initial_state().viral_load());
  CHECK(nadir <= out.treatment.final_state().viral_load());
  CHECK(peak >= out.treatment.initial_state().viral_load());
  CHECK(nadir <= peak);
  CHECK(out.nadir_viral_load == nadir);
}

TEST_CASE("chronic equilibrium must exist for a treatment run") {
  ModelParameters p = ModelParameters::defaults();
  // Tiny infectivity: no chronic equilibrium, nothing to treat.
  p.beta = 1e-14;
  CHECK_THROWS_AS(
      run_constant_dose(p, pvr_reference_dose(), 224.0, 50.0, IntegratorSettings::defaults()),
      std::runtime_error);
}

TEST_CASE("followup with zero terminal dose is plain drug-free integration") {
  const ModelParameters p = ModelParameters::defaults();
  const ScenarioOutcome treated =
      run_constant_dose(p, ControlInput{1.0, 0.0}, 224.0, 50.0, IntegratorSettings::defaults());

  const FollowupResult fu =
      run_followup(treated.treatment.final_state(), ControlInput{0.0, 0.0}, treated.params_used,
                   30.0, 50.0, IntegratorSettings::defaults());
  // A decayed zero dose IS zero dose, so this must equal the raw integration.
  const Trajectory plain = integrate(treated.treatment.final_state(), ControlInput{0.0, 0.0},
                                     treated.params_used, 224.0, 254.0,
                                     IntegratorSettings::defaults());
  REQUIRE(fu.trajectory.times.size() == plain.times.size());
  for (std::size_t i = 0; i < plain.times.size(); ++i) {
    CHECK(fu.trajectory.times[i] == plain.times[i]);
    CHECK(fu.trajectory.states[i].T == plain.states[i].T);
    CHECK(fu.trajectory.states[i].I == plain.states[i].I);
    CHECK(fu.trajectory.states[i].V_I == plain.states[i].V_I);
    CHECK(fu.trajectory.states[i].V_NI == plain.states[i].V_NI);
  }
  CHECK(fu.trajectory.start_time() == 224.0);
  CHECK(fu.trajectory.end_time() == 254.0);
}

TEST_CASE("followup labels relapse when the load re-crosses the threshold") {
  const ModelParameters p = ModelParameters::defaults();
  const ScenarioOutcome treated =
      run_constant_dose(p, ControlInput{1.0, 0.0}, 224.0, 50.0, IntegratorSettings::defaults());
  REQUIRE(treated.label == OutcomeLabel::svr);

  // With the dose decaying away and infected cells still present, a long
  // enough window sees the rebound; a day-one window does not.
  const FollowupResult long_window =
      run_followup(treated.treatment.final_state(), ControlInput{1.0, 0.0}, treated.params_used,
                   365.0, 50.0, IntegratorSettings::defaults());
  const FollowupResult short_window =
      run_followup(treated.treatment.final_state(), ControlInput{1.0, 0.0}, treated.params_used,
                   1.0, 50.0, IntegratorSettings::defaults());
  CHECK(short_window.label == OutcomeLabel::svr);
  CHECK(short_window.peak_viral_load < 50.0);
  CHECK(long_window.peak_viral_load >= short_window.peak_viral_load);
  if (long_window.peak_viral_load >= 50.0) {
    CHECK(long_window.label == OutcomeLabel::relapse);
  }
}

TEST_CASE("optimized run reports the optimizer bundle") {
  const ModelParameters p = ModelParameters::defaults();
  OptimizerSettings opt = OptimizerSettings::defaults();
  opt.max_iters = 5;
  opt.mesh_intervals = 8;
  IntegratorSettings integ;
  integ.rel_tol = 1e-7;
  integ.abs_tol = 1e-4;

  const ScenarioOutcome out = run_optimized(p, CostWeights::defaults(), opt, integ, 224.0, 50.0);
  REQUIRE(out.optimization.has_value());
  CHECK(out.optimization->cost_history.size() >= 2);
  CHECK(out.optimization->cost_history.back() <= out.optimization->cost_history.front());
  CHECK(out.treatment.end_time() == 224.0);
  CHECK(out.params_used.t_end == 224.0);
}
