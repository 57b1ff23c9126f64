#include "hcv/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hcv/csv.hpp"
#include "hcv/scenarios.hpp"
#include "hcv/steady_states.hpp"

namespace hcv {

using nlohmann::json;

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::steady_state: return "steady-state";
    case Scenario::simulate: return "simulate";
    case Scenario::optimize: return "optimize";
    case Scenario::followup: return "followup";
    case Scenario::full: return "full";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "steady-state") return Scenario::steady_state;
  if (name == "simulate") return Scenario::simulate;
  if (name == "optimize") return Scenario::optimize;
  if (name == "followup") return Scenario::followup;
  if (name == "full") return Scenario::full;
  throw std::invalid_argument(
      "unknown scenario '" + name +
      "' (expected steady-state, simulate, optimize, followup, or full)");
}

void RunConfig::validate() const {
  parameters.validate();
  weights.validate();
  optimizer.validate();
  integrator.validate();
  dose.validate();
  const auto in_range = [](double v, double lo, const char* name) {
    if (!std::isfinite(v) || v <= lo) {
      throw std::invalid_argument(std::string(name) + " must be > " + format_number(lo));
    }
  };
  in_range(horizon, 0.0, "horizon");
  in_range(followup_days, 0.0, "followup_days");
  in_range(detection_threshold, 0.0, "detection_threshold");
  in_range(output_cadence, 0.0, "output_cadence");
  if (output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
}

namespace {

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) {
    throw std::invalid_argument("config key '" + key + "' must be a number");
  }
  return v.get<double>();
}

long long as_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw std::invalid_argument("config key '" + key + "' must be an integer");
  }
  return v.get<long long>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) {
    throw std::invalid_argument("config key '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + err.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("config must be a flat JSON object");
  }

  RunConfig cfg;
  using Handler = std::function<void(const json&, const std::string&)>;
  const auto number_into = [](double& slot) {
    return [target = &slot](const json& v, const std::string& key) { *target = as_number(v, key); };
  };

  const std::map<std::string, Handler> handlers = {
      // model parameters
      {"t_max", number_into(cfg.parameters.t_max)},
      {"s", number_into(cfg.parameters.s)},
      {"d", number_into(cfg.parameters.d)},
      {"r", number_into(cfg.parameters.r)},
      {"p", number_into(cfg.parameters.p)},
      {"k", number_into(cfg.parameters.k)},
      {"beta", number_into(cfg.parameters.beta)},
      {"delta", number_into(cfg.parameters.delta)},
      {"c", number_into(cfg.parameters.c)},
      {"t_end", number_into(cfg.parameters.t_end)},
      // cost weights
      {"w_v", number_into(cfg.weights.w_V)},
      {"w_i", number_into(cfg.weights.w_I)},
      {"w_t", number_into(cfg.weights.w_T)},
      {"w_eps", number_into(cfg.weights.w_eps)},
      {"w_rho", number_into(cfg.weights.w_rho)},
      // optimizer
      {"max_iters",
       [&cfg](const json& v, const std::string& key) {
         cfg.optimizer.max_iters = static_cast<int>(as_integer(v, key));
       }},
      {"grad_tol", number_into(cfg.optimizer.grad_tol)},
      {"armijo_c", number_into(cfg.optimizer.armijo_c)},
      {"backtrack_factor", number_into(cfg.optimizer.backtrack_factor)},
      {"opt_initial_step", number_into(cfg.optimizer.initial_step)},
      {"mesh_intervals",
       [&cfg](const json& v, const std::string& key) {
         const long long n = as_integer(v, key);
         if (n < 1) throw std::invalid_argument("mesh_intervals must be >= 1");
         cfg.optimizer.mesh_intervals = static_cast<std::size_t>(n);
       }},
      // integrator
      {"rel_tol", number_into(cfg.integrator.rel_tol)},
      {"abs_tol", number_into(cfg.integrator.abs_tol)},
      {"max_step", number_into(cfg.integrator.max_step)},
      {"integ_initial_step", number_into(cfg.integrator.initial_step)},
      // run controls
      {"scenario",
       [&cfg](const json& v, const std::string& key) {
         cfg.scenario = scenario_from_string(as_string(v, key));
       }},
      {"dose_eps", number_into(cfg.dose.eps)},
      {"dose_rho", number_into(cfg.dose.rho)},
      {"horizon", number_into(cfg.horizon)},
      {"followup_days", number_into(cfg.followup_days)},
      {"detection_threshold", number_into(cfg.detection_threshold)},
      {"output_dir",
       [&cfg](const json& v, const std::string& key) { cfg.output_dir = as_string(v, key); }},
      {"output_cadence", number_into(cfg.output_cadence)},
  };

  for (const auto& [key, value] : doc.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
    it->second(value, key);
  }

  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
  json doc;
  doc["t_max"] = config.parameters.t_max;
  doc["s"] = config.parameters.s;
  doc["d"] = config.parameters.d;
  doc["r"] = config.parameters.r;
  doc["p"] = config.parameters.p;
  doc["k"] = config.parameters.k;
  doc["beta"] = config.parameters.beta;
  doc["delta"] = config.parameters.delta;
  doc["c"] = config.parameters.c;
  doc["t_end"] = config.parameters.t_end;
  doc["w_v"] = config.weights.w_V;
  doc["w_i"] = config.weights.w_I;
  doc["w_t"] = config.weights.w_T;
  doc["w_eps"] = config.weights.w_eps;
  doc["w_rho"] = config.weights.w_rho;
  doc["max_iters"] = config.optimizer.max_iters;
  doc["grad_tol"] = config.optimizer.grad_tol;
  doc["armijo_c"] = config.optimizer.armijo_c;
  doc["backtrack_factor"] = config.optimizer.backtrack_factor;
  doc["opt_initial_step"] = config.optimizer.initial_step;
  doc["mesh_intervals"] = config.optimizer.mesh_intervals;
  doc["rel_tol"] = config.integrator.rel_tol;
  doc["abs_tol"] = config.integrator.abs_tol;
  doc["max_step"] = config.integrator.max_step;
  doc["integ_initial_step"] = config.integrator.initial_step;
  doc["scenario"] = to_string(config.scenario);
  doc["dose_eps"] = config.dose.eps;
  doc["dose_rho"] = config.dose.rho;
  doc["horizon"] = config.horizon;
  doc["followup_days"] = config.followup_days;
  doc["detection_threshold"] = config.detection_threshold;
  doc["output_dir"] = config.output_dir;
  doc["output_cadence"] = config.output_cadence;
  return doc.dump(2) + "\n";
}

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  const fs::path path = dir / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file " + path.string());
  return os;
}

void write_steady_state_csv(std::ostream& os, const RunConfig& cfg) {
  const SteadyStateSet set = compute_steady_states(cfg.parameters, 0.0, 0.0);
  const ControlInput no_drug{0.0, 0.0};
  os << "state,T,I,V_I,V_NI,res_T,res_I,res_V_I,res_V_NI,res_max\n";
  const auto row = [&](const char* name, const State& s) {
    const ResidualReport res = verify_fixed_point(s, no_drug, cfg.parameters, 1e-6);
    os << name << ',' << format_number(s.T) << ',' << format_number(s.I) << ','
       << format_number(s.V_I) << ',' << format_number(s.V_NI) << ','
       << format_number(res.components[0]) << ',' << format_number(res.components[1]) << ','
       << format_number(res.components[2]) << ',' << format_number(res.components[3]) << ','
       << format_number(res.max_norm) << '\n';
  };
  row("uninfected", set.uninfected);
  if (set.infected.exists) {
    row("infected", set.infected.state);
  }
}

void write_outcome_files(const fs::path& dir, const RunConfig& cfg, const ScenarioOutcome& outcome,
                         const std::string& prefix) {
  auto traj_os = open_output(dir, prefix + "_trajectory.csv");
  write_trajectory_csv(traj_os, outcome.treatment, outcome.params_used, cfg.output_cadence);
  auto sched_os = open_output(dir, prefix + "_schedule.csv");
  write_schedule_csv(sched_os, outcome.treatment.controls_used);
}

void describe_outcome(std::ostream& os, const std::string& name, const ScenarioOutcome& outcome) {
  os << name << ": label=" << to_string(outcome.label)
     << " initial_load=" << format_number(outcome.initial_viral_load)
     << " nadir=" << format_number(outcome.nadir_viral_load)
     << " eot_load=" << format_number(outcome.end_of_treatment_viral_load) << "\n";
  if (outcome.optimization) {
    const OptimizationResult& r = *outcome.optimization;
    os << "  optimizer: termination=" << to_string(r.termination)
       << " iterations=" << (r.cost_history.size() - 1)
       << " initial_cost=" << format_number(r.cost_history.front())
       << " final_cost=" << format_number(r.cost_history.back())
       << " switches_eps=" << r.switch_counts.eps << " switches_rho=" << r.switch_counts.rho
       << "\n";
  }
  if (outcome.warning) {
    os << "  warning: " << *outcome.warning << "\n";
  }
}

void describe_followup(std::ostream& os, const FollowupResult& followup) {
  os << "followup: label=" << to_string(followup.label)
     << " peak_load=" << format_number(followup.peak_viral_load)
     << " end_load=" << format_number(followup.end_viral_load) << "\n";
}

ControlInput terminal_control_of(const ScenarioOutcome& outcome) {
  return outcome.treatment.controls_used.values.back();
}

}  // namespace

RunStatus run(const RunConfig& config, std::ostream& out) {
  config.validate();
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);

  switch (config.scenario) {
    case Scenario::steady_state: {
      auto csv = open_output(dir, "steady_states.csv");
      write_steady_state_csv(csv, config);
      std::ostringstream echo;
      write_steady_state_csv(echo, config);
      out << echo.str();
      const SteadyStateSet set = compute_steady_states(config.parameters, 0.0, 0.0);
      if (!set.infected.exists) {
        out << "note: no chronic-infection equilibrium for these parameters\n";
      }
      return RunStatus::ok;
    }

    case Scenario::simulate: {
      const ScenarioOutcome outcome = run_constant_dose(
          config.parameters, config.dose, config.horizon, config.detection_threshold,
          config.integrator);
      write_outcome_files(dir, config, outcome, "treatment");
      auto summary = open_output(dir, "summary.csv");
      write_summary_header(summary);
      write_summary_row(summary, "simulate", outcome.label, outcome.nadir_viral_load,
                        outcome.end_of_treatment_viral_load, std::nullopt);
      auto text = open_output(dir, "summary.txt");
      describe_outcome(text, "simulate", outcome);
      describe_outcome(out, "simulate", outcome);
      return RunStatus::ok;
    }

    case Scenario::optimize: {
      auto log = open_output(dir, "optimizer_log.csv");
      const ScenarioOutcome outcome = run_optimized(
          config.parameters, config.weights, config.optimizer, config.integrator, config.horizon,
          config.detection_threshold, config.dose, make_csv_iteration_logger(log));
      write_outcome_files(dir, config, outcome, "optimized");
      auto summary = open_output(dir, "summary.csv");
      write_summary_header(summary);
      write_summary_row(summary, "optimize", outcome.label, outcome.nadir_viral_load,
                        outcome.end_of_treatment_viral_load, std::nullopt);
      auto text = open_output(dir, "summary.txt");
      describe_outcome(text, "optimize", outcome);
      describe_outcome(out, "optimize", outcome);
      return RunStatus::ok;
    }

    case Scenario::followup: {
      const ScenarioOutcome treatment = run_constant_dose(
          config.parameters, config.dose, config.horizon, config.detection_threshold,
          config.integrator);
      const FollowupResult followup = run_followup(
          treatment.treatment.final_state(), config.dose, treatment.params_used,
          config.followup_days, config.detection_threshold, config.integrator);
      write_outcome_files(dir, config, treatment, "treatment");
      auto ftraj = open_output(dir, "followup_trajectory.csv");
      write_trajectory_csv(ftraj, followup.trajectory, followup.params_used,
                           config.output_cadence);
      auto summary = open_output(dir, "summary.csv");
      write_summary_header(summary);
      write_summary_row(summary, "followup", followup.label, treatment.nadir_viral_load,
                        treatment.end_of_treatment_viral_load, followup.end_viral_load);
      auto text = open_output(dir, "summary.txt");
      describe_outcome(text, "followup (treatment phase)", treatment);
      describe_followup(text, followup);
      describe_outcome(out, "followup (treatment phase)", treatment);
      describe_followup(out, followup);
      return RunStatus::ok;
    }

    case Scenario::full: {
      const ScenarioOutcome baseline = run_constant_dose(
          config.parameters, config.dose, config.horizon, config.detection_threshold,
          config.integrator);
      write_outcome_files(dir, config, baseline, "pvr");

      auto log = open_output(dir, "optimizer_log.csv");
      const ScenarioOutcome optimized = run_optimized(
          config.parameters, config.weights, config.optimizer, config.integrator, config.horizon,
          config.detection_threshold, config.dose, make_csv_iteration_logger(log));
      write_outcome_files(dir, config, optimized, "optimized");

      const FollowupResult followup = run_followup(
          optimized.treatment.final_state(), terminal_control_of(optimized),
          optimized.params_used, config.followup_days, config.detection_threshold,
          config.integrator);
      auto ftraj = open_output(dir, "followup_trajectory.csv");
      write_trajectory_csv(ftraj, followup.trajectory, followup.params_used,
                           config.output_cadence);

      auto summary = open_output(dir, "summary.csv");
      write_summary_header(summary);
      write_summary_row(summary, "simulate", baseline.label, baseline.nadir_viral_load,
                        baseline.end_of_treatment_viral_load, std::nullopt);
      write_summary_row(summary, "optimize", optimized.label, optimized.nadir_viral_load,
                        optimized.end_of_treatment_viral_load, std::nullopt);
      write_summary_row(summary, "followup", followup.label, optimized.nadir_viral_load,
                        optimized.end_of_treatment_viral_load, followup.end_viral_load);

      auto text = open_output(dir, "summary.txt");
      for (std::ostream* os : {static_cast<std::ostream*>(&text), &out}) {
        describe_outcome(*os, "constant dose", baseline);
        describe_outcome(*os, "optimized", optimized);
        describe_followup(*os, followup);
        *os << "end-of-treatment load: constant dose "
            << format_number(baseline.end_of_treatment_viral_load) << " vs optimized "
            << format_number(optimized.end_of_treatment_viral_load) << "\n";
        if (optimized.optimization) {
          *os << "cost improvement over constant dose: "
              << format_number(optimized.optimization->cost_history.front() -
                               optimized.optimization->cost_history.back())
              << "\n";
        }
      }
      return RunStatus::ok;
    }
  }
  return RunStatus::usage_error;
}

}  // namespace hcv
