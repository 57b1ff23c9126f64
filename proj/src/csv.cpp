#include "hcv/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace hcv {

std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory,
                          const ModelParameters& params, double cadence) {
  if (!(cadence > 0.0) || !std::isfinite(cadence)) {
    throw std::invalid_argument("output cadence must be strictly positive");
  }
  os << "t,T,I,V_I,V_NI,eps,rho\n";
  const double t0 = trajectory.start_time();
  const double t1 = trajectory.end_time();

  const auto emit = [&](double t) {
    const State x = trajectory.state_at(t);
    const ControlInput eff =
        effective_control(trajectory.controls_used.value_at(t), params, t);
    os << format_number(t) << ',' << format_number(x.T) << ',' << format_number(x.I) << ','
       << format_number(x.V_I) << ',' << format_number(x.V_NI) << ',' << format_number(eff.eps)
       << ',' << format_number(eff.rho) << '\n';
  };

  double last = t0;
  for (std::size_t i = 0;; ++i) {
    const double t = t0 + cadence * static_cast<double>(i);
    if (t > t1) break;
    emit(t);
    last = t;
  }
  if (last < t1) emit(t1);
}

void write_schedule_csv(std::ostream& os, const ControlSchedule& schedule) {
  os << "t_start,t_end,eps,rho\n";
  for (std::size_t j = 0; j < schedule.intervals(); ++j) {
    os << format_number(schedule.mesh[j]) << ',' << format_number(schedule.mesh[j + 1]) << ','
       << format_number(schedule.values[j].eps) << ',' << format_number(schedule.values[j].rho)
       << '\n';
  }
}

IterationCallback make_csv_iteration_logger(std::ostream& os) {
  os << "iter,cost,proj_grad_norm,step\n";
  return [&os](int iter, double cost, double proj_grad_norm, double step) {
    os << iter << ',' << format_number(cost) << ',' << format_number(proj_grad_norm) << ','
       << format_number(step) << '\n';
  };
}

void write_summary_header(std::ostream& os) { os << "scenario,label,nadir,eot_load,eof_load\n"; }

void write_summary_row(std::ostream& os, const std::string& scenario, OutcomeLabel label,
                       double nadir, double eot_load, const std::optional<double>& eof_load) {
  os << scenario << ',' << to_string(label) << ',' << format_number(nadir) << ','
     << format_number(eot_load) << ',';
  if (eof_load) os << format_number(*eof_load);
  os << '\n';
}

}  // namespace hcv
