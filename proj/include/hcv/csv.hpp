#pragma once

#include <ostream>
#include <string>

#include "hcv/integrator.hpp"
#include "hcv/optimizer.hpp"
#include "hcv/scenarios.hpp"
#include "hcv/schedule.hpp"

namespace hcv {

/// Locale-independent formatting (12 significant digits, '.' decimal point
/// regardless of the process locale).
std::string format_number(double v);

/// Header "t,T,I,V_I,V_NI,eps,rho"; one row per cadence point from the start
/// to the end of the trajectory, end point included. The eps/rho columns hold
/// the efficacies actually driving the dynamics at that time, i.e. schedule
/// values after the post-treatment decay.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory,
                          const ModelParameters& params, double cadence = 0.25);

/// Header "t_start,t_end,eps,rho"; one row per schedule interval.
void write_schedule_csv(std::ostream& os, const ControlSchedule& schedule);

/// Header "iter,cost,proj_grad_norm,step". Rows are appended through the
/// returned callback, so the log streams while the optimizer runs.
IterationCallback make_csv_iteration_logger(std::ostream& os);

/// Header "scenario,label,nadir,eot_load,eof_load". Fields without a value
/// (e.g. eof_load when no follow-up ran) stay empty.
void write_summary_header(std::ostream& os);
void write_summary_row(std::ostream& os, const std::string& scenario, OutcomeLabel label,
                       double nadir, double eot_load, const std::optional<double>& eof_load);

}  // namespace hcv
