#include "hcv/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcv {

ControlSchedule ControlSchedule::constant(const ControlInput& value, double t0, double t1) {
  ControlSchedule s;
  s.mesh = {t0, t1};
  s.values = {value};
  s.validate();
  return s;
}

ControlSchedule ControlSchedule::uniform(const ControlInput& value, double t0, double t1,
                                         std::size_t intervals) {
  if (intervals == 0) throw std::invalid_argument("schedule needs at least one interval");
  ControlSchedule s;
  s.mesh.resize(intervals + 1);
  const double span = t1 - t0;
  for (std::size_t i = 0; i <= intervals; ++i) {
    s.mesh[i] = t0 + span * (static_cast<double>(i) / static_cast<double>(intervals));
  }
  s.mesh.back() = t1;
  s.values.assign(intervals, value);
  s.validate();
  return s;
}

std::size_t ControlSchedule::interval_index(double t) const {
  if (t < mesh.front() || t > mesh.back()) {
    throw std::out_of_range("query time outside the schedule span");
  }
  // First breakpoint strictly greater than t bounds the containing interval.
  const auto it = std::upper_bound(mesh.begin(), mesh.end(), t);
  if (it == mesh.end()) return values.size() - 1;  // t == mesh.back()
  const std::size_t idx = static_cast<std::size_t>(it - mesh.begin());
  return std::min(idx - 1, values.size() - 1);
}

void ControlSchedule::validate() const {
  if (values.empty() || mesh.size() != values.size() + 1) {
    throw std::invalid_argument("schedule mesh must have exactly one more point than values");
  }
  for (double t : mesh) {
    if (!std::isfinite(t)) throw std::invalid_argument("schedule mesh contains non-finite time");
  }
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    if (!(mesh[i] < mesh[i + 1])) {
      throw std::invalid_argument("schedule mesh must be strictly increasing");
    }
  }
  for (const ControlInput& v : values) v.validate();
}

StiSwitchCounts sti_switch_count(const ControlSchedule& schedule, double low, double high) {
  StiSwitchCounts counts;
  int last_eps = -1;  // -1 unknown, 0 off, 1 on
  int last_rho = -1;
  for (const ControlInput& v : schedule.values) {
    if (v.eps < low || v.eps > high) {
      const int state = v.eps > high ? 1 : 0;
      if (last_eps >= 0 && state != last_eps) ++counts.eps;
      last_eps = state;
    }
    if (v.rho < low || v.rho > high) {
      const int state = v.rho > high ? 1 : 0;
      if (last_rho >= 0 && state != last_rho) ++counts.rho;
      last_rho = state;
    }
  }
  return counts;
}

}  // namespace hcv
