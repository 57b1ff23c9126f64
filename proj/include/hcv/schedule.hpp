#pragma once

#include <cstddef>
#include <vector>

#include "hcv/model.hpp"

namespace hcv {

/// Piecewise-constant dosing plan: values[j] applies on [mesh[j], mesh[j+1]),
/// with the final interval closed on the right. The mesh is strictly
/// increasing and there is at least one interval.
struct ControlSchedule {
  std::vector<double> mesh;
  std::vector<ControlInput> values;

  static ControlSchedule constant(const ControlInput& value, double t0, double t1);
  static ControlSchedule uniform(const ControlInput& value, double t0, double t1,
                                 std::size_t intervals);

  std::size_t intervals() const { return values.size(); }
  double start_time() const { return mesh.front(); }
  double end_time() const { return mesh.back(); }

  /// Index of the interval containing t; the end point maps to the last one.
  std::size_t interval_index(double t) const;
  ControlInput value_at(double t) const { return values[interval_index(t)]; }

  void validate() const;  // throws std::invalid_argument
};

struct StiSwitchCounts {
  int eps = 0;
  int rho = 0;
};

/// Counts transitions between near-off (< low) and near-on (> high) intervals
/// per channel, skipping intervals that sit in between. Useful as a compact
/// description of on/off treatment-interruption structure in a schedule.
StiSwitchCounts sti_switch_count(const ControlSchedule& schedule, double low = 0.1,
                                 double high = 0.9);

}  // namespace hcv
