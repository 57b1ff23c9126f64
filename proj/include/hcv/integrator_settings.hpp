#pragma once

namespace hcv {

/// Error-control knobs shared by every integration in the toolkit.
/// rel_tol is capped at 1e-2: above that the embedded error estimate stops
/// being meaningful for this model.
struct IntegratorSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-6;
  double max_step = 10.0;     // days
  double initial_step = 0.01; // days

  static IntegratorSettings defaults() { return {}; }
  void validate() const;  // throws std::invalid_argument
};

}  // namespace hcv
