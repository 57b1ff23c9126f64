#pragma once

// Dormand-Prince 5(4) step kernel over fixed-size vectors. The same kernel
// drives the plain state integration, the cost-augmented integration, and the
// backward costate sweep, so all of them share one error control and stay
// bit-reproducible.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "hcv/integrator_settings.hpp"

namespace hcv::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
bool all_finite(const Vec<N>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

// Classic Dormand-Prince coefficients.
struct Dopri5Tableau {
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  // Fifth-order weights; the last stage sits at the step end point, so an
  // accepted step hands its final derivative to the next one (FSAL).
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  // Difference between the fifth-order and the embedded fourth-order weights.
  static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
  static constexpr double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
  static constexpr double e4 = 125.0 / 192.0 - 393.0 / 640.0;
  static constexpr double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
  static constexpr double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
  static constexpr double e7 = -1.0 / 40.0;
};

// PI step-size controller (standard exponents for a fifth-order pair).
class StepController {
 public:
  double accept_factor(double err, bool previous_step_rejected) {
    constexpr double kBeta = 0.04;
    constexpr double kAlpha = 0.2 - 0.75 * kBeta;
    double fac;
    if (err == 0.0) {
      fac = kMaxGrow;
    } else {
      fac = kSafety * std::pow(err, -kAlpha) * std::pow(err_prev_, kBeta);
      fac = std::min(kMaxGrow, std::max(kMaxShrink, fac));
    }
    if (previous_step_rejected) fac = std::min(fac, 1.0);
    err_prev_ = std::max(err, 1e-4);
    return fac;
  }

  static double reject_factor(double err) {
    return std::max(kMaxShrink, kSafety * std::pow(err, -0.2));
  }

 private:
  static constexpr double kSafety = 0.9;
  static constexpr double kMaxGrow = 10.0;
  static constexpr double kMaxShrink = 0.2;
  double err_prev_ = 1e-4;
};

// Integrates y' = f(t, y) from t0 to t1 (either direction). Calls
// on_accept(t, y, f_at_t) after every accepted step, where the derivative is
// the FSAL stage, i.e. f at the accepted point; on_accept may throw to abort.
// on_failure(kind, t) is called for step-size underflow ("underflow") and for
// states that cannot be advanced through the finite range ("nonfinite"); it
// must throw.
template <std::size_t N, typename Rhs, typename OnAccept, typename OnFailure>
void rk45_segment(Rhs&& f, double t0, double t1, Vec<N>& y, const IntegratorSettings& settings,
                  OnAccept&& on_accept, OnFailure&& on_failure) {
  using T = Dopri5Tableau;
  if (t1 == t0) return;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);

  if (!all_finite(y)) on_failure("nonfinite", t0);

  double t = t0;
  Vec<N> k1 = f(t, y);
  double h = std::min({settings.initial_step, settings.max_step, span}) * dir;

  StepController controller;
  bool rejected_last = false;
  bool reject_was_nonfinite = false;

  Vec<N> k2, k3, k4, k5, k6, k7, ytmp, ynew;
  while (true) {
    const double remaining = (t1 - t) * dir;
    if (remaining <= 0.0) break;
    bool clipped = false;
    if (std::abs(h) >= remaining) {
      h = t1 - t;
      clipped = true;
    }
    if (std::abs(h) < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
      on_failure(reject_was_nonfinite ? "nonfinite" : "underflow", t);
    }

    // A trial step that leaves the finite range anywhere is rejected like an
    // oversized step instead of being fed back into the right-hand side.
    bool stages_finite = true;
    auto stage = [&](double tt, const Vec<N>& yy) -> Vec<N> {
      if (!stages_finite || !all_finite(yy)) {
        stages_finite = false;
        return Vec<N>{};
      }
      return f(tt, yy);
    };

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * T::a21 * k1[i];
    k2 = stage(t + T::c2 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
    k3 = stage(t + T::c3 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
    k4 = stage(t + T::c4 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
    k5 = stage(t + T::c5 * h, ytmp);
    // For a clipped step the two end-point stages are pinned to t1 exactly so
    // the right-hand side is never queried past the segment boundary.
    const double t_new = clipped ? t1 : t + h;
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] +
                            T::a65 * k5[i]);
    k6 = stage(t_new, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (T::b1 * k1[i] + T::b3 * k3[i] + T::b4 * k4[i] + T::b5 * k5[i] +
                            T::b6 * k6[i]);
    if (stages_finite && all_finite(ynew)) {
      k7 = stage(t_new, ynew);
    } else {
      stages_finite = false;
    }

    double err = std::numeric_limits<double>::infinity();
    if (stages_finite) {
      double err_sq = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                              T::e6 * k6[i] + T::e7 * k7[i]);
        const double scale =
            settings.abs_tol + settings.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err_sq += (e / scale) * (e / scale);
      }
      err = std::sqrt(err_sq / static_cast<double>(N));
    }

    if (std::isfinite(err) && err <= 1.0) {
      t = t_new;
      y = ynew;
      k1 = k7;
      on_accept(t, y, k1);
      h *= controller.accept_factor(err, rejected_last);
      if (std::abs(h) > settings.max_step) h = settings.max_step * dir;
      rejected_last = false;
      reject_was_nonfinite = false;
    } else {
      h *= std::isfinite(err) ? StepController::reject_factor(err) : 0.2;
      rejected_last = true;
      reject_was_nonfinite = !stages_finite;
    }
  }
}

}  // namespace hcv::detail
