#pragma once

// Classical RK4 with a transport CFL step, sample-aligned step clipping and
// sup-norm blow-up detection.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chsys/dynamics.hpp"

namespace chsys {

struct IntegratorConfig {
  double t_end = 1.0;
  double cfl = 0.3;
  double dt_min = 1e-9;
  double field_cap = 1e6;  // multiple of the initial sup norm of (m, n)
  double sample_interval = 0.1;

  /// Throws std::invalid_argument naming the violated bound.
  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

enum class RunOutcome { Completed, BlowupDetected, DtUnderflow };

std::string_view to_string(RunOutcome outcome);

struct RunStatus {
  RunOutcome outcome = RunOutcome::Completed;
  double t_stop = 0.0;
  std::string reason;  // empty when completed
};

/// Thrown when an observer fails; the message carries the run time.
class RunAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generic classical RK4. `rate(y)` returns the derivative and `axpy(y, a, k)`
/// returns y + a k; stages are formed with axpy so a time coordinate carried
/// inside y advances with them.
template <class Y, class Rate, class Axpy>
Y rk4_scheme(const Y& y, double dt, Rate&& rate, Axpy&& axpy) {
  auto k1 = rate(y);
  auto k2 = rate(axpy(y, 0.5 * dt, k1));
  auto k3 = rate(axpy(y, 0.5 * dt, k2));
  auto k4 = rate(axpy(y, dt, k3));
  Y out = axpy(y, dt / 6.0, k1);
  out = axpy(out, dt / 3.0, k2);
  out = axpy(out, dt / 3.0, k3);
  return axpy(out, dt / 6.0, k4);
}

/// A state at which the tendency was evaluated, with its velocities.
struct StageData {
  State state;
  DerivedFields derived;
};

struct StepResult {
  State next;
  std::array<StageData, 4> stages;  // RK4 stages at t, t+dt/2, t+dt/2, t+dt
};

/// RK4 update for either sign of dt (negative dt integrates backwards).
/// `derived` may carry reconstruct(s) to save the first reconstruction.
StepResult rk4_update(const State& s, double dt, const DerivedFields* derived = nullptr);

/// Forward RK4 step. Requires dt > 0; throws NumericalFailure if the new state
/// is not finite.
State step_rk4(const State& s, double dt);
StepResult step_rk4_detailed(const State& s, double dt, const DerivedFields* derived = nullptr);

/// Step bound from a transport speed and a pointwise growth rate:
/// min(cfl dx / max(speed, eps), cfl / max(rate, eps)).
double cfl_step(double speed_sup, double dx, double rate_sup, double cfl);
inline constexpr double kSpeedFloor = 1e-12;

/// Transport speed is the characteristic velocity of the kind; the rate is the
/// larger of sup |Q_x| and, for system B, sup |G|/2. Capped by sample_interval.
double choose_dt(const State& s, const IntegratorConfig& cfg);
double choose_dt(const State& s, const DerivedFields& d, const IntegratorConfig& cfg);

struct Observers {
  /// Called at t0, at every multiple of sample_interval and at the final time.
  std::function<void(const State&, const DerivedFields&)> on_sample;
  /// Called after every accepted step with its stages and size.
  std::function<void(const StepResult&, double dt)> on_step;
};

struct RunResult {
  std::vector<State> samples;
  State final_state;  // last finite state reached
  RunStatus status;
  std::size_t steps = 0;
};

/// Integrates s0 to cfg.t_end. Never returns non-finite states.
RunResult run(const State& s0, const IntegratorConfig& cfg, const Observers& observers = {},
              bool keep_samples = true);

}  // namespace chsys
