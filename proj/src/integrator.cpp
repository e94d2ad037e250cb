#include "chsys/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chsys {

void IntegratorConfig::validate() const {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
  if (!(dt_min > 0.0)) throw std::invalid_argument("dt_min must be > 0");
  if (!(field_cap > 1.0)) throw std::invalid_argument("field_cap must be > 1");
  if (!(sample_interval > 0.0) || !std::isfinite(sample_interval))
    throw std::invalid_argument("sample_interval must be > 0");
}

std::string_view to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::Completed: return "Completed";
    case RunOutcome::BlowupDetected: return "BlowupDetected";
    case RunOutcome::DtUnderflow: return "DtUnderflow";
  }
  return "?";
}

namespace {

State advance(const State& s, double a, const Tendency& k) {
  State out = s;
  out.t += a;
  out.m += a * k.dm;
  if (s.kind != SystemKind::CubicCH) out.n += a * k.dn;
  return out;
}

}  // namespace

StepResult rk4_update(const State& s, double dt, const DerivedFields* derived) {
  StepResult result;
  int stage = 0;
  auto rate = [&](const State& y) {
    StageData& sd = result.stages[stage++];
    sd.state = y;
    sd.derived = (stage == 1 && derived != nullptr) ? *derived : reconstruct(y);
    return rhs(sd.state, sd.derived);
  };
  result.next = rk4_scheme(s, dt, rate, advance);
  result.next.t = s.t + dt;  // exact, rather than the sum of stage fractions
  return result;
}

StepResult step_rk4_detailed(const State& s, double dt, const DerivedFields* derived) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4 needs dt > 0");
  StepResult r = rk4_update(s, dt, derived);
  r.next.m.require_finite("m after step to t = " + std::to_string(r.next.t));
  r.next.n.require_finite("n after step to t = " + std::to_string(r.next.t));
  return r;
}

State step_rk4(const State& s, double dt) { return step_rk4_detailed(s, dt).next; }

double cfl_step(double speed_sup, double dx, double rate_sup, double cfl) {
  return std::min(cfl * dx / std::max(speed_sup, kSpeedFloor), cfl / std::max(rate_sup, kSpeedFloor));
}

double choose_dt(const State& s, const IntegratorConfig& cfg) {
  return choose_dt(s, reconstruct(s), cfg);
}

double choose_dt(const State& s, const DerivedFields& d, const IntegratorConfig& cfg) {
  const double speed = transport_velocity(s, d).sup_norm();
  double rate = stretch_rate(s, d).sup_norm();
  if (s.kind == SystemKind::SystemB) rate = std::max(rate, phase_rate(s, d).sup_norm());
  return std::min(cfl_step(speed, s.grid()->dx(), rate, cfg.cfl), cfg.sample_interval);
}

namespace {

double field_sup(const State& s) { return std::max(s.m.sup_norm(), s.n.sup_norm()); }

template <class Fn>
void notify(const char* what, double t, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << what << " observer failed at t = " << t << ": " << e.what();
    throw RunAborted(msg.str());
  }
}

}  // namespace

RunResult run(const State& s0, const IntegratorConfig& cfg, const Observers& observers,
              bool keep_samples) {
  cfg.validate();
  if (!s0.all_finite()) throw NumericalFailure("initial state is not finite");

  RunResult result;
  const double t0 = s0.t;
  const double t_end = cfg.t_end;
  const double initial_sup = field_sup(s0);
  const double cap = initial_sup > 0.0 ? cfg.field_cap * initial_sup
                                       : std::numeric_limits<double>::infinity();

  State s = s0;
  DerivedFields d = reconstruct(s);
  auto take_sample = [&] {
    if (observers.on_sample) notify("sample", s.t, [&] { observers.on_sample(s, d); });
    if (keep_samples) result.samples.push_back(s);
  };
  take_sample();

  std::size_t next_index = 1;
  auto sample_time = [&](std::size_t k) { return t0 + static_cast<double>(k) * cfg.sample_interval; };
  while (sample_time(next_index) <= t0) ++next_index;

  result.status = {RunOutcome::Completed, t_end, ""};
  while (s.t < t_end) {
    const double dt_free = choose_dt(s, d, cfg);
    if (dt_free < cfg.dt_min) {
      std::ostringstream msg;
      msg << "dt = " << dt_free << " fell below dt_min = " << cfg.dt_min;
      result.status = {RunOutcome::DtUnderflow, s.t, msg.str()};
      break;
    }
    const double target = std::min(sample_time(next_index), t_end);
    double dt = dt_free;
    bool lands = false;
    // Land exactly on the next sample time rather than leaving a sliver step.
    if (s.t + dt >= target - 1e-12 * std::max(1.0, std::abs(target))) {
      dt = target - s.t;
      lands = true;
    }

    StepResult step;
    try {
      step = step_rk4_detailed(s, dt, &d);
    } catch (const NumericalFailure& e) {
      result.status = {RunOutcome::BlowupDetected, std::min(s.t + dt, t_end), e.what()};
      break;
    }
    if (lands) step.next.t = target;
    ++result.steps;

    const double sup = field_sup(step.next);
    if (sup > cap) {
      std::ostringstream msg;
      msg << "sup(|m|, |n|) = " << sup << " exceeded field_cap x initial = " << cap;
      s = step.next;
      result.status = {RunOutcome::BlowupDetected, s.t, msg.str()};
      if (observers.on_step) notify("step", s.t, [&] { observers.on_step(step, dt); });
      break;
    }

    s = step.next;
    try {
      d = reconstruct(s);
    } catch (const NumericalFailure& e) {
      result.status = {RunOutcome::BlowupDetected, s.t, e.what()};
      break;
    }
    if (observers.on_step) notify("step", s.t, [&] { observers.on_step(step, dt); });
    if (lands) {
      if (target == sample_time(next_index)) ++next_index;
      take_sample();
    }
  }
  result.final_state = s;
  return result;
}

}  // namespace chsys
