#include "chsys/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace chsys {

double CharacteristicBundle::qx(std::size_t i) const { return std::exp(log_qx[i]); }

double CharacteristicBundle::representation_gap() const {
  double gap = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    gap = std::max(gap, std::abs(qx(i) - qx_linear[i]) / qx(i));
  return gap;
}

std::vector<double> default_seeds(const State& s0, std::size_t count,
                                  std::span<const double> extra) {
  const Grid& g = *s0.grid();
  Field weight = s0.m.abs() + effective_n(s0).abs();
  const double threshold = 1e-10 * weight.sup_norm();
  std::vector<double> seeds(extra.begin(), extra.end());
  std::size_t lo = g.size(), hi = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (weight[i] > threshold && weight[i] > 0.0) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }
  if (lo <= hi && count > 0) {
    const double a = g.node(lo), b = g.node(hi);
    if (count == 1) {
      seeds.push_back(0.5 * (a + b));
    } else {
      for (std::size_t k = 0; k < count; ++k)
        seeds.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
    }
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  return seeds;
}

CharacteristicBundle make_bundle(const State& s0, std::vector<double> seeds) {
  CharacteristicBundle b;
  b.kind = s0.kind;
  b.t = s0.t;
  const double L = s0.grid()->half_length();
  for (double x : seeds)
    if (!(x >= -L && x < L)) throw std::invalid_argument("seed outside the box");
  b.seeds = std::move(seeds);
  b.q = b.seeds;
  const std::size_t n = b.seeds.size();
  b.log_qx.assign(n, 0.0);
  b.phase.assign(n, 0.0);
  b.qx_linear.assign(n, 1.0);
  Field n_eff = effective_n(s0);
  const Field* fields[] = {&s0.m, &n_eff};
  SpectralInterpolator interp(fields);
  double values[2];
  for (std::size_t i = 0; i < n; ++i) {
    interp.evaluate(b.seeds[i], values);
    b.m0_at_seeds.push_back(values[0]);
    b.n0_at_seeds.push_back(values[1]);
  }
  return b;
}

namespace {

// Velocity, log-Jacobian rate and phase rate of one stage, ready for off-grid evaluation.
class StageRates {
 public:
  StageRates(const State& s, const DerivedFields& d)
      : velocity_(transport_velocity(s, d)),
        stretch_(stretch_rate(s, d)),
        phase_(phase_rate(s, d)),
        interp_(std::vector<const Field*>{&velocity_, &stretch_, &phase_}) {}

  // {q_t, (log q_x)_t, phase_t} at x.
  std::array<double, 3> at(double x) const {
    std::array<double, 3> out{};
    interp_.evaluate(x, out);
    return out;
  }

 private:
  Field velocity_, stretch_, phase_;
  SpectralInterpolator interp_;
};

double wrap_into_box(double x, double L, bool& wrapped) {
  if (x >= -L && x < L) return x;
  wrapped = true;
  const double period = 2.0 * L;
  double y = std::fmod(x + L, period);
  if (y < 0.0) y += period;
  return y - L;
}

void rk4_characteristics(CharacteristicBundle& b, const std::array<const StageRates*, 4>& stages,
                         double dt, double L) {
  static constexpr double kOffset[4] = {0.0, 0.5, 0.5, 1.0};
  static constexpr double kWeight[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
  bool wrapped = false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::array<double, 3> k{};
    double dq = 0.0, dlog = 0.0, dphase = 0.0;
    double lin_k = 0.0, dlin = 0.0;
    for (int s = 0; s < 4; ++s) {
      const double x = b.q[i] + kOffset[s] * dt * k[0];
      k = stages[s]->at(x);
      dq += kWeight[s] * k[0];
      dlog += kWeight[s] * k[1];
      dphase += kWeight[s] * k[2];
      // Linear form (q_x)_t = Q_x q_x with its own RK4 stage values.
      lin_k = k[1] * (b.qx_linear[i] + kOffset[s] * dt * lin_k);
      dlin += kWeight[s] * lin_k;
    }
    b.q[i] = wrap_into_box(b.q[i] + dt * dq, L, wrapped);
    b.log_qx[i] += dt * dlog;
    b.phase[i] += dt * dphase;
    b.qx_linear[i] += dt * dlin;
  }
  if (wrapped)
    spdlog::warn("characteristics: a curve left the box and was wrapped periodically at t = {}",
                 b.t + dt);
  b.t += dt;
}

}  // namespace

void advance(CharacteristicBundle& bundle, const StepResult& step, double dt) {
  StageRates r0(step.stages[0].state, step.stages[0].derived);
  StageRates r1(step.stages[1].state, step.stages[1].derived);
  StageRates r2(step.stages[2].state, step.stages[2].derived);
  StageRates r3(step.stages[3].state, step.stages[3].derived);
  rk4_characteristics(bundle, {&r0, &r1, &r2, &r3}, dt, step.next.grid()->half_length());
}

void advance(CharacteristicBundle& bundle, const State& s, const DerivedFields& d, double dt) {
  StageRates r(s, d);
  rk4_characteristics(bundle, {&r, &r, &r, &r}, dt, s.grid()->half_length());
}

double PullbackResidual::max_abs() const {
  double worst = 0.0;
  for (double v : m) worst = std::max(worst, std::abs(v));
  for (double v : n) worst = std::max(worst, std::abs(v));
  return worst;
}

PullbackResidual pullback_residual(const CharacteristicBundle& bundle, const State& s) {
  Field n_eff = effective_n(s);
  const Field* fields[] = {&s.m, &n_eff};
  SpectralInterpolator interp(fields);
  PullbackResidual r;
  double values[2];
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    interp.evaluate(bundle.q[i], values);
    const double qx = bundle.qx(i);
    const double gain = std::exp(bundle.phase[i]);
    r.m.push_back(values[0] * qx - bundle.m0_at_seeds[i] * gain);
    r.n.push_back(values[1] * qx - bundle.n0_at_seeds[i] / gain);
  }
  return r;
}

SignCensus sign_census(const State& s) {
  Field n_eff = effective_n(s);
  return {s.m.min(), n_eff.min(), s.m.max(), n_eff.max()};
}

}  // namespace chsys
