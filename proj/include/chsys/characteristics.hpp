#pragma once

// Characteristic curves q(t, x_i) of the transport velocity, their Jacobians
// q_x and the system-B phase, advanced in lockstep with the field integrator.
// The momenta pull back along them:
//   A:  m(t, q) q_x = m0,          n(t, q) q_x = n0
//   B:  m(t, q) q_x = m0 e^{phi},  n(t, q) q_x = n0 e^{-phi},
//       phi = 1/2 int_0^t (u v_x - v u_x)(tau, q) dtau

#include <cstddef>
#include <span>
#include <vector>

#include "chsys/dynamics.hpp"
#include "chsys/integrator.hpp"

namespace chsys {

struct CharacteristicBundle {
  SystemKind kind = SystemKind::SystemA;
  double t = 0.0;
  std::vector<double> seeds;
  std::vector<double> q;
  std::vector<double> log_qx;  // q_x = exp(log_qx), positive by construction
  std::vector<double> phase;   // identically zero unless system B
  std::vector<double> m0_at_seeds;
  std::vector<double> n0_at_seeds;
  // q_x integrated as the linear ODE (q_x)_t = Q_x q_x, kept only to cross-check log_qx.
  std::vector<double> qx_linear;

  std::size_t size() const { return seeds.size(); }
  double qx(std::size_t i) const;
  /// Largest relative gap between exp(log_qx) and the linear-ODE Jacobian.
  double representation_gap() const;
};

inline constexpr std::size_t kDefaultSeedCount = 64;

/// `count` seeds spread uniformly over the support of |m0| + |n0| (threshold
/// 1e-10 of its sup), merged with `extra`, sorted, duplicates dropped.
std::vector<double> default_seeds(const State& s0, std::size_t count = kDefaultSeedCount,
                                  std::span<const double> extra = {});

CharacteristicBundle make_bundle(const State& s0, std::vector<double> seeds);

/// RK4 step of the characteristic ODEs through the field integrator's stages.
void advance(CharacteristicBundle& bundle, const StepResult& step, double dt);
/// Same, with the velocity fields frozen at one time level.
void advance(CharacteristicBundle& bundle, const State& s, const DerivedFields& d, double dt);

struct PullbackResidual {
  std::vector<double> m;
  std::vector<double> n;
  double max_abs() const;
};

PullbackResidual pullback_residual(const CharacteristicBundle& bundle, const State& s);

struct SignCensus {
  double min_m = 0.0, min_n = 0.0, max_m = 0.0, max_n = 0.0;
};

SignCensus sign_census(const State& s);

}  // namespace chsys
