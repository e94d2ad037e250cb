#pragma once

// Per-sample conserved quantities, norms and blow-up indicators.

#include <array>
#include <string_view>

#include "chsys/dynamics.hpp"

namespace chsys {

struct DiagnosticsRecord {
  double t = 0.0;
  double l1_m = 0.0, l1_n = 0.0;
  double consA_mv = 0.0;   // int m (v + v_x)
  double consA_nu = 0.0;   // int n (u - u_x)
  double consB_mvx = 0.0;  // int m v_x
  double consB_nux = 0.0;  // int n u_x
  double consB_mv = 0.0;   // int m v
  double consB_nu = 0.0;   // int n u
  double sup_m = 0.0, sup_n = 0.0;
  double h1_u = 0.0, h1_v = 0.0;
  double indicatorA = 0.0;        // inf (m (v + v_x) - n (u - u_x)) = 2 inf Q_x for system A
  double indicatorB_inf = 0.0;    // inf (m v_x + n u_x) = 2 inf Q_x for system B
  double indicatorB_cross = 0.0;  // sup |u v_x - v u_x|
  double continuation_q = 0.0;    // int_0^t max(sup_m, sup_n)^2
  double slope_check_u = 0.0;     // sup (|u_x| - |u|)
  double support_left_m = 0.0;    // leftmost node with |m| above 1e-10 sup|m|
  double support_right_n = 0.0;   // rightmost node with |n| above 1e-10 sup|n|

  static constexpr std::size_t kColumns = 20;
  static const std::array<std::string_view, kColumns>& column_names();
  std::array<double, kColumns> values() const;
};

inline constexpr double kSupportThreshold = 1e-10;
inline constexpr int kContinuationExponent = 2;

/// `previous` (the prior record of the same run, or null at the first sample)
/// carries the running continuation integral. For CubicCH, n is taken as 2m.
/// An identically zero field has no support; its edge is reported as 0.
DiagnosticsRecord sample(const State& s, const DerivedFields& d,
                         const DiagnosticsRecord* previous = nullptr);

/// The one place the unhalved indicators become Q_x: indicator / 2.
double indicator_to_qx(double indicator);

/// Growth rate of the H1 envelope from the initial record of a sign-definite run:
/// A (and CubicCH): (|int m0 (v0 + v0_x)| + |int n0 (u0 - u0_x)|) / 2,
/// B:               (|int m0 v0| + |int n0 u0|) / 2, using |m v_x|_1 <= int m v.
double h1_growth_rate(const DiagnosticsRecord& initial, SystemKind kind);

struct EnvelopeMargin {
  double envelope = 0.0;
  double actual = 0.0;
  double margin = 0.0;  // envelope - actual
  bool violated = false;
};

inline constexpr double kEnvelopeTolerance = 1e-6;

/// envelope(t) = (h1_u(0)^2 + h1_v(0)^2) exp(kappa t); violated when margin < -1e-6 envelope.
EnvelopeMargin h1_envelope_check(const DiagnosticsRecord& record, const DiagnosticsRecord& initial,
                                 SystemKind kind);

struct SeparationResidual {
  double leak_m = 0.0;     // max |m| on x < q_b
  double leak_n = 0.0;     // max |n| on x > q_a
  double indicator = 0.0;  // sup |m (v + v_x) - n (u - u_x)|
  double total() const { return leak_m + leak_n + indicator; }
};

/// For data with supp m0 in [b, inf) and supp n0 in (-inf, a], a <= b; q_a and q_b
/// are the current positions of the characteristics started at a and b.
SeparationResidual support_separation_check(const State& s, const DerivedFields& d, double q_a,
                                            double q_b);

}  // namespace chsys
