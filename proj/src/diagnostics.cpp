#include "chsys/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace chsys {

const std::array<std::string_view, DiagnosticsRecord::kColumns>& DiagnosticsRecord::column_names() {
  static const std::array<std::string_view, kColumns> names = {
      "t",          "l1_m",          "l1_n",           "consA_mv",         "consA_nu",
      "consB_mvx",  "consB_nux",     "consB_mv",       "consB_nu",         "sup_m",
      "sup_n",      "h1_u",          "h1_v",           "indicatorA",       "indicatorB_inf",
      "indicatorB_cross", "continuation_q", "slope_check_u", "support_left_m", "support_right_n"};
  return names;
}

std::array<double, DiagnosticsRecord::kColumns> DiagnosticsRecord::values() const {
  return {t,     l1_m,  l1_n,       consA_mv,       consA_nu,         consB_mvx,      consB_nux,
          consB_mv, consB_nu, sup_m, sup_n,          h1_u,             h1_v,           indicatorA,
          indicatorB_inf, indicatorB_cross, continuation_q, slope_check_u, support_left_m,
          support_right_n};
}

DiagnosticsRecord sample(const State& s, const DerivedFields& d, const DiagnosticsRecord* previous) {
  const Field& m = s.m;
  const Field n = effective_n(s);
  const Grid& g = *s.grid();
  DiagnosticsRecord r;
  r.t = s.t;
  r.l1_m = integrate(m.abs());
  r.l1_n = integrate(n.abs());
  r.consA_mv = integrate(m * d.v_plus_vx);
  r.consA_nu = integrate(n * d.u_minus_ux);
  r.consB_mvx = integrate(m * d.v_x);
  r.consB_nux = integrate(n * d.u_x);
  r.consB_mv = integrate(m * d.v);
  r.consB_nu = integrate(n * d.u);
  r.sup_m = m.sup_norm();
  r.sup_n = n.sup_norm();
  r.h1_u = std::sqrt(integrate(d.u * d.u) + integrate(d.u_x * d.u_x));
  r.h1_v = std::sqrt(integrate(d.v * d.v) + integrate(d.v_x * d.v_x));
  r.indicatorA = (m * d.v_plus_vx - n * d.u_minus_ux).min();
  r.indicatorB_inf = (m * d.v_x + n * d.u_x).min();
  r.indicatorB_cross = (d.u * d.v_x - d.v * d.u_x).sup_norm();

  const double level = std::pow(std::max(r.sup_m, r.sup_n), kContinuationExponent);
  if (previous != nullptr) {
    const double prev_level = std::pow(std::max(previous->sup_m, previous->sup_n),
                                       kContinuationExponent);
    r.continuation_q = previous->continuation_q + 0.5 * (r.t - previous->t) * (level + prev_level);
  }

  double slope = -INFINITY;
  for (std::size_t i = 0; i < g.size(); ++i)
    slope = std::max(slope, std::abs(d.u_x[i]) - std::abs(d.u[i]));
  r.slope_check_u = slope;

  r.support_left_m = 0.0;
  const double m_cut = kSupportThreshold * r.sup_m;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(m[i]) > m_cut && r.sup_m > 0.0) {
      r.support_left_m = g.node(i);
      break;
    }
  }
  r.support_right_n = 0.0;
  const double n_cut = kSupportThreshold * r.sup_n;
  for (std::size_t i = g.size(); i-- > 0;) {
    if (std::abs(n[i]) > n_cut && r.sup_n > 0.0) {
      r.support_right_n = g.node(i);
      break;
    }
  }
  return r;
}

double indicator_to_qx(double indicator) { return 0.5 * indicator; }

double h1_growth_rate(const DiagnosticsRecord& initial, SystemKind kind) {
  // Sign-definite data makes each integrand one-signed, so the L1 norms in
  // the growth estimate equal the absolute values of the conserved integrals.
  if (kind == SystemKind::SystemB)
    return 0.5 * (std::abs(initial.consB_mv) + std::abs(initial.consB_nu));
  return 0.5 * (std::abs(initial.consA_mv) + std::abs(initial.consA_nu));
}

EnvelopeMargin h1_envelope_check(const DiagnosticsRecord& record, const DiagnosticsRecord& initial,
                                 SystemKind kind) {
  EnvelopeMargin e;
  const double kappa = h1_growth_rate(initial, kind);
  const double e0 = initial.h1_u * initial.h1_u + initial.h1_v * initial.h1_v;
  e.envelope = e0 * std::exp(kappa * (record.t - initial.t));
  e.actual = record.h1_u * record.h1_u + record.h1_v * record.h1_v;
  e.margin = e.envelope - e.actual;
  e.violated = e.margin < -kEnvelopeTolerance * e.envelope;
  return e;
}

SeparationResidual support_separation_check(const State& s, const DerivedFields& d, double q_a,
                                            double q_b) {
  const Grid& g = *s.grid();
  const Field n = effective_n(s);
  SeparationResidual r;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    if (x < q_b) r.leak_m = std::max(r.leak_m, std::abs(s.m[i]));
    if (x > q_a) r.leak_n = std::max(r.leak_n, std::abs(n[i]));
  }
  r.indicator = (s.m * d.v_plus_vx - n * d.u_minus_ux).sup_norm();
  return r;
}

}  // namespace chsys
