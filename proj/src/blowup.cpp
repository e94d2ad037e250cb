#include "chsys/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

namespace chsys {

std::string to_string(ThresholdFamily f) {
  switch (f) {
    case ThresholdFamily::A_L1: return "A_L1";
    case ThresholdFamily::A_sign: return "A_sign";
    case ThresholdFamily::B_sign: return "B_sign";
  }
  return "?";
}

ThresholdFamily parse_threshold_family(const std::string& name) {
  if (name == "A_L1") return ThresholdFamily::A_L1;
  if (name == "A_sign") return ThresholdFamily::A_sign;
  if (name == "B_sign") return ThresholdFamily::B_sign;
  throw std::invalid_argument("unknown threshold family '" + name + "' (A_L1, A_sign, B_sign)");
}

SystemKind family_system(ThresholdFamily f) {
  return f == ThresholdFamily::B_sign ? SystemKind::SystemB : SystemKind::SystemA;
}

bool has_root_equation(ThresholdFamily f) { return f != ThresholdFamily::A_L1; }

namespace {

void require_sign_definite(const Field& f, const char* name) {
  const double tol = 1e-13 * f.sup_norm();
  if (f.min() < -tol && f.max() > tol)
    throw HypothesisViolation(std::string(name) + " changes sign; the family needs sign-definite data");
}

double h1_squared(const Field& u, const Field& ux) { return integrate(u * u + ux * ux); }

}  // namespace

// The chains below are the whole-line estimates with the exact periodic
// constants of the box [-L, L):
//   rho   = 1/(1 - e^{-2L}), sup of the kernels of (1 + d)^{-1} and (1 - d)^{-1};
//   sigma = coth L, so that sup u^2 <= (sigma/2) ||u||_H1^2 and the kernel of
//           L = (1 - d_xx)^{-1} has sup sigma/2. The kernel of L d has sup 1/2.
// Both tend to 1 as L grows.
CertifiedConstant certified_constant(const Field& m0, const Field& n0, ThresholdFamily family) {
  if (!m0.same_grid(n0)) throw std::invalid_argument("m0 and n0 live on different grids");
  CertifiedConstant out;
  out.family = family;
  auto rec = [&](std::string q, std::string b, double v) {
    out.derivation.push_back({std::move(q), std::move(b), v});
    return v;
  };
  const double L = m0.grid()->half_length();
  const double rho = rec("rho", "1/(1 - e^{-2L}), half-line kernel sup", -1.0 / std::expm1(-2.0 * L));
  const double sigma = rec("sigma", "coth L, H1 embedding and Helmholtz kernel", 1.0 / std::tanh(L));

  if (family == ThresholdFamily::A_L1) {
    // ||m||_1 and ||n||_1 are transported, so the chain holds at every time.
    const double M1 = rec("||m||_1", "conserved", integrate(m0.abs()));
    const double N1 = rec("||n||_1", "conserved", integrate(n0.abs()));
    const double P = rec("sup|u - u_x|", "<= rho ||m||_1", rho * M1);
    const double R = rec("sup|v + v_x|", "<= rho ||n||_1", rho * N1);
    const double qx1 = rec("||Q_x||_1", "<= (||m||_1 sup|R| + ||n||_1 sup|P|)/2", 0.5 * (M1 * R + N1 * P));
    const double tm = rec("sup|(1-d)^{-1}(Q_x R)|", "<= rho ||Q_x||_1 sup|R|", rho * qx1 * R);
    const double tn = rec("sup|(1+d)^{-1}(Q_x P)|", "<= rho ||Q_x||_1 sup|P|", rho * qx1 * P);
    out.C = rec("C", "max of the two coefficients of |m|, |n|, halved", 0.5 * std::max(tm, tn));
    return out;
  }

  require_sign_definite(m0, "m0");
  require_sign_definite(n0, "n0");
  const DerivedFields d = reconstruct(State{family_system(family), 0.0, m0, n0});
  const double E0 = rec("E0 = ||u0||_H1^2 + ||v0||_H1^2", "initial", h1_squared(d.u, d.u_x) + h1_squared(d.v, d.v_x));

  if (family == ThresholdFamily::A_sign) {
    const double I = rec("I = ||m R||_1", "conserved, sign-definite", std::abs(integrate(m0 * d.v_plus_vx)));
    const double J = rec("J = ||n P||_1", "conserved, sign-definite", std::abs(integrate(n0 * d.u_minus_ux)));
    const double kappa = rec("kappa", "(I + J)/2 = ||Q_x||_1 bound", 0.5 * (I + J));
    const double rate = rec("H1 rate", "sigma kappa, E(t) <= E0 e^{sigma kappa t}", sigma * kappa);
    // |v_x| <= |v| for sign-definite n, so sup|R| <= 2 sup|v| <= sqrt(2 sigma E).
    rec("sup|R|, sup|P|", "<= sqrt(2 sigma E0) e^{sigma kappa t/2}", std::sqrt(2.0 * sigma * E0));
    const double K = rec("K", "rho kappa sqrt(2 sigma E0)/2, RHS <= K e^{sigma kappa t/2} (|m|+|n|)",
                         0.5 * rho * kappa * std::sqrt(2.0 * sigma * E0));
    out.C = rec("C", "max(K, sigma kappa/2) so that K e^{sigma kappa t/2} <= C e^{Ct}", std::max(K, 0.5 * rate));
    return out;
  }

  const double Imv = rec("Imv = ||m v||_1", "conserved, sign-definite", std::abs(integrate(m0 * d.v)));
  const double Inu = rec("Inu = ||n u||_1", "conserved, sign-definite", std::abs(integrate(n0 * d.u)));
  const double Imax = std::max(Imv, Inu);
  const double kappa = rec("kappa", "(Imv + Inu)/2 >= ||Q_x||_1", 0.5 * (Imv + Inu));
  const double rate = rec("H1 rate", "sigma kappa, E(t) <= E0 e^{sigma kappa t}", sigma * kappa);
  // sup|u|, sup|v| <= W = sqrt(sigma E/2); |u_x| <= |u| and |v_x| <= |v|.
  const double W0 = rec("W0", "sqrt(sigma E0/2), sup|u|, sup|v| <= W0 e^{sigma kappa t/2}", std::sqrt(0.5 * sigma * E0));
  rec("||G n||_1, ||G m||_1", "<= 2 W max(Imv, Inu)", 2.0 * W0 * Imax);
  const double tg = rec("|G (m v_x - n u_x)|/4", "<= W^3 (|m|+|n|)/2", 0.5 * W0 * W0 * W0);
  // L d(Q_x v) and L d(G n)/2 through the kernel of sup 1/2, L(Q_x v_x) through sigma/2.
  const double tl = rec("|L(...)| terms", "<= W ((1 + sigma) kappa/2 + max(Imv, Inu)/2) (|m|+|n|)/2",
                        0.5 * W0 * (0.5 * (1.0 + sigma) * kappa + 0.5 * Imax));
  const double K = rec("K", "RHS <= K e^{3 sigma kappa t/2} (|m|+|n|)", tg + tl);
  const double phase = rec("sup|G|/2", "<= sup|u| sup|v| <= (sigma E0/4) e^{sigma kappa t}", 0.25 * sigma * E0);
  out.C = rec("C", "max(K, 3 sigma kappa/2, sigma E0/4, sigma kappa), also covering sup|G|/2 <= C e^{Ct}",
              std::max({K, 1.5 * rate, phase, rate}));
  return out;
}

double threshold_f(ThresholdFamily family, double C, double x) {
  if (family == ThresholdFamily::A_sign) return std::expm1(C * x);
  if (family == ThresholdFamily::B_sign) return std::expm1(std::expm1(C * x));
  throw std::invalid_argument("A_L1 has no (f, g) pair");
}

double threshold_g(ThresholdFamily family, double C, double x) {
  if (family == ThresholdFamily::A_sign) return std::log1p(x) / C;
  if (family == ThresholdFamily::B_sign) return std::log1p(std::log1p(x)) / C;
  throw std::invalid_argument("A_L1 has no (f, g) pair");
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  auto step = [&](auto&& self, double lo, double hi, double flo, double fmid, double fhi, double whole,
                  double eps, int depth) -> double {
    const double mid = 0.5 * (lo + hi);
    const double flm = f(0.5 * (lo + mid));
    const double frm = f(0.5 * (mid + hi));
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    const double delta = left + right - whole;
    if (depth == 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return self(self, lo, mid, flo, flm, fmid, left, 0.5 * eps, depth - 1) +
           self(self, mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth - 1);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Relative tolerance: the B integrand grows doubly exponentially.
  return step(step, a, b, fa, fm, fb, whole, tol * std::max(1.0, std::abs(whole)), 40);
}

}  // namespace

double integral_f(ThresholdFamily family, double C, double upper) {
  if (upper <= 0.0) return 0.0;
  if (family == ThresholdFamily::A_sign) return std::expm1(C * upper) / C - upper;
  if (family == ThresholdFamily::B_sign)
    return adaptive_simpson([&](double s) { return threshold_f(family, C, s); }, 0.0, upper, 1e-13);
  throw std::invalid_argument("A_L1 has no (f, g) pair");
}

double threshold_G(ThresholdFamily family, double C, double N0, double a) {
  if (!(C > 0.0) || !(N0 > 0.0)) throw std::invalid_argument("G needs C > 0 and N0 > 0");
  if (a > 0.0) throw std::invalid_argument("G is defined for a <= 0");
  const double y = -a / N0;
  if (family == ThresholdFamily::A_sign)
    return 1.0 + (N0 / C) * (y - (1.0 + y) * std::log1p(y));
  const double g = threshold_g(family, C, y);
  return 1.0 + a * g + N0 * integral_f(family, C, g);
}

double root_a0(double C, double N0, ThresholdFamily family) {
  if (!has_root_equation(family)) throw std::invalid_argument("A_L1 has no root equation");
  if (!(C > 0.0) || !(N0 > 0.0)) throw std::invalid_argument("root_a0 needs C > 0 and N0 > 0");
  auto G = [&](double a) { return threshold_G(family, C, N0, a); };
  double hi = 0.0;
  double lo = -N0;
  while (G(lo) >= 0.0) {
    hi = lo;
    lo *= 2.0;
    if (!std::isfinite(lo)) throw std::runtime_error("root_a0: no sign change found");
  }
  if (!std::isfinite(G(lo)))
    throw std::overflow_error("root_a0: G overflows before changing sign (N0 = " + std::to_string(N0) + ")");
  // G is increasing: G(lo) < 0 <= G(hi).
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // bracket exhausted at double precision
    const double gm = G(mid);
    if (gm < 0.0) lo = mid;
    else hi = mid;
    if (hi - lo < kRootTolerance * (1.0 + std::abs(mid)) && std::abs(gm) < kRootTolerance) break;
  }
  return std::abs(G(lo)) < std::abs(G(hi)) ? lo : hi;
}

BlowupPrediction predict(ThresholdFamily family, const BlowupInputs& in) {
  if (!(in.N0 > 0.0)) throw std::invalid_argument("predict needs N0 > 0");
  if (!(in.C > 0.0)) throw std::invalid_argument("predict needs C > 0");
  BlowupPrediction p;
  p.family = family;
  if (family == ThresholdFamily::A_L1) {
    p.threshold = -std::sqrt(2.0 * in.C * in.N0);
    p.triggered = in.Qx0 <= p.threshold;
    if (p.triggered) p.T0_upper = -in.Qx0 / (in.C * in.N0);
    return p;
  }
  p.a0 = root_a0(in.C, in.N0, family);
  p.threshold = *p.a0;
  p.triggered = in.Qx0 <= p.threshold;
  if (p.triggered) p.T0_upper = threshold_g(family, in.C, -in.Qx0 / in.N0);
  return p;
}

Field riccati_qx(const State& s, const DerivedFields& d) { return stretch_rate(s, d); }

namespace {

Field inv_one_plus_d(const Field& f) {
  return apply_multiplier(f, [](double k) { return 1.0 / std::complex<double>(1.0, k); });
}
Field inv_one_minus_d(const Field& f) {
  return apply_multiplier(f, [](double k) { return 1.0 / std::complex<double>(1.0, -k); });
}

}  // namespace

Field riccati_rhs(const State& s, const DerivedFields& d) {
  const Field qx = riccati_qx(s, d);
  const Field& m = s.m;
  if (s.kind != SystemKind::SystemB) {
    const Field n = effective_n(s);
    return 0.5 * (n * inv_one_plus_d(qx * d.u_minus_ux) - m * inv_one_minus_d(qx * d.v_plus_vx));
  }
  const Field& n = s.n;
  const Field& G = d.cross;
  const Field am = spectral_derivative(qx * d.v + 0.5 * (G * n)) + qx * d.v_x;
  const Field an = spectral_derivative(qx * d.u - 0.5 * (G * m)) + qx * d.u_x;
  return 0.25 * (G * (m * d.v_x - n * d.u_x)) - 0.5 * (m * helmholtz_solve(am)) -
         0.5 * (n * helmholtz_solve(an));
}

double RiccatiSample::identity_gap() const { return (lhs - identity).sup_norm(); }
double RiccatiSample::max_residual() const { return residual.max(); }

RiccatiSample riccati_residual(const State& s0, const State& s1, ThresholdFamily family, double C) {
  if (s0.kind != s1.kind) throw std::invalid_argument("riccati_residual: states of different systems");
  const double dt = s1.t - s0.t;
  if (!(dt > 0.0)) throw std::invalid_argument("riccati_residual: states must be ordered in time");
  const DerivedFields d0 = reconstruct(s0), d1 = reconstruct(s1);
  const Field qx0 = riccati_qx(s0, d0), qx1 = riccati_qx(s1, d1);
  auto transport = [](const State& s, const DerivedFields& d, const Field& qx) {
    return transport_velocity(s, d) * spectral_derivative(qx) + qx * qx;
  };
  auto weight = [&](const State& s) {
    const Field w = s.m.abs() + effective_n(s).abs();
    return family == ThresholdFamily::A_L1 ? C * w : (C * std::exp(C * s.t)) * w;
  };

  RiccatiSample out;
  out.t_mid = 0.5 * (s0.t + s1.t);
  out.lhs = (1.0 / dt) * (qx1 - qx0) + 0.5 * (transport(s0, d0, qx0) + transport(s1, d1, qx1));
  out.identity = 0.5 * (riccati_rhs(s0, d0) + riccati_rhs(s1, d1));
  out.bound = 0.5 * (weight(s0) + weight(s1));
  out.residual = out.lhs - out.bound;
  return out;
}

}  // namespace chsys
