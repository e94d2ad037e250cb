#pragma once

// Certified constants, the threshold root a0 and blow-up time bounds for the
// sign-definite and L1 data families, plus the Riccati inequality check along
// trajectories.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chsys/dynamics.hpp"

namespace chsys {

enum class ThresholdFamily { A_L1, A_sign, B_sign };

std::string to_string(ThresholdFamily f);
ThresholdFamily parse_threshold_family(const std::string& name);
/// The system each family's estimates are proved for.
SystemKind family_system(ThresholdFamily f);
bool has_root_equation(ThresholdFamily f);

class HypothesisViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One link in the chain of elementary bounds that produces C.
struct BoundTerm {
  std::string quantity;
  std::string bound;
  double value = 0.0;
};

struct CertifiedConstant {
  ThresholdFamily family = ThresholdFamily::A_L1;
  double C = 0.0;
  std::vector<BoundTerm> derivation;
};

/// Throws HypothesisViolation when a sign family gets data that changes sign.
CertifiedConstant certified_constant(const Field& m0, const Field& n0, ThresholdFamily family);

// The (f, g) pairs of the sign families; g is the inverse of f on [0, inf).
double threshold_f(ThresholdFamily family, double C, double x);
double threshold_g(ThresholdFamily family, double C, double x);
/// int_0^upper f(s) ds: closed form for A_sign, adaptive Simpson for B_sign.
double integral_f(ThresholdFamily family, double C, double upper);
/// G(a) = 1 + a g(-a/N0) + N0 int_0^{g(-a/N0)} f, for a <= 0.
double threshold_G(ThresholdFamily family, double C, double N0, double a);

inline constexpr double kRootTolerance = 1e-12;
/// Unique negative root of G. Requires a family with an (f, g) pair and C, N0 > 0.
double root_a0(double C, double N0, ThresholdFamily family);

struct BlowupInputs {
  double C = 0.0;
  double N0 = 0.0;
  double Qx0 = 0.0;
  double x0 = 0.0;
};

struct BlowupPrediction {
  ThresholdFamily family = ThresholdFamily::A_L1;
  std::optional<double> a0;
  double threshold = 0.0;
  bool triggered = false;
  std::optional<double> T0_upper;
};

BlowupPrediction predict(ThresholdFamily family, const BlowupInputs& in);

/// Q_x for the state's kind: (m R - n P)/2 for A and the cubic equation,
/// (m v_x + n u_x)/2 for B.
Field riccati_qx(const State& s, const DerivedFields& d);

/// Exact value of Q_xt + Q Q_xx + Q_x^2 at one state, from the closed identity
///   A: [n (1+d)^{-1}(Q_x P) - m (1-d)^{-1}(Q_x R)] / 2
///   B: G (m v_x - n u_x)/4 - m L(d(Q_x v) + Q_x v_x + d(G n)/2)/2
///                          - n L(d(Q_x u) + Q_x u_x - d(G m)/2)/2,   L = (1 - d_xx)^{-1}.
Field riccati_rhs(const State& s, const DerivedFields& d);

struct RiccatiSample {
  double t_mid = 0.0;
  Field lhs;       // centered time difference of Q_x plus midpoint-averaged Q Q_xx + Q_x^2
  Field identity;  // riccati_rhs averaged over the two states
  Field bound;     // C (|m|+|n|) for A_L1, C e^{Ct} (|m|+|n|) for the sign families, averaged
  Field residual;  // lhs - bound; the inequality asks for residual <= 0
  double identity_gap() const;  // sup |lhs - identity|, the time-differencing slack
  double max_residual() const;
};

/// Riccati check between two nearby states of the same run.
RiccatiSample riccati_residual(const State& s0, const State& s1, ThresholdFamily family,
                               double C);

}  // namespace chsys
