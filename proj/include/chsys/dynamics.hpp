#pragma once

// The three evolution systems for the momentum pair (m, n):
//   A:  m_t + 1/2 ((u - u_x)(v + v_x) m)_x = 0,          same for n
//   B:  m_t + 1/2 ((u v - u_x v_x) m)_x - 1/2 (u v_x - v u_x) m = 0,
//       n_t + 1/2 ((u v - u_x v_x) n)_x + 1/2 (u v_x - v u_x) n = 0
//   CubicCH: m_t + (m (u^2 - u_x^2))_x = 0   (the v = 2u reduction of both)
// with u = (1 - d_xx)^{-1} m and v = (1 - d_xx)^{-1} n.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chsys/spectral.hpp"

namespace chsys {

enum class SystemKind { SystemA, SystemB, CubicCH };

std::string_view to_string(SystemKind kind);
std::optional<SystemKind> parse_system_kind(std::string_view name);

struct State {
  SystemKind kind = SystemKind::SystemA;
  double t = 0.0;
  Field m;
  Field n;  // zero and unused for CubicCH

  const GridPtr& grid() const { return m.grid(); }
  bool all_finite() const { return m.all_finite() && n.all_finite(); }
};

/// The second momentum as the dynamics sees it: 2m for CubicCH, n otherwise.
Field effective_n(const State& s);

struct DerivedFields {
  Field u, u_x, v, v_x;
  Field u_minus_ux;  // P = u - u_x
  Field v_plus_vx;   // R = v + v_x
  // System B only (left empty for the other kinds).
  Field uv_minus_uxvx;  // F = u v - u_x v_x
  Field cross;          // G = u v_x - v u_x
};

/// Velocities from momenta. Throws NumericalFailure on non-finite input.
DerivedFields reconstruct(const State& s);

struct Tendency {
  Field dm;
  Field dn;
};

Tendency rhs(const State& s);
Tendency rhs(const State& s, const DerivedFields& d);

/// Transport speed of the characteristics: Q = P R / 2 (A), F / 2 (B), u^2 - u_x^2 (CubicCH).
Field transport_velocity(const State& s, const DerivedFields& d);
/// Q_x written through the momenta: (m R - n P)/2 for A, (m v_x + n u_x)/2 for B,
/// 2 m u_x for CubicCH. This is the growth rate of log q_x.
Field stretch_rate(const State& s, const DerivedFields& d);
/// Rate of the system-B phase, G / 2; zero for the other kinds.
Field phase_rate(const State& s, const DerivedFields& d);

/// x -> -x together with m <-> n. System A satisfies rhs(R s) = -R rhs(s).
State reflect_swap(const State& s);

enum class ProfileFamily { Gaussian, Bump, MollifiedPeakon };

std::string_view to_string(ProfileFamily family);
std::optional<ProfileFamily> parse_profile_family(std::string_view name);

/// One additive term of an initial momentum.
///   Gaussian:         sign * amplitude * exp(-((x - center)/width)^2)
///   Bump:             sign * amplitude * exp(1 - 1/(1 - s^2)), s = (x - center)/width, |s| < 1
///   MollifiedPeakon:  momentum of the peakon amplitude * e^{-|x - center|}, i.e.
///                     2 * sign * amplitude times a unit-mass bump of radius width
///                     (width 0 selects the default 5 dx)
struct ProfileTerm {
  ProfileFamily family = ProfileFamily::Gaussian;
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  int sign = 1;

  bool operator==(const ProfileTerm&) const = default;
};

/// Sum of terms; no terms means identically zero.
struct InitSpec {
  std::vector<ProfileTerm> terms;

  bool operator==(const InitSpec&) const = default;
};

inline constexpr double kMinWidthInCells = 4.0;
inline constexpr double kDefaultPeakonWidthInCells = 5.0;

/// Throws std::invalid_argument when a term is too narrow for the grid or pokes out of the box.
Field build_profile(const GridPtr& grid, const InitSpec& spec);
State initial_data(SystemKind kind, const GridPtr& grid, const InitSpec& m0, const InitSpec& n0);

}  // namespace chsys
