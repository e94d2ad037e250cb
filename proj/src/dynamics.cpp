#include "chsys/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace chsys {

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::SystemA: return "A";
    case SystemKind::SystemB: return "B";
    case SystemKind::CubicCH: return "cubic_ch";
  }
  return "?";
}

std::optional<SystemKind> parse_system_kind(std::string_view name) {
  if (name == "A") return SystemKind::SystemA;
  if (name == "B") return SystemKind::SystemB;
  if (name == "cubic_ch") return SystemKind::CubicCH;
  return std::nullopt;
}

Field effective_n(const State& s) {
  return s.kind == SystemKind::CubicCH ? 2.0 * s.m : s.n;
}

DerivedFields reconstruct(const State& s) {
  s.m.require_finite("m");
  DerivedFields d;
  d.u = helmholtz_solve(s.m);
  d.u_x = spectral_derivative(d.u);
  if (s.kind == SystemKind::CubicCH) {
    d.v = 2.0 * d.u;
    d.v_x = 2.0 * d.u_x;
  } else {
    s.n.require_finite("n");
    d.v = helmholtz_solve(s.n);
    d.v_x = spectral_derivative(d.v);
  }
  d.u_minus_ux = d.u - d.u_x;
  d.v_plus_vx = d.v + d.v_x;
  if (s.kind == SystemKind::SystemB) {
    d.uv_minus_uxvx = dealiased_product({d.u, d.v}) - dealiased_product({d.u_x, d.v_x});
    d.cross = dealiased_product({d.u, d.v_x}) - dealiased_product({d.v, d.u_x});
  }
  return d;
}

Tendency rhs(const State& s) { return rhs(s, reconstruct(s)); }

Tendency rhs(const State& s, const DerivedFields& d) {
  switch (s.kind) {
    case SystemKind::SystemA: {
      PaddedFactors pf({d.u_minus_ux, d.v_plus_vx, s.m, s.n});
      return {-0.5 * spectral_derivative(pf.product({0, 1, 2})),
              -0.5 * spectral_derivative(pf.product({0, 1, 3}))};
    }
    case SystemKind::SystemB: {
      // The flux and reaction are expanded into triple products of resolved
      // fields so every term is alias-free; products of a truncated F or G
      // with m would lose the exact discrete conservation laws.
      PaddedFactors pf({d.u, d.v, d.u_x, d.v_x, s.m, s.n});
      Field flux_m = pf.product({0, 1, 4}) - pf.product({2, 3, 4});
      Field flux_n = pf.product({0, 1, 5}) - pf.product({2, 3, 5});
      Field react_m = pf.product({0, 3, 4}) - pf.product({1, 2, 4});
      Field react_n = pf.product({0, 3, 5}) - pf.product({1, 2, 5});
      Field dm = -0.5 * spectral_derivative(flux_m);
      dm += 0.5 * react_m;
      Field dn = -0.5 * spectral_derivative(flux_n);
      dn -= 0.5 * react_n;
      return {std::move(dm), std::move(dn)};
    }
    case SystemKind::CubicCH: {
      // Written from u alone, as u^2 - u_x^2 = (u - u_x)(u + u_x).
      Field u_plus_ux = d.u + d.u_x;
      Field flux = dealiased_product({d.u_minus_ux, u_plus_ux, s.m});
      return {-1.0 * spectral_derivative(flux), Field(s.grid())};
    }
  }
  throw std::logic_error("unknown system kind");
}

Field transport_velocity(const State& s, const DerivedFields& d) {
  switch (s.kind) {
    case SystemKind::SystemA: return 0.5 * dealiased_product({d.u_minus_ux, d.v_plus_vx});
    case SystemKind::SystemB: return 0.5 * d.uv_minus_uxvx;
    case SystemKind::CubicCH: {
      Field u_plus_ux = d.u + d.u_x;
      return dealiased_product({d.u_minus_ux, u_plus_ux});
    }
  }
  throw std::logic_error("unknown system kind");
}

Field stretch_rate(const State& s, const DerivedFields& d) {
  switch (s.kind) {
    case SystemKind::SystemA:
      return 0.5 * (dealiased_product({s.m, d.v_plus_vx}) -
                    dealiased_product({s.n, d.u_minus_ux}));
    case SystemKind::SystemB:
      return 0.5 * (dealiased_product({s.m, d.v_x}) + dealiased_product({s.n, d.u_x}));
    case SystemKind::CubicCH: return 2.0 * dealiased_product({s.m, d.u_x});
  }
  throw std::logic_error("unknown system kind");
}

Field phase_rate(const State& s, const DerivedFields& d) {
  if (s.kind == SystemKind::SystemB) return 0.5 * d.cross;
  return Field(s.grid());
}

State reflect_swap(const State& s) {
  State out = s;
  out.m = s.n.reflected();
  out.n = s.m.reflected();
  return out;
}

std::string_view to_string(ProfileFamily family) {
  switch (family) {
    case ProfileFamily::Gaussian: return "gaussian";
    case ProfileFamily::Bump: return "bump";
    case ProfileFamily::MollifiedPeakon: return "mollified_peakon";
  }
  return "?";
}

std::optional<ProfileFamily> parse_profile_family(std::string_view name) {
  if (name == "gaussian") return ProfileFamily::Gaussian;
  if (name == "bump") return ProfileFamily::Bump;
  if (name == "mollified_peakon") return ProfileFamily::MollifiedPeakon;
  return std::nullopt;
}

namespace {

// exp(-s^2) is below 1e-12 beyond this many widths.
const double kGaussianReach = std::sqrt(12.0 * std::log(10.0));

double unit_bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

void add_term(Field& out, const ProfileTerm& term) {
  const Grid& g = *out.grid();
  const double L = g.half_length();
  if (term.sign != 1 && term.sign != -1)
    throw std::invalid_argument("profile sign must be +1 or -1");
  if (!std::isfinite(term.amplitude) || !std::isfinite(term.center))
    throw std::invalid_argument("profile amplitude and center must be finite");
  double width = term.width;
  if (term.family == ProfileFamily::MollifiedPeakon && width == 0.0)
    width = kDefaultPeakonWidthInCells * g.dx();
  if (!(width >= kMinWidthInCells * g.dx()))
    throw std::invalid_argument(std::string(to_string(term.family)) + " width " +
                                std::to_string(width) + " is below " +
                                std::to_string(kMinWidthInCells) + " grid cells");
  const double reach = term.family == ProfileFamily::Gaussian ? kGaussianReach * width : width;
  if (std::abs(term.center) + reach > L)
    throw std::invalid_argument(std::string(to_string(term.family)) + " centred at " +
                                std::to_string(term.center) + " extends past the box edge " +
                                std::to_string(L));

  const double a = term.sign * term.amplitude;
  switch (term.family) {
    case ProfileFamily::Gaussian:
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = (g.node(i) - term.center) / width;
        out[i] += a * std::exp(-s * s);
      }
      break;
    case ProfileFamily::Bump:
      for (std::size_t i = 0; i < g.size(); ++i)
        out[i] += a * unit_bump((g.node(i) - term.center) / width);
      break;
    case ProfileFamily::MollifiedPeakon: {
      // m = 2 a delta for the peakon a e^{-|x|}; smear the delta with a bump
      // normalised so the discrete mass is exactly 2a.
      Field rho(out.grid());
      for (std::size_t i = 0; i < g.size(); ++i) rho[i] = unit_bump((g.node(i) - term.center) / width);
      const double mass = integrate(rho);
      for (std::size_t i = 0; i < g.size(); ++i) out[i] += 2.0 * a * rho[i] / mass;
      break;
    }
  }
}

}  // namespace

Field build_profile(const GridPtr& grid, const InitSpec& spec) {
  Field out(grid);
  for (const auto& term : spec.terms) add_term(out, term);
  return out;
}

State initial_data(SystemKind kind, const GridPtr& grid, const InitSpec& m0, const InitSpec& n0) {
  State s;
  s.kind = kind;
  s.t = 0.0;
  s.m = build_profile(grid, m0);
  s.n = kind == SystemKind::CubicCH ? Field(grid) : build_profile(grid, n0);
  return s;
}

}  // namespace chsys
