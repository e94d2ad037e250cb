#include "chsys/besov.hpp"

#include <cmath>
#include <stdexcept>

namespace chsys {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double lp_chi(double xi) {
  constexpr double inner = 3.0 / 4.0, outer = 4.0 / 3.0;
  return smooth_step((outer - std::abs(xi)) / (outer - inner));
}

double lp_phi(double xi) { return lp_chi(0.5 * xi) - lp_chi(xi); }

DyadicPartition::DyadicPartition(GridPtr grid) : grid_(std::move(grid)) {
  const double nyquist = grid_->nyquist();
  if (!(0.75 < nyquist)) throw std::invalid_argument("grid too coarse for a dyadic partition");
  j_max_ = 0;
  while (0.75 * std::ldexp(1.0, j_max_ + 1) < nyquist) ++j_max_;

  const std::size_t modes = grid_->spectrum_size();
  profiles_.assign(static_cast<std::size_t>(j_max_) + 2, std::vector<double>(modes, 0.0));
  for (std::size_t k = 0; k < modes; ++k) {
    const double xi = grid_->wavenumber(k);
    profiles_[0][k] = lp_chi(xi);
    // phi_j(xi) = chi(2^{-j-1} xi) - chi(2^{-j} xi): the sum over j telescopes,
    // so chi + sum_{j <= J} phi_j = chi(2^{-J-1} xi), which is 1 on the whole
    // represented band for J = j_max.
    for (int j = 0; j <= j_max_; ++j)
      profiles_[static_cast<std::size_t>(j) + 1][k] =
          lp_chi(std::ldexp(xi, -j - 1)) - lp_chi(std::ldexp(xi, -j));
  }
}

double DyadicPartition::profile(int j, std::size_t mode) const {
  if (j < -1 || j > j_max_) throw std::out_of_range("dyadic block index out of range");
  return profiles_[static_cast<std::size_t>(j + 1)][mode];
}

double DyadicPartition::partition_sum(std::size_t mode) const {
  double s = 0.0;
  for (const auto& p : profiles_) s += p[mode];
  return s;
}

DyadicPartition build_partition(const GridPtr& grid) { return DyadicPartition(grid); }

Field dyadic_block(const Field& u, int j, const DyadicPartition& part) {
  if (j < -1 || j > part.j_max())
    throw std::out_of_range("dyadic block " + std::to_string(j) + " outside [-1, " +
                            std::to_string(part.j_max()) + "]");
  if (!u.same_grid(Field(part.grid()))) throw std::invalid_argument("field and partition grids differ");
  Spectrum c = to_spectrum(u);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= part.profile(j, k);
  return from_spectrum(u.grid(), std::move(c));
}

void BesovParams::validate() const {
  auto ok = [](double e) { return e == 1.0 || e == 2.0 || e == kInfinity; };
  if (!ok(p) || !ok(r)) throw std::invalid_argument("Besov exponents p, r must be 1, 2 or inf");
  if (!std::isfinite(s)) throw std::invalid_argument("Besov smoothness s must be finite");
}

double parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInfinity;
  if (text == "1") return 1.0;
  if (text == "2") return 2.0;
  throw std::invalid_argument("unsupported exponent '" + text + "' (use 1, 2 or inf)");
}

namespace {

double lp_norm(const Field& f, double p) {
  if (p == kInfinity) return f.sup_norm();
  if (p == 1.0) return integrate(f.abs());
  return std::sqrt(integrate(f * f));
}

double lr_combine(const std::vector<double>& terms, double r) {
  double acc = 0.0;
  for (double t : terms) {
    if (r == kInfinity) acc = std::max(acc, t);
    else if (r == 1.0) acc += t;
    else acc += t * t;
  }
  return r == 2.0 ? std::sqrt(acc) : acc;
}

double weighted_norm(const Field& u, const BesovParams& params, const DyadicPartition& part,
                     int j_lo) {
  params.validate();
  std::vector<double> terms;
  for (int j = j_lo; j <= part.j_max(); ++j)
    terms.push_back(std::pow(2.0, j * params.s) *
                    lp_norm(dyadic_block(u, j, part), params.p));
  return lr_combine(terms, params.r);
}

}  // namespace

double besov_norm(const Field& u, const BesovParams& params, const DyadicPartition& part) {
  return weighted_norm(u, params, part, -1);
}

double besov_high_part(const Field& u, const BesovParams& params, const DyadicPartition& part) {
  return weighted_norm(u, params, part, 0);
}

double sobolev_norm(const Field& u, double s) {
  Spectrum c = to_spectrum(u);
  const Grid& g = *u.grid();
  double acc = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kk = g.wavenumber(k);
    // Modes other than 0 and Nyquist stand for a conjugate pair.
    const double mult = (k == 0 || k + 1 == c.size()) ? 1.0 : 2.0;
    acc += mult * std::pow(1.0 + kk * kk, s) * std::norm(c[k]);
  }
  return std::sqrt(2.0 * g.half_length() * acc);
}

double product_estimate_probe(const Field& u, const Field& v, const BesovParams& params,
                              const DyadicPartition& part) {
  const double denom = u.sup_norm() * besov_norm(v, params, part) +
                       v.sup_norm() * besov_norm(u, params, part);
  if (denom == 0.0) return 0.0;
  return besov_norm(dealiased_product({u, v}), params, part) / denom;
}

}  // namespace chsys
