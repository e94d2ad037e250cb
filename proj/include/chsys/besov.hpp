#pragma once

// Littlewood-Paley decomposition on the grid's wavenumbers and the
// nonhomogeneous Besov norms built from it.

#include <limits>
#include <string>
#include <vector>

#include "chsys/spectral.hpp"

namespace chsys {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);
/// Low-frequency profile: 1 for |xi| <= 3/4, 0 for |xi| >= 4/3.
double lp_chi(double xi);
/// Annulus profile phi(xi) = chi(xi/2) - chi(xi), supported in 3/4 <= |xi| <= 8/3.
double lp_phi(double xi);

class DyadicPartition {
 public:
  explicit DyadicPartition(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  /// Largest j with (3/4) 2^j below the Nyquist wavenumber.
  int j_max() const { return j_max_; }
  /// Profile of block j (-1 for the low-frequency block) at spectrum index `mode`.
  double profile(int j, std::size_t mode) const;
  /// chi + sum_j phi_j at spectrum index `mode`.
  double partition_sum(std::size_t mode) const;

 private:
  GridPtr grid_;
  int j_max_ = 0;
  std::vector<std::vector<double>> profiles_;  // index j + 1
};

DyadicPartition build_partition(const GridPtr& grid);

/// Delta_j u for -1 <= j <= j_max; throws std::out_of_range otherwise.
Field dyadic_block(const Field& u, int j, const DyadicPartition& part);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct BesovParams {
  double s = 0.0;
  double p = 2.0;  // 1, 2 or infinity
  double r = 2.0;  // 1, 2 or infinity
  void validate() const;
};

/// Parses "1", "2", "inf".
double parse_exponent(const std::string& text);

/// || (2^{js} ||Delta_j u||_{L^p})_{j >= -1} ||_{l^r}
double besov_norm(const Field& u, const BesovParams& params, const DyadicPartition& part);
/// Same sum restricted to j >= 0.
double besov_high_part(const Field& u, const BesovParams& params, const DyadicPartition& part);

/// (2L sum_k (1 + k^2)^s |c_k|^2)^{1/2}, the H^s norm of the grid interpolant.
double sobolev_norm(const Field& u, double s);

/// ||uv||_B / (||u||_inf ||v||_B + ||v||_inf ||u||_B), zero when the denominator is.
double product_estimate_probe(const Field& u, const Field& v, const BesovParams& params,
                              const DyadicPartition& part);

}  // namespace chsys
