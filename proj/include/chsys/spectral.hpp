#pragma once

// Periodic pseudospectral machinery on a uniform grid over [-L, L).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chsys {

/// Raised when a field picks up NaN/Inf or an operation is handed one.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform periodic grid: nodes x_i = -L + i*dx, i = 0..n-1, dx = 2L/n.
class Grid {
 public:
  Grid(std::size_t n_points, double half_length);

  std::size_t size() const { return n_; }
  double half_length() const { return half_length_; }
  double dx() const { return dx_; }
  double node(std::size_t i) const { return -half_length_ + static_cast<double>(i) * dx_; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Number of retained complex modes of a real transform, n/2 + 1.
  std::size_t spectrum_size() const { return n_ / 2 + 1; }
  /// Angular wavenumber of mode j (0 <= j <= n/2): pi*j/L.
  double wavenumber(std::size_t j) const { return wavenumbers_[j]; }
  const std::vector<double>& wavenumbers() const { return wavenumbers_; }
  double nyquist() const { return wavenumbers_.back(); }

  bool operator==(const Grid& other) const {
    return n_ == other.n_ && half_length_ == other.half_length_;
  }

 private:
  std::size_t n_;
  double half_length_;
  double dx_;
  std::vector<double> nodes_;
  std::vector<double> wavenumbers_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(std::size_t n_points, double half_length);

/// Real grid function. Arithmetic requires both operands on the same grid.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<double> values);

  template <class Fn>
  static Field from_function(GridPtr grid, Fn&& fn) {
    Field f(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) f.values_[i] = fn(grid->node(i));
    return f;
  }

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool same_grid(const Field& other) const;
  bool all_finite() const;
  /// Throws NumericalFailure naming `what` if any value is NaN/Inf.
  void require_finite(const std::string& what) const;

  double sup_norm() const;
  double min() const;
  double max() const;

  Field& operator+=(const Field& rhs);
  Field& operator-=(const Field& rhs);
  Field& operator*=(double s);
  /// Pointwise (aliased) product; use dealiased_product for evolution terms.
  Field& operator*=(const Field& rhs);

  Field abs() const;
  Field reflected() const;  // x -> -x on the periodic grid

 private:
  void check_grid(const Field& other) const;

  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator-(Field a);
Field operator*(Field a, const Field& b);
Field operator*(Field a, double s);
Field operator*(double s, Field a);

using Spectrum = std::vector<std::complex<double>>;

/// Forward real transform, normalized to Fourier-series coefficients c_j = X_j / n
/// with phases referenced to the left box edge x_0 = -L.
Spectrum to_spectrum(const Field& f);
Field from_spectrum(const GridPtr& grid, Spectrum coeffs);

/// Zeroes the Nyquist coefficient so every mode has a conjugate partner.
Field band_limit(const Field& f);

Field spectral_derivative(const Field& f);
/// Solves (1 - d_xx) u = m through the multiplier 1/(1+k^2).
Field helmholtz_solve(const Field& m);
/// Applies a real-space operator with transform-space symbol `symbol(k)` (complex).
template <class Symbol>
Field apply_multiplier(const Field& f, Symbol&& symbol) {
  Spectrum c = to_spectrum(f);
  const auto& k = f.grid()->wavenumbers();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= symbol(k[j]);
  return from_spectrum(f.grid(), std::move(c));
}

/// Alias-free product of up to four fields, truncated back to the grid band.
Field dealiased_product(std::span<const Field* const> factors);
Field dealiased_product(std::initializer_list<std::reference_wrapper<const Field>> factors);

/// Shares the zero-padded images of a set of fields across many alias-free
/// products of up to three of them (the cubic terms of the evolution).
class PaddedFactors {
 public:
  explicit PaddedFactors(std::span<const Field* const> fields);
  PaddedFactors(std::initializer_list<std::reference_wrapper<const Field>> fields);

  /// Product of the fields at `indices` (1 to 3 of them), truncated to the grid band.
  Field product(std::initializer_list<std::size_t> indices) const;

 private:
  void build(std::span<const Field* const> fields);

  GridPtr grid_;
  std::vector<std::vector<double>> fine_;
};

/// Periodic trapezoid rule dx * sum f_i.
double integrate(const Field& f);

/// Real-line Green's function quadrature of (1 - d_xx)^{-1}, treating m as
/// compactly supported in the box. `left` is e^{-x} int_{-inf}^x e^y m dy
/// (= u - u_x), `right` is e^{x} int_x^inf e^{-y} m dy (= u + u_x).
struct KernelConvolution {
  Field u;
  Field left;
  Field right;
  /// Fraction of the |m| mass lying in the outer tenth of the box on either side.
  double boundary_mass_fraction = 0.0;
};

inline constexpr double kBoundaryMassTolerance = 1e-10;

KernelConvolution kernel_convolve(const Field& m);

/// Trigonometric interpolation of several fields at arbitrary points.
class SpectralInterpolator {
 public:
  explicit SpectralInterpolator(std::span<const Field* const> fields);

  std::size_t field_count() const { return coeffs_.size(); }
  /// Writes one value per field into `out` (size field_count()).
  void evaluate(double x, std::span<double> out) const;
  double evaluate_one(double x, std::size_t field) const;

 private:
  GridPtr grid_;
  std::vector<Spectrum> coeffs_;
};

}  // namespace chsys
