#include "chsys/spectral.hpp"

#include <fftw3.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace chsys {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread-safe; execution through the new-array interface is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan forward(std::size_t n) { return get(n, true); }
  fftw_plan backward(std::size_t n) { return get(n, false); }

 private:
  fftw_plan get(std::size_t n, bool forward) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    double* real = fftw_alloc_real(n);
    fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
    const int size = static_cast<int>(n);
    fftw_plan plan =
        forward ? fftw_plan_dft_r2c_1d(size, real, cplx,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT)
                : fftw_plan_dft_c2r_1d(size, cplx, real, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(real);
    fftw_free(cplx);
    if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

// Unnormalized forward transform of n reals.
Spectrum raw_forward(std::span<const double> x) {
  const std::size_t n = x.size();
  Spectrum out(n / 2 + 1);
  fftw_execute_dft_r2c(PlanCache::instance().forward(n), const_cast<double*>(x.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

// Unnormalized backward transform; consumes `coeffs`.
std::vector<double> raw_backward(Spectrum coeffs, std::size_t n) {
  std::vector<double> out(n);
  fftw_execute_dft_c2r(PlanCache::instance().backward(n),
                       reinterpret_cast<fftw_complex*>(coeffs.data()), out.data());
  return out;
}

}  // namespace

Grid::Grid(std::size_t n_points, double half_length)
    : n_(n_points), half_length_(half_length) {
  if (!is_power_of_two(n_points) || n_points < 16)
    throw std::invalid_argument("grid size must be a power of two >= 16, got " +
                                std::to_string(n_points));
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw std::invalid_argument("grid half length must be positive and finite");
  dx_ = 2.0 * half_length_ / static_cast<double>(n_);
  nodes_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) nodes_[i] = node(i);
  wavenumbers_.resize(n_ / 2 + 1);
  for (std::size_t j = 0; j < wavenumbers_.size(); ++j)
    wavenumbers_[j] = std::numbers::pi * static_cast<double>(j) / half_length_;
}

GridPtr make_grid(std::size_t n_points, double half_length) {
  return std::make_shared<const Grid>(n_points, half_length);
}

Field::Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size())
    throw std::invalid_argument("field length does not match grid size");
}

bool Field::same_grid(const Field& other) const {
  return grid_ == other.grid_ || (grid_ && other.grid_ && *grid_ == *other.grid_);
}

void Field::check_grid(const Field& other) const {
  if (!same_grid(other)) throw std::invalid_argument("fields live on different grids");
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void Field::require_finite(const std::string& what) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw NumericalFailure("non-finite value in " + what + " at x = " +
                             std::to_string(grid_->node(i)));
  }
}

double Field::sup_norm() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

Field& Field::operator+=(const Field& rhs) {
  check_grid(rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& rhs) {
  check_grid(rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::operator*=(const Field& rhs) {
  check_grid(rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= rhs.values_[i];
  return *this;
}

Field Field::abs() const {
  Field out(*this);
  for (double& v : out.values_) v = std::abs(v);
  return out;
}

Field Field::reflected() const {
  // x_i -> -x_i maps node i to node (n - i) mod n.
  Field out(grid_);
  const std::size_t n = values_.size();
  for (std::size_t i = 0; i < n; ++i) out.values_[(n - i) % n] = values_[i];
  return out;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator-(Field a) { return a *= -1.0; }
Field operator*(Field a, const Field& b) { return a *= b; }
Field operator*(Field a, double s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }

Spectrum to_spectrum(const Field& f) {
  Spectrum c = raw_forward(f.values());
  const double scale = 1.0 / static_cast<double>(f.size());
  for (auto& z : c) z *= scale;
  return c;
}

Field from_spectrum(const GridPtr& grid, Spectrum coeffs) {
  if (coeffs.size() != grid->spectrum_size())
    throw std::invalid_argument("spectrum length does not match grid");
  return Field(grid, raw_backward(std::move(coeffs), grid->size()));
}

Field band_limit(const Field& f) {
  Spectrum c = to_spectrum(f);
  c.back() = 0.0;
  return from_spectrum(f.grid(), std::move(c));
}

Field spectral_derivative(const Field& f) {
  Spectrum c = to_spectrum(f);
  const auto& k = f.grid()->wavenumbers();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= std::complex<double>(0.0, k[j]);
  c.back() = 0.0;
  return from_spectrum(f.grid(), std::move(c));
}

Field helmholtz_solve(const Field& m) {
  return apply_multiplier(m, [](double k) { return std::complex<double>(1.0 / (1.0 + k * k)); });
}

namespace {

std::vector<double> padded_values(const Field& f, std::size_t fine) {
  const std::size_t half = f.size() / 2;
  Spectrum c = to_spectrum(f);
  Spectrum padded(fine / 2 + 1, 0.0);
  std::copy(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half), padded.begin());
  return raw_backward(std::move(padded), fine);
}

Field truncate_to_grid(const GridPtr& grid, std::span<const double> fine_values) {
  const std::size_t half = grid->size() / 2;
  Spectrum full = raw_forward(fine_values);
  Spectrum coarse(half + 1, 0.0);
  const double scale = 1.0 / static_cast<double>(fine_values.size());
  for (std::size_t j = 0; j < half; ++j) coarse[j] = full[j] * scale;
  return from_spectrum(grid, std::move(coarse));
}

}  // namespace

Field dealiased_product(std::span<const Field* const> factors) {
  if (factors.empty() || factors.size() > 4)
    throw std::invalid_argument("dealiased_product takes between 1 and 4 factors");
  const Field& first = *factors.front();
  for (const Field* f : factors) {
    if (!f->same_grid(first)) throw std::invalid_argument("fields live on different grids");
  }
  if (factors.size() == 1) return first;

  const GridPtr& grid = first.grid();
  const std::size_t n = grid->size();
  // A product of p band-limited factors is alias-free on the retained band
  // once the padded grid holds (p+1)/2 times as many points.
  const std::size_t pad = factors.size() <= 3 ? 2 : 4;
  const std::size_t fine = pad * n;

  std::vector<double> product(fine, 1.0);
  for (const Field* f : factors) {
    std::vector<double> values = padded_values(*f, fine);
    for (std::size_t i = 0; i < fine; ++i) product[i] *= values[i];
  }
  return truncate_to_grid(grid, product);
}

Field dealiased_product(std::initializer_list<std::reference_wrapper<const Field>> factors) {
  std::vector<const Field*> ptrs;
  ptrs.reserve(factors.size());
  for (const Field& f : factors) ptrs.push_back(&f);
  return dealiased_product(std::span<const Field* const>(ptrs));
}

PaddedFactors::PaddedFactors(std::span<const Field* const> fields) { build(fields); }

PaddedFactors::PaddedFactors(std::initializer_list<std::reference_wrapper<const Field>> fields) {
  std::vector<const Field*> ptrs;
  for (const Field& f : fields) ptrs.push_back(&f);
  build(ptrs);
}

void PaddedFactors::build(std::span<const Field* const> fields) {
  if (fields.empty()) throw std::invalid_argument("PaddedFactors needs at least one field");
  grid_ = fields.front()->grid();
  const std::size_t fine = 2 * grid_->size();
  for (const Field* f : fields) {
    if (!f->same_grid(*fields.front())) throw std::invalid_argument("fields live on different grids");
    fine_.push_back(padded_values(*f, fine));
  }
}

Field PaddedFactors::product(std::initializer_list<std::size_t> indices) const {
  if (indices.size() == 0 || indices.size() > 3)
    throw std::invalid_argument("PaddedFactors::product takes between 1 and 3 indices");
  const std::size_t fine = 2 * grid_->size();
  std::vector<double> out(fine, 1.0);
  for (std::size_t idx : indices) {
    const auto& v = fine_.at(idx);
    for (std::size_t i = 0; i < fine; ++i) out[i] *= v[i];
  }
  return truncate_to_grid(grid_, out);
}

double integrate(const Field& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid()->dx();
}

namespace {

constexpr int kStencil = 8;     // nodes x_{i-3} .. x_{i+4}
constexpr int kStencilLeft = 3;

// Weights w_k with  int_{x_i}^{x_{i+1}} e^{-(x_{i+1}-y)} m(y) dy  ~  sum_k w_k m_{i-3+k},
// exact for degree-7 polynomials m.
std::array<double, kStencil> exponential_panel_weights(double h) {
  // K_p = int_0^1 e^{-h(1-t)} t^p dt = sum_n (-h)^n p! / (p+n+1)!
  std::array<double, kStencil> moments{};
  for (int p = 0; p < kStencil; ++p) {
    double term = 1.0 / (p + 1);  // n = 0
    double sum = term;
    for (int n = 1; n < 200; ++n) {
      term *= -h / (p + n + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    moments[p] = sum;
  }
  std::array<double, kStencil> weights{};
  for (int k = 0; k < kStencil; ++k) {
    // Monomial coefficients of the Lagrange basis polynomial for node t_k = k - 3.
    std::array<double, kStencil> poly{};
    poly[0] = 1.0;
    int degree = 0;
    double denom = 1.0;
    for (int j = 0; j < kStencil; ++j) {
      if (j == k) continue;
      const double tj = j - kStencilLeft;
      for (int d = degree + 1; d >= 1; --d) poly[d] = poly[d - 1] - tj * poly[d];
      poly[0] = -tj * poly[0];
      ++degree;
      denom *= static_cast<double>(k - j);
    }
    double w = 0.0;
    for (int p = 0; p < kStencil; ++p) w += poly[p] * moments[p];
    weights[k] = h * w / denom;
  }
  return weights;
}

}  // namespace

KernelConvolution kernel_convolve(const Field& m) {
  const GridPtr& grid = m.grid();
  const std::size_t n = grid->size();
  const double h = grid->dx();
  const auto wl = exponential_panel_weights(h);
  const double decay = std::exp(-h);
  auto value = [&](std::ptrdiff_t i) {
    return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : m[static_cast<std::size_t>(i)];
  };
  auto panel = [&](std::size_t i, bool mirror) {
    double s = 0.0;
    for (int k = 0; k < kStencil; ++k) {
      const double w = mirror ? wl[kStencil - 1 - k] : wl[k];
      s += w * value(static_cast<std::ptrdiff_t>(i) - kStencilLeft + k);
    }
    return s;
  };

  KernelConvolution out{Field(grid), Field(grid), Field(grid), 0.0};
  // Left edge of the box stands in for -infinity.
  for (std::size_t i = 0; i + 1 < n; ++i) out.left[i + 1] = decay * out.left[i] + panel(i, false);
  // Right edge x = L is a virtual node with zero density.
  double carry = panel(n - 1, true);
  out.right[n - 1] = carry;
  for (std::size_t i = n - 1; i-- > 0;) {
    carry = decay * carry + panel(i, true);
    out.right[i] = carry;
  }
  for (std::size_t i = 0; i < n; ++i) out.u[i] = 0.5 * (out.left[i] + out.right[i]);

  double total = 0.0;
  double outer = 0.0;
  const double edge = 0.9 * grid->half_length();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(m[i]);
    total += a;
    if (std::abs(grid->node(i)) > edge) outer += a;
  }
  out.boundary_mass_fraction = total > 0.0 ? outer / total : 0.0;
  if (out.boundary_mass_fraction > kBoundaryMassTolerance) {
    spdlog::warn("kernel_convolve: {:.3e} of |m| lies near the box edge; periodic and "
                 "real-line kernels will disagree",
                 out.boundary_mass_fraction);
  }
  return out;
}

SpectralInterpolator::SpectralInterpolator(std::span<const Field* const> fields) {
  if (fields.empty()) throw std::invalid_argument("interpolator needs at least one field");
  grid_ = fields.front()->grid();
  for (const Field* f : fields) {
    if (!f->same_grid(*fields.front()))
      throw std::invalid_argument("fields live on different grids");
    coeffs_.push_back(to_spectrum(*f));
  }
}

void SpectralInterpolator::evaluate(double x, std::span<double> out) const {
  const std::size_t modes = grid_->spectrum_size();
  const std::size_t nyq = modes - 1;
  const double phase = x + grid_->half_length();
  const double k1 = grid_->wavenumber(1);
  const std::complex<double> step = std::polar(1.0, k1 * phase);
  for (std::size_t f = 0; f < coeffs_.size(); ++f) out[f] = coeffs_[f][0].real();
  std::complex<double> z(1.0, 0.0);
  for (std::size_t j = 1; j < nyq; ++j) {
    // Re-anchor periodically so the running power does not drift.
    z = (j % 64 == 0) ? std::polar(1.0, grid_->wavenumber(j) * phase) : z * step;
    for (std::size_t f = 0; f < coeffs_.size(); ++f)
      out[f] += 2.0 * (coeffs_[f][j].real() * z.real() - coeffs_[f][j].imag() * z.imag());
  }
  const double c_nyq = std::cos(grid_->wavenumber(nyq) * phase);
  for (std::size_t f = 0; f < coeffs_.size(); ++f) out[f] += coeffs_[f][nyq].real() * c_nyq;
}

double SpectralInterpolator::evaluate_one(double x, std::size_t field) const {
  std::vector<double> out(coeffs_.size());
  evaluate(x, out);
  return out[field];
}

}  // namespace chsys
