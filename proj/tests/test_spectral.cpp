#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chsys/spectral.hpp"
#include "oracles.hpp"

using namespace chsys;

namespace {

double gaussian(double x) { return std::exp(-x * x); }

// Eighth-order central difference on the grid, periodic indexing.
Field central_difference(const Field& f) {
  static constexpr double w[] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const std::size_t n = f.size();
  Field out(f.grid());
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 1; k <= 4; ++k) s += w[k - 1] * (f[(i + k) % n] - f[(i + n - k) % n]);
    out[i] = s / f.grid()->dx();
  }
  return out;
}

// Smooth compactly supported bump on |x - c| < r.
double bump(double x, double c, double r) {
  const double s = (x - c) / r;
  return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
}

}  // namespace

TEST_CASE("grid rejects sizes that are not powers of two") {
  CHECK_THROWS_AS(Grid(100, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(64, 0.0), std::invalid_argument);
  Grid g(64, 3.0);
  CHECK(g.dx() * 64 == 6.0);
  CHECK(g.node(0) == -3.0);
  CHECK(g.wavenumber(2) == doctest::Approx(2.0 * std::numbers::pi / 3.0));
}

TEST_CASE("derivative of a single mode and of a constant") {
  auto grid = make_grid(256, 10.0);
  const double k = std::numbers::pi / 10.0 * 4.0;
  Field f = Field::from_function(grid, [k](double x) { return std::cos(k * x); });
  Field expect = Field::from_function(grid, [k](double x) { return -k * std::sin(k * x); });
  CHECK(oracle::sup_diff(spectral_derivative(f), expect) < 1e-12);

  Field one = Field::from_function(grid, [](double) { return 1.0; });
  CHECK(spectral_derivative(one).sup_norm() < 1e-14);
}

TEST_CASE("derivative of a Gaussian agrees with high-order finite differences") {
  auto grid = make_grid(512, 20.0);
  Field f = Field::from_function(grid, gaussian);
  CHECK(oracle::sup_diff(spectral_derivative(f), central_difference(f)) < 1e-6);
}

TEST_CASE("helmholtz solve on eigenfunctions and constants") {
  auto grid = make_grid(128, 5.0);
  const double k = grid->wavenumber(3);
  Field m = Field::from_function(grid, [k](double x) { return std::cos(k * x); });
  Field expect = Field::from_function(grid, [k](double x) { return std::cos(k * x) / (1 + k * k); });
  CHECK(oracle::sup_diff(helmholtz_solve(m), expect) < 1e-14);
  Field c = Field::from_function(grid, [](double) { return 2.5; });
  CHECK(oracle::sup_diff(helmholtz_solve(c), c) < 1e-14);
}

TEST_CASE("helmholtz solve matches the real-line kernel for a Gaussian") {
  auto grid = make_grid(1024, 20.0);
  Field m = Field::from_function(grid, gaussian);
  KernelConvolution kc = kernel_convolve(m);
  CHECK(oracle::sup_diff(helmholtz_solve(m), kc.u) < 1e-8);
  CHECK(kc.boundary_mass_fraction < kBoundaryMassTolerance);
}

TEST_CASE("kernel convolution far field") {
  auto grid = make_grid(1024, 20.0);
  const double w = 0.2;
  Field m = Field::from_function(grid, [w](double x) { return std::exp(-(x / w) * (x / w)); });
  const double mass = w * std::sqrt(std::numbers::pi);
  KernelConvolution kc = kernel_convolve(m);
  // For |x| beyond the support, (1/2) int e^{-|x-y|} m(y) dy = (1/2) e^{-|x|} int e^{y} m(y) dy.
  const double moment = mass * std::exp(w * w / 4.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x = grid->node(i);
    if (std::abs(x) < 2.0 || std::abs(x) > 10.0) continue;
    const double expect = 0.5 * std::exp(-std::abs(x)) * moment;
    worst = std::max(worst, std::abs(kc.u[i] - expect) / expect);
  }
  CHECK(worst < 1e-4);

  CHECK(kernel_convolve(Field(grid)).u.sup_norm() == 0.0);
}

TEST_CASE("one-sided kernel integrals sum to twice the velocity") {
  auto grid = make_grid(1024, 20.0);
  Field m = Field::from_function(grid, [](double x) { return std::exp(-(x - 1) * (x - 1) / 2.0); });
  KernelConvolution kc = kernel_convolve(m);
  Field u = helmholtz_solve(m);
  CHECK(oracle::sup_diff(kc.left + kc.right, 2.0 * u) < 1e-6);
  Field ux = spectral_derivative(u);
  CHECK(oracle::sup_diff(kc.left, u - ux) < 1e-6);
  CHECK(oracle::sup_diff(kc.right, u + ux) < 1e-6);
}

TEST_CASE("kernel convolution warns on edge mass but still returns") {
  auto grid = make_grid(128, 5.0);
  Field m = Field::from_function(grid, [](double) { return 1.0; });
  KernelConvolution kc = kernel_convolve(m);
  CHECK(kc.boundary_mass_fraction > 0.05);
}

// Supports stay inside |x| <= 5: the periodic solve sees an image of the
// e^{-|x|} tail through the box edge, of size about e^{-(2L - |x - y|)}.
TEST_CASE("kernel convolution agrees with helmholtz on random compact bumps") {
  auto grid = make_grid(1024, 20.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> centre(-2.5, 2.5), radius(1.5, 2.5), amp(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double c1 = centre(rng), r1 = radius(rng), a1 = amp(rng);
    const double c2 = centre(rng), r2 = radius(rng), a2 = amp(rng);
    Field m = Field::from_function(
        grid, [&](double x) { return a1 * bump(x, c1, r1) + a2 * bump(x, c2, r2); });
    CHECK(oracle::sup_diff(kernel_convolve(m).u, helmholtz_solve(m)) < 1e-6);
  }
}

TEST_CASE("helmholtz round trip and sup bound") {
  std::mt19937_64 rng(5);
  auto grid = make_grid(256, 7.0);
  for (int trial = 0; trial < 5; ++trial) {
    auto p = oracle::random_trig(7.0, 40, rng);
    Field m = oracle::sample(grid, p);
    Field u = helmholtz_solve(m);
    Field back = u - spectral_derivative(spectral_derivative(u));
    CHECK(oracle::sup_diff(back, m) < 1e-10);
    CHECK(u.sup_norm() <= 0.5 * integrate(m.abs()) + 1e-12);
  }
}

TEST_CASE("dealiased products") {
  auto grid = make_grid(128, 4.0);
  const double k1 = grid->wavenumber(10), k2 = grid->wavenumber(25);
  Field a = Field::from_function(grid, [k1](double x) { return std::cos(k1 * x); });
  Field b = Field::from_function(grid, [k2](double x) { return std::cos(k2 * x); });
  Field expect = Field::from_function(grid, [&](double x) {
    return 0.5 * std::cos((k1 - k2) * x) + 0.5 * std::cos((k1 + k2) * x);
  });
  CHECK(oracle::sup_diff(dealiased_product({a, b}), expect) < 1e-13);
  const Field zero(grid);
  CHECK(dealiased_product({a, zero}).sup_norm() == 0.0);

  SUBCASE("cubic products of band-limited fields are exact at the nodes") {
    std::mt19937_64 rng(3);
    const std::size_t n = 256;
    auto g = make_grid(n, 6.0);
    for (int trial = 0; trial < 5; ++trial) {
      auto p = oracle::random_trig(6.0, n / 6 - 1, rng);
      auto q = oracle::random_trig(6.0, n / 6 - 1, rng);
      auto r = oracle::random_trig(6.0, n / 6 - 1, rng);
      Field fp = oracle::sample(g, p), fq = oracle::sample(g, q), fr = oracle::sample(g, r);
      Field direct = oracle::sample(g, [&](double x) { return p(x) * q(x) * r(x); });
      const double scale = direct.sup_norm();
      CHECK(oracle::sup_diff(dealiased_product({fp, fq, fr}), direct) < 1e-10 * scale);
      CHECK(oracle::sup_diff(dealiased_product({fp, fq, fr}), dealiased_product({fr, fp, fq})) <
            1e-12 * scale);
      PaddedFactors pf({fp, fq, fr});
      CHECK(oracle::sup_diff(pf.product({0, 1, 2}), direct) < 1e-10 * scale);
    }
  }

  SUBCASE("out-of-band content is removed rather than folded back") {
    // cos(k x)^2 with k at 3/8 of Nyquist lands its doubled mode above the band.
    auto g = make_grid(64, 1.0);
    const double k = g->wavenumber(20);
    Field c = Field::from_function(g, [k](double x) { return std::cos(k * x); });
    Field sq = dealiased_product({c, c});
    Field half = Field::from_function(g, [](double) { return 0.5; });
    CHECK(oracle::sup_diff(sq, half) < 1e-14);
  }
}

TEST_CASE("periodic trapezoid quadrature") {
  auto grid = make_grid(512, 20.0);
  CHECK(integrate(Field::from_function(grid, [](double) { return 3.0; })) ==
        doctest::Approx(120.0).epsilon(1e-15));
  const double k = grid->wavenumber(7);
  CHECK(std::abs(integrate(Field::from_function(grid, [k](double x) { return std::sin(k * x); }))) <
        1e-13);
  const double ref = oracle::simpson(gaussian, -20.0, 20.0, 1e-14);
  CHECK(ref == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(std::abs(integrate(Field::from_function(grid, gaussian)) - ref) < 1e-10);
}

TEST_CASE("trigonometric interpolation reproduces band-limited fields off the grid") {
  std::mt19937_64 rng(9);
  auto grid = make_grid(128, 3.0);
  auto p = oracle::random_trig(3.0, 50, rng);
  Field f = oracle::sample(grid, p);
  const Field* fields[] = {&f};
  SpectralInterpolator interp(fields);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double x = pos(rng);
    CHECK(std::abs(interp.evaluate_one(x, 0) - p(x)) < 1e-11);
  }
  for (std::size_t i = 0; i < grid->size(); i += 17)
    CHECK(std::abs(interp.evaluate_one(grid->node(i), 0) - f[i]) < 1e-11);
}

TEST_CASE("non-finite values are reported") {
  auto grid = make_grid(16, 1.0);
  Field f(grid);
  f[3] = std::nan("");
  CHECK_FALSE(f.all_finite());
  CHECK_THROWS_AS(f.require_finite("m"), NumericalFailure);
}

TEST_CASE("reflection maps x to -x") {
  auto grid = make_grid(64, 2.0);
  Field f = Field::from_function(grid, [](double x) { return x * x * x + x; });
  Field r = f.reflected();
  for (std::size_t i = 1; i < grid->size(); ++i) CHECK(r[i] == doctest::Approx(-f[i]));
}
