#pragma once

// Independent reference computations shared by the test binaries. None of these
// call into the library's spectral machinery.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "chsys/spectral.hpp"

namespace oracle {

// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol,
                      int depth = 60) {
  auto rec = [&](auto&& self, double lo, double hi, double flo, double fmid, double fhi,
                 double whole, double eps, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return self(self, lo, mid, flo, flm, fmid, left, 0.5 * eps, d - 1) +
           self(self, mid, hi, fmid, frm, fhi, right, 0.5 * eps, d - 1);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(rec, a, b, fa, fm, fb, whole, tol, depth);
}

// Real trigonometric polynomial with modes |j| <= band on the grid's box.
struct TrigPoly {
  double half_length;
  std::vector<std::complex<double>> c;  // c[0..band]; value = Re c0 + 2 Re sum c_j e^{i k_j (x+L)}

  double operator()(double x) const {
    double s = c[0].real();
    for (std::size_t j = 1; j < c.size(); ++j) {
      const double k = std::numbers::pi * static_cast<double>(j) / half_length;
      s += 2.0 * (c[j] * std::polar(1.0, k * (x + half_length))).real();
    }
    return s;
  }
  double derivative(double x, int order = 1) const {
    double s = 0.0;
    for (std::size_t j = 1; j < c.size(); ++j) {
      const double k = std::numbers::pi * static_cast<double>(j) / half_length;
      std::complex<double> factor = std::pow(std::complex<double>(0.0, k), order);
      s += 2.0 * (factor * c[j] * std::polar(1.0, k * (x + half_length))).real();
    }
    return s;
  }
};

inline TrigPoly random_trig(double half_length, std::size_t band, std::mt19937_64& rng,
                            double decay = 0.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  TrigPoly p{half_length, std::vector<std::complex<double>>(band + 1)};
  p.c[0] = g(rng);
  for (std::size_t j = 1; j <= band; ++j) {
    const double w = std::exp(-decay * static_cast<double>(j));
    p.c[j] = std::complex<double>(g(rng), g(rng)) * (0.5 * w);
  }
  return p;
}

inline chsys::Field sample(const chsys::GridPtr& grid, const std::function<double(double)>& f) {
  chsys::Field out(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) out[i] = f(grid->node(i));
  return out;
}

inline double sup_diff(const chsys::Field& a, const chsys::Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace oracle
