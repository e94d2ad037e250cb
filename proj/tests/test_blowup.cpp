#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chsys/blowup.hpp"
#include "chsys/integrator.hpp"
#include "oracles.hpp"

using namespace chsys;

namespace {

constexpr double kE = std::numbers::e;

// G for the B family through the exponential integral:
// int_0^g (exp(e^{Cs} - 1) - 1) ds = (e^{-1}/C) [Ei(e^{Cg}) - Ei(1)] - g.
double G_B_oracle(double C, double N0, double a) {
  const double y = -a / N0;
  const double g = std::log(std::log(1.0 + y) + 1.0) / C;
  const double integral = std::exp(-1.0) / C * (std::expint(std::exp(C * g)) - std::expint(1.0)) - g;
  return 1.0 + a * g + N0 * integral;
}

// G for the A family by direct quadrature of the definition.
double G_A_quadrature(double C, double N0, double a) {
  const double g = std::log(1.0 - a / N0) / C;
  const double integral = oracle::simpson([&](double s) { return std::exp(C * s) - 1.0; }, 0.0, g, 1e-14);
  return 1.0 + a * g + N0 * integral;
}

InitSpec random_positive_bumps(std::mt19937_64& rng, int sign) {
  std::uniform_real_distribution<double> amp(0.2, 1.5), ctr(-4.0, 4.0), wid(0.5, 1.5);
  InitSpec spec;
  for (int i = 0; i < 3; ++i) spec.terms.push_back({ProfileFamily::Gaussian, amp(rng), ctr(rng), wid(rng), sign});
  return spec;
}

InitSpec random_mixed_bumps(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.2, 1.5), ctr(-4.0, 4.0), wid(0.5, 1.5);
  std::bernoulli_distribution coin;
  InitSpec spec;
  for (int i = 0; i < 3; ++i)
    spec.terms.push_back({ProfileFamily::Gaussian, amp(rng), ctr(rng), wid(rng), coin(rng) ? 1 : -1});
  return spec;
}

// max over x of rhs - C (|m| + |n|), relative to sup of C (|m| + |n|).
double worst_excess(const State& s, double C) {
  const Field rhs = riccati_rhs(s, reconstruct(s));
  const Field bound = C * (s.m.abs() + effective_n(s).abs());
  return (rhs - bound).max() / bound.sup_norm();
}

}  // namespace

TEST_CASE("threshold family names") {
  for (auto f : {ThresholdFamily::A_L1, ThresholdFamily::A_sign, ThresholdFamily::B_sign})
    CHECK(parse_threshold_family(to_string(f)) == f);
  CHECK_THROWS_AS(parse_threshold_family("C_sign"), std::invalid_argument);
  CHECK(family_system(ThresholdFamily::B_sign) == SystemKind::SystemB);
  CHECK(family_system(ThresholdFamily::A_L1) == SystemKind::SystemA);
}

TEST_CASE("certified constant of zero data is zero") {
  auto grid = make_grid(256, 20.0);
  for (auto f : {ThresholdFamily::A_L1, ThresholdFamily::A_sign, ThresholdFamily::B_sign}) {
    const auto cc = certified_constant(Field(grid), Field(grid), f);
    CHECK(cc.C == 0.0);
    CHECK_FALSE(cc.derivation.empty());
    CHECK(cc.derivation.back().quantity == "C");
  }
}

TEST_CASE("L1 constant: closed form on a Gaussian pair and cubic scaling") {
  auto grid = make_grid(1024, 20.0);
  const Field g = Field::from_function(grid, [](double x) { return std::exp(-x * x); });
  const double rootpi = std::sqrt(std::numbers::pi);
  const auto cc = certified_constant(g, g, ThresholdFamily::A_L1);
  // C = ||m||_1 ||n||_1 max(||m||_1, ||n||_1) / 2.
  CHECK(cc.C == doctest::Approx(0.5 * rootpi * rootpi * rootpi).epsilon(1e-12));

  std::mt19937_64 rng(3);
  const State s = initial_data(SystemKind::SystemA, grid, random_mixed_bumps(rng), random_mixed_bumps(rng));
  const double c1 = certified_constant(s.m, s.n, ThresholdFamily::A_L1).C;
  const double c2 = certified_constant(2.0 * s.m, 2.0 * s.n, ThresholdFamily::A_L1).C;
  CHECK(c2 == doctest::Approx(8.0 * c1).epsilon(1e-13));
}

TEST_CASE("sign families reject data that changes sign") {
  auto grid = make_grid(512, 20.0);
  const Field pos = Field::from_function(grid, [](double x) { return std::exp(-x * x); });
  const Field odd = Field::from_function(grid, [](double x) { return x * std::exp(-x * x); });
  CHECK_THROWS_AS(certified_constant(odd, pos, ThresholdFamily::A_sign), HypothesisViolation);
  CHECK_THROWS_AS(certified_constant(pos, odd, ThresholdFamily::B_sign), HypothesisViolation);
  CHECK_NOTHROW(certified_constant(odd, pos, ThresholdFamily::A_L1));
  CHECK_NOTHROW(certified_constant(-1.0 * pos, pos, ThresholdFamily::B_sign));
}

TEST_CASE("riccati right-hand side stays under the certified bound on random data") {
  std::mt19937_64 rng(404);
  auto grid = make_grid(1024, 20.0);
  double worst_l1 = -1.0, worst_a = -1.0, worst_b = -1.0;
  for (int i = 0; i < 50; ++i) {
    const State mixed = initial_data(SystemKind::SystemA, grid, random_mixed_bumps(rng), random_mixed_bumps(rng));
    worst_l1 = std::max(worst_l1, worst_excess(mixed, certified_constant(mixed.m, mixed.n, ThresholdFamily::A_L1).C));

    std::bernoulli_distribution coin;
    const int sm = coin(rng) ? 1 : -1, sn = coin(rng) ? 1 : -1;
    const InitSpec m0 = random_positive_bumps(rng, sm), n0 = random_positive_bumps(rng, sn);
    const State a = initial_data(SystemKind::SystemA, grid, m0, n0);
    const State b = initial_data(SystemKind::SystemB, grid, m0, n0);
    worst_a = std::max(worst_a, worst_excess(a, certified_constant(a.m, a.n, ThresholdFamily::A_sign).C));
    worst_b = std::max(worst_b, worst_excess(b, certified_constant(b.m, b.n, ThresholdFamily::B_sign).C));
  }
  CHECK(worst_l1 <= 1e-12);
  CHECK(worst_a <= 1e-12);
  CHECK(worst_b <= 1e-12);
}

TEST_CASE("G at zero and the A-family closed form") {
  for (auto f : {ThresholdFamily::A_sign, ThresholdFamily::B_sign})
    for (double C : {0.3, 1.0, 4.0})
      for (double N0 : {0.5, 2.0}) CHECK(threshold_G(f, C, N0, 0.0) == 1.0);

  for (double C : {0.5, 1.0, 3.0})
    for (double N0 : {0.25, 1.0, 6.0})
      for (double a : {-0.1, -1.0, -5.0, -40.0})
        CHECK(threshold_G(ThresholdFamily::A_sign, C, N0, a) ==
              doctest::Approx(G_A_quadrature(C, N0, a)).epsilon(1e-11));

  // C = N0 = 1: with w = 1 - a, G = w (1 - ln w), so the root is w = e.
  for (double a : {-0.3, -1.7, -9.0}) {
    const double w = 1.0 - a;
    CHECK(threshold_G(ThresholdFamily::A_sign, 1.0, 1.0, a) == doctest::Approx(w * (1.0 - std::log(w))).epsilon(1e-13));
  }
  const double a0 = root_a0(1.0, 1.0, ThresholdFamily::A_sign);
  CHECK(std::abs(a0 - (1.0 - kE)) < 1e-10);
  CHECK(std::abs(threshold_G(ThresholdFamily::A_sign, 1.0, 1.0, a0)) < kRootTolerance);
}

TEST_CASE("B-family G against the exponential integral") {
  for (double C : {0.5, 1.0, 2.0})
    for (double N0 : {0.5, 1.0, 3.0})
      for (double a : {-0.05, -0.8, -3.0, -12.0})
        CHECK(threshold_G(ThresholdFamily::B_sign, C, N0, a) ==
              doctest::Approx(G_B_oracle(C, N0, a)).epsilon(1e-10));
  for (double C : {0.5, 1.0, 2.0}) {
    const double a0 = root_a0(C, 1.0, ThresholdFamily::B_sign);
    CHECK(a0 < 0.0);
    CHECK(std::abs(G_B_oracle(C, 1.0, a0)) < 1e-10);
  }
}

TEST_CASE("G increases strictly on a < 0") {
  for (auto f : {ThresholdFamily::A_sign, ThresholdFamily::B_sign})
    for (double C : {0.5, 1.0, 3.0})
      for (double N0 : {0.5, 2.0}) {
        const double a_lo = 4.0 * root_a0(C, N0, f);
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 100; ++i) {
          const double a = a_lo * (1.0 - i / 100.0);
          const double g = threshold_G(f, C, N0, a);
          CHECK(g > prev);
          prev = g;
        }
      }
}

TEST_CASE("threshold root is jointly homogeneous in (C, N0), not in N0 alone") {
  for (auto f : {ThresholdFamily::A_sign, ThresholdFamily::B_sign})
    for (double lam : {2.0, 5.0}) {
      const double base = root_a0(1.0, 1.0, f);
      CHECK(root_a0(lam, lam, f) == doctest::Approx(lam * base).epsilon(1e-11));
      // Scaling N0 and a alone gives G(lam a) = 1 + lam (G(a) - 1) = 1 - lam at a = a0.
      CHECK(threshold_G(f, 1.0, lam, lam * base) == doctest::Approx(1.0 - lam).epsilon(1e-10));
      CHECK(std::abs(root_a0(1.0, lam, f) - lam * base) > 0.1);
    }
}

TEST_CASE("root_a0 preconditions") {
  CHECK_THROWS_AS(root_a0(0.0, 1.0, ThresholdFamily::A_sign), std::invalid_argument);
  CHECK_THROWS_AS(root_a0(1.0, 0.0, ThresholdFamily::B_sign), std::invalid_argument);
  CHECK_THROWS_AS(root_a0(1.0, 1.0, ThresholdFamily::A_L1), std::invalid_argument);
  CHECK_THROWS_AS(threshold_G(ThresholdFamily::A_sign, 1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("predict: worked examples") {
  const auto l1 = predict(ThresholdFamily::A_L1, {2.0, 1.0, -4.0, 0.0});
  CHECK(l1.threshold == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(l1.triggered);
  CHECK_FALSE(l1.a0.has_value());
  CHECK(*l1.T0_upper == doctest::Approx(2.0).epsilon(1e-15));

  const auto as = predict(ThresholdFamily::A_sign, {1.0, 1.0, -2.0, 0.0});
  CHECK(as.triggered);
  CHECK(*as.a0 == doctest::Approx(1.0 - kE).epsilon(1e-11));
  CHECK(*as.T0_upper == doctest::Approx(std::log(3.0)).epsilon(1e-14));

  for (auto f : {ThresholdFamily::A_L1, ThresholdFamily::A_sign, ThresholdFamily::B_sign}) {
    const auto p = predict(f, {1.5, 0.7, 0.0, 0.0});
    CHECK_FALSE(p.triggered);
    CHECK_FALSE(p.T0_upper.has_value());
    CHECK(p.threshold < 0.0);
    CHECK_THROWS_AS(predict(f, {1.0, 0.0, -1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(predict(f, {0.0, 1.0, -1.0, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("predict is monotone in Qx0") {
  for (auto f : {ThresholdFamily::A_L1, ThresholdFamily::A_sign, ThresholdFamily::B_sign}) {
    bool was_triggered = false;
    double prev_T0 = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double qx0 = -0.5 * i;
      const auto p = predict(f, {1.2, 0.8, qx0, 0.0});
      if (was_triggered) CHECK(p.triggered);
      if (p.triggered) {
        CHECK(*p.T0_upper > 0.0);
        if (was_triggered) CHECK(*p.T0_upper > prev_T0);
        prev_T0 = *p.T0_upper;
      }
      was_triggered = p.triggered;
    }
    CHECK(was_triggered);
  }
}

TEST_CASE("riccati residual of trivial states") {
  auto grid = make_grid(128, 10.0);
  State z0{SystemKind::SystemA, 0.0, Field(grid), Field(grid)};
  State z1 = z0;
  z1.t = 0.1;
  const auto r = riccati_residual(z0, z1, ThresholdFamily::A_sign, 1.0);
  CHECK(r.max_residual() <= 0.0);
  CHECK(r.lhs.sup_norm() == 0.0);

  // Constant u = v = c: m = n = c and Q is constant, so the left side vanishes.
  const Field c = Field::from_function(grid, [](double) { return 0.7; });
  for (auto kind : {SystemKind::SystemA, SystemKind::SystemB}) {
    State s0{kind, 0.0, c, c};
    State s1{kind, 0.05, c, c};
    for (auto f : {ThresholdFamily::A_L1, ThresholdFamily::A_sign}) {
      const auto rc = riccati_residual(s0, s1, f, 2.0);
      CHECK(rc.lhs.sup_norm() < 1e-14);
      CHECK(rc.max_residual() < 0.0);
    }
  }
  CHECK_THROWS_AS(riccati_residual(z1, z0, ThresholdFamily::A_sign, 1.0), std::invalid_argument);
}

TEST_CASE("riccati identity matches the time-differenced left side along runs") {
  auto grid = make_grid(1024, 20.0);
  const InitSpec m0{{{ProfileFamily::Gaussian, 1.0, -1.0, 1.0, 1}}};
  const InitSpec n0{{{ProfileFamily::Gaussian, 0.8, 1.5, 1.3, 1}}};
  for (auto f : {ThresholdFamily::A_sign, ThresholdFamily::B_sign}) {
    const State s0 = initial_data(family_system(f), grid, m0, n0);
    const double C = certified_constant(s0.m, s0.n, f).C;
    double gaps[2] = {0.0, 0.0};
    double worst = -1.0;
    int slot = 0;
    for (double cfl : {0.3, 0.15}) {
      IntegratorConfig cfg;
      cfg.cfl = cfl;
      cfg.sample_interval = 1.0;
      Observers obs;
      obs.on_step = [&](const StepResult& st, double) {
        const auto r = riccati_residual(st.stages[0].state, st.next, f, C);
        gaps[slot] = std::max(gaps[slot], r.identity_gap());
        worst = std::max(worst, r.max_residual() - r.identity_gap());
      };
      CHECK(run(s0, cfg, obs, false).status.outcome == RunOutcome::Completed);
      ++slot;
    }
    CHECK(gaps[0] < 1e-3 * C * (s0.m.abs() + s0.n.abs()).sup_norm());
    CHECK(gaps[0] / gaps[1] > 3.5);
    CHECK(worst <= 0.0);
  }
}
