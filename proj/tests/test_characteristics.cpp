#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "chsys/characteristics.hpp"
#include "oracles.hpp"

using namespace chsys;

namespace {

InitSpec gaussian(double amp, double center, double width) {
  return {{{ProfileFamily::Gaussian, amp, center, width, 1}}};
}

State gaussian_pair(SystemKind kind, std::size_t n) {
  return initial_data(kind, make_grid(n, 20.0), gaussian(1.0, -1.0, 1.0), gaussian(0.8, 1.5, 1.3));
}

struct Tracked {
  RunResult run;
  CharacteristicBundle bundle;
  double worst_residual = 0.0;
  double worst_gap = 0.0;
  bool monotone = true;
};

Tracked track(const State& s0, std::vector<double> seeds, double cfl, double t_end = 1.0) {
  Tracked out{{}, make_bundle(s0, std::move(seeds))};
  IntegratorConfig cfg;
  cfg.t_end = t_end;
  cfg.cfl = cfl;
  cfg.sample_interval = 0.25;
  Observers obs;
  obs.on_step = [&](const StepResult& step, double dt) { advance(out.bundle, step, dt); };
  obs.on_sample = [&](const State& s, const DerivedFields&) {
    out.worst_residual = std::max(out.worst_residual, pullback_residual(out.bundle, s).max_abs());
    out.worst_gap = std::max(out.worst_gap, out.bundle.representation_gap());
    out.monotone = out.monotone && std::is_sorted(out.bundle.q.begin(), out.bundle.q.end()) &&
                   std::adjacent_find(out.bundle.q.begin(), out.bundle.q.end()) == out.bundle.q.end();
  };
  out.run = run(s0, cfg, obs, false);
  return out;
}

}  // namespace

TEST_CASE("zero fields leave characteristics at rest") {
  auto grid = make_grid(64, 5.0);
  State zero{SystemKind::SystemB, 0.0, Field(grid), Field(grid)};
  CharacteristicBundle b = make_bundle(zero, {-1.0, 0.0, 2.5});
  DerivedFields d = reconstruct(zero);
  for (int k = 0; k < 10; ++k) advance(b, zero, d, 0.1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(b.q[i] == b.seeds[i]);
    CHECK(b.qx(i) == 1.0);
    CHECK(b.phase[i] == 0.0);
  }
  CHECK(pullback_residual(b, zero).max_abs() == 0.0);
  SignCensus c = sign_census(zero);
  CHECK(c.min_m == 0.0);
  CHECK(c.max_n == 0.0);
}

TEST_CASE("uniform velocity translates the curves") {
  // m = n = c0 gives u = v = c0, a transport speed c0^2 / 2 and no stretching.
  auto grid = make_grid(64, 10.0);
  const double c0 = 1.2;
  Field flat = Field::from_function(grid, [c0](double) { return c0; });
  State s{SystemKind::SystemA, 0.0, flat, flat};
  CharacteristicBundle b = make_bundle(s, {-3.0, 0.0, 1.0});
  DerivedFields d = reconstruct(s);
  for (int k = 0; k < 8; ++k) advance(b, s, d, 0.25);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(b.q[i] == doctest::Approx(b.seeds[i] + 0.5 * c0 * c0 * 2.0).epsilon(1e-13));
    CHECK(std::abs(b.log_qx[i]) < 1e-13);
  }
}

TEST_CASE("curves leaving the box wrap around") {
  auto grid = make_grid(64, 10.0);
  Field flat = Field::from_function(grid, [](double) { return 2.0; });
  State s{SystemKind::SystemA, 0.0, flat, flat};
  CharacteristicBundle b = make_bundle(s, {9.0});
  DerivedFields d = reconstruct(s);
  advance(b, s, d, 1.0);  // speed 2
  CHECK(b.q[0] == doctest::Approx(-9.0));
}

TEST_CASE("default seeds cover the support and include extras") {
  auto grid = make_grid(1024, 20.0);
  State s = initial_data(SystemKind::SystemA, grid, {{{ProfileFamily::Bump, 1, -2, 1, 1}}},
                         {{{ProfileFamily::Bump, 1, 3, 1, 1}}});
  const double extra[] = {0.123};
  auto seeds = default_seeds(s, 64, extra);
  CHECK(seeds.size() == 65);
  CHECK(std::is_sorted(seeds.begin(), seeds.end()));
  CHECK(seeds.front() > -3.0);
  CHECK(seeds.front() < -2.9);
  CHECK(seeds.back() < 4.0);
  CHECK(seeds.back() > 3.9);
  CHECK(std::find(seeds.begin(), seeds.end(), 0.123) != seeds.end());
}

TEST_CASE("Jacobian from the exponential formula matches finite differences of q") {
  State s0 = gaussian_pair(SystemKind::SystemA, 512);
  const double h = 1e-3;
  std::vector<double> seeds;
  for (double x : {-2.5, -1.0, 0.0, 1.5, 3.0}) {
    seeds.push_back(x - h);
    seeds.push_back(x);
    seeds.push_back(x + h);
  }
  Tracked t = track(s0, seeds, 0.3);
  REQUIRE(t.run.status.outcome == RunOutcome::Completed);
  for (std::size_t i = 1; i < seeds.size(); i += 3) {
    const double fd = (t.bundle.q[i + 1] - t.bundle.q[i - 1]) / (2 * h);
    CHECK(std::abs(fd - t.bundle.qx(i)) / t.bundle.qx(i) < 1e-3);
  }
  CHECK(t.worst_gap < 1e-6);
}

TEST_CASE("pullback identities hold along the run") {
  for (auto kind : {SystemKind::SystemA, SystemKind::SystemB}) {
    State s0 = gaussian_pair(kind, 1024);
    CharacteristicBundle b0 = make_bundle(s0, default_seeds(s0));
    CHECK(pullback_residual(b0, s0).max_abs() == 0.0);

    Tracked t = track(s0, default_seeds(s0), 0.15);
    REQUIRE(t.run.status.outcome == RunOutcome::Completed);
    CHECK(t.worst_residual < 1e-4 * s0.m.sup_norm());
    CHECK(t.monotone);
    CHECK(t.worst_gap < 1e-6);
    if (kind == SystemKind::SystemB)
      CHECK(*std::max_element(t.bundle.phase.begin(), t.bundle.phase.end()) > 1e-3);
  }
}

TEST_CASE("sign-definite data stays sign-definite") {
  State s0 = gaussian_pair(SystemKind::SystemA, 1024);
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  double worst = 0.0;
  Observers obs;
  obs.on_sample = [&](const State& s, const DerivedFields&) {
    SignCensus c = sign_census(s);
    worst = std::min({worst, c.min_m, c.min_n});
  };
  run(s0, cfg, obs, false);
  CHECK(worst >= -1e-6 * s0.m.sup_norm());
}
