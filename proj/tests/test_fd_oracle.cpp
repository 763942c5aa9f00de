#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pricefront/errors.hpp"
#include "pricefront/fd_oracle.hpp"

using namespace pricefront;

namespace {

const double pi = std::numbers::pi;

InitialData data(const std::string& name) { return validate_initial(builtin_samples(name, 401), ModelParams{}); }

}  // namespace

TEST_CASE("eigenfunction decays at the exact rate") {
  const InitialData init = data("symmetric");
  const ModelParams mp;
  for (int nx : {201, 401}) {
    fd::FdGrid g = fd::make_grid(init, nx);
    const double dt = 1e-4;
    const int steps = 100;
    for (int s = 0; s < steps; ++s) fd::fd_step(g, 0.0, 0.0, dt, 0.5, mp);
    double err = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      err = std::max(err, std::abs(g.f[i] + std::sin(pi * g.x[i] / 2) * std::exp(-pi * pi * steps * dt / 4)));
    }
    const double h = g.h;
    INFO("nx = " << nx << ", err = " << err);
    // Leading CN spatial error is (pi/2)^4 h^2 t / 12 of the amplitude.
    CHECK(err < 0.2 * h * h + 1e-8);
  }
}

TEST_CASE("deposits and signed mass") {
  const InitialData init = data("skewed");
  const ModelParams mp;
  fd::FdGrid g = fd::make_grid(init, 401);
  for (double y : {-0.7123, -0.4, 0.0, 0.3333, 0.99}) {
    for (int w : {1, 2}) {
      double sum = 0.0;
      for (const auto& [j, v] : fd::deposit_weights(g, y, 1.7 * 1e-3, w)) sum += g.weight(j) * v;
      CHECK(sum == doctest::Approx(1.7e-3).epsilon(1e-15));
    }
  }
  const double m0 = g.signed_mass();
  for (int s = 0; s < 50; ++s) {
    const double before = g.signed_mass();
    fd::fd_step(g, init.p_I, 2.0, 1e-4, s == 0 ? 1.0 : 0.5, mp);
    CHECK(std::abs(g.signed_mass() - before) < 1e-15 * 100);
  }
  CHECK(std::abs(g.signed_mass() - m0) < 1e-13);
}

TEST_CASE("source-free oracle against an independent explicit scheme") {
  const InitialData init = data("skewed");
  fd::FdGrid g = fd::make_grid(init, 801);
  for (int s = 0; s < 200; ++s) fd::fd_step(g, 0.0, 0.0, 5e-5, s == 0 ? 1.0 : 0.5, ModelParams{});
  // Cell-centred explicit reference on a finer grid.
  const int n = 1600;
  const double h = 2.0 / n;
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = init.spline(-1.0 + (i + 0.5) * h);
  u = oracle::explicit_heat(u, h, 0.01);
  double err = 0.0;
  for (std::size_t i = 0; i < g.x.size(); i += 20) {
    const double s = (g.x[i] + 1.0) / h - 0.5;
    const int k = std::clamp(static_cast<int>(std::floor(s)), 0, n - 2);
    const double w = std::clamp(s - k, 0.0, 1.0);
    err = std::max(err, std::abs(g.f[i] - ((1 - w) * u[k] + w * u[k + 1])));
  }
  CHECK(err < 5e-5);
}

TEST_CASE("symmetric data keeps the front at the centre") {
  fd::FdConfig cfg;
  cfg.nx = 401;
  cfg.dt = 2e-5;
  const auto tr = fd::fd_solve(data("symmetric"), ModelParams{}, cfg, 0.05);
  for (double p : tr.p) CHECK(std::abs(p) < tr.h);
  CHECK(tr.t.back() == doctest::Approx(0.05));
}

TEST_CASE("self-convergence under refinement") {
  const InitialData init = data("skewed");
  const double t_end = 0.01;
  fd::FdConfig base;
  base.nx = 201;
  base.dt = 4e-5;
  std::vector<double> p_end;
  for (int lv = 0; lv <= 3; ++lv) p_end.push_back(fd::fd_solve(init, ModelParams{}, base.refined(lv), t_end).p.back());
  const double e1 = std::abs(p_end[0] - p_end[1]), e2 = std::abs(p_end[1] - p_end[2]), e3 = std::abs(p_end[2] - p_end[3]);
  MESSAGE("successive front differences " << e1 << ", " << e2 << ", " << e3);
  CHECK(e2 < 0.5 * e1);
  CHECK(e3 < 0.5 * e2);
}

TEST_CASE("configuration checks") {
  fd::FdConfig c;
  c.nx = 10;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.theta = 0.3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
