#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "pricefront/particle_foliation.hpp"
#include "pricefront/picard.hpp"

using namespace pricefront;
using namespace pricefront::particles;

TEST_CASE("sampling a uniform density") {
  const std::vector<double> x{0.5, 1.0}, rho{1.0, 1.0};
  const std::size_t n = 100000;
  const ParticleEnsemble e = init_ensemble(x, rho, n, 11);
  const double mean = std::accumulate(e.positions.begin(), e.positions.end(), 0.0) / n;
  CHECK(std::abs(mean - 0.75) < 3.0 * (0.5 / std::sqrt(12.0)) / std::sqrt(double(n)));
  CHECK(e.particle_mass * n == doctest::Approx(0.5));
  const ParticleEnsemble empty = init_ensemble(x, rho, 0, 11);
  CHECK(empty.size() == 0);
  CHECK(empty.particle_mass == 0.0);
}

TEST_CASE("same seed gives the same ensemble") {
  const std::vector<double> x{0.0, 0.3, 1.0}, rho{0.0, 2.0, 0.5};
  ParticleEnsemble a = init_ensemble(x, rho, 5000, 42), b = init_ensemble(x, rho, 5000, 42);
  for (int s = 0; s < 20; ++s) {
    step_ensemble(a, 0.0, 0.01 * s, 1e-4, ModelParams{});
    step_ensemble(b, 0.0, 0.01 * s, 1e-4, ModelParams{});
  }
  CHECK(a.positions == b.positions);
  CHECK(a.levels == b.levels);
  const ParticleEnsemble c = init_ensemble(x, rho, 5000, 43);
  CHECK(c.positions != init_ensemble(x, rho, 5000, 42).positions);
}

TEST_CASE("free reflected diffusion") {
  ParticleEnsemble e;
  e.positions.assign(50000, 0.0);
  e.levels.assign(50000, 0);
  e.rng.seed(3);
  const double dt = 1e-5;
  for (int s = 1; s <= 40; ++s) {
    step_ensemble(e, -1.0, -1.0, dt, ModelParams{});
    double m2 = 0.0;
    for (double v : e.positions) m2 += v * v;
    m2 /= double(e.size());
    // Relative standard error of a Gaussian second moment is sqrt(2 / N).
    CHECK(std::abs(m2 - 2.0 * dt * s) < 5.0 * std::sqrt(2.0 / e.size()) * 2.0 * dt * s);
  }
  CHECK(e.log.empty());
}

TEST_CASE("reinjection next to the wall stays inside") {
  ModelParams mp;
  ParticleEnsemble e;
  e.positions.assign(2000, 0.991);
  e.levels.assign(2000, 0);
  e.rng.seed(5);
  for (int s = 0; s < 50; ++s) step_ensemble(e, 0.99, 0.99, 1e-6, mp);
  REQUIRE_FALSE(e.log.empty());
  for (const auto& tx : e.log) {
    CHECK(tx.reinjection_x == doctest::Approx(0.99 + mp.rescue_half_factor * 0.01).epsilon(1e-14));
    CHECK(tx.reinjection_x < 1.0);
    CHECK(tx.level_to == tx.level_from + 1);
  }
}

TEST_CASE("a sweep lifts every particle it passes") {
  const std::vector<double> x{0.4, 1.0}, rho{1.0, 1.0};
  ParticleEnsemble e = init_ensemble(x, rho, 20000, 9);
  const std::vector<double> start = e.positions;
  const int n = 2000;
  for (int s = 0; s < n; ++s) step_ensemble(e, 0.5 + 0.1 * s / n, 0.5 + 0.1 * (s + 1) / n, 1e-20, ModelParams{});
  for (int s = 0; s < n; ++s) step_ensemble(e, 0.6 - 0.1 * s / n, 0.6 - 0.1 * (s + 1) / n, 1e-20, ModelParams{});
  std::size_t in_band = 0;
  for (std::size_t i = 0; i < start.size(); ++i) {
    if (start[i] > 0.5 && start[i] < 0.6) {
      ++in_band;
      CHECK(e.levels[i] >= 1);
    }
  }
  CHECK(in_band > 1000);
}

TEST_CASE("foliation report bookkeeping") {
  const ModelParams mp;
  const InitialData init = validate_initial(builtin_samples("skewed", 401), mp);
  SolutionState st(init, mp);
  ParticleEnsemble e = init_from_initial(init, 20000, 1);
  const FoliationReport r0 = foliation_report(e, st);
  CHECK(r0.weighted_level_mass == 0.0);
  CHECK(r0.total_mass == doctest::Approx(init.M_p).epsilon(1e-12));
  picard::global_solve(st, 2e-3);
  run_along(e, st, 2e-3, 5e-5);
  const FoliationReport r = foliation_report(e, st);
  CHECK(r.total_mass == doctest::Approx(init.M_p).epsilon(1e-12));
  CHECK(r.ase_gap <= 3.0 * r.weighted_std_error + 1e-12);
  std::ostringstream csv;
  write_transactions_csv(csv, e);
  CHECK(csv.str().rfind("t,particle_id,level_from,level_to,reinjection_x\n", 0) == 0);
}
