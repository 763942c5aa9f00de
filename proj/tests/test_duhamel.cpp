#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pricefront/duhamel.hpp"
#include "pricefront/errors.hpp"

using namespace pricefront;

namespace {

const double pi = std::numbers::pi;

InitialData symmetric() { return validate_initial(builtin_samples("symmetric", 401), ModelParams{}); }

// Prescribed wandering front with oscillating flux.
struct Prescribed {
  std::vector<double> t, p, lambda;
};

Prescribed wander(double t_end, int n, double amp = 0.3) {
  Prescribed h;
  for (int i = 0; i <= n; ++i) {
    const double s = t_end * i / n;
    h.t.push_back(s);
    h.p.push_back(amp * std::sin(30.0 * s));
    h.lambda.push_back(1.0 + 0.5 * std::cos(40.0 * s));
  }
  return h;
}

SolutionState prescribed_state(const Prescribed& h, QuadratureConfig q = {}, double lambda_scale = 1.0) {
  std::vector<double> l = h.lambda;
  for (double& v : l) v *= lambda_scale;
  return SolutionState::with_history(symmetric(), ModelParams{}, q, h.t, h.p, l);
}

// Linear interpolation of the prescribed history, written out independently.
std::array<double, 2> interp(const Prescribed& h, double s) {
  std::size_t i = std::upper_bound(h.t.begin(), h.t.end(), s) - h.t.begin();
  i = std::clamp<std::size_t>(i, 1, h.t.size() - 1);
  const double w = (s - h.t[i - 1]) / (h.t[i] - h.t[i - 1]);
  return {h.p[i - 1] + w * (h.p[i] - h.p[i - 1]), h.lambda[i - 1] + w * (h.lambda[i] - h.lambda[i - 1])};
}

// Source part of f at (x, t) by midpoint rule in s = sqrt(t - t').
double source_part(const Prescribed& h, double x, double t, int m = 200000) {
  const double S = std::sqrt(t);
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const double s = (k + 0.5) * S / m;
    const auto [p, l] = interp(h, t - s * s);
    const double al = std::min(0.4, 0.5 * (1 + p)), ar = std::min(0.4, 0.5 * (1 - p));
    acc += 2 * s * l * (oracle::neumann_images(x, p - al, s * s, 6) - oracle::neumann_images(x, p + ar, s * s, 6));
  }
  return acc * S / m;
}

double eigen(double x, double t) { return -std::sin(pi * x / 2) * std::exp(-pi * pi * t / 4); }

}  // namespace

TEST_CASE("eigenfunction decay with no sources") {
  const InitialData init = symmetric();
  for (double t_end : {0.01, 0.1, 1.0}) {
    Prescribed h{{0.0, t_end}, {0.0, 0.0}, {0.0, 0.0}};
    const SolutionState st = prescribed_state(h);
    for (double t : {1e-5, 3e-4, t_end / 2, t_end}) {
      for (int i = 0; i <= 40; ++i) {
        const double x = -1.0 + i / 20.0;
        // Spline interpolation of the 401-point samples limits agreement to about 1e-9.
        CHECK(std::abs(duhamel::eval_f(st, x, t) - eigen(x, t)) < 1e-8);
      }
    }
  }
}

TEST_CASE("uniform convergence to the initial data") {
  Prescribed h{{0.0, 1e-3}, {0.0, 0.0}, {0.0, 0.0}};
  const SolutionState st = prescribed_state(h);
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -1.0 + i / 200.0;
    worst = std::max(worst, std::abs(duhamel::eval_f(st, x, 1e-5) + std::sin(pi * x / 2)));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("moving sources against direct quadrature") {
  const Prescribed h = wander(0.05, 5000);
  const SolutionState st = prescribed_state(h);
  for (double t : {3e-4, 0.0013, 0.05}) {
    const double p = interp(h, t)[0];
    const auto off = rescue_clamp(p, ModelParams{});
    for (double x : {0.0, p - off.left + 3e-3, p + off.right - 0.02, 0.95, -1.0}) {
      const double ref = eigen(x, t) + source_part(h, x, t);
      INFO("t = " << t << ", x = " << x);
      CHECK(std::abs(duhamel::eval_f(st, x, t) - ref) < 1e-8);
    }
  }
}

TEST_CASE("balanced sources leave total mass unchanged") {
  Prescribed h{{0.0, 0.5}, {0.0, 0.0}, {1.0, 1.0}};
  const SolutionState st = prescribed_state(h);
  const double m0 = symmetric().M_b - symmetric().M_p;
  for (double t : {0.001, 0.05, 0.5}) {
    const auto sl = duhamel::make_slice(st, t);
    CHECK(std::abs(sl.left_mass(1.0) - m0) < 1e-10);
  }
  const SolutionState w = prescribed_state(wander(0.2, 4000));
  for (double t : {0.01, 0.2}) CHECK(std::abs(duhamel::make_slice(w, t).left_mass(1.0) - m0) < 1e-8);
}

TEST_CASE("source part is linear in the flux") {
  const Prescribed h = wander(0.02, 2000);
  const SolutionState one = prescribed_state(h), two = prescribed_state(h, {}, 2.0);
  for (double x : {-0.5, 0.1, 0.7}) {
    const double t = 0.02;
    const double s1 = duhamel::eval_f(one, x, t) - eigen(x, t);
    const double s2 = duhamel::eval_f(two, x, t) - eigen(x, t);
    CHECK(std::abs(s2 - 2.0 * s1) < 1e-9);
  }
}

TEST_CASE("first derivative matches central differences") {
  const Prescribed h = wander(0.05, 5000);
  const SolutionState st = prescribed_state(h);
  const double t = 0.05;
  const auto zones = duhamel::exclusion_zones(st, t);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  int tested = 0;
  const double dx = 1e-5;
  while (tested < 100) {
    const double x = u(rng);
    bool near = false;
    for (const auto& z : zones) near = near || (x > z.lo - 0.01 && x < z.hi + 0.01);
    if (near) continue;
    const double fd = (duhamel::eval_f(st, x + dx, t) - duhamel::eval_f(st, x - dx, t)) / (2 * dx);
    CHECK(std::abs(fd - duhamel::eval_fx(st, x, t)) < 1e-6);
    ++tested;
  }
}

TEST_CASE("derivatives refuse exclusion zones") {
  const Prescribed h = wander(0.01, 1000);
  const SolutionState st = prescribed_state(h);
  const double p = interp(h, 0.01)[0];
  const double src = p - rescue_clamp(p, ModelParams{}).left;
  CHECK_THROWS_AS(duhamel::eval_fx(st, src, 0.01), SingularEvaluation);
  CHECK_NOTHROW(duhamel::eval_f(st, src, 0.01));
  CHECK_THROWS_AS(duhamel::eval_f(st, 0.0, 0.02), OutOfRange);
}

TEST_CASE("time derivative equals the second derivative away from sources") {
  const SolutionState st = prescribed_state(wander(0.05, 5000));
  const double t = 0.04, x = 0.95;
  const double dt = 1e-6;
  const double fd = (duhamel::eval_f(st, x, t + dt) - duhamel::eval_f(st, x, t - dt)) / (2 * dt);
  CHECK(std::abs(fd - duhamel::eval_ft(st, x, t)) < 1e-4);
  CHECK(duhamel::eval_ft(st, x, t) == duhamel::eval_fxx(st, x, t));
}

TEST_CASE("snapshots") {
  const SolutionState st = prescribed_state(wander(0.05, 5000));
  const Profile a = duhamel::profile_snapshot(st, 0.03, 401);
  const Profile b = duhamel::profile_snapshot(st, 0.03, 401);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  double mass = 0.0;
  for (std::size_t i = 1; i < a.x().size(); ++i) mass += 0.5 * (a.x()[i] - a.x()[i - 1]) * (a.values()[i] + a.values()[i - 1]);
  // Trapezoid on a grid that resolves the source kinks only to O(h^2).
  CHECK(std::abs(mass - (st.initial().M_b - st.initial().M_p)) < 1e-4);
  CHECK(std::abs(a.integral() - (st.initial().M_b - st.initial().M_p)) < 1e-8);

  Prescribed quiet{{0.0, 0.2}, {0.0, 0.0}, {0.0, 0.0}};
  const Profile e = duhamel::profile_snapshot(prescribed_state(quiet), 0.2, 201);
  for (std::size_t i = 0; i < e.x().size(); ++i) CHECK(std::abs(e.values()[i] - eigen(e.x()[i], 0.2)) < 1e-8);
}

TEST_CASE("history quadrature converges under refinement") {
  // A front held still with constant flux makes the source singular at x = p - a.
  Prescribed h{{0.0, 0.01}, {0.0, 0.0}, {1.0, 1.0}};
  const double t = 0.01;
  std::vector<double> err;
  QuadratureConfig ref_q;
  ref_q.points_per_window = 64;
  const SolutionState ref = prescribed_state(h, ref_q);
  for (int pts : {8, 16}) {
    QuadratureConfig q;
    q.points_per_window = pts;
    const SolutionState st = prescribed_state(h, q);
    double e = 0.0;
    for (double x : {-0.4 + 1e-3, -0.4 + 0.05, 0.0, 0.3}) e = std::max(e, std::abs(duhamel::eval_f(st, x, t) - duhamel::eval_f(ref, x, t)));
    err.push_back(e);
  }
  MESSAGE("errors: " << err[0] << " -> " << err[1]);
  CHECK(err[0] >= 3.9 * err[1]);
}
