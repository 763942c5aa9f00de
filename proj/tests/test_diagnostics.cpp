#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "pricefront/diagnostics.hpp"
#include "pricefront/fd_oracle.hpp"
#include "pricefront/picard.hpp"

using namespace pricefront;
using namespace pricefront::diagnostics;

namespace {

InitialData data(const std::string& name) { return validate_initial(builtin_samples(name, 401), ModelParams{}); }

}  // namespace

TEST_CASE("mass at t = 0 and leakage with sources off") {
  const InitialData init = data("skewed");
  const ModelParams mp;
  SolutionState st(init, mp);
  const MassReport m0 = mass_report(st, 0.0);
  CHECK(m0.dev_b == 0.0);
  CHECK(m0.dev_p == 0.0);

  const double T = 0.05;
  const std::vector<double> t{0.0, T}, p{init.p_I, init.p_I}, l{0.0, 0.0};
  const SolutionState quiet = SolutionState::with_history(init, mp, {}, t, p, l);
  const MassReport m = mass_report(quiet, T);
  fd::FdGrid g = fd::make_grid(init, 2001);
  const double fd_mb0 = fd::one_sided_masses(g, init.p_I).first;
  for (int s = 0; s < 1000; ++s) fd::fd_step(g, init.p_I, 0.0, T / 1000, s == 0 ? 1.0 : 0.5, mp);
  const double fd_leak = fd::one_sided_masses(g, init.p_I).first - fd_mb0;
  MESSAGE("leakage " << m.dev_b << " vs oracle " << fd_leak);
  CHECK(std::abs(m.dev_b) > 1e-3);
  CHECK(std::abs(m.dev_b - fd_leak) < 1e-4);
}

TEST_CASE("conservation along a solver run") {
  const SolutionState st = picard::global_solve(data("skewed"), ModelParams{}, {}, 5e-3);
  for (double t : {1e-3, 3e-3, 5e-3}) {
    const MassReport m = mass_report(st, t);
    CHECK(std::abs(m.dev_b) <= 1e-6 * st.initial().M_b);
    CHECK(std::abs(m.dev_p) <= 1e-6 * st.initial().M_p);
  }
}

TEST_CASE("flux integral") {
  const ModelParams mp;
  const SolutionState empty(data("symmetric"), mp);
  CHECK(flux_integral(empty, 0.0) == 0.0);
  const std::vector<double> t{0.0, 0.01, 0.03, 0.1}, p(4, 0.0), l(4, 2.5);
  const SolutionState c = SolutionState::with_history(data("symmetric"), mp, {}, t, p, l);
  CHECK(flux_integral(c, 0.1) == 2.5 * 0.1);
  CHECK(flux_integral(c, 0.02) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("stay-away") {
  const SolutionState sym = picard::global_solve(data("symmetric"), ModelParams{}, {}, 1e-3);
  const StayawayReport r = stayaway_report(sym);
  CHECK(std::abs(r.min_distance - 1.0) < 1e-8);
  CHECK(r.rescue_activations == 0);
  CHECK(r.consistent);

  const ModelParams mp;
  const std::vector<double> t{0.0, 0.1}, p{0.0, 0.5}, l{1.0, 1.0};
  const SolutionState near = SolutionState::with_history(data("symmetric"), mp, {}, t, p, l);
  const StayawayReport n = stayaway_report(near);
  CHECK(n.min_distance == doctest::Approx(0.5));
  CHECK(n.rescue_activations == 1);
  CHECK(n.consistent);
}

TEST_CASE("blow-up panel") {
  const InitialData init = data("symmetric");
  SolutionState st(init, ModelParams{});
  const BlowupPanel b0 = blowup_panel(st, 0.0);
  CHECK(b0.norm_inf == init.norm_inf);
  CHECK(b0.lambda == init.lambda_I);
  CHECK(b0.fxx_at_p < 1e-9);
  CHECK_FALSE(b0.norm_flag);
  CHECK_FALSE(b0.flux_flag);
  CHECK_FALSE(b0.curvature_flag);
  picard::global_solve(st, 4e-3);
  double prev = b0.norm_inf;
  for (double t : {1e-3, 2e-3, 4e-3}) {
    const BlowupPanel b = blowup_panel(st, t);
    CHECK(b.norm_inf <= prev + 1e-12);
    CHECK(b.lambda >= init.lambda_I / 4);
    prev = b.norm_inf;
  }
  picard::BlowupThresholds tight;
  tight.flux_factor = 2.0;
  CHECK(blowup_panel(st, 4e-3, tight).flux_flag);
}

TEST_CASE("bound suite and track report") {
  const SolutionState st = picard::global_solve(data("skewed"), ModelParams{}, {}, 1e-4);
  REQUIRE(st.window_log().size() >= 3);
  for (std::size_t w = 0; w < 3; ++w) {
    const auto ledger = bound_suite(st, w);
    CHECK(ledger.size() == 5 * 6);
    for (const auto& e : ledger) {
      INFO(e.monitor << " at t = " << e.t << ": " << e.value << " vs " << e.bound);
      if (!e.report_only) CHECK(e.pass);
      std::ostringstream line;
      write_jsonl(line, e);
      const auto j = nlohmann::json::parse(line.str());
      CHECK(j["monitor"] == e.monitor);
    }
  }
  const TrackReport tr = track_report(st);
  CHECK(tr.windows == st.window_log().size());
  CHECK(tr.holder_violations == 0);
  CHECK(tr.flux_floor_violations == 0);
  CHECK(tr.worst_holder_ratio <= 1.0);
}
