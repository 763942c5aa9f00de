// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pricefront/diagnostics.hpp"
#include "pricefront/duhamel.hpp"
#include "pricefront/fd_oracle.hpp"
#include "pricefront/heat_kernel.hpp"
#include "pricefront/particle_foliation.hpp"
#include "pricefront/picard.hpp"

using namespace pricefront;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void verdict(int id, const std::string& name, bool pass, const std::string& detail, double secs) {
  std::printf("criterion %2d %-28s %s  %s  [%.1f s]\n", id, name.c_str(), pass ? "PASS" : "FAIL", detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Everything one Picard run provides to the criteria.
struct PicardRun {
  SolutionState state;
  std::size_t hard_failures = 0, report_only_failures = 0, ledger_entries = 0;
  double max_mass_dev_b = 0.0, max_mass_dev_p = 0.0;
  double seconds = 0.0;
};

PicardRun picard_run(const std::string& name, double t_end) {
  const ModelParams mp;
  const InitialData init = validate_initial(builtin_samples(name, mp.grid_points), mp);
  PicardRun r{SolutionState(init, mp)};
  const auto t0 = Clock::now();
  double next_mass = 0.0;
  const double mass_every = t_end / 100.0;
  picard::SolveOptions opt;
  opt.on_window = [&](const SolutionState& s, const picard::WindowReport&) {
    const std::size_t w = s.window_log().size() - 1;
    if (w < 50 || w % 2000 == 0) {
      for (const auto& e : diagnostics::bound_suite(s, w)) {
        ++r.ledger_entries;
        if (!e.pass) ++(e.report_only ? r.report_only_failures : r.hard_failures);
      }
    }
    while (next_mass <= s.t_current()) {
      const auto m = diagnostics::mass_report(s, next_mass);
      r.max_mass_dev_b = std::max(r.max_mass_dev_b, std::abs(m.dev_b));
      r.max_mass_dev_p = std::max(r.max_mass_dev_p, std::abs(m.dev_p));
      next_mass += mass_every;
    }
  };
  picard::global_solve(r.state, t_end, opt);
  r.seconds = seconds_since(t0);
  std::printf("  picard %s to t = %g: %zu windows in %.1f s\n", name.c_str(), t_end, r.state.window_log().size(), r.seconds);
  return r;
}

struct FdRun {
  fd::FdTrajectory tr;
  double max_dev_b = 0.0;
  double min_wall_distance = 2.0;
  double seconds = 0.0;
};

FdRun fd_run(const std::string& name, int nx, double t_end) {
  const ModelParams mp;
  const InitialData init = validate_initial(builtin_samples(name, mp.grid_points), mp);
  fd::FdConfig cfg;
  cfg.nx = nx;
  cfg.record_every = 10;
  const auto t0 = Clock::now();
  FdRun r{fd::fd_solve(init, mp, cfg, t_end, {t_end})};
  r.seconds = seconds_since(t0);
  for (std::size_t i = 0; i < r.tr.t.size(); ++i) {
    r.max_dev_b = std::max(r.max_dev_b, std::abs(r.tr.M_b[i] - r.tr.M_b[0]));
    r.min_wall_distance = std::min(r.min_wall_distance, 1.0 - std::abs(r.tr.p[i]));
  }
  std::printf("  fd %s nx = %d to t = %g in %.1f s\n", name.c_str(), nx, t_end, r.seconds);
  return r;
}

void kernel_suite() {
  const auto t0 = Clock::now();
  using namespace kernel;
  double mass = 0.0, sym = 0.0, wall = 0.0, cross = 0.0;
  for (double t : {1e-4, 1e-2, 0.3, 2.0, 10.0}) {
    for (int j = 0; j <= 20; ++j) {
      const double y = -1.0 + 0.1 * j;
      const auto g = [&](double x) { return green_neumann(x, y, t); };
      double m = 0.0;
      if (y > -1.0) m += oracle::simpson(g, -1.0, y, 20000);
      if (y < 1.0) m += oracle::simpson(g, y, 1.0, 20000);
      mass = std::max(mass, std::abs(m - 1.0));
      for (double x : {-0.8, -0.1, 0.45}) sym = std::max(sym, std::abs(green_neumann(x, y, t) - green_neumann(y, x, t)) / green_neumann(x, y, t));
      wall = std::max({wall, std::abs(green_neumann_dx(1.0, y, t)), std::abs(green_neumann_dx(-1.0, y, t))});
    }
  }
  for (double t : {0.4, 0.5, 0.6}) {
    for (double x : {-0.9, 0.0, 0.7}) {
      for (double y : {-0.3, 0.5}) {
        const auto a = green_neumann_images(x, y, t), b = green_neumann_spectral(x, y, t);
        cross = std::max({cross, std::abs(a.value - b.value), std::abs(a.dx - b.dx), std::abs(a.dxx - b.dxx)});
      }
    }
  }
  const double x = 0.15, y = -0.4, s = 0.02, t = 0.03;
  const double semi = std::abs(oracle::simpson([&](double z) { return green_neumann(x, z, s) * green_neumann(z, y, t); }, -1.0, 1.0, 8000) -
                               green_neumann(x, y, s + t));
  const bool pass = mass <= 1e-10 && sym <= 1e-12 && wall <= 1e-10 && cross <= 1e-9 && semi <= 1e-8;
  verdict(1, "kernel suite", pass,
          fmt("mass %.1e<=1e-10 sym %.1e<=1e-12 wall %.1e<=1e-10 crossover %.1e<=1e-9 semigroup %.1e<=1e-8", mass, sym, wall, cross, semi),
          seconds_since(t0));
}

void eigen_decay() {
  const auto t0 = Clock::now();
  const double pi = std::numbers::pi;
  const ModelParams mp;
  const InitialData init = validate_initial(builtin_samples("symmetric", mp.grid_points), mp);
  double err = 0.0;
  for (double t : {0.01, 0.1, 1.0}) {
    const std::vector<double> ts{0.0, t}, ps{0.0, 0.0}, ls{0.0, 0.0};
    const SolutionState st = SolutionState::with_history(init, mp, {}, ts, ps, ls);
    for (int i = 0; i <= 200; ++i) {
      const double x = -1.0 + i / 100.0;
      err = std::max(err, std::abs(duhamel::eval_f(st, x, t) + std::sin(pi * x / 2) * std::exp(-pi * pi * t / 4)));
    }
  }
  verdict(2, "eigenfunction decay", err <= 1e-8, fmt("max error %.2e <= 1e-8", err), seconds_since(t0));
}

void contraction_first_window() {
  const auto t0 = Clock::now();
  std::string detail;
  bool pass = true;
  for (const char* name : {"symmetric", "skewed"}) {
    const ModelParams mp;
    const InitialData init = validate_initial(builtin_samples(name, mp.grid_points), mp);
    SolutionState st(init, mp);
    const auto plan = picard::plan_window(init, mp);
    const auto rep = picard::solve_window(st, plan);
    pass = pass && rep.record.contraction_ratio <= 0.6;
    detail += fmt("%s ratio %.2e (predicted %.2f, t0 %.3e, %d iters) ", name, rep.record.contraction_ratio,
                  plan.predicted_contraction, plan.t0, rep.record.iterations);
  }
  verdict(3, "contraction, first window", pass, detail + "<= 0.6", seconds_since(t0));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  kernel_suite();
  eigen_decay();
  contraction_first_window();

  PicardRun sym = picard_run("symmetric", 0.2);
  {
    const auto tr = diagnostics::track_report(sym.state, 0, 50);
    verdict(4, "flux floor, 50 windows", tr.windows == 50 && tr.flux_floor_violations == 0,
            fmt("%zu violations in %zu windows, min lambda_end/lambda_start %.6f >= 0.2375", tr.flux_floor_violations,
                tr.windows, tr.min_flux_ratio),
            0.0);
    const auto all = diagnostics::track_report(sym.state);
    verdict(5, "front track bound", tr.windows == 50 && tr.holder_violations == 0,
            fmt("%zu violations in %zu windows (worst ratio %.2e); whole run %zu in %zu windows", tr.holder_violations,
                tr.windows, tr.worst_holder_ratio, all.holder_violations, all.windows),
            0.0);
  }
  FdRun fd_sym = fd_run("symmetric", 2001, 0.2);
  {
    double pmax = 0.0, fmax = 0.0;
    for (double p : sym.state.positions()) pmax = std::max(pmax, std::abs(p));
    for (double p : fd_sym.tr.p) fmax = std::max(fmax, std::abs(p));
    verdict(6, "symmetry preservation", pmax < 1e-6 && fmax < fd_sym.tr.h,
            fmt("picard max|p| %.2e < 1e-6, fd max|p| %.2e < h = %.0e", pmax, fmax, fd_sym.tr.h),
            sym.seconds + fd_sym.seconds);
  }

  PicardRun skew = picard_run("skewed", 0.1);
  FdRun fd_skew = fd_run("skewed", 2001, 0.1);
  {
    const auto t0 = Clock::now();
    const double t = 0.1;
    const duhamel::Slice slice = duhamel::make_slice(skew.state, t);
    const auto zones = duhamel::exclusion_zones(skew.state, t);
    const auto& f = fd_skew.tr.snapshots.back().f;
    double fdiff = 0.0;
    for (std::size_t i = 0; i < fd_skew.tr.x.size(); ++i) {
      const double x = fd_skew.tr.x[i];
      bool excluded = false;
      for (const auto& z : zones) excluded = excluded || (x >= z.lo && x <= z.hi);
      if (!excluded) fdiff = std::max(fdiff, std::abs(slice.eval(x, 0).f - f[i]));
    }
    double pdiff = 0.0;
    for (std::size_t i = 0; i < fd_skew.tr.t.size(); ++i) pdiff = std::max(pdiff, std::abs(skew.state.p_at(fd_skew.tr.t[i]) - fd_skew.tr.p[i]));
    verdict(7, "oracle equivalence", fdiff <= 1e-3 && pdiff <= 1e-4,
            fmt("|f_picard - f_fd| %.2e <= 1e-3, max |p diff| %.2e <= 1e-4", fdiff, pdiff),
            skew.seconds + fd_skew.seconds + seconds_since(t0));
  }

  FdRun fd_coarse = fd_run("skewed", 501, 0.1);
  FdRun fd_mid = fd_run("skewed", 1001, 0.1);
  {
    const double mb_sym = sym.state.initial().M_b, mb_skew = skew.state.initial().M_b;
    const double rel = std::max(sym.max_mass_dev_b / mb_sym, skew.max_mass_dev_b / mb_skew);
    const double d0 = fd_coarse.max_dev_b, d1 = fd_mid.max_dev_b, d2 = fd_skew.max_dev_b;
    const double h0 = fd_coarse.tr.h, h1 = fd_mid.tr.h, h2 = fd_skew.tr.h;
    const bool fd_ok = d0 <= h0 && d1 <= h1 && d2 <= h2 && d1 <= 0.55 * d0 && d2 <= 0.55 * d1;
    verdict(8, "conservation", rel <= 1e-6 && fd_ok,
            fmt("picard max|dM_b|/M_b %.2e <= 1e-6; fd drift %.2e, %.2e, %.2e for h = %.0e, %.0e, %.0e (<= h, ratios %.2f, %.2f >= 1.8)",
                rel, d0, d1, d2, h0, h1, h2, d0 / d1, d1 / d2),
            fd_coarse.seconds + fd_mid.seconds);
  }

  {
    const auto t0 = Clock::now();
    particles::ParticleEnsemble e = particles::init_from_initial(skew.state.initial(), 100000, 7);
    particles::run_along(e, skew.state, 0.1, 5e-5);
    const auto r = particles::foliation_report(e, skew.state, 50);
    verdict(9, "foliation identities", r.ase_gap <= 3.0 * r.weighted_std_error && r.bse_l1 <= 0.05 * r.M_p,
            fmt("|sum n M(n) - int lambda| %.2e <= 3 SE = %.2e; binned L1 %.2e <= 0.05 M_p = %.2e", r.ase_gap,
                3.0 * r.weighted_std_error, r.bse_l1, 0.05 * r.M_p),
            seconds_since(t0));
  }

  {
    const auto t0 = Clock::now();
    FdRun fd_sym_mid = fd_run("symmetric", 1001, 0.2);
    const auto s_sym = diagnostics::stayaway_report(sym.state);
    const auto s_skew = diagnostics::stayaway_report(skew.state);
    const auto stable = [](std::vector<double> v) {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return *lo > 0.0 && (*hi - *lo) <= 0.1 * *lo;
    };
    const std::vector<double> sym_d{s_sym.min_distance, fd_sym_mid.min_wall_distance, fd_sym.min_wall_distance};
    const std::vector<double> skew_d{s_skew.min_distance, fd_coarse.min_wall_distance, fd_mid.min_wall_distance, fd_skew.min_wall_distance};
    verdict(10, "stay-away", stable(sym_d) && stable(skew_d) && s_sym.consistent && s_skew.consistent,
            fmt("symmetric eps %.6f (fd %.6f, %.6f); skewed eps %.6f (fd %.6f, %.6f, %.6f); within 10%%", sym_d[0], sym_d[1],
                sym_d[2], skew_d[0], skew_d[1], skew_d[2], skew_d[3]),
            seconds_since(t0));
  }

  verdict(11, "bound suite", sym.hard_failures + skew.hard_failures == 0,
          fmt("hard failures %zu + %zu = 0 over %zu entries; report-only failures %zu", sym.hard_failures,
              skew.hard_failures, sym.ledger_entries + skew.ledger_entries,
              sym.report_only_failures + skew.report_only_failures),
          0.0);

  std::printf("acceptance: %d failing criteria, %.1f s total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
