#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pricefront/cli.hpp"
#include "pricefront/diagnostics.hpp"
#include "pricefront/duhamel.hpp"
#include "pricefront/particle_foliation.hpp"

#ifndef PRICEFRONT_VERSION
#define PRICEFRONT_VERSION "unknown"
#endif

namespace pricefront::cli {

namespace fs = std::filesystem;

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  return out;
}

void write_profile(const fs::path& p, std::span<const double> x, std::span<const double> f) {
  std::ofstream out = open_out(p);
  out << "x,f\n";
  for (std::size_t i = 0; i < x.size(); ++i) out << num(x[i]) << ',' << num(f[i]) << '\n';
}

const char* kTrajectoryHeader = "t,p,lambda,M_b,M_p,cumulative_flux\n";

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;
  nlohmann::json profiles = nlohmann::json::array();

  fs::path add(const std::string& name) {
    if (std::find(files.begin(), files.end(), name) == files.end()) files.push_back(name);
    return dir / name;
  }
};

std::vector<double> snapshot_schedule(const Scenario& sc) {
  std::vector<double> s;
  for (double t : sc.snapshot_times) {
    if (t <= sc.t_end) s.push_back(t);
  }
  s.push_back(sc.t_end);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

struct PicardOutcome {
  int status = kExitOk;
  std::optional<SolutionState> state;
};

PicardOutcome run_picard(const Scenario& sc, const InitialData& init, Outputs& out, std::ostream& diag,
                         std::ostream& log) {
  PicardOutcome res;
  res.state.emplace(init, sc.model, sc.quadrature);
  SolutionState& st = *res.state;
  const double interval = sc.output_interval > 0.0 ? sc.output_interval : sc.t_end / 200.0;
  const std::vector<double> snaps = snapshot_schedule(sc);
  std::ofstream traj = open_out(out.add("picard_trajectory.csv"));
  traj << kTrajectoryHeader;
  long row = 0;
  double last_row_t = -1.0;
  std::size_t next_snap = 0;
  std::size_t hard_failures = 0, report_only_failures = 0;

  auto write_row = [&](double t) {
    const diagnostics::MassReport m = diagnostics::mass_report(st, t);
    traj << num(t) << ',' << num(st.p_at(t)) << ',' << num(st.lambda_at(t)) << ',' << num(m.M_b) << ','
         << num(m.M_p) << ',' << num(st.cumulative_flux_at(t)) << '\n';
    diagnostics::write_jsonl(diag, m);
    last_row_t = t;
  };
  auto catch_up = [&](double t_now) {
    while (interval > 0.0 && static_cast<double>(row) * interval <= t_now) {
      write_row(static_cast<double>(row) * interval);
      ++row;
    }
    while (next_snap < snaps.size() && snaps[next_snap] <= t_now) {
      const double t = snaps[next_snap];
      const Profile prof = duhamel::profile_snapshot(st, t, sc.model.grid_points);
      const std::string name = "picard_profile_" + std::to_string(next_snap) + ".csv";
      write_profile(out.add(name), prof.x(), prof.values());
      out.profiles.push_back({{"solver", "picard"}, {"t", t}, {"file", name}});
      if (t == sc.t_end) {
        write_profile(out.add("picard_profile_final.csv"), prof.x(), prof.values());
      }
      ++next_snap;
    }
  };
  catch_up(0.0);

  picard::SolveOptions opt;
  opt.thresholds = sc.thresholds;
  opt.norm_cadence = sc.norm_cadence;
  opt.on_window = [&](const SolutionState& s, const picard::WindowReport&) {
    const std::size_t wi = s.window_log().size() - 1;
    const bool sample = wi < static_cast<std::size_t>(sc.bound_suite_first) ||
                        (sc.bound_suite_every > 0 && wi % static_cast<std::size_t>(sc.bound_suite_every) == 0);
    if (sample) {
      for (const auto& e : diagnostics::bound_suite(s, wi, sc.bound_suite_samples)) {
        diagnostics::write_jsonl(diag, e);
        if (!e.pass) ++(e.report_only ? report_only_failures : hard_failures);
      }
    }
    catch_up(s.t_current());
  };
  try {
    picard::global_solve(st, sc.t_end, opt);
  } catch (const BlowupDetected& e) {
    log << "blow-up detected (" << to_string(e.criterion()) << "): " << e.what() << '\n';
    const auto& pn = e.panel();
    nlohmann::json j = {{"criterion", to_string(e.criterion())}, {"message", e.what()}, {"t", pn.t},
                        {"norm_inf", pn.norm_inf}, {"lambda", pn.lambda}, {"fxx_at_p", pn.fxx_at_p},
                        {"thresholds",
                         {{"norm_inf", sc.thresholds.norm_factor * init.norm_inf},
                          {"lambda", sc.thresholds.flux_factor * init.lambda_I},
                          {"fxx_at_p", sc.thresholds.curvature_max}}}};
    open_out(out.add("blowup_panel.json")) << j.dump(2) << '\n';
    res.status = kExitBlowup;
  } catch (const Error& e) {
    log << "picard solve failed at t = " << st.t_current() << ": " << e.what() << '\n';
    res.status = kExitSolverFailure;
  }
  if (last_row_t < st.t_current()) write_row(st.t_current());

  const auto stay = diagnostics::stayaway_report(st);
  diag << nlohmann::json({{"monitor", "stayaway"},
                          {"min_distance", stay.min_distance},
                          {"t_at_min", stay.t_at_min},
                          {"rescue_activations", stay.rescue_activations},
                          {"consistent", stay.consistent}})
              .dump()
       << '\n';
  const auto track = diagnostics::track_report(st);
  diag << nlohmann::json({{"monitor", "window_track"},
                          {"windows", track.windows},
                          {"holder_violations", track.holder_violations},
                          {"worst_holder_ratio", track.worst_holder_ratio},
                          {"flux_floor_violations", track.flux_floor_violations},
                          {"min_flux_ratio", track.min_flux_ratio}})
              .dump()
       << '\n';
  if (res.status != kExitBlowup) {
    diagnostics::write_jsonl(diag, diagnostics::blowup_panel(st, st.t_current(), sc.thresholds));
  }
  diag << nlohmann::json({{"monitor", "bound_suite_summary"},
                          {"hard_failures", hard_failures},
                          {"report_only_failures", report_only_failures}})
              .dump()
       << '\n';
  log << "picard: " << st.window_log().size() << " windows to t = " << st.t_current() << ", p = " << st.positions().back()
      << ", lambda = " << st.fluxes().back() << '\n';
  return res;
}

int run_fd(const Scenario& sc, const InitialData& init, Outputs& out, std::ostream& log) {
  const std::vector<double> snaps = snapshot_schedule(sc);
  fd::FdTrajectory tr;
  try {
    tr = fd::fd_solve(init, sc.model, sc.fd, sc.t_end, snaps);
  } catch (const Error& e) {
    log << "fd solve failed: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  const double interval = sc.output_interval > 0.0 ? sc.output_interval : sc.t_end / 200.0;
  std::ofstream traj = open_out(out.add("fd_trajectory.csv"));
  traj << kTrajectoryHeader;
  double next = 0.0;
  long row = 0;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    const bool last = i + 1 == tr.t.size();
    if (tr.t[i] + 0.5 * tr.dt >= next || last) {
      traj << num(tr.t[i]) << ',' << num(tr.p[i]) << ',' << num(tr.lambda[i]) << ',' << num(tr.M_b[i]) << ','
           << num(tr.M_p[i]) << ',' << num(tr.cumulative_flux[i]) << '\n';
      ++row;
      next = interval > 0.0 ? static_cast<double>(row) * interval : 1e300;
      while (interval > 0.0 && next <= tr.t[i]) next = static_cast<double>(++row) * interval;
    }
  }
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    const std::string name = "fd_profile_" + std::to_string(k) + ".csv";
    write_profile(out.add(name), tr.x, tr.snapshots[k].f);
    out.profiles.push_back({{"solver", "fd"}, {"t", tr.snapshots[k].t}, {"file", name}});
  }
  if (!tr.snapshots.empty()) write_profile(out.add("fd_profile_final.csv"), tr.x, tr.snapshots.back().f);
  log << "fd: " << tr.t.size() - 1 << " steps, p = " << tr.p.back() << ", lambda = " << tr.lambda.back() << '\n';
  return kExitOk;
}

void run_particles(const Scenario& sc, const InitialData& init, const SolutionState& st, Outputs& out,
                   std::ostream& diag, std::ostream& log) {
  particles::ParticleEnsemble ens = particles::init_from_initial(init, sc.particles, sc.seed);
  particles::run_along(ens, st, st.t_current(), sc.particle_dt);
  const auto r = particles::foliation_report(ens, st, sc.bins);
  diag << nlohmann::json({{"monitor", "foliation"},
                          {"t", r.t},
                          {"level_mass", r.level_mass},
                          {"total_mass", r.total_mass},
                          {"weighted_level_mass", r.weighted_level_mass},
                          {"cumulative_flux", r.cumulative_flux},
                          {"weighted_std_error", r.weighted_std_error},
                          {"ase_gap", r.ase_gap},
                          {"bse_l1", r.bse_l1},
                          {"M_p", r.M_p},
                          {"tail_log_slope", r.tail_log_slope}})
              .dump()
       << '\n';
  std::ofstream tx = open_out(out.add("transactions.csv"));
  particles::write_transactions_csv(tx, ens);
  log << "particles: sum n M(n) = " << r.weighted_level_mass << ", flux integral = " << r.cumulative_flux
      << ", standard error = " << r.weighted_std_error << '\n';
}

}  // namespace

int run(const std::filesystem::path& scenario_path, std::ostream& log) {
  Scenario sc;
  try {
    sc = load_scenario(scenario_path);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  return run(sc, log);
}

int run(const Scenario& sc, std::ostream& log) {
  InitialData init;
  try {
    init = load_initial(sc);
  } catch (const InvalidInitialData& e) {
    log << "invalid initial data (" << to_string(e.reason()) << "): " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  Outputs out;
  out.dir = resolve_output_dir(sc);
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec) {
    log << "configuration error: cannot create output directory '" << out.dir.string() << "': " << ec.message() << '\n';
    return kExitConfig;
  }
  int status = kExitOk;
  try {
    std::ofstream diag = open_out(out.add("diagnostics.jsonl"));
    std::optional<SolutionState> state;
    if (sc.wants("picard")) {
      PicardOutcome po = run_picard(sc, init, out, diag, log);
      status = po.status;
      state = std::move(po.state);
    }
    if (sc.wants("fd") && status == kExitOk) status = std::max(status, run_fd(sc, init, out, log));
    if (sc.wants("particles") && status == kExitOk && state) run_particles(sc, init, *state, out, diag, log);

    nlohmann::json manifest = {{"scenario", sc.name},
                               {"config_hash", config_hash(sc)},
                               {"version", PRICEFRONT_VERSION},
                               {"compiler", __VERSION__},
                               {"solvers", sc.solvers},
                               {"t_end", sc.t_end},
                               {"exit_status", status},
                               {"p_I", init.p_I},
                               {"lambda_I", init.lambda_I},
                               {"M_b", init.M_b},
                               {"M_p", init.M_p},
                               {"profiles", out.profiles}};
    out.add("manifest.json");
    manifest["files"] = out.files;
    open_out(out.dir / "manifest.json") << manifest.dump(2) << '\n';
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  log << "outputs in " << out.dir.string() << '\n';
  return status;
}

int validate(const std::filesystem::path& scenario_path, std::ostream& log) {
  try {
    const Scenario sc = load_scenario(scenario_path);
    const InitialData init = load_initial(sc);
    const picard::WindowPlan plan = picard::plan_window(init, sc.model);
    log << "scenario " << sc.name << " is valid\n"
        << "  p_I = " << num(init.p_I) << ", lambda_I = " << num(init.lambda_I) << '\n'
        << "  M_b = " << num(init.M_b) << ", M_p = " << num(init.M_p) << ", sup |f_I| = " << num(init.norm_inf)
        << '\n'
        << "  G(a) = " << num(plan.gamma_bound) << ", first window t0 = " << num(plan.t0) << '\n';
    return kExitOk;
  } catch (const InvalidInitialData& e) {
    log << "invalid initial data (" << to_string(e.reason()) << "): " << e.what() << '\n';
  } catch (const Error& e) {
    log << "configuration error: " << e.what() << '\n';
  }
  return kExitConfig;
}

namespace {

struct Series {
  std::vector<double> t, p, lambda;
};

Series read_trajectory(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read '" + file.string() + "'");
  std::string line;
  std::getline(in, line);
  Series s;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() < 3) throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": too few columns");
    s.t.push_back(v[0]);
    s.p.push_back(v[1]);
    s.lambda.push_back(v[2]);
  }
  if (s.t.empty()) throw ConfigError(file.string() + ": no rows");
  return s;
}

std::pair<std::vector<double>, std::vector<double>> read_profile(const fs::path& file) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  std::vector<double> x, f;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = line.find(',');
    x.push_back(std::stod(line.substr(0, c)));
    f.push_back(std::stod(line.substr(c + 1)));
  }
  return {x, f};
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.size() == 1) return ys[0];
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  i = std::clamp<std::size_t>(i, 1, xs.size() - 1);
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

std::string pick_solver(const fs::path& dir, const std::string& requested) {
  if (!requested.empty()) return requested;
  if (fs::exists(dir / "picard_trajectory.csv")) return "picard";
  if (fs::exists(dir / "fd_trajectory.csv")) return "fd";
  throw ConfigError("no trajectory file in '" + dir.string() + "'");
}

// L-infinity and trapezoid L1 norms of a - b on the union grid.
std::pair<double, double> diff_norms(const std::vector<double>& grid, const std::vector<double>& xa,
                                     const std::vector<double>& ya, const std::vector<double>& xb,
                                     const std::vector<double>& yb) {
  double linf = 0.0, l1 = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = std::abs(interp(xa, ya, grid[i]) - interp(xb, yb, grid[i]));
    linf = std::max(linf, d);
    if (i > 0) l1 += 0.5 * (grid[i] - grid[i - 1]) * (d + prev);
    prev = d;
  }
  return {linf, l1};
}

std::vector<double> union_grid(const std::vector<double>& a, const std::vector<double>& b, double lo, double hi) {
  std::vector<double> g;
  for (double v : a) {
    if (v >= lo && v <= hi) g.push_back(v);
  }
  for (double v : b) {
    if (v >= lo && v <= hi) g.push_back(v);
  }
  g.push_back(lo);
  g.push_back(hi);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace

CompareReport compare_dirs(const fs::path& a, const fs::path& b, const std::string& solver_a,
                           const std::string& solver_b) {
  CompareReport r;
  const std::string sa = pick_solver(a, solver_a), sb = pick_solver(b, solver_b);
  r.trajectory_a = (a / (sa + "_trajectory.csv")).string();
  r.trajectory_b = (b / (sb + "_trajectory.csv")).string();
  const Series A = read_trajectory(r.trajectory_a);
  const Series B = read_trajectory(r.trajectory_b);
  r.t_lo = std::max(A.t.front(), B.t.front());
  r.t_hi = std::min(A.t.back(), B.t.back());
  if (r.t_hi < r.t_lo) throw DomainError("trajectories cover disjoint time ranges");
  const std::vector<double> grid = union_grid(A.t, B.t, r.t_lo, r.t_hi);
  std::tie(r.p_linf, r.p_l1) = diff_norms(grid, A.t, A.p, B.t, B.p);
  std::tie(r.lambda_linf, r.lambda_l1) = diff_norms(grid, A.t, A.lambda, B.t, B.lambda);
  const fs::path pa = a / (sa + "_profile_final.csv"), pb = b / (sb + "_profile_final.csv");
  if (fs::exists(pa) && fs::exists(pb)) {
    const auto [xa, fa] = read_profile(pa);
    const auto [xb, fb] = read_profile(pb);
    const double lo = std::max(xa.front(), xb.front()), hi = std::min(xa.back(), xb.back());
    const std::vector<double> xg = union_grid(xa, xb, lo, hi);
    std::tie(r.profile_linf, r.profile_l1) = diff_norms(xg, xa, fa, xb, fb);
    r.profiles_compared = true;
  }
  return r;
}

int compare(const fs::path& a, const fs::path& b, const std::string& solver_a, const std::string& solver_b,
            std::ostream& out, std::ostream& log) {
  try {
    const CompareReport r = compare_dirs(a, b, solver_a, solver_b);
    nlohmann::json j = {{"trajectory_a", r.trajectory_a},
                        {"trajectory_b", r.trajectory_b},
                        {"t_range", {r.t_lo, r.t_hi}},
                        {"p_linf", r.p_linf},
                        {"p_l1", r.p_l1},
                        {"lambda_linf", r.lambda_linf},
                        {"lambda_l1", r.lambda_l1}};
    if (r.profiles_compared) {
      j["profile_linf"] = r.profile_linf;
      j["profile_l1"] = r.profile_l1;
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    log << "compare failed: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace pricefront::cli
