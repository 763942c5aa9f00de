#include "pricefront/picard.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "pricefront/errors.hpp"
#include "pricefront/heat_kernel.hpp"

namespace pricefront::picard {

namespace {

using duhamel::TrajectoryNode;

// Differences below this are treated as rounding noise when forming contraction ratios.
constexpr double kNoiseFloor = 1e-14;

struct Zero {
  double p = 0.0;
  double lambda = 0.0;
  double fxx = 0.0;
};

// Zero of f (positive on the left) near `guess`, searched inside [lo, hi]: widen a bracket
// around the guess until the sign changes, then Newton safeguarded by bisection.
Zero zero_near(const duhamel::Slice& slice, double guess, double lo, double hi) {
  double a = 0.0, b = 0.0;
  double delta = 1e-7;
  for (;;) {
    a = std::max(lo, guess - delta);
    b = std::min(hi, guess + delta);
    if (slice.eval(a, 0).f > 0.0 && slice.eval(b, 0).f < 0.0) break;
    if (a == lo && b == hi) throw IterationDiverged("no sign change of f in the iteration neighbourhood");
    delta *= 16.0;
  }
  double x = std::clamp(guess, a, b);
  for (int it = 0; it < 100; ++it) {
    const duhamel::Values v = slice.eval(x, 2);
    if (v.f == 0.0) return {x, -v.fx, v.fxx};
    if (v.f > 0.0) a = x;
    else b = x;
    double xn = x - v.f / v.fx;
    if (!(v.fx < 0.0) || !(xn > a && xn < b)) xn = 0.5 * (a + b);
    const double step = xn - x;
    if (std::abs(step) <= 1e-14 || b - a <= 1e-15) return {xn, -(v.fx + v.fxx * step), v.fxx};
    x = xn;
  }
  throw IterationDiverged("root finder did not converge");
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

double gamma_bound(double a) {
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(a);
  if (it == cache.end()) it = cache.emplace(a, kernel::lemma_gamma_bound(a).value).first;
  return it->second;
}

namespace {

WindowPlan plan_from(double t_start, double p, double lambda, double norm_inf, const ModelParams& params) {
  if (!(lambda > 0.0)) {
    throw BlowupDetected(BlowupDetected::Criterion::flux, {t_start, norm_inf, lambda, 0.0},
                         "flux degenerate at t = " + std::to_string(t_start));
  }
  WindowPlan w;
  w.t_start = t_start;
  w.p_center = p;
  w.lambda_start = lambda;
  w.norm_start = norm_inf;
  w.a0_n = params.a0;
  w.gamma_bound = gamma_bound(params.a);
  const double g = w.gamma_bound;
  const double r = 8.0 * norm_inf / lambda;
  w.sqrt_zero_track = 0.5 * params.a0 / r;
  w.sqrt_contraction = 1.0 / (g * (1.0 + r));
  w.sqrt_derivative = 1.0 / (2.0 * std::sqrt(g));
  w.sqrt_slope_floor = lambda / (16.0 * g * norm_inf);
  const double s = params.window_safety_factor *
                   std::min({w.sqrt_zero_track, w.sqrt_contraction, w.sqrt_derivative});
  w.t0 = s * s;
  w.predicted_contraction = g * (1.0 + r) * s;
  return w;
}

}  // namespace

WindowPlan plan_window(const InitialData& initial, const ModelParams& params) {
  return plan_from(0.0, initial.p_I, initial.lambda_I, initial.norm_inf, params);
}

WindowPlan plan_window(const SolutionState& state, double norm_inf) {
  return plan_from(state.t_current(), state.positions().back(), state.fluxes().back(), norm_inf,
                   state.params());
}

WindowContext make_context(const SolutionState& state, const WindowPlan& plan, int x_samples) {
  if (!(plan.t0 > 0.0)) throw DomainError("window length must be positive");
  if (plan.t_start != state.t_current()) throw DomainError("window must start at the current time");
  if (x_samples < 2) throw DomainError("need at least two sample points of X");
  WindowContext ctx;
  ctx.state = &state;
  ctx.plan = plan;
  const int n = state.quadrature().nodes_per_window;
  for (int j = 1; j <= n; ++j) {
    ctx.node_times.push_back(j == n ? plan.t_start + plan.t0 : plan.t_start + plan.t0 * j / n);
  }
  for (double t : ctx.node_times) ctx.bases.push_back(duhamel::build_base(state, t));
  const double lo = std::max(-1.0, plan.p_center - plan.a0_n);
  const double hi = std::min(1.0, plan.p_center + plan.a0_n);
  for (int i = 0; i < x_samples; ++i) ctx.x_grid.push_back(lo + (hi - lo) * i / (x_samples - 1));
  return ctx;
}

std::vector<TrajectoryNode> seed_candidate(const WindowContext& ctx) {
  std::vector<TrajectoryNode> c;
  for (double t : ctx.node_times) c.push_back({t, ctx.plan.p_center, ctx.plan.lambda_start});
  return c;
}

PhiResult apply_phi(const WindowContext& ctx, std::span<const TrajectoryNode> candidate) {
  const std::size_t n = ctx.node_times.size();
  if (candidate.size() != n) throw DomainError("candidate must have one node per window node");
  const WindowPlan& plan = ctx.plan;
  const double skip = ctx.state->quadrature().skip_tol;
  const double lo = std::max(-1.0, plan.p_center - plan.a0_n);
  const double hi = std::min(1.0, plan.p_center + plan.a0_n);
  PhiResult res;
  res.nodes.reserve(n);
  res.slices.reserve(n);
  res.x_values.assign(n * ctx.x_grid.size(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (candidate[j].t != ctx.node_times[j]) throw DomainError("candidate node times do not match the window");
    std::vector<TrajectoryNode> ext(candidate.begin(), candidate.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    duhamel::Slice slice(ctx.bases[j], std::move(ext));
    const Zero z = zero_near(slice, candidate[j].p, lo, hi);
    if (std::abs(z.p - plan.p_center) >= 0.5 * plan.a0_n) {
      throw IterationDiverged("zero left the iteration neighbourhood at t = " + std::to_string(ctx.node_times[j]));
    }
    if (!(z.lambda > 0.0)) throw IterationDiverged("flux of the iterate is not positive");
    res.nodes.push_back({ctx.node_times[j], z.p, z.lambda});
    if (j + 1 == n) res.fxx_end = z.fxx;
    if (slice.direct_bound(ctx.x_grid.front(), ctx.x_grid.back(), plan.t_start) >= skip) {
      for (std::size_t i = 0; i < ctx.x_grid.size(); ++i) {
        res.x_values[j * ctx.x_grid.size() + i] = slice.direct_since(ctx.x_grid[i], plan.t_start, 0).f;
      }
    }
    res.slices.push_back(std::move(slice));
  }
  return res;
}

PhiResult apply_phi(const SolutionState& state, const WindowPlan& plan,
                    std::span<const TrajectoryNode> candidate) {
  return apply_phi(make_context(state, plan), candidate);
}

WindowReport solve_window(SolutionState& state, const WindowPlan& plan, const SolveOptions& options) {
  const ModelParams& params = state.params();
  const WindowContext ctx = make_context(state, plan, options.x_samples);
  std::vector<TrajectoryNode> cand = seed_candidate(ctx);
  std::vector<double> prev_x;
  double prev_xdiff = -1.0, prev_tdiff = -1.0;
  double x_ratio = -1.0, t_ratio = -1.0;
  PhiResult res;
  bool converged = false;
  int it = 0;
  while (it < params.max_picard_iters) {
    ++it;
    res = apply_phi(ctx, cand);
    double tdiff = 0.0;
    for (std::size_t j = 0; j < cand.size(); ++j) {
      tdiff = std::max({tdiff, std::abs(res.nodes[j].p - cand[j].p), std::abs(res.nodes[j].lambda - cand[j].lambda)});
    }
    double xdiff = 0.0;
    if (!prev_x.empty()) {
      xdiff = max_abs_diff(res.x_values, prev_x);
      if (prev_xdiff > kNoiseFloor) x_ratio = std::max(x_ratio, xdiff / prev_xdiff);
      prev_xdiff = xdiff;
    }
    if (prev_tdiff > kNoiseFloor) t_ratio = std::max(t_ratio, tdiff / prev_tdiff);
    prev_tdiff = tdiff;
    prev_x = res.x_values;
    cand = res.nodes;
    if (it >= 2 && std::max(tdiff, xdiff) < params.contraction_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw IterationDiverged("no convergence in " + std::to_string(params.max_picard_iters) +
                            " iterations on the window starting at t = " + std::to_string(plan.t_start));
  }

  WindowReport rep;
  rep.plan = plan;
  rep.fxx_end = res.fxx_end;
  rep.norm_inf = plan.norm_start;
  WindowRecord& rec = rep.record;
  rec.t_start = plan.t_start;
  rec.length = plan.t0;
  rec.iterations = it;
  // X-norm ratio when measurable, otherwise the ratio of trajectory changes, otherwise 0.
  rec.contraction_ratio = x_ratio >= 0.0 ? x_ratio : (t_ratio >= 0.0 ? t_ratio : 0.0);
  rec.predicted_contraction = plan.predicted_contraction;
  rec.norm_start = plan.norm_start;
  rec.first_node = state.node_count() - 1;
  rec.flux_floor_ok = cand.back().lambda >= 0.25 * plan.lambda_start;
  for (const TrajectoryNode& n : cand) state.append(n.t, n.p, n.lambda);
  state.log_window(rec);
  return rep;
}

void global_solve(SolutionState& state, double t_end, const SolveOptions& options) {
  if (options.norm_cadence < 1) throw ConfigError("norm_cadence must be positive");
  const InitialData& init = state.initial();
  const BlowupThresholds& thr = options.thresholds;
  const double lag = state.quadrature().checkpoint_lag;
  double norm = 0.0;
  int since_norm = options.norm_cadence;
  while (state.t_current() < t_end) {
    const double t = state.t_current();
    if (since_norm >= options.norm_cadence) {
      norm = t == 0.0 ? init.norm_inf : duhamel::sup_norm(duhamel::make_slice(state, t), options.norm_grid).value;
      since_norm = 0;
      if (norm > thr.norm_factor * init.norm_inf) {
        throw BlowupDetected(BlowupDetected::Criterion::sup_norm,
                             {t, norm, state.fluxes().back(), 0.0},
                             "sup norm " + std::to_string(norm) + " exceeded its threshold at t = " + std::to_string(t));
      }
    }
    WindowPlan plan = plan_window(state, norm);
    if (plan.t0 >= t_end - t) {
      plan.predicted_contraction *= std::sqrt((t_end - t) / plan.t0);
      plan.t0 = t_end - t;
    }
    WindowReport rep = solve_window(state, plan, options);
    ++since_norm;
    rep.norm_inf = norm;
    if (state.t_current() - state.rolling_checkpoint().t >= 1.25 * lag) {
      state.roll_checkpoint(state.t_current() - lag);
    }
    const double lam = state.fluxes().back();
    const BlowupDetected::Panel panel{state.t_current(), norm, lam, rep.fxx_end};
    if (lam < thr.flux_factor * init.lambda_I) {
      throw BlowupDetected(BlowupDetected::Criterion::flux, panel,
                           "flux " + std::to_string(lam) + " fell below its threshold at t = " +
                               std::to_string(panel.t));
    }
    if (std::abs(rep.fxx_end) > thr.curvature_max) {
      throw BlowupDetected(BlowupDetected::Criterion::curvature, panel,
                           "|f_xx(p)| = " + std::to_string(std::abs(rep.fxx_end)) +
                               " exceeded its threshold at t = " + std::to_string(panel.t));
    }
    if (options.on_window) options.on_window(state, rep);
  }
}

SolutionState global_solve(const InitialData& initial, const ModelParams& params,
                           const QuadratureConfig& quad, double t_end, const SolveOptions& options) {
  SolutionState state(initial, params, quad);
  global_solve(state, t_end, options);
  return state;
}

}  // namespace pricefront::picard
