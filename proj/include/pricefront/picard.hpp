#pragma once

// Fixed-point iteration on short windows and continuation in time.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pricefront/duhamel.hpp"
#include "pricefront/model.hpp"

namespace pricefront::picard {

struct WindowPlan {
  double t_start = 0.0;
  double t0 = 0.0;
  /// Half-width of the iteration neighbourhood X around p_center.
  double a0_n = 0.0;
  double p_center = 0.0;
  double lambda_start = 0.0;
  double norm_start = 0.0;
  /// G(a) (1 + 8 ||f|| / lambda) sqrt(t0).
  double predicted_contraction = 0.0;
  double gamma_bound = 0.0;
  // Candidate values of sqrt(t0) before the safety factor.
  double sqrt_zero_track = 0.0;   // 8 ||f|| / lambda * sqrt(t0) = a0 / 2
  double sqrt_contraction = 0.0;  // G (1 + 8 ||f|| / lambda) sqrt(t0) = 1
  double sqrt_derivative = 0.0;   // 4 G sqrt(t0) = 1 / sqrt(t0), ceiling lemmas
  /// Slope floor 1/2 lambda - 4 G ||f|| sqrt(t0) = lambda / 4. Reported, not applied.
  double sqrt_slope_floor = 0.0;
};

/// G(a), computed once per value of a and cached.
double gamma_bound(double a);

/// Plan the first window from validated initial data.
WindowPlan plan_window(const InitialData& initial, const ModelParams& params);
/// Plan the window starting at state.t_current(); norm_inf is ||f(., t_current)||.
WindowPlan plan_window(const SolutionState& state, double norm_inf);

/// x-independent data shared by every iterate of one window.
struct WindowContext {
  const SolutionState* state = nullptr;
  WindowPlan plan;
  std::vector<double> node_times;
  std::vector<std::shared_ptr<const duhamel::SliceBase>> bases;
  std::vector<double> x_grid;  // sample points of X
};

WindowContext make_context(const SolutionState& state, const WindowPlan& plan, int x_samples = 17);

struct PhiResult {
  std::vector<duhamel::TrajectoryNode> nodes;  // (p, lambda) of the new iterate at node times
  std::vector<duhamel::Slice> slices;          // the new iterate f at node times
  std::vector<double> x_values;                // window-local part on X, node-major
  double fxx_end = 0.0;                        // f_xx at the last zero
};

/// One application of the iteration map: sources frozen on `candidate`, new zero and flux
/// found at every node time. The candidate must hold one node per context node time.
PhiResult apply_phi(const WindowContext& ctx, std::span<const duhamel::TrajectoryNode> candidate);
PhiResult apply_phi(const SolutionState& state, const WindowPlan& plan,
                    std::span<const duhamel::TrajectoryNode> candidate);

/// The frozen seed p = p_center, lambda = lambda_start at every node time.
std::vector<duhamel::TrajectoryNode> seed_candidate(const WindowContext& ctx);

struct BlowupThresholds {
  /// Trips when ||f|| exceeds norm_factor * ||f_I||.
  double norm_factor = 100.0;
  /// Trips when lambda falls below flux_factor * lambda_I.
  double flux_factor = 1e-3;
  /// Trips when |f_xx(p)| exceeds this.
  double curvature_max = 1e6;
};

struct WindowReport {
  WindowPlan plan;
  WindowRecord record;
  double fxx_end = 0.0;
  /// ||f|| used for planning the next window (refreshed every norm_cadence windows).
  double norm_inf = 0.0;
};

struct SolveOptions {
  BlowupThresholds thresholds;
  /// Windows between full sup-norm scans; the last value is reused in between.
  int norm_cadence = 64;
  int norm_grid = 257;
  int x_samples = 17;
  /// Called after every accepted window.
  std::function<void(const SolutionState&, const WindowReport&)> on_window;
};

/// Iterate the map from the frozen seed until successive changes fall below contraction_tol,
/// then append the converged nodes to the state.
WindowReport solve_window(SolutionState& state, const WindowPlan& plan, const SolveOptions& options = {});

/// Continue `state` to t_end window by window. Throws BlowupDetected when a threshold trips;
/// the state then holds everything solved so far.
void global_solve(SolutionState& state, double t_end, const SolveOptions& options = {});

SolutionState global_solve(const InitialData& initial, const ModelParams& params,
                           const QuadratureConfig& quad, double t_end, const SolveOptions& options = {});

}  // namespace pricefront::picard
