#pragma once

// Core data of the price-formation problem: parameters, validated initial data, and the
// history-based solution state.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pricefront/quadrature.hpp"
#include "pricefront/spline.hpp"

namespace pricefront {

struct ModelParams {
  /// Transaction jump size.
  double a = 0.4;
  /// Half-width of the neighbourhood in which the free boundary is iterated.
  double a0 = 0.05;
  double contraction_tol = 1e-12;
  int max_picard_iters = 40;
  /// Scales sqrt(t0); the window length therefore scales with its square.
  double window_safety_factor = 0.25;
  int grid_points = 401;
  /// abar = min(a, rescue_half_factor * distance to the wall).
  double rescue_half_factor = 0.5;

  void validate() const;
};

/// Offsets of the source (left) and sink (right) from the free boundary.
struct RescueOffsets {
  double left = 0.0;
  double right = 0.0;
};

RescueOffsets rescue_clamp(double p, const ModelParams& params);

/// Unchecked variant for inner loops.
inline RescueOffsets rescue_offsets(double p, double a, double factor) noexcept {
  const double l = factor * (1.0 + p);
  const double r = factor * (1.0 - p);
  return {l < a ? l : a, r < a ? r : a};
}

struct InitialData {
  /// Samples of f_I on the uniform grid x_i = -1 + 2 i / (n-1).
  std::vector<double> samples;
  CubicSpline spline;
  double p_I = 0.0;
  double lambda_I = 0.0;
  double M_b = 0.0;
  double M_p = 0.0;
  double norm_inf = 0.0;
  /// Half-width used for the slope-window check.
  double a0 = 0.0;

  double norm_l1() const noexcept { return M_b + M_p; }
  double grid_spacing() const noexcept { return 2.0 / static_cast<double>(samples.size() - 1); }
};

/// Validate samples of f_I on a uniform grid over [-1,1] against the sign, Neumann and
/// slope-window hypotheses and compute p_I, lambda_I, M_b, M_p.
InitialData validate_initial(std::span<const double> samples, const ModelParams& params,
                             std::optional<double> p_hint = std::nullopt);

/// Uniform samples of a callable on [-1,1].
template <class F>
std::vector<double> sample_on_grid(F&& f, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(-1.0 + 2.0 * i / (n - 1));
  return out;
}

/// Built-in initial data: "symmetric" is -sin(pi x / 2); "skewed" is the difference of two
/// Neumann heat-kernel bumps centred at the walls with unequal masses and widths.
std::vector<double> builtin_samples(const std::string& name, int grid_points);
bool is_builtin(const std::string& name) noexcept;

/// Reads a two-column (x, f) text file; comma or whitespace separated, '#' comment lines.
/// Returns samples resampled onto `grid_points` uniform nodes (exact when the file grid matches).
std::vector<double> read_initial_file(const std::string& path, int grid_points);

struct WindowRecord {
  double t_start = 0.0;
  double length = 0.0;
  /// Largest measured ratio of successive X-norm changes; 0 when no change was measurable.
  double contraction_ratio = 0.0;
  double predicted_contraction = 0.0;
  double norm_start = 0.0;
  /// Node holding the window start; p and lambda there are the window's starting values.
  std::size_t first_node = 0;
  int iterations = 0;
  bool flux_floor_ok = true;
};

/// Cosine coefficients of the source part of the solution, valid for evaluation at times at
/// least the checkpoint lag after `t`.
struct SpectralCheckpoint {
  double t = 0.0;
  std::size_t node = 0;
  std::vector<double> coeff;  // index m = 1..modes; index 0 unused
};

/// Flux and position history plus the initial data: the canonical solution object. The state
/// is append-only; one writer appends while readers may evaluate earlier times.
class SolutionState {
 public:
  SolutionState(InitialData initial, ModelParams params, QuadratureConfig quad = {});

  /// A state carrying a prescribed history (t[0] = 0). Fluxes may be any finite value,
  /// including zero; used to probe the Duhamel evaluator with known sources.
  static SolutionState with_history(InitialData initial, ModelParams params, QuadratureConfig quad,
                                    std::span<const double> t, std::span<const double> p,
                                    std::span<const double> lambda);

  const InitialData& initial() const noexcept { return initial_; }
  const ModelParams& params() const noexcept { return params_; }
  const QuadratureConfig& quadrature() const noexcept { return quad_; }

  std::span<const double> times() const noexcept { return t_; }
  std::span<const double> positions() const noexcept { return p_; }
  std::span<const double> fluxes() const noexcept { return lambda_; }
  std::span<const double> cumulative_flux() const noexcept { return cum_flux_; }
  std::size_t node_count() const noexcept { return t_.size(); }
  double t_current() const noexcept { return t_.back(); }

  /// Linear interpolation of the histories; t is clamped to [0, t_current].
  double p_at(double t) const noexcept;
  double lambda_at(double t) const noexcept;
  double cumulative_flux_at(double t) const noexcept;

  /// Append one node. Requires t > t_current, p in (-1,1) and lambda > 0.
  void append(double t, double p, double lambda);

  const std::vector<WindowRecord>& window_log() const noexcept { return windows_; }
  void log_window(const WindowRecord& w) { windows_.push_back(w); }

  /// Cosine modes carried by checkpoints (enough for evaluation one lag after the checkpoint).
  int modes() const noexcept { return modes_; }
  /// Below this time f_I is propagated by direct convolution rather than its cosine series.
  double convolution_time() const noexcept;
  /// Cosine coefficients of f_I (index 0 holds the integral of f_I), enough for t >= convolution_time().
  const std::vector<double>& initial_coefficients() const noexcept { return initial_coeff_; }

  const SpectralCheckpoint& rolling_checkpoint() const noexcept { return rolling_; }
  const std::vector<SpectralCheckpoint>& stored_checkpoints() const noexcept { return stored_; }
  void set_rolling_checkpoint(SpectralCheckpoint cp);

  /// Fold history segments [from.node, target_node] into the spectral coefficients.
  SpectralCheckpoint advance_checkpoint(const SpectralCheckpoint& from, std::size_t target_node) const;
  /// Move the rolling checkpoint to the last node with time <= t_limit (never backwards).
  void roll_checkpoint(double t_limit);
  /// Last node index with time <= t.
  std::size_t node_at_or_before(double t) const noexcept;

  /// Conservative bounds over nodes [i0, i1]: {min p, max p, max |lambda|}. Cost O((i1-i0)/256).
  std::array<double, 3> history_bounds(std::size_t i0, std::size_t i1) const noexcept;

 private:
  std::size_t segment_index(double t) const noexcept;
  void update_blocks(std::size_t i);

  static constexpr std::size_t kBlock = 256;

  InitialData initial_;
  ModelParams params_;
  QuadratureConfig quad_;
  std::vector<double> t_, p_, lambda_, cum_flux_;
  std::vector<WindowRecord> windows_;
  int modes_ = 0;
  std::vector<double> initial_coeff_;
  SpectralCheckpoint rolling_;
  std::vector<SpectralCheckpoint> stored_;
  std::vector<std::array<double, 3>> blocks_;
};

/// Sampled snapshot f(., t) with local-polynomial derivative queries.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const noexcept { return x > lo && x < hi; }
};

class Profile {
 public:
  Profile() = default;
  Profile(double t, std::vector<double> x, std::vector<double> values,
          std::vector<Interval> exclusion = {}, int order = 6, std::vector<double> kinks = {});

  /// Value or derivative (order <= 4) from the local interpolating polynomial through the
  /// order+1 nearest samples. Derivatives inside an exclusion zone throw SingularEvaluation.
  double operator()(double x, int deriv = 0) const;

  double t() const noexcept { return t_; }
  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> values() const noexcept { return v_; }
  std::span<const Interval> exclusion_zones() const noexcept { return zones_; }
  int order() const noexcept { return order_; }
  bool excluded(double x) const noexcept;
  double norm_inf() const noexcept;
  /// Grid points where f_x may jump (current source and sink positions).
  std::span<const double> kinks() const noexcept { return kinks_; }
  /// Integral over the grid: on each interval, three-point Gauss on the cubic through the four
  /// nearest samples that lie between the same pair of kinks.
  double integral() const noexcept;

 private:
  double t_ = 0.0;
  std::vector<double> x_, v_;
  std::vector<Interval> zones_;
  int order_ = 6;
  std::vector<double> kinks_;
};

}  // namespace pricefront
