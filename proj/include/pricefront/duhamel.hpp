#pragma once

// Evaluation of f(x,t) from a SolutionState:
//
//   f = int G(x,y;t) f_I(y) dy + int_0^t [G(x, p - aL; t - t') - G(x, p + aR; t - t')] lambda dt'
//
// History older than a spectral checkpoint is carried as cosine coefficients; the recent part
// is integrated directly in s = sqrt(t - t') on panels refined geometrically towards s = 0.

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "pricefront/model.hpp"

namespace pricefront::duhamel {

struct Values {
  double f = 0.0;
  double fx = 0.0;
  double fxx = 0.0;
};

struct TrajectoryNode {
  double t = 0.0;
  double p = 0.0;
  double lambda = 0.0;
};

/// Everything about one evaluation time that does not depend on x or on trajectory nodes
/// beyond the stored history.
struct SliceBase {
  enum class Mode { initial, convolution, spectral };

  const SolutionState* state = nullptr;
  double t = 0.0;
  Mode mode = Mode::spectral;
  double checkpoint_t = 0.0;
  std::size_t checkpoint_node = 0;
  /// Last stored node used; later times come from the slice's extension nodes.
  std::size_t last_node = 0;
  double c0 = 0.0;            // constant mode
  std::vector<double> coeff;  // cosine coefficients at time t, index m = 1..modes
};

/// Build the x-independent data for time t. t may exceed the state's current time; the
/// trajectory beyond it is then supplied as extension nodes of the Slice.
std::shared_ptr<const SliceBase> build_base(const SolutionState& state, double t);

class Slice {
 public:
  /// `extension` continues the stored trajectory past base->last_node; it must be strictly
  /// increasing in time and end exactly at base->t whenever base->t lies past the last node.
  explicit Slice(std::shared_ptr<const SliceBase> base, std::vector<TrajectoryNode> extension = {});

  double t() const noexcept { return base_->t; }
  const SliceBase& base() const noexcept { return *base_; }
  std::span<const TrajectoryNode> extension() const noexcept { return ext_; }

  /// f and x-derivatives up to `order` (0..2); higher orders are left at zero.
  Values eval(double x, int order = 2) const;
  /// Integral of f over [-1, p].
  double left_mass(double p) const;
  /// Source contribution from history after t_from only (t_from >= checkpoint time).
  Values direct_since(double x, double t_from, int order = 2) const;

  /// Upper bound on |direct_since| (and its x-derivatives) over x in [x_lo, x_hi].
  double direct_bound(double x_lo, double x_hi, double t_from) const;

  /// Interpolated (p, lambda) at t' in [checkpoint time, t].
  std::array<double, 2> trajectory(double tp) const;
  /// Conservative {min p, max p, max |lambda|} over [t_lo, t_hi].
  std::array<double, 3> bounds(double t_lo, double t_hi) const;

 private:
  Values direct(double x, int order, double t_from) const;
  double direct_mass(double p) const;

  std::shared_ptr<const SliceBase> base_;
  std::vector<TrajectoryNode> ext_;
  double t_last_ = 0.0;  // time of base->last_node
};

/// Slice at 0 <= t <= t_current built from the stored history.
Slice make_slice(const SolutionState& state, double t);

/// Intervals of half-width a0/4 around the source and sink positions visited during
/// [t - (a0/4)^2, t]. Derivative queries inside them are refused.
std::vector<Interval> exclusion_zones(const SolutionState& state, double t);

double eval_f(const SolutionState& state, double x, double t);
double eval_fx(const SolutionState& state, double x, double t);
double eval_fxx(const SolutionState& state, double x, double t);
/// Off the sources f_t = f_xx; inside an exclusion zone this throws like the other derivatives.
double eval_ft(const SolutionState& state, double x, double t);

struct SupNorm {
  double value = 0.0;
  double x = 0.0;
};
/// max |f| over [-1, 1]: a uniform scan of `grid` points refined by golden-section search
/// around the largest samples.
SupNorm sup_norm(const Slice& slice, int grid = 257);

/// f(., t) on `grid` plus the current source and sink positions, which are marked as kinks.
Profile profile_snapshot(const SolutionState& state, double t, std::span<const double> grid);
/// Uniform grid of n points over [-1, 1].
Profile profile_snapshot(const SolutionState& state, double t, int n);

}  // namespace pricefront::duhamel
