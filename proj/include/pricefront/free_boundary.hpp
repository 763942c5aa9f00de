#pragma once

// Zero, flux and velocity of the front, from sampled profiles or directly from a solution state.

#include "pricefront/model.hpp"

namespace pricefront::free_boundary {

/// Zero of the profile inside [lo, hi]: bisection to width 1e-6, then Newton on the local
/// interpolant. Throws NoBracket when the ends share a sign and MultipleZeroSuspected when the
/// samples inside the bracket are not strictly monotone.
double locate_zero(const Profile& profile, Interval bracket);

/// lambda = -f_x(p).
double flux(const Profile& profile, double p);

struct Velocity {
  double speed = 0.0;
  /// Lowest non-vanishing derivative order used: 1 for -f_xx/f_x, 3 for -f_xxxx/(2 f_xxx).
  int order = 1;
  bool degenerate = false;
};

struct VelocityOptions {
  /// Relative to ||f||: derivatives below degeneracy_tol * ||f|| count as zero.
  double degeneracy_tol = 1e-8;
  /// The higher-order fallback is refused when an exclusion zone lies within this distance.
  double high_order_radius = 0.025;
};

Velocity velocity(const Profile& profile, double p, const VelocityOptions& options = {});

/// Velocity at time t straight from the history representation, by -f_xx/f_x at p(t).
Velocity front_velocity(const SolutionState& state, double t, double degeneracy_tol = 1e-8);

/// The same speed from the transport form -f_t/f_x.
double front_velocity_ode(const SolutionState& state, double t);

}  // namespace pricefront::free_boundary
