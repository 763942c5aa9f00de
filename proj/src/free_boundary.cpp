#include "pricefront/free_boundary.hpp"

#include <algorithm>
#include <cmath>

#include "pricefront/duhamel.hpp"
#include "pricefront/errors.hpp"

namespace pricefront::free_boundary {

double locate_zero(const Profile& profile, Interval bracket) {
  double lo = bracket.lo, hi = bracket.hi;
  if (!(lo < hi)) throw DomainError("bracket must satisfy lo < hi");
  double flo = profile(lo), fhi = profile(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NoBracket("profile has the same sign at both bracket ends");
  const double sgn = flo > 0.0 ? -1.0 : 1.0;  // direction of monotonicity
  const auto xs = profile.x();
  const auto vs = profile.values();
  double prev = flo;
  const double edge = 1e-12 * (hi - lo);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= lo + edge || xs[i] >= hi - edge) continue;
    if (!(sgn * (vs[i] - prev) > 0.0)) {
      throw MultipleZeroSuspected("profile samples are not strictly monotone inside the bracket");
    }
    prev = vs[i];
  }
  if (!(sgn * (fhi - prev) > 0.0)) {
    throw MultipleZeroSuspected("profile samples are not strictly monotone inside the bracket");
  }

  const double ftol = 1e-12 * std::max(profile.norm_inf(), 1e-300);
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const double fm = profile(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double f = profile(x);
    if (std::abs(f) < ftol && hi - lo < 1e-9) return x;
    if (f == 0.0) return x;
    if ((f > 0.0) == (flo > 0.0)) lo = x;
    else hi = x;
    double xn = 0.5 * (lo + hi);
    if (!profile.excluded(x)) {
      const double d = profile(x, 1);
      if (d != 0.0) {
        const double cand = x - f / d;
        if (cand > lo && cand < hi) xn = cand;
      }
    }
    if (std::abs(xn - x) < 1e-15 || hi - lo < 1e-15) return xn;
    x = xn;
  }
  return x;
}

double flux(const Profile& profile, double p) { return -profile(p, 1); }

Velocity velocity(const Profile& profile, double p, const VelocityOptions& options) {
  const double scale = options.degeneracy_tol * std::max(profile.norm_inf(), 1e-300);
  const double fx = profile(p, 1);
  if (std::abs(fx) > scale) return {-profile(p, 2) / fx, 1, false};
  for (const Interval& z : profile.exclusion_zones()) {
    if (p > z.lo - options.high_order_radius && p < z.hi + options.high_order_radius) {
      throw SingularEvaluation("higher-order velocity requested too close to a source");
    }
  }
  const double fxx = profile(p, 2);
  if (std::abs(fxx) > scale) {
    // f_x = 0 with f_xx != 0 is a turning point, not a simple front.
    throw DegenerateFront("f_x vanishes at the front while f_xx does not");
  }
  const double f3 = profile(p, 3);
  if (std::abs(f3) > scale) return {-profile(p, 4) / (2.0 * f3), 3, true};
  throw DegenerateFront("f_x, f_xx and f_xxx all vanish at the front");
}

Velocity front_velocity(const SolutionState& state, double t, double degeneracy_tol) {
  const double p = state.p_at(t);
  const duhamel::Slice slice = duhamel::make_slice(state, t);
  for (const Interval& z : duhamel::exclusion_zones(state, t)) {
    if (z.contains(p)) throw SingularEvaluation("front lies inside a source exclusion zone");
  }
  const duhamel::Values v = slice.eval(p, 2);
  const double norm = state.initial().norm_inf;
  if (!(std::abs(v.fx) > degeneracy_tol * norm)) {
    throw DegenerateFront("f_x vanishes at the front; use the profile-based fallback");
  }
  return {-v.fxx / v.fx, 1, false};
}

double front_velocity_ode(const SolutionState& state, double t) {
  const double p = state.p_at(t);
  return -duhamel::eval_ft(state, p, t) / duhamel::eval_fx(state, p, t);
}

}  // namespace pricefront::free_boundary
