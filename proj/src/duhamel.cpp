#include "pricefront/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pricefront/errors.hpp"
#include "pricefront/heat_kernel.hpp"

namespace pricefront::duhamel {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrtPi = 1.0 / std::sqrt(kPi);
constexpr double kImageTol = 1e-17;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_of_image(int k) { return (std::abs(k) % 2 == 0) ? 1.0 : -1.0; }

// Distance from x to the images c = 2k + sigma_k y of every y in [lo, hi], |k| <= shells.
double image_distance(double x, double lo, double hi, int shells) {
  double best = kInf;
  for (int k = -shells; k <= shells; ++k) {
    const double sg = sign_of_image(k);
    double c0 = 2.0 * k + sg * lo;
    double c1 = 2.0 * k + sg * hi;
    if (c0 > c1) std::swap(c0, c1);
    const double d = x < c0 ? c0 - x : (x > c1 ? x - c1 : 0.0);
    best = std::min(best, d);
  }
  return best;
}

// Upper bound of the kernel and its first two x-derivatives at distance d, valid for
// tau < d^2/12 where every term increases with tau.
double kernel_envelope(double d, double tau) {
  if (!(tau < d * d / 12.0)) return kInf;
  const double k = std::exp(-d * d / (4.0 * tau)) / std::sqrt(4.0 * kPi * tau);
  return k * (1.0 + d / (2.0 * tau) + d * d / (4.0 * tau * tau) + 1.0 / (2.0 * tau));
}

struct SourcePos {
  double left = 0.0;
  double right = 0.0;
};

SourcePos sources(double p, double a, double factor) {
  const RescueOffsets off = rescue_offsets(p, a, factor);
  return {p - off.left, p + off.right};
}

// Source positions are non-decreasing in p, so a p-range maps to position ranges.
double source_distance(double x, double plo, double phi, double a, double factor, int shells) {
  const SourcePos lo = sources(plo, a, factor);
  const SourcePos hi = sources(phi, a, factor);
  return std::min(image_distance(x, lo.left, hi.left, shells),
                  image_distance(x, lo.right, hi.right, shells));
}

// Panels [lo, hi] in s covering [0, s_top], refined geometrically towards 0 until the source
// distance over the remaining recent history exceeds 8 s. `dist(s)` returns that distance for
// t' in [t - s^2, t].
template <class Dist>
std::vector<std::array<double, 2>> s_panels(double s_top, double s_kink, Dist&& dist) {
  std::vector<std::array<double, 2>> panels;
  double hi = s_top;
  const double floor = 1e-9 * s_top;
  while (hi > 0.0) {
    const double d = dist(hi);
    if (hi <= d / 8.0 || hi < floor) {
      panels.push_back({0.0, hi});
      break;
    }
    panels.push_back({0.5 * hi, hi});
    hi *= 0.5;
  }
  if (s_kink > 0.0 && s_kink < s_top) {
    for (std::size_t i = 0; i < panels.size(); ++i) {
      auto& pnl = panels[i];
      if (s_kink > pnl[0] && s_kink < pnl[1]) {
        const std::array<double, 2> upper{s_kink, pnl[1]};
        pnl[1] = s_kink;
        panels.insert(panels.begin() + static_cast<std::ptrdiff_t>(i), upper);
        break;
      }
    }
  }
  return panels;
}

}  // namespace

std::shared_ptr<const SliceBase> build_base(const SolutionState& state, double t) {
  if (!(t >= 0.0)) throw DomainError("evaluation time must be non-negative");
  auto base = std::make_shared<SliceBase>();
  base->state = &state;
  base->t = t;
  base->last_node = state.node_at_or_before(std::min(t, state.t_current()));
  if (t == 0.0) {
    base->mode = SliceBase::Mode::initial;
    return base;
  }
  const QuadratureConfig& quad = state.quadrature();
  const double lag = quad.checkpoint_lag;

  SpectralCheckpoint temp;
  const SpectralCheckpoint* cp = &state.stored_checkpoints().front();
  if (t < state.convolution_time()) {
    base->mode = SliceBase::Mode::convolution;
  } else {
    base->mode = SliceBase::Mode::spectral;
    if (t >= lag) {
      if (state.rolling_checkpoint().t <= t - lag) {
        cp = &state.rolling_checkpoint();
      } else {
        for (const auto& s : state.stored_checkpoints()) {
          if (s.t <= t - lag) cp = &s;
        }
      }
      if (t - cp->t > 8.0 * lag) {
        const std::size_t target = std::min(state.node_at_or_before(t - lag), base->last_node);
        if (target > cp->node) {
          temp = state.advance_checkpoint(*cp, target);
          cp = &temp;
        }
      }
    }
    // Before one lag has passed only the initial part is spectral; it needs more modes.
    const int modes = t >= lag ? state.modes()
                               : std::min(static_cast<int>(state.initial_coefficients().size()) - 1,
                                          kernel::spectral_mode_count(t, 2, quad.spectral_tol));
    const auto& ahat = state.initial_coefficients();
    base->c0 = 0.5 * ahat[0];
    base->coeff.assign(static_cast<std::size_t>(modes) + 1, 0.0);
    const double mu1 = kPi * kPi / 4.0;
    double e1 = 1.0, r1 = std::exp(-mu1 * t);
    const double r1s = r1 * r1;
    double e2 = 1.0, r2 = std::exp(-mu1 * (t - cp->t));
    const double r2s = r2 * r2;
    const int src_modes = static_cast<int>(cp->coeff.size()) - 1;
    for (int m = 1; m <= modes; ++m) {
      e1 *= r1;
      r1 *= r1s;
      e2 *= r2;
      r2 *= r2s;
      const auto k = static_cast<std::size_t>(m);
      base->coeff[k] = ahat[k] * e1 + (m <= src_modes ? cp->coeff[k] * e2 : 0.0);
    }
  }
  base->checkpoint_t = cp->t;
  base->checkpoint_node = cp->node;
  return base;
}

Slice::Slice(std::shared_ptr<const SliceBase> base, std::vector<TrajectoryNode> extension)
    : base_(std::move(base)), ext_(std::move(extension)) {
  const SolutionState& st = *base_->state;
  t_last_ = st.times()[base_->last_node];
  double prev = t_last_;
  for (const TrajectoryNode& n : ext_) {
    if (!(n.t > prev)) throw DomainError("extension nodes must follow the stored history in time");
    if (!(n.p > -1.0 && n.p < 1.0)) throw DomainError("extension position outside (-1, 1)");
    prev = n.t;
  }
  if (base_->t > t_last_ && base_->mode != SliceBase::Mode::initial) {
    if (ext_.empty() || ext_.back().t != base_->t) {
      throw DomainError("extension must reach the evaluation time");
    }
  }
}

std::array<double, 2> Slice::trajectory(double tp) const {
  const SolutionState& st = *base_->state;
  if (tp <= t_last_ || ext_.empty()) {
    const auto ts = st.times();
    const auto ps = st.positions();
    const auto ls = st.fluxes();
    const std::size_t i0 = base_->checkpoint_node;
    const std::size_t i1 = base_->last_node;
    if (i1 == i0) return {ps[i0], ls[i0]};
    auto it = std::upper_bound(ts.begin() + static_cast<std::ptrdiff_t>(i0),
                               ts.begin() + static_cast<std::ptrdiff_t>(i1) + 1, tp);
    std::size_t i = static_cast<std::size_t>(it - ts.begin());
    i = std::clamp<std::size_t>(i, i0 + 1, i1) - 1;
    const double w = std::clamp((tp - ts[i]) / (ts[i + 1] - ts[i]), 0.0, 1.0);
    return {ps[i] + w * (ps[i + 1] - ps[i]), ls[i] + w * (ls[i + 1] - ls[i])};
  }
  double ta = t_last_;
  double pa = st.positions()[base_->last_node];
  double la = st.fluxes()[base_->last_node];
  for (const TrajectoryNode& n : ext_) {
    if (tp <= n.t) {
      const double w = (tp - ta) / (n.t - ta);
      return {pa + w * (n.p - pa), la + w * (n.lambda - la)};
    }
    ta = n.t;
    pa = n.p;
    la = n.lambda;
  }
  return {pa, la};
}

std::array<double, 3> Slice::bounds(double t_lo, double t_hi) const {
  const SolutionState& st = *base_->state;
  std::array<double, 3> r{kInf, -kInf, 0.0};
  auto take = [&](double p, double l) {
    r[0] = std::min(r[0], p);
    r[1] = std::max(r[1], p);
    r[2] = std::max(r[2], std::abs(l));
  };
  const auto a = trajectory(t_lo);
  const auto b = trajectory(t_hi);
  take(a[0], a[1]);
  take(b[0], b[1]);
  if (t_lo < t_last_) {
    const std::size_t i0 = std::max(st.node_at_or_before(t_lo), base_->checkpoint_node);
    const std::size_t i1 = std::min(st.node_at_or_before(std::min(t_hi, t_last_)), base_->last_node);
    if (i1 >= i0) {
      const auto h = st.history_bounds(i0, i1);
      r[0] = std::min(r[0], h[0]);
      r[1] = std::max(r[1], h[1]);
      r[2] = std::max(r[2], h[2]);
    }
  }
  for (const TrajectoryNode& n : ext_) {
    if (n.t >= t_lo && n.t <= t_hi) take(n.p, n.lambda);
  }
  return r;
}

Values Slice::eval(double x, int order) const {
  const SliceBase& b = *base_;
  const SolutionState& st = *b.state;
  Values v;
  switch (b.mode) {
    case SliceBase::Mode::initial: {
      const CubicSpline& s = st.initial().spline;
      v.f = s(x, 0);
      if (order >= 1) v.fx = s(x, 1);
      if (order >= 2) v.fxx = s(x, 2);
      return v;
    }
    case SliceBase::Mode::convolution: {
      const CubicSpline& s = st.initial().spline;
      const int shells = kernel::image_count(b.t, 2, kImageTol);
      for (int k = -shells; k <= shells; ++k) {
        const double sg = sign_of_image(k);
        const auto r = s.gaussian_convolution_derivs(sg * (x - 2.0 * k), b.t);
        v.f += r[0];
        v.fx += sg * r[1];
        v.fxx += r[2];
      }
      break;
    }
    case SliceBase::Mode::spectral: {
      const double th = kPi * (x + 1.0) / 2.0;
      const double c1 = std::cos(th), s1 = std::sin(th);
      double c = c1, s = s1;
      double f = b.c0, fx = 0.0, fxx = 0.0;
      const int modes = static_cast<int>(b.coeff.size()) - 1;
      for (int m = 1; m <= modes; ++m) {
        if (m > 1 && (m - 1) % 64 == 0) {
          c = std::cos(m * th);
          s = std::sin(m * th);
        }
        const double bm = b.coeff[static_cast<std::size_t>(m)];
        const double km = m * kPi / 2.0;
        f += bm * c;
        fx -= bm * km * s;
        fxx -= bm * km * km * c;
        const double nc = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = nc;
      }
      v = {f, fx, fxx};
      break;
    }
  }
  const Values d = direct(x, order, -kInf);
  v.f += d.f;
  v.fx += d.fx;
  v.fxx += d.fxx;
  if (order < 2) v.fxx = 0.0;
  if (order < 1) v.fx = 0.0;
  return v;
}

Values Slice::direct_since(double x, double t_from, int order) const {
  if (base_->mode == SliceBase::Mode::initial) return {};
  if (t_from < base_->checkpoint_t) {
    throw DomainError("window-local source part needs t_from at or after the checkpoint");
  }
  return direct(x, order, t_from);
}

double Slice::direct_bound(double x_lo, double x_hi, double t_from) const {
  if (base_->mode == SliceBase::Mode::initial) return 0.0;
  const SolutionState& st = *base_->state;
  const double tf = std::max(t_from, base_->checkpoint_t);
  const double tau = base_->t - tf;
  if (!(tau > 0.0)) return 0.0;
  const int shells = kernel::image_count(tau, 2, kImageTol);
  const auto bd = bounds(tf, base_->t);
  const double a = st.params().a;
  const double factor = st.params().rescue_half_factor;
  const SourcePos lo = sources(bd[0], a, factor);
  const SourcePos hi = sources(bd[1], a, factor);
  // Distance between [x_lo, x_hi] and the image ranges equals the point distance from its
  // centre minus its half-width.
  const double c = 0.5 * (x_lo + x_hi);
  const double w = 0.5 * (x_hi - x_lo);
  const double d = std::max(0.0, std::min(image_distance(c, lo.left, hi.left, shells),
                                          image_distance(c, lo.right, hi.right, shells)) - w);
  return 8.0 * bd[2] * tau * kernel_envelope(d, tau);
}

Values Slice::direct(double x, int order, double t_from) const {
  Values acc;
  if (base_->mode == SliceBase::Mode::initial) return acc;
  const SolutionState& st = *base_->state;
  const QuadratureConfig& quad = st.quadrature();
  const double a = st.params().a;
  const double factor = st.params().rescue_half_factor;
  const double t = base_->t;
  const double tf = std::max(t_from, base_->checkpoint_t);
  const double tau = t - tf;
  if (!(tau > 0.0)) return acc;
  const int shells = kernel::image_count(tau, 2, kImageTol);

  // Whole-range bound first: far from every source this is the only work done.
  {
    const auto bd = bounds(tf, t);
    const double d = source_distance(x, bd[0], bd[1], a, factor, shells);
    if (8.0 * bd[2] * tau * kernel_envelope(d, tau) < quad.skip_tol) return acc;
  }

  const GaussRule& g = gauss_legendre(quad.points_per_window);
  auto add_point = [&](double tp, double weight, double s_or_tau, bool in_s) {
    const auto [p, lam] = trajectory(tp);
    const SourcePos sp = sources(p, a, factor);
    double f = 0.0, fx = 0.0, fxx = 0.0;
    for (int src = 0; src < 2; ++src) {
      const double y = src == 0 ? sp.left : sp.right;
      const double sign = src == 0 ? 1.0 : -1.0;
      for (int k = -shells; k <= shells; ++k) {
        const double dd = x - (2.0 * k + sign_of_image(k) * y);
        if (in_s) {
          // 2 s K(dd, s^2) = exp(-z^2)/sqrt(pi) with z = dd / 2s.
          const double s = s_or_tau;
          const double z = dd / (2.0 * s);
          const double z2 = z * z;
          if (z2 > 745.0) continue;
          const double e = sign * std::exp(-z2) * kInvSqrtPi;
          f += e;
          if (order >= 1) fx -= z / s * e;
          if (order >= 2) fxx += (z2 - 0.5) / (s * s) * e;
        } else {
          const kernel::KernelDerivs gd = kernel::gaussian_derivs(dd, s_or_tau);
          f += sign * gd.value;
          fx += sign * gd.dx;
          fxx += sign * gd.dxx;
        }
      }
    }
    acc.f += weight * lam * f;
    acc.fx += weight * lam * fx;
    acc.fxx += weight * lam * fxx;
  };

  const double s_top = std::sqrt(tau);
  const double s_kink = t > t_last_ ? std::sqrt(t - t_last_) : 0.0;
  const auto panels = s_panels(s_top, s_kink, [&](double s) {
    const auto bd = bounds(t - s * s, t);
    return source_distance(x, bd[0], bd[1], a, factor, shells);
  });
  for (const auto& [lo, hi] : panels) {
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      if (quad.substitution) {
        const double s = lo + g.nodes[j] * (hi - lo);
        add_point(t - s * s, g.weights[j] * (hi - lo), s, true);
      } else {
        // Plain rule in t' on the same panels.
        const double ta = t - hi * hi;
        const double tb = t - lo * lo;
        const double tp = ta + g.nodes[j] * (tb - ta);
        add_point(tp, g.weights[j] * (tb - ta), t - tp, false);
      }
    }
  }
  return acc;
}

double Slice::direct_mass(double p) const {
  if (base_->mode == SliceBase::Mode::initial) return 0.0;
  const SolutionState& st = *base_->state;
  const double a = st.params().a;
  const double factor = st.params().rescue_half_factor;
  const double t = base_->t;
  const double tau = t - base_->checkpoint_t;
  if (!(tau > 0.0)) return 0.0;
  const int shells = kernel::image_count(tau, 0, kImageTol);
  const GaussRule& g = gauss_legendre(st.quadrature().points_per_window);
  double acc = 0.0;
  // int_{-1}^p 2s K(x - c, s^2) dx = s [erf((p - c)/2s) - erf((-1 - c)/2s)].
  auto point = [&](double s, double w) {
    const auto [pp, lam] = trajectory(t - s * s);
    const SourcePos sp = sources(pp, a, factor);
    double v = 0.0;
    for (int src = 0; src < 2; ++src) {
      const double y = src == 0 ? sp.left : sp.right;
      const double sign = src == 0 ? 1.0 : -1.0;
      for (int k = -shells; k <= shells; ++k) {
        const double c = 2.0 * k + sign_of_image(k) * y;
        v += sign * (std::erf((p - c) / (2.0 * s)) - std::erf((-1.0 - c) / (2.0 * s)));
      }
    }
    acc += w * lam * s * v;
  };
  const double s_top = std::sqrt(tau);
  const double s_kink = t > t_last_ ? std::sqrt(t - t_last_) : 0.0;
  const auto panels = s_panels(s_top, s_kink, [&](double s) {
    const auto bd = bounds(t - s * s, t);
    return std::min(source_distance(p, bd[0], bd[1], a, factor, shells),
                    source_distance(-1.0, bd[0], bd[1], a, factor, shells));
  });
  for (const auto& [lo, hi] : panels) {
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      point(lo + g.nodes[j] * (hi - lo), g.weights[j] * (hi - lo));
    }
  }
  return acc;
}

double Slice::left_mass(double p) const {
  const SliceBase& b = *base_;
  const SolutionState& st = *b.state;
  const CubicSpline& spline = st.initial().spline;
  double total = 0.0;
  switch (b.mode) {
    case SliceBase::Mode::initial:
      return spline.integral(-1.0, p);
    case SliceBase::Mode::convolution: {
      // Panels aligned with the spline knots; the smoothed spline is nearly cubic on each.
      const GaussRule& g = gauss_legendre(4);
      const double h = spline.h();
      const int shells = kernel::image_count(b.t, 0, kImageTol);
      double lo = -1.0;
      while (lo < p) {
        const double hi = std::min(p, lo + h);
        for (std::size_t j = 0; j < g.nodes.size(); ++j) {
          const double x = lo + g.nodes[j] * (hi - lo);
          double f = 0.0;
          for (int k = -shells; k <= shells; ++k) {
            f += spline.gaussian_convolution(sign_of_image(k) * (x - 2.0 * k), b.t);
          }
          total += g.weights[j] * (hi - lo) * f;
        }
        lo = hi;
      }
      break;
    }
    case SliceBase::Mode::spectral: {
      total = b.c0 * (p + 1.0);
      const double th = kPi * (p + 1.0) / 2.0;
      for (std::size_t m = 1; m < b.coeff.size(); ++m) {
        const double md = static_cast<double>(m);
        total += b.coeff[m] * 2.0 / (md * kPi) * std::sin(md * th);
      }
      break;
    }
  }
  return total + direct_mass(p);
}

Slice make_slice(const SolutionState& state, double t) {
  if (t > state.t_current()) throw OutOfRange("evaluation time beyond the solved history");
  if (!(t >= 0.0)) throw DomainError("evaluation time must be non-negative");
  auto base = build_base(state, t);
  std::vector<TrajectoryNode> ext;
  if (t > state.times()[base->last_node]) ext.push_back({t, state.p_at(t), state.lambda_at(t)});
  return Slice(std::move(base), std::move(ext));
}

std::vector<Interval> exclusion_zones(const SolutionState& state, double t) {
  std::vector<Interval> zones;
  if (!(t > 0.0)) return zones;
  const double r = state.params().a0 / 4.0;
  const double t_hi = std::min(t, state.t_current());
  const double t_lo = std::max(0.0, t_hi - r * r);
  const double a = state.params().a;
  const double factor = state.params().rescue_half_factor;
  double plo = std::min(state.p_at(t_lo), state.p_at(t_hi));
  double phi = std::max(state.p_at(t_lo), state.p_at(t_hi));
  const std::size_t i0 = state.node_at_or_before(t_lo);
  const std::size_t i1 = state.node_at_or_before(t_hi);
  if (i1 > i0) {
    const auto h = state.history_bounds(i0 + 1, i1);
    plo = std::min(plo, h[0]);
    phi = std::max(phi, h[1]);
  }
  const SourcePos lo = sources(plo, a, factor);
  const SourcePos hi = sources(phi, a, factor);
  zones.push_back({lo.left - r, hi.left + r});
  zones.push_back({lo.right - r, hi.right + r});
  return zones;
}

namespace {

void check_position(double x) {
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("x must lie in [-1, 1]");
}

void check_zone(const SolutionState& state, double x, double t) {
  for (const Interval& z : exclusion_zones(state, t)) {
    if (z.contains(x)) throw SingularEvaluation("derivative requested inside a source exclusion zone");
  }
}

}  // namespace

double eval_f(const SolutionState& state, double x, double t) {
  check_position(x);
  return make_slice(state, t).eval(x, 0).f;
}

double eval_fx(const SolutionState& state, double x, double t) {
  check_position(x);
  check_zone(state, x, t);
  return make_slice(state, t).eval(x, 1).fx;
}

double eval_fxx(const SolutionState& state, double x, double t) {
  check_position(x);
  check_zone(state, x, t);
  return make_slice(state, t).eval(x, 2).fxx;
}

double eval_ft(const SolutionState& state, double x, double t) { return eval_fxx(state, x, t); }

SupNorm sup_norm(const Slice& slice, int grid) {
  if (grid < 8) throw DomainError("sup-norm scan needs at least 8 points");
  std::vector<double> v(static_cast<std::size_t>(grid));
  const double h = 2.0 / (grid - 1);
  for (int i = 0; i < grid; ++i) v[static_cast<std::size_t>(i)] = std::abs(slice.eval(-1.0 + i * h, 0).f);
  // Refine around the three largest local maxima of the samples.
  std::vector<int> peaks;
  for (int i = 0; i < grid; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const bool left = i == 0 || v[u] >= v[u - 1];
    const bool right = i == grid - 1 || v[u] >= v[u + 1];
    if (left && right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) {
    return v[static_cast<std::size_t>(a)] > v[static_cast<std::size_t>(b)];
  });
  if (peaks.size() > 3) peaks.resize(3);
  SupNorm best;
  for (int i = 0; i < grid; ++i) {
    if (v[static_cast<std::size_t>(i)] > best.value) best = {v[static_cast<std::size_t>(i)], -1.0 + i * h};
  }
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i : peaks) {
    double lo = std::max(-1.0, -1.0 + (i - 1) * h);
    double hi = std::min(1.0, -1.0 + (i + 1) * h);
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = std::abs(slice.eval(x1, 0).f), f2 = std::abs(slice.eval(x2, 0).f);
    for (int it = 0; it < 40 && hi - lo > 1e-10; ++it) {
      if (f1 > f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        f1 = std::abs(slice.eval(x1, 0).f);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        f2 = std::abs(slice.eval(x2, 0).f);
      }
    }
    if (f1 > best.value) best = {f1, x1};
    if (f2 > best.value) best = {f2, x2};
  }
  return best;
}

Profile profile_snapshot(const SolutionState& state, double t, std::span<const double> grid) {
  const Slice slice = make_slice(state, t);
  std::vector<double> x(grid.begin(), grid.end());
  // Current source and sink positions join the grid so that integrals can split there.
  std::vector<double> kinks;
  if (t > 0.0 && !x.empty()) {
    const double p = state.p_at(t);
    const RescueOffsets off = rescue_clamp(p, state.params());
    for (double y : {p - off.left, p + off.right}) {
      if (y <= x.front() || y >= x.back()) continue;
      const auto it = std::lower_bound(x.begin(), x.end(), y);
      if (std::abs(*it - y) <= 1e-13) {
        kinks.push_back(*it);
      } else if (std::abs(*(it - 1) - y) <= 1e-13) {
        kinks.push_back(*(it - 1));
      } else {
        x.insert(it, y);
        kinks.push_back(y);
      }
    }
  }
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    check_position(x[i]);
    v[i] = slice.eval(x[i], 0).f;
  }
  return Profile(t, std::move(x), std::move(v), exclusion_zones(state, t), 6, std::move(kinks));
}

Profile profile_snapshot(const SolutionState& state, double t, int n) {
  if (n < 8) throw DomainError("profile needs at least 8 points");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (n - 1);
  return profile_snapshot(state, t, grid);
}

}  // namespace pricefront::duhamel
