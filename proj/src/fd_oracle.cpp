#include "pricefront/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pricefront/errors.hpp"

namespace pricefront::fd {

void FdConfig::validate() const {
  if (nx < 11) throw ConfigError("fd nx must be at least 11");
  if (!(dt > 0.0)) throw ConfigError("fd dt must be positive");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("fd theta must lie in [0, 1]");
  if (delta_width != 1 && delta_width != 2) throw ConfigError("fd delta_width must be 1 or 2");
  if (rannacher_steps < 0) throw ConfigError("fd rannacher_steps must be non-negative");
  if (record_every < 1) throw ConfigError("fd record_every must be positive");
  const double h = 2.0 / (nx - 1);
  if (theta < 0.5 && dt > 0.5 * h * h) {
    throw ConfigError("fd dt = " + std::to_string(dt) + " violates the explicit stability limit h^2/2 = " +
                      std::to_string(0.5 * h * h));
  }
}

FdConfig FdConfig::refined(int levels) const {
  FdConfig c = *this;
  for (int i = 0; i < levels; ++i) {
    c.nx = 2 * (c.nx - 1) + 1;
    c.dt *= 0.5;
  }
  return c;
}

double FdGrid::weight(std::size_t i) const noexcept {
  return (i == 0 || i + 1 == x.size()) ? 0.5 * h : h;
}

double FdGrid::signed_mass() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m += weight(i) * f[i];
  return m;
}

FdGrid make_grid(const InitialData& initial, int nx) {
  FdGrid g;
  g.h = 2.0 / (nx - 1);
  g.x.resize(static_cast<std::size_t>(nx));
  g.f.resize(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) {
    const auto u = static_cast<std::size_t>(i);
    g.x[u] = i + 1 == nx ? 1.0 : -1.0 + i * g.h;
    g.f[u] = initial.spline(g.x[u], 0);
  }
  return g;
}

std::vector<std::pair<std::size_t, double>> deposit_weights(const FdGrid& grid, double y, double amount,
                                                            int delta_width) {
  const std::size_t n = grid.x.size();
  if (!(y >= -1.0 && y <= 1.0)) throw DomainError("deposit position outside [-1, 1]");
  const double s = (y + 1.0) / grid.h;
  auto k = static_cast<std::size_t>(std::floor(s));
  if (k >= n - 1) k = n - 2;
  const double w = s - static_cast<double>(k);
  if (delta_width == 1) {
    const std::size_t j = w < 0.5 ? k : k + 1;
    return {{j, amount / grid.weight(j)}};
  }
  return {{k, amount * (1.0 - w) / grid.weight(k)}, {k + 1, amount * w / grid.weight(k + 1)}};
}

namespace {

// (I - theta dt A) f_new = rhs with the ghost-node Neumann Laplacian A.
void solve_implicit(std::vector<double>& rhs, double r) {
  const std::size_t n = rhs.size();
  if (r == 0.0) return;
  std::vector<double> c(n);
  const double diag = 1.0 + 2.0 * r;
  double beta = diag;
  c[0] = -2.0 * r / beta;
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    const double lower = (i + 1 == n) ? -2.0 * r : -r;
    const double upper = -r;
    beta = diag - lower * c[i - 1];
    c[i] = upper / beta;
    rhs[i] = (rhs[i] - lower * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

}  // namespace

void fd_step(FdGrid& grid, double p, double lambda, double dt, double theta, const ModelParams& params,
             int delta_width) {
  if (!(p > -1.0 && p < 1.0)) throw DomainError("front outside (-1, 1)");
  const std::size_t n = grid.f.size();
  const double r = dt / (grid.h * grid.h);
  std::vector<double> rhs(n);
  const std::vector<double>& f = grid.f;
  const double e = (1.0 - theta) * r;
  rhs[0] = f[0] + e * 2.0 * (f[1] - f[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) rhs[i] = f[i] + e * (f[i - 1] - 2.0 * f[i] + f[i + 1]);
  rhs[n - 1] = f[n - 1] + e * 2.0 * (f[n - 2] - f[n - 1]);
  const RescueOffsets off = rescue_clamp(p, params);
  for (const auto& [i, v] : deposit_weights(grid, p - off.left, lambda * dt, delta_width)) rhs[i] += v;
  for (const auto& [i, v] : deposit_weights(grid, p + off.right, -lambda * dt, delta_width)) rhs[i] += v;
  solve_implicit(rhs, theta * r);
  grid.f = std::move(rhs);
}

namespace {

// Derivative at x of the cubic through (xs[i], fs[i]), i = 0..3, and its value.
std::pair<double, double> cubic_at(const double* xs, const double* fs, double x) {
  double val = 0.0, der = 0.0;
  for (int i = 0; i < 4; ++i) {
    double li = 1.0, dli = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      const double den = xs[i] - xs[j];
      dli = dli * (x - xs[j]) / den + li / den;
      li *= (x - xs[j]) / den;
    }
    val += li * fs[i];
    der += dli * fs[i];
  }
  return {val, der};
}

}  // namespace

FrontEstimate locate_front(const FdGrid& grid, double guess) {
  const std::size_t n = grid.f.size();
  const auto& f = grid.f;
  const auto& x = grid.x;
  auto is_change = [&](std::size_t k) { return f[k] > 0.0 && f[k + 1] <= 0.0; };
  const double s = std::clamp((guess + 1.0) / grid.h, 0.0, static_cast<double>(n - 2));
  const auto k0 = static_cast<std::size_t>(s);
  std::size_t k = n;
  for (std::size_t d = 0; d < n; ++d) {
    if (k0 + d < n - 1 && is_change(k0 + d)) {
      k = k0 + d;
      break;
    }
    if (d <= k0 && is_change(k0 - d)) {
      k = k0 - d;
      break;
    }
  }
  if (k == n) throw NoBracket("grid function lost its sign change");
  double p = x[k] + grid.h * f[k] / (f[k] - f[k + 1]);
  if (k >= 1 && k + 2 < n) {
    for (int it = 0; it < 20; ++it) {
      const auto [v, d] = cubic_at(&x[k - 1], &f[k - 1], p);
      if (d == 0.0) break;
      const double pn = std::clamp(p - v / d, x[k], x[k + 1]);
      const bool done = std::abs(pn - p) < 1e-15;
      p = pn;
      if (done) break;
    }
  }
  FrontEstimate est;
  est.p = p;
  const std::size_t lb = k >= 3 ? k - 3 : 0;
  const std::size_t rb = std::min(k + 1, n - 4);
  const double buyer = -cubic_at(&x[lb], &f[lb], p).second;
  const double vendor = -cubic_at(&x[rb], &f[rb], p).second;
  est.lambda = 0.5 * (buyer + vendor);
  est.lambda_gap = std::abs(buyer - vendor);
  return est;
}

std::pair<double, double> one_sided_masses(const FdGrid& grid, double p) {
  const std::size_t n = grid.f.size();
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = grid.x[i], b = grid.x[i + 1];
    const double fa = grid.f[i], fb = grid.f[i + 1];
    if (b <= p) {
      left += 0.5 * (b - a) * (fa + fb);
    } else if (a >= p) {
      right += 0.5 * (b - a) * (fa + fb);
    } else {
      const double fp = fa + (fb - fa) * (p - a) / (b - a);
      left += 0.5 * (p - a) * (fa + fp);
      right += 0.5 * (b - p) * (fp + fb);
    }
  }
  return {left, -right};
}

FdTrajectory fd_solve(const InitialData& initial, const ModelParams& params, const FdConfig& config,
                      double t_end, const std::vector<double>& snapshot_times) {
  config.validate();
  if (!(t_end >= 0.0)) throw DomainError("t_end must be non-negative");
  FdGrid grid = make_grid(initial, config.nx);
  FdTrajectory out;
  out.x = grid.x;
  out.h = grid.h;
  const long steps = t_end == 0.0 ? 0 : static_cast<long>(std::ceil(t_end / config.dt - 1e-9));
  const double dt = steps == 0 ? config.dt : t_end / static_cast<double>(steps);
  out.dt = dt;
  FrontEstimate front = locate_front(grid, initial.p_I);
  double cum = 0.0;
  std::vector<bool> taken(snapshot_times.size(), false);
  auto record = [&](double t) {
    out.t.push_back(t);
    out.p.push_back(front.p);
    out.lambda.push_back(front.lambda);
    out.lambda_gap.push_back(front.lambda_gap);
    const auto [mb, mp] = one_sided_masses(grid, front.p);
    out.M_b.push_back(mb);
    out.M_p.push_back(mp);
    out.cumulative_flux.push_back(cum);
  };
  auto snap = [&](double t) {
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
      if (!taken[i] && std::abs(snapshot_times[i] - t) <= 0.5 * dt) {
        out.snapshots.push_back({t, grid.f});
        taken[i] = true;
      }
    }
  };
  record(0.0);
  snap(0.0);
  for (long s = 0; s < steps; ++s) {
    const double lam_old = front.lambda;
    if (s < config.rannacher_steps) {
      fd_step(grid, front.p, front.lambda, 0.5 * dt, 1.0, params, config.delta_width);
      fd_step(grid, front.p, front.lambda, 0.5 * dt, 1.0, params, config.delta_width);
    } else {
      fd_step(grid, front.p, front.lambda, dt, config.theta, params, config.delta_width);
    }
    const double t = static_cast<double>(s + 1) * dt;
    try {
      front = locate_front(grid, front.p);
    } catch (const NoBracket&) {
      throw Error("fd solve aborted at t = " + std::to_string(t) + ": sign change lost");
    }
    if (!(front.p > -1.0 + grid.h && front.p < 1.0 - grid.h)) {
      throw Error("fd solve aborted at t = " + std::to_string(t) + ": front reached the wall cell (p = " +
                  std::to_string(front.p) + ")");
    }
    cum += 0.5 * dt * (lam_old + front.lambda);
    if ((s + 1) % config.record_every == 0 || s + 1 == steps) record(t);
    snap(t);
  }
  return out;
}

}  // namespace pricefront::fd
