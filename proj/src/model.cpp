#include "pricefront/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pricefront/errors.hpp"
#include "pricefront/heat_kernel.hpp"

namespace pricefront {

void ModelParams::validate() const {
  if (!(a > 0.0 && a < 1.0)) throw ConfigError("a must lie in (0, 1)");
  if (!(a0 > 0.0 && a0 < a / 4.0)) {
    throw ConfigError("a0 must satisfy 0 < a0 < a/4 (hypothesis (iii): slope window narrower than a/4)");
  }
  if (!(contraction_tol > 0.0)) throw ConfigError("contraction_tol must be positive");
  if (max_picard_iters < 1) throw ConfigError("max_picard_iters must be at least 1");
  if (!(window_safety_factor > 0.0 && window_safety_factor <= 1.0)) {
    throw ConfigError("window_safety_factor must lie in (0, 1]");
  }
  if (grid_points < 201) throw ConfigError("grid_points must be at least 201");
  if (!(rescue_half_factor > 0.0 && rescue_half_factor <= 1.0)) {
    throw ConfigError("rescue_half_factor must lie in (0, 1]");
  }
}

RescueOffsets rescue_clamp(double p, const ModelParams& params) {
  if (!(p > -1.0 && p < 1.0)) throw DomainError("rescue_clamp: p must lie in (-1, 1)");
  return rescue_offsets(p, params.a, params.rescue_half_factor);
}

namespace {

using Reason = InvalidInitialData::Reason;

double refine_root(const CubicSpline& s, double lo, double hi, double guess) {
  double flo = s(lo);
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    const double fm = s(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  for (int it = 0; it < 20; ++it) {
    const double fx = s(x);
    const double d = s(x, 1);
    if (d == 0.0) break;
    const double nx = std::clamp(x - fx / d, lo, hi);
    const double step = std::abs(nx - x);
    x = nx;
    if (step < 1e-16) break;
  }
  return x;
}

}  // namespace

InitialData validate_initial(std::span<const double> samples, const ModelParams& params,
                             std::optional<double> p_hint) {
  params.validate();
  const std::size_t n = samples.size();
  if (n < 21) throw InvalidInitialData(Reason::grid, "initial data needs at least 21 samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw InvalidInitialData(Reason::grid, "initial data has non-finite samples");
  }
  const double h = 2.0 / static_cast<double>(n - 1);
  double norm = 0.0;
  for (double v : samples) norm = std::max(norm, std::abs(v));
  if (norm == 0.0) throw InvalidInitialData(Reason::sign_structure, "initial data is identically zero");

  // Zero sets: runs of numerically-zero samples and strict sign changes between neighbours.
  const double ztol = 1e-12 * norm;
  int zeros = 0;
  std::size_t crossing = 0;
  bool in_zero_run = false;
  int last_sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = samples[i];
    if (std::abs(v) <= ztol) {
      if (!in_zero_run) {
        ++zeros;
        crossing = i;
      }
      in_zero_run = true;
      continue;
    }
    const int sg = v > 0.0 ? 1 : -1;
    if (!in_zero_run && last_sign != 0 && sg != last_sign) {
      ++zeros;
      crossing = i - 1;
    }
    in_zero_run = false;
    last_sign = sg;
  }
  if (zeros > 1) {
    throw InvalidInitialData(Reason::multiple_zeros,
                             "initial data has " + std::to_string(zeros) + " zeros; exactly one expected");
  }
  if (zeros == 0 || !(samples.front() > 0.0) || !(samples.back() < 0.0)) {
    throw InvalidInitialData(Reason::sign_structure,
                             "initial data must be positive left of its zero and negative right of it");
  }

  // Neumann walls, judged against the resolution of the sampled curvature.
  double curv = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    curv = std::max(curv, std::abs(samples[i + 1] - 2.0 * samples[i] + samples[i - 1]) / (h * h));
  }
  const double slope_tol = h * curv + 1e-9;
  const double dl = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h);
  const double dr = (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * h);
  if (std::abs(dl) > slope_tol || std::abs(dr) > slope_tol) {
    std::ostringstream os;
    os << "initial data violates the Neumann condition: f'(-1) ~ " << dl << ", f'(1) ~ " << dr
       << " (tolerance " << slope_tol << ")";
    throw InvalidInitialData(Reason::boundary_slope, os.str());
  }

  InitialData out;
  out.samples.assign(samples.begin(), samples.end());
  out.spline = CubicSpline(-1.0, h, out.samples, 0.0, 0.0);
  out.norm_inf = norm;
  out.a0 = params.a0;

  double lo = -1.0 + h * static_cast<double>(crossing);
  double hi = lo + h;
  if (std::abs(samples[crossing]) <= ztol) {
    lo = -1.0 + h * static_cast<double>(crossing > 0 ? crossing - 1 : 0);
    hi = -1.0 + h * static_cast<double>(std::min(crossing + 1, n - 1));
  }
  out.p_I = refine_root(out.spline, lo, hi, p_hint.value_or(0.5 * (lo + hi)));
  out.lambda_I = -out.spline(out.p_I, 1);
  if (!(out.lambda_I > 0.0)) {
    throw InvalidInitialData(Reason::sign_structure, "initial data has a degenerate zero (lambda_I <= 0)");
  }

  const double a0 = params.a0;
  if (out.p_I - a0 <= -1.0 || out.p_I + a0 >= 1.0) {
    throw InvalidInitialData(Reason::slope_window, "slope window around p_I leaves the domain");
  }
  constexpr int kChecks = 400;
  for (int i = 0; i <= kChecks; ++i) {
    const double x = out.p_I - a0 + 2.0 * a0 * i / kChecks;
    if (!(-out.spline(x, 1) > 0.5 * out.lambda_I)) {
      std::ostringstream os;
      os << "slope condition fails at x = " << x << ": -f'(x) = " << -out.spline(x, 1)
         << " <= lambda_I/2 = " << 0.5 * out.lambda_I << " for a0 = " << a0;
      throw InvalidInitialData(Reason::slope_window, os.str());
    }
  }

  out.M_b = out.spline.integral(-1.0, out.p_I);
  out.M_p = -out.spline.integral(out.p_I, 1.0);
  if (!(out.M_b > 0.0) || !(out.M_p > 0.0)) {
    throw InvalidInitialData(Reason::mass, "one-sided masses must both be positive");
  }
  return out;
}

bool is_builtin(const std::string& name) noexcept {
  return name == "symmetric" || name == "skewed";
}

std::vector<double> builtin_samples(const std::string& name, int grid_points) {
  if (grid_points < 21) throw ConfigError("grid_points too small for built-in data");
  if (name == "symmetric") {
    return sample_on_grid([](double x) { return -std::sin(std::numbers::pi * x / 2.0); }, grid_points);
  }
  if (name == "skewed") {
    // Wall-centred Neumann heat-kernel bumps: exactly Neumann, strictly decreasing.
    return sample_on_grid(
        [](double x) {
          return kernel::green_neumann(x, -1.0, 0.1) - 0.7 * kernel::green_neumann(x, 1.0, 0.25);
        },
        grid_points);
  }
  throw ConfigError("unknown built-in initial data '" + name + "'");
}

std::vector<double> read_initial_file(const std::string& path, int grid_points) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open initial data file '" + path + "'");
  std::vector<double> xs, fs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x = 0.0;
    double f = 0.0;
    std::string rest;
    if (!(ls >> x >> f) || (ls >> rest)) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two numeric columns");
    }
    xs.push_back(x);
    fs.push_back(f);
  }
  if (xs.size() < 21) throw InvalidInitialData(Reason::grid, path + ": need at least 21 samples");
  const double h = 2.0 / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - (-1.0 + h * static_cast<double>(i))) > 1e-9) {
      throw InvalidInitialData(Reason::grid, path + ": samples must lie on a uniform grid over [-1, 1]");
    }
  }
  if (static_cast<int>(xs.size()) == grid_points) return fs;
  const CubicSpline s(-1.0, h, fs, 0.0, 0.0);
  return sample_on_grid([&](double x) { return s(x); }, grid_points);
}

SolutionState::SolutionState(InitialData initial, ModelParams params, QuadratureConfig quad)
    : initial_(std::move(initial)), params_(params), quad_(quad) {
  params_.validate();
  quad_.validate();
  t_.push_back(0.0);
  p_.push_back(initial_.p_I);
  lambda_.push_back(initial_.lambda_I);
  cum_flux_.push_back(0.0);
  modes_ = kernel::spectral_mode_count(quad_.checkpoint_lag, 2, quad_.spectral_tol);
  const int init_modes =
      std::max(modes_, kernel::spectral_mode_count(convolution_time(), 2, quad_.spectral_tol));
  initial_coeff_ = initial_.spline.cosine_coefficients(init_modes);
  update_blocks(0);
  rolling_.t = 0.0;
  rolling_.node = 0;
  rolling_.coeff.assign(static_cast<std::size_t>(modes_) + 1, 0.0);
  stored_.push_back(rolling_);
}

std::size_t SolutionState::segment_index(double t) const noexcept {
  // Index i with t_i <= t < t_{i+1}, clamped to the last segment.
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  if (i + 1 >= t_.size()) i = t_.size() >= 2 ? t_.size() - 2 : 0;
  return i;
}

namespace {

double interp(std::span<const double> ts, std::span<const double> vs, std::size_t i, double t) {
  if (ts.size() == 1) return vs[0];
  const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
  return vs[i] + w * (vs[i + 1] - vs[i]);
}

}  // namespace

double SolutionState::p_at(double t) const noexcept {
  t = std::clamp(t, 0.0, t_.back());
  return interp(t_, p_, segment_index(t), t);
}

double SolutionState::lambda_at(double t) const noexcept {
  t = std::clamp(t, 0.0, t_.back());
  return interp(t_, lambda_, segment_index(t), t);
}

double SolutionState::cumulative_flux_at(double t) const noexcept {
  t = std::clamp(t, 0.0, t_.back());
  if (t_.size() == 1) return 0.0;
  const std::size_t i = segment_index(t);
  const double dt = t - t_[i];
  return cum_flux_[i] + 0.5 * dt * (lambda_[i] + lambda_at(t));
}

void SolutionState::append(double t, double p, double lambda) {
  if (!(t > t_.back())) throw DomainError("history times must increase strictly");
  if (!(p > -1.0 && p < 1.0)) throw DomainError("free boundary left (-1, 1)");
  if (!(lambda > 0.0)) throw DomainError("flux must be positive in a live state");
  cum_flux_.push_back(cum_flux_.back() + 0.5 * (t - t_.back()) * (lambda + lambda_.back()));
  t_.push_back(t);
  p_.push_back(p);
  lambda_.push_back(lambda);
  update_blocks(t_.size() - 1);
}

void SolutionState::set_rolling_checkpoint(SpectralCheckpoint cp) {
  rolling_ = std::move(cp);
  if (rolling_.t >= stored_.back().t + quad_.checkpoint_stride) stored_.push_back(rolling_);
}

SolutionState SolutionState::with_history(InitialData initial, ModelParams params,
                                          QuadratureConfig quad, std::span<const double> t,
                                          std::span<const double> p,
                                          std::span<const double> lambda) {
  if (t.empty() || t.size() != p.size() || t.size() != lambda.size()) {
    throw DomainError("prescribed history arrays must be non-empty and of equal length");
  }
  if (t[0] != 0.0) throw DomainError("prescribed history must start at t = 0");
  SolutionState s(std::move(initial), params, quad);
  s.t_.clear();
  s.p_.clear();
  s.lambda_.clear();
  s.cum_flux_.clear();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && !(t[i] > t[i - 1])) throw DomainError("history times must increase strictly");
    if (!(p[i] > -1.0 && p[i] < 1.0)) throw DomainError("prescribed p must lie in (-1, 1)");
    if (!std::isfinite(lambda[i])) throw DomainError("prescribed flux must be finite");
    s.cum_flux_.push_back(i == 0 ? 0.0
                                 : s.cum_flux_.back() + 0.5 * (t[i] - t[i - 1]) * (lambda[i] + lambda[i - 1]));
    s.t_.push_back(t[i]);
    s.p_.push_back(p[i]);
    s.lambda_.push_back(lambda[i]);
  }
  s.blocks_.clear();
  for (std::size_t i = 0; i < s.t_.size(); ++i) s.update_blocks(i);
  // Stored checkpoints at the configured stride make random access cheap.
  for (std::size_t i = 1; i < s.t_.size(); ++i) {
    if (s.t_[i] >= s.stored_.back().t + s.quad_.checkpoint_stride) {
      s.stored_.push_back(s.advance_checkpoint(s.stored_.back(), i));
    }
  }
  s.rolling_ = s.stored_.back();
  return s;
}

std::size_t SolutionState::node_at_or_before(double t) const noexcept {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  return it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
}

void SolutionState::roll_checkpoint(double t_limit) {
  const std::size_t target = node_at_or_before(t_limit);
  if (target <= rolling_.node) return;
  set_rolling_checkpoint(advance_checkpoint(rolling_, target));
}

namespace {

// Adds w * [cos(m thl) - cos(m thr)] * exp(-mu_m delta) to out[m] for m = 1..mmax.
void accumulate_modes(double thl, double thr, double w, double delta, int mmax, double* out) {
  constexpr double mu1 = std::numbers::pi * std::numbers::pi / 4.0;
  double cl = std::cos(thl), sl = std::sin(thl), cr = std::cos(thr), sr = std::sin(thr);
  const double c1l = cl, s1l = sl, c1r = cr, s1r = sr;
  double e = 1.0;
  double r = std::exp(-mu1 * delta);
  const double r2 = r * r;
  for (int m = 1; m <= mmax; ++m) {
    if (m > 1 && (m - 1) % 64 == 0) {
      cl = std::cos(m * thl);
      sl = std::sin(m * thl);
      cr = std::cos(m * thr);
      sr = std::sin(m * thr);
    }
    e *= r;
    r *= r2;
    if (e == 0.0) break;
    out[m] += w * (cl - cr) * e;
    const double ncl = cl * c1l - sl * s1l;
    sl = sl * c1l + cl * s1l;
    cl = ncl;
    const double ncr = cr * c1r - sr * s1r;
    sr = sr * c1r + cr * s1r;
    cr = ncr;
  }
}

}  // namespace

SpectralCheckpoint SolutionState::advance_checkpoint(const SpectralCheckpoint& from,
                                                     std::size_t target_node) const {
  if (target_node >= t_.size()) throw OutOfRange("checkpoint target beyond history");
  if (target_node < from.node) throw DomainError("checkpoints only advance forwards");
  SpectralCheckpoint out = from;
  out.t = t_[target_node];
  out.node = target_node;
  if (target_node == from.node) return out;
  constexpr double kPi = std::numbers::pi;
  constexpr double mu1 = kPi * kPi / 4.0;
  const double ta = from.t;
  const double tb = out.t;

  // Damp what was already folded.
  {
    double e = 1.0;
    double r = std::exp(-mu1 * (tb - ta));
    const double r2 = r * r;
    for (int m = 1; m <= modes_; ++m) {
      e *= r;
      r *= r2;
      out.coeff[static_cast<std::size_t>(m)] *= e;
    }
  }

  // Gauss-Legendre over sub-intervals short enough that the stiffest mode varies by at most
  // exp(0.5) across one of them, and that the highest mode's phase moves little.
  const double mu_max = mu1 * modes_ * modes_;
  double h = 0.5 / mu_max;
  const double kmax = modes_ * kPi / 2.0;
  const int q = std::max(4, quad_.points_per_segment());
  const GaussRule& g = gauss_legendre(q);
  const double a = params_.a;
  const double factor = params_.rescue_half_factor;
  std::size_t seg = from.node;
  auto traj = [&](double tp) {
    while (seg + 1 < target_node && t_[seg + 1] < tp) ++seg;
    const double w = (tp - t_[seg]) / (t_[seg + 1] - t_[seg]);
    return std::pair{p_[seg] + w * (p_[seg + 1] - p_[seg]),
                     lambda_[seg] + w * (lambda_[seg + 1] - lambda_[seg])};
  };
  const auto [plo, phi, lmax] = history_bounds(from.node, target_node);
  (void)lmax;
  // Assuming roughly uniform motion, keep the top mode's phase change per step below 0.1.
  const double sweep = phi - plo;
  if (sweep > 0.0) h = std::min(h, 0.1 * (tb - ta) / (kmax * sweep));
  const int n = std::max(1, static_cast<int>(std::ceil((tb - ta) / h)));
  const double step = (tb - ta) / n;
  for (int k = 0; k < n; ++k) {
    const double t0 = ta + k * step;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double tp = t0 + g.nodes[j] * step;
      const auto [p, lam] = traj(tp);
      const RescueOffsets off = rescue_offsets(p, a, factor);
      const double thl = kPi * (p - off.left + 1.0) / 2.0;
      const double thr = kPi * (p + off.right + 1.0) / 2.0;
      accumulate_modes(thl, thr, g.weights[j] * step * lam, tb - tp, modes_, out.coeff.data());
    }
  }
  return out;
}

std::array<double, 3> SolutionState::history_bounds(std::size_t i0, std::size_t i1) const noexcept {
  std::array<double, 3> r{p_[i0], p_[i0], std::abs(lambda_[i0])};
  i1 = std::min(i1, t_.size() - 1);
  std::size_t i = i0;
  auto take = [&](std::size_t k) {
    r[0] = std::min(r[0], p_[k]);
    r[1] = std::max(r[1], p_[k]);
    r[2] = std::max(r[2], std::abs(lambda_[k]));
  };
  while (i <= i1 && i % kBlock != 0) take(i++);
  while (i + kBlock - 1 <= i1) {
    const auto& b = blocks_[i / kBlock];
    r[0] = std::min(r[0], b[0]);
    r[1] = std::max(r[1], b[1]);
    r[2] = std::max(r[2], b[2]);
    i += kBlock;
  }
  while (i <= i1) take(i++);
  return r;
}

void SolutionState::update_blocks(std::size_t i) {
  const std::size_t b = i / kBlock;
  if (b >= blocks_.size()) blocks_.push_back({p_[i], p_[i], std::abs(lambda_[i])});
  auto& blk = blocks_[b];
  blk[0] = std::min(blk[0], p_[i]);
  blk[1] = std::max(blk[1], p_[i]);
  blk[2] = std::max(blk[2], std::abs(lambda_[i]));
}

double SolutionState::convolution_time() const noexcept {
  return std::min(quad_.checkpoint_lag, 1e-4);
}

// ----------------------------------------------------------------------------------------------
// Profile

namespace {

// Fornberg's recursion: weights c[k][j] for the k-th derivative at z from nodes x[0..n-1].
void fornberg(double z, const double* x, int n, int m, double* c /* (m+1) x n */) {
  std::fill(c, c + (m + 1) * n, 0.0);
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[k * n + i] = c1 * (k * c[(k - 1) * n + i - 1] - c5 * c[k * n + i - 1]) / c2;
        }
        c[i] = -c1 * c5 * c[i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k * n + j] = (c4 * c[k * n + j] - k * c[(k - 1) * n + j]) / c3;
      c[j] = c4 * c[j] / c3;
    }
    c1 = c2;
  }
}

}  // namespace

Profile::Profile(double t, std::vector<double> x, std::vector<double> values,
                 std::vector<Interval> exclusion, int order, std::vector<double> kinks)
    : t_(t), x_(std::move(x)), v_(std::move(values)), zones_(std::move(exclusion)), order_(order),
      kinks_(std::move(kinks)) {
  if (x_.size() != v_.size()) throw DomainError("profile grid and values differ in length");
  if (order_ < 4 || order_ > 15) throw DomainError("profile interpolation order must lie in [4, 15]");
  if (x_.size() < static_cast<std::size_t>(order_) + 1) throw DomainError("profile grid too small");
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw DomainError("profile grid must increase strictly");
  }
  std::sort(kinks_.begin(), kinks_.end());
  for (double k : kinks_) {
    if (!std::binary_search(x_.begin(), x_.end(), k)) throw DomainError("profile kinks must be grid points");
  }
}

bool Profile::excluded(double x) const noexcept {
  return std::any_of(zones_.begin(), zones_.end(), [x](const Interval& z) { return z.contains(x); });
}

double Profile::operator()(double x, int deriv) const {
  if (deriv < 0 || deriv > 4) throw DomainError("profile derivatives are available up to order 4");
  if (x < x_.front() - 1e-12 || x > x_.back() + 1e-12) throw DomainError("profile query outside grid");
  if (deriv > 0 && excluded(x)) {
    throw SingularEvaluation("derivative requested inside a source exclusion zone");
  }
  const int npts = order_ + 1;
  const auto it = std::lower_bound(x_.begin(), x_.end(), x);
  auto centre = static_cast<std::ptrdiff_t>(it - x_.begin());
  std::ptrdiff_t start = centre - npts / 2;
  start = std::clamp<std::ptrdiff_t>(start, 0, static_cast<std::ptrdiff_t>(x_.size()) - npts);
  double w[5 * 16];
  fornberg(x, x_.data() + start, npts, deriv, w);
  double acc = 0.0;
  for (int j = 0; j < npts; ++j) acc += w[deriv * npts + j] * v_[static_cast<std::size_t>(start + j)];
  return acc;
}

double Profile::norm_inf() const noexcept {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

double Profile::integral() const noexcept {
  // Segment boundaries: the ends of the grid and every kink.
  std::vector<std::size_t> cuts{0};
  for (double k : kinks_) {
    const auto idx = static_cast<std::size_t>(std::lower_bound(x_.begin(), x_.end(), k) - x_.begin());
    if (idx > cuts.back() && idx + 1 < x_.size()) cuts.push_back(idx);
  }
  cuts.push_back(x_.size() - 1);
  static constexpr double g[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const std::size_t lo = cuts[c], hi = cuts[c + 1];
    const std::size_t npts = std::min<std::size_t>(4, hi - lo + 1);
    for (std::size_t i = lo; i < hi; ++i) {
      std::size_t s = i >= lo + 1 ? i - 1 : lo;
      s = std::min(s, hi + 1 - npts);
      const double a = x_[i], b = x_[i + 1];
      for (int q = 0; q < 3; ++q) {
        const double xq = 0.5 * (a + b) + 0.5 * (b - a) * g[q];
        double val = 0.0;
        for (std::size_t j = s; j < s + npts; ++j) {
          double l = 1.0;
          for (std::size_t m = s; m < s + npts; ++m) {
            if (m != j) l *= (xq - x_[m]) / (x_[j] - x_[m]);
          }
          val += l * v_[j];
        }
        total += 0.5 * (b - a) * gw[q] * val;
      }
    }
  }
  return total;
}

}  // namespace pricefront
