#include "pricefront/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pricefront/errors.hpp"

namespace pricefront::kernel {

namespace {

constexpr double kPi = std::numbers::pi;

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat kernel: time must be positive");
}

void check_position(double x, const char* what) {
  if (!(x >= -1.0 && x <= 1.0)) {
    throw DomainError(std::string("heat kernel: ") + what + " outside [-1,1]");
  }
}

// Upper bound on |K| + |K_x| + |K_xx| at distance d >= 0.
double gaussian_envelope(double d, double t) {
  const double base = std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
  return base * (1.0 + d / (2.0 * t) + d * d / (4.0 * t * t) + 1.0 / (2.0 * t));
}

}  // namespace

void KernelConfig::validate() const {
  if (!(image_truncation_tol > 0.0) || !(spectral_truncation_tol > 0.0)) {
    throw ConfigError("kernel truncation tolerances must be positive");
  }
  if (!(representation_crossover_time > 0.0)) {
    throw ConfigError("kernel crossover time must be positive");
  }
}

double kernel_gaussian(double x, double t) {
  check_time(t);
  return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

KernelDerivs gaussian_derivs(double x, double t) noexcept {
  const double k = std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
  const double g = -x / (2.0 * t);
  return {k, g * k, (g * g - 1.0 / (2.0 * t)) * k};
}

int image_count(double t, int order, double tol) noexcept {
  (void)order;  // the envelope already covers derivatives up to second order
  // Images with |k| = j sit at distance >= 2j - 2 from any x in [-1,1]. Two images per j.
  const double peak = 2.0 * std::sqrt(3.0 * t);
  for (int j = 1; j < 10000; ++j) {
    const double d = 2.0 * j;  // closest possible distance of the first omitted shell
    if (d < peak) continue;
    // Shells beyond decay at least geometrically with ratio exp(-(d+1)/t) once past the peak.
    const double ratio = std::exp(-(d + 1.0) / t) * (1.0 + 2.0 / d) * (1.0 + 2.0 / d);
    if (ratio >= 1.0) continue;
    const double tail = 2.0 * gaussian_envelope(d, t) / (1.0 - ratio);
    if (tail < tol) return j;
  }
  return 10000;
}

int spectral_mode_count(double t, int order, double tol) noexcept {
  const double log_tol = std::log(tol);
  const double peak = std::sqrt(std::max(order, 1) / (2.0 * t));
  for (int m = 1; m < 10'000'000; ++m) {
    const double k = (m + 1) * kPi / 2.0;
    if (k < peak) continue;
    const double log_term = order * std::log(k) - k * k * t;
    // Successive ratio bound past the peak: exp(-(2m+3)(pi/2)^2 t) * ((m+2)/(m+1))^order.
    const double ratio = std::exp(-(2.0 * m + 3.0) * kPi * kPi / 4.0 * t) *
                         std::pow((m + 2.0) / (m + 1.0), order);
    if (ratio >= 1.0) continue;
    if (log_term - std::log(1.0 - ratio) < log_tol) return m;
  }
  return 10'000'000;
}

KernelDerivs green_neumann_images(double x, double x_src, double t, const KernelConfig& cfg) {
  check_time(t);
  check_position(x, "x");
  check_position(x_src, "source");
  const int shells = image_count(t, 2, cfg.image_truncation_tol);
  KernelDerivs acc;
  for (int k = -shells; k <= shells; ++k) {
    const double sign = (std::abs(k) % 2 == 0) ? 1.0 : -1.0;
    const KernelDerivs g = gaussian_derivs(x - (2.0 * k + sign * x_src), t);
    acc.value += g.value;
    acc.dx += g.dx;
    acc.dxx += g.dxx;
  }
  return acc;
}

KernelDerivs green_neumann_spectral(double x, double x_src, double t, const KernelConfig& cfg) {
  check_time(t);
  check_position(x, "x");
  check_position(x_src, "source");
  const int modes = spectral_mode_count(t, 2, cfg.spectral_truncation_tol);
  const double thx = kPi * (x + 1.0) / 2.0;
  const double thy = kPi * (x_src + 1.0) / 2.0;
  KernelDerivs acc{0.5, 0.0, 0.0};
  for (int m = 1; m <= modes; ++m) {
    const double k = m * kPi / 2.0;
    const double e = std::exp(-k * k * t);
    const double cy = std::cos(m * thy);
    const double cx = std::cos(m * thx);
    const double sx = std::sin(m * thx);
    acc.value += cx * cy * e;
    acc.dx += -k * sx * cy * e;
    acc.dxx += -k * k * cx * cy * e;
  }
  return acc;
}

KernelDerivs green_neumann_all(double x, double x_src, double t, const KernelConfig& cfg) {
  if (t > cfg.representation_crossover_time) return green_neumann_spectral(x, x_src, t, cfg);
  return green_neumann_images(x, x_src, t, cfg);
}

double green_neumann(double x, double x_src, double t, const KernelConfig& cfg) {
  return green_neumann_all(x, x_src, t, cfg).value;
}

double green_neumann_dx(double x, double x_src, double t, const KernelConfig& cfg) {
  return green_neumann_all(x, x_src, t, cfg).dx;
}

double green_neumann_dxx(double x, double x_src, double t, const KernelConfig& cfg) {
  return green_neumann_all(x, x_src, t, cfg).dxx;
}

namespace {

struct Probe {
  double x, u, side, log_t;
};

double gamma_objective(const Probe& pr, double a) {
  const double src = pr.x + pr.u + pr.side * a;
  if (src < -1.0 || src > 1.0 || pr.x < -1.0 || pr.x > 1.0) return -1.0;
  const KernelDerivs g = green_neumann_all(pr.x, src, std::exp(pr.log_t));
  return g.value + std::abs(g.dx) + std::abs(g.dxx);
}

}  // namespace

GammaBound lemma_gamma_bound(double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("lemma_gamma_bound: a must lie in (0,1)");
  const double log_t_min = std::log(1e-6);
  const double log_t_max = std::log(1e2);
  const double u_max = a / 4.0 * (1.0 - 1e-12);

  constexpr int nx = 41;
  constexpr int nu = 9;
  constexpr int nt = 81;
  Probe best{0, 0, 1, 0};
  double best_val = -1.0;
  for (int ix = 0; ix < nx; ++ix) {
    const double x = -1.0 + 2.0 * ix / (nx - 1);
    for (int iu = 0; iu < nu; ++iu) {
      const double u = -u_max + 2.0 * u_max * iu / (nu - 1);
      for (double side : {-1.0, 1.0}) {
        for (int it = 0; it < nt; ++it) {
          const Probe pr{x, u, side, log_t_min + (log_t_max - log_t_min) * it / (nt - 1)};
          const double v = gamma_objective(pr, a);
          if (v > best_val) {
            best_val = v;
            best = pr;
          }
        }
      }
    }
  }

  // Local refinement: shrinking pattern search in (x, u, log t).
  double hx = 2.0 / (nx - 1);
  double hu = 2.0 * u_max / (nu - 1);
  double ht = (log_t_max - log_t_min) / (nt - 1);
  for (int round = 0; round < 60; ++round) {
    bool improved = false;
    for (int dim = 0; dim < 3; ++dim) {
      for (double dir : {-1.0, 1.0}) {
        Probe pr = best;
        if (dim == 0) pr.x = std::clamp(pr.x + dir * hx, -1.0, 1.0);
        if (dim == 1) pr.u = std::clamp(pr.u + dir * hu, -u_max, u_max);
        if (dim == 2) pr.log_t = std::clamp(pr.log_t + dir * ht, log_t_min, log_t_max);
        const double v = gamma_objective(pr, a);
        if (v > best_val) {
          best_val = v;
          best = pr;
          improved = true;
        }
      }
    }
    if (!improved) {
      hx *= 0.5;
      hu *= 0.5;
      ht *= 0.5;
    }
  }

  GammaBound out;
  out.value = best_val;
  out.a = a;
  out.argmax_x = best.x;
  out.argmax_src = best.x + best.u + best.side * a;
  out.argmax_t = std::exp(best.log_t);
  out.t_interior = best.log_t > log_t_min + 1e-9 && best.log_t < log_t_max - 1e-9;
  return out;
}

}  // namespace pricefront::kernel
