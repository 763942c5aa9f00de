#include "pricefront/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pricefront/errors.hpp"

namespace pricefront {

void QuadratureConfig::validate() const {
  if (points_per_window < 8) throw ConfigError("points_per_window must be at least 8");
  if (nodes_per_window < 1) throw ConfigError("nodes_per_window must be positive");
  if (points_per_window / nodes_per_window < 2) {
    throw ConfigError("points_per_window must give at least two points per time node");
  }
  if (!(checkpoint_lag > 0.0)) throw ConfigError("checkpoint_lag must be positive");
  if (!(checkpoint_stride >= checkpoint_lag)) {
    throw ConfigError("checkpoint_stride must be at least checkpoint_lag");
  }
  if (!(spectral_tol > 0.0) || !(skip_tol > 0.0)) throw ConfigError("tolerances must be positive");
}

int QuadratureConfig::points_per_segment() const noexcept {
  return points_per_window / nodes_per_window;
}

namespace {

GaussRule build_rule(int n) {
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Map [-1,1] -> [0,1], ascending order.
    const auto j = static_cast<std::size_t>(n - 1 - i);
    r.nodes[j] = 0.5 * (x + 1.0);
    r.weights[j] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

}  // namespace pricefront
