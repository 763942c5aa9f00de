#pragma once

#include <span>
#include <vector>

namespace pricefront {

enum class HistoryRule { gauss_legendre };

/// Time quadrature of the source history integral.
struct QuadratureConfig {
  HistoryRule history_rule = HistoryRule::gauss_legendre;
  /// Integrate recent history in s = sqrt(t - t'), which removes the endpoint singularity.
  bool substitution = true;
  /// Gauss-Legendre points per panel of the recent-history integral.
  int points_per_window = 16;
  /// Trajectory nodes per solver window.
  int nodes_per_window = 2;
  /// Minimum age of history folded into a spectral checkpoint.
  double checkpoint_lag = 4e-4;
  /// Time spacing of stored checkpoints kept for random-access evaluation.
  double checkpoint_stride = 2e-3;
  /// Absolute truncation tolerance of the cosine series.
  double spectral_tol = 1e-14;
  /// Contributions provably below this are skipped.
  double skip_tol = 1e-18;

  void validate() const;
  int points_per_segment() const noexcept;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

}  // namespace pricefront
