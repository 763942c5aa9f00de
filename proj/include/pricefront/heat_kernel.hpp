#pragma once

// Neumann heat kernel on [-1,1].
//
// Two exchangeable representations are provided. The image sum
//
//   G(x,y;t) = sum_k K(x - (2k + (-1)^|k| y), t),   K(x,t) = exp(-x^2/4t)/sqrt(4 pi t)
//
// converges fast for small t; the cosine series
//
//   G(x,y;t) = 1/2 + sum_{m>=1} cos(m pi (x+1)/2) cos(m pi (y+1)/2) exp(-(m pi/2)^2 t)
//
// converges fast for large t. Both are truncated with computed tail bounds.

#include <array>

namespace pricefront::kernel {

struct KernelConfig {
  double image_truncation_tol = 1e-15;
  double spectral_truncation_tol = 1e-15;
  /// t above which the spectral series is used.
  double representation_crossover_time = 0.5;

  void validate() const;
};

/// Free-space Gaussian kernel K(x,t).
double kernel_gaussian(double x, double t);

/// K and its first two x-derivatives at offset x. No argument checks; t > 0 assumed.
struct KernelDerivs {
  double value = 0.0;
  double dx = 0.0;
  double dxx = 0.0;
};
KernelDerivs gaussian_derivs(double x, double t) noexcept;

double green_neumann(double x, double x_src, double t, const KernelConfig& cfg = {});
double green_neumann_dx(double x, double x_src, double t, const KernelConfig& cfg = {});
double green_neumann_dxx(double x, double x_src, double t, const KernelConfig& cfg = {});

/// Evaluate value and first two x-derivatives with the image sum regardless of t.
KernelDerivs green_neumann_images(double x, double x_src, double t, const KernelConfig& cfg = {});
/// Evaluate value and first two x-derivatives with the cosine series regardless of t.
KernelDerivs green_neumann_spectral(double x, double x_src, double t, const KernelConfig& cfg = {});
/// Dispatch on the crossover time.
KernelDerivs green_neumann_all(double x, double x_src, double t, const KernelConfig& cfg = {});

/// Image centres seen from x: the kernel equals sum_k K(y - c_k(x), t) as a function of the
/// source y, with c_k(x) = (-1)^|k| (x - 2k). Returns how many images are needed so that the
/// omitted tail is below `tol` for derivatives up to `order`, uniformly over x, y in [-1,1].
int image_count(double t, int order, double tol) noexcept;

/// Number of cosine modes needed for a tail below `tol` at time t for derivatives up to
/// `order`, assuming unit coefficient magnitude.
int spectral_mode_count(double t, int order, double tol) noexcept;

/// Numerically computed supremum of G + |G_x| + |G_xx| over |x - y| < a/4 with the source at
/// y +- a, for all t > 0 (searched on a log grid over [1e-6, 1e2] with local refinement).
struct GammaBound {
  double value = 0.0;
  double a = 0.0;
  double argmax_x = 0.0;
  double argmax_src = 0.0;
  double argmax_t = 0.0;
  /// True when the maximising t is strictly inside the searched t range.
  bool t_interior = false;
};
GammaBound lemma_gamma_bound(double a);

}  // namespace pricefront::kernel
