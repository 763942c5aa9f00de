#pragma once

#include <array>
#include <span>
#include <vector>

namespace pricefront {

/// Cubic spline on a uniform grid over [x0, x0 + (n-1) h] with prescribed end slopes
/// (zero by default, matching a Neumann wall).
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(double x0, double h, std::span<const double> values, double slope_left = 0.0,
              double slope_right = 0.0);

  /// Derivative of the given order (0..3) at x; x is clamped into the grid range.
  double operator()(double x, int order = 0) const;

  /// Integral over [lo, hi] (both clamped into range).
  double integral(double lo, double hi) const;

  /// Integral of S(y) K(y - c, t) over the grid range, K the free-space heat kernel.
  /// Exact for the piecewise cubic; only pieces within the kernel support are visited.
  double gaussian_convolution(double c, double t) const;
  /// Same with the kernel's first two derivatives in c folded in: returns
  /// {int S K, d/dc int S K, d2/dc2 int S K}.
  std::array<double, 3> gaussian_convolution_derivs(double c, double t) const;

  /// int S(y) cos(m pi (y+1)/2) dy over [-1,1] for m = 1..modes (index 0 holds m = 0).
  std::vector<double> cosine_coefficients(int modes) const;

  std::size_t size() const noexcept { return values_.size(); }
  double x0() const noexcept { return x0_; }
  double h() const noexcept { return h_; }
  std::span<const double> values() const noexcept { return values_; }
  double node(std::size_t i) const noexcept { return x0_ + h_ * static_cast<double>(i); }

  /// Local coefficients {a,b,c,d} of piece i in r = y - x_i.
  std::array<double, 4> piece(std::size_t i) const noexcept { return pieces_[i]; }

 private:
  std::size_t locate(double x) const noexcept;

  double x0_ = -1.0;
  double h_ = 1.0;
  std::vector<double> values_;
  std::vector<std::array<double, 4>> pieces_;
};

}  // namespace pricefront
