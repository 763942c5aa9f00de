#include "pricefront/spline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pricefront/errors.hpp"

namespace pricefront {

namespace {

constexpr double kPi = std::numbers::pi;

// int_{za}^{zb} z^j exp(-z^2) dz for j = 0..5.
std::array<double, 6> gaussian_moments(double za, double zb) {
  std::array<double, 6> m{};
  if (za >= 0.0) {
    m[0] = 0.5 * std::sqrt(kPi) * (std::erfc(za) - std::erfc(zb));
  } else if (zb <= 0.0) {
    m[0] = 0.5 * std::sqrt(kPi) * (std::erfc(-zb) - std::erfc(-za));
  } else {
    m[0] = 0.5 * std::sqrt(kPi) * (std::erf(zb) - std::erf(za));
  }
  const double ea = std::exp(-za * za);
  const double eb = std::exp(-zb * zb);
  m[1] = 0.5 * (ea - eb);
  double pa = 1.0;  // za^(j-1)
  double pb = 1.0;
  for (int j = 2; j < 6; ++j) {
    pa *= za;
    pb *= zb;
    m[j] = 0.5 * (pa * ea - pb * eb) + 0.5 * (j - 1) * m[j - 2];
  }
  return m;
}

}  // namespace

CubicSpline::CubicSpline(double x0, double h, std::span<const double> values, double slope_left,
                         double slope_right)
    : x0_(x0), h_(h), values_(values.begin(), values.end()) {
  const std::size_t n = values_.size();
  if (n < 4) throw DomainError("cubic spline needs at least 4 samples");
  if (!(h > 0.0)) throw DomainError("cubic spline needs a positive spacing");

  // Second derivatives M_i from the clamped tridiagonal system.
  std::vector<double> diag(n), upper(n), lower(n), rhs(n);
  const auto& y = values_;
  diag[0] = 2.0;
  upper[0] = 1.0;
  rhs[0] = 6.0 / h * ((y[1] - y[0]) / h - slope_left);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    lower[i] = 1.0;
    diag[i] = 4.0;
    upper[i] = 1.0;
    rhs[i] = 6.0 / (h * h) * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
  }
  lower[n - 1] = 1.0;
  diag[n - 1] = 2.0;
  rhs[n - 1] = 6.0 / h * (slope_right - (y[n - 1] - y[n - 2]) / h);
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> second(n);
  second[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) second[i] = (rhs[i] - upper[i] * second[i + 1]) / diag[i];

  pieces_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = y[i];
    const double b = (y[i + 1] - y[i]) / h - h * (2.0 * second[i] + second[i + 1]) / 6.0;
    const double c = second[i] / 2.0;
    const double d = (second[i + 1] - second[i]) / (6.0 * h);
    pieces_[i] = {a, b, c, d};
  }
}

std::size_t CubicSpline::locate(double x) const noexcept {
  const double s = (x - x0_) / h_;
  if (s <= 0.0) return 0;
  const auto i = static_cast<std::size_t>(s);
  return std::min(i, pieces_.size() - 1);
}

double CubicSpline::operator()(double x, int order) const {
  const double xmax = node(values_.size() - 1);
  x = std::clamp(x, x0_, xmax);
  const std::size_t i = locate(x);
  const auto [a, b, c, d] = pieces_[i];
  const double r = x - node(i);
  switch (order) {
    case 0: return a + r * (b + r * (c + r * d));
    case 1: return b + r * (2.0 * c + 3.0 * r * d);
    case 2: return 2.0 * c + 6.0 * r * d;
    case 3: return 6.0 * d;
    default: return 0.0;
  }
}

double CubicSpline::integral(double lo, double hi) const {
  const double xmax = node(values_.size() - 1);
  double sign = 1.0;
  if (lo > hi) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  lo = std::clamp(lo, x0_, xmax);
  hi = std::clamp(hi, x0_, xmax);
  auto antideriv = [](const std::array<double, 4>& p, double r) {
    return r * (p[0] + r * (p[1] / 2.0 + r * (p[2] / 3.0 + r * p[3] / 4.0)));
  };
  const std::size_t i0 = locate(lo);
  const std::size_t i1 = locate(hi);
  double total = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) {
    const double a = std::max(lo, node(i)) - node(i);
    const double b = std::min(hi, node(i + 1)) - node(i);
    if (b > a) total += antideriv(pieces_[i], b) - antideriv(pieces_[i], a);
  }
  return sign * total;
}

std::array<double, 3> CubicSpline::gaussian_convolution_derivs(double c, double t) const {
  // With u = y - c and z = u / (2 sqrt t): K(u) = exp(-z^2) / (2 sqrt(pi t)).
  // d/dc K(y - c) = -K'(u) = (u / 2t) K;  d2/dc2 K(y - c) = K''(u) = (u^2/4t^2 - 1/2t) K.
  const double st = std::sqrt(t);
  const double reach = 14.0 * st;  // exp(-z^2) < 1e-21 beyond z = 7
  const double xmax = node(values_.size() - 1);
  const double lo = std::max(x0_, c - reach);
  const double hi = std::min(xmax, c + reach);
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  if (lo >= hi) return acc;
  const std::size_t i0 = locate(lo);
  const std::size_t i1 = locate(hi);
  const double norm = 1.0 / std::sqrt(kPi);
  for (std::size_t i = i0; i <= i1; ++i) {
    const double xi = node(i);
    // Re-expand the piece around c: P(y) = sum_j q_j u^j with u = y - c, r = u + (c - xi).
    const auto [a, b, cc, d] = pieces_[i];
    const double s = c - xi;
    const std::array<double, 4> q{a + s * (b + s * (cc + s * d)), b + s * (2.0 * cc + 3.0 * s * d),
                                  cc + 3.0 * s * d, d};
    const double za = (xi - c) / (2.0 * st);
    const double zb = (xi + h_ - c) / (2.0 * st);
    const auto mom = gaussian_moments(za, zb);
    // int K u^j du = (2 sqrt t)^j / sqrt(pi) * mom[j]
    double scale = norm;
    std::array<double, 6> umom{};  // int K u^j du
    for (int j = 0; j < 6; ++j) {
      umom[j] = scale * mom[j];
      scale *= 2.0 * st;
    }
    for (int j = 0; j < 4; ++j) {
      acc[0] += q[j] * umom[j];
      acc[1] += q[j] * umom[j + 1] / (2.0 * t);
      acc[2] += q[j] * (umom[j + 2] / (4.0 * t * t) - umom[j] / (2.0 * t));
    }
  }
  return acc;
}

double CubicSpline::gaussian_convolution(double c, double t) const {
  return gaussian_convolution_derivs(c, t)[0];
}

std::vector<double> CubicSpline::cosine_coefficients(int modes) const {
  std::vector<double> out(static_cast<std::size_t>(modes) + 1, 0.0);
  out[0] = integral(x0_, node(values_.size() - 1));
  for (int m = 1; m <= modes; ++m) {
    const double k = m * kPi / 2.0;
    // Antiderivative of P(y) cos(k(y+1)):
    //   P sin/k + P' cos/k^2 - P'' sin/k^3 - P''' cos/k^4.
    double total = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto [a, b, c, d] = pieces_[i];
      auto anti = [&](double r, double y) {
        const double th = k * (y + 1.0);
        const double sn = std::sin(th);
        const double cs = std::cos(th);
        const double p0 = a + r * (b + r * (c + r * d));
        const double p1 = b + r * (2.0 * c + 3.0 * r * d);
        const double p2 = 2.0 * c + 6.0 * r * d;
        const double p3 = 6.0 * d;
        return p0 * sn / k + p1 * cs / (k * k) - p2 * sn / (k * k * k) - p3 * cs / (k * k * k * k);
      };
      total += anti(h_, node(i + 1)) - anti(0.0, node(i));
    }
    out[static_cast<std::size_t>(m)] = total;
  }
  return out;
}

}  // namespace pricefront
