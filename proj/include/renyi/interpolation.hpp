#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "renyi/error.hpp"

namespace renyi {

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slope limiting.
/// Monotone data yields a monotone interpolant; local extrema stay flat, so
/// positive data never overshoots below zero.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  /// Slopes estimated from the data (three-point, then limited).
  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    validate();
    d_ = estimate_slopes();
    limit();
  }

  /// Exact node derivatives supplied by the caller; still limited.
  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> dydx)
      : x_(std::move(x)), y_(std::move(y)), d_(std::move(dydx)) {
    validate();
    require(d_.size() == x_.size(), ErrorKind::InvalidArgument, "slope count mismatch");
    limit();
  }

  std::size_t size() const { return x_.size(); }
  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }

  /// Index k of the cell [x_k, x_{k+1}] containing v (clamped to the table).
  std::size_t locate(double v) const {
    if (v <= x_.front()) return 0;
    if (v >= x_.back()) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), v);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
  }

  double operator()(double v) const {
    const std::size_t k = locate(v);
    const double h = x_[k + 1] - x_[k];
    const double s = std::clamp((v - x_[k]) / h, 0.0, 1.0);
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
  }

 private:
  void validate() const {
    require(x_.size() >= 2 && x_.size() == y_.size(), ErrorKind::InvalidArgument,
            "interpolant needs at least two matching nodes");
    for (std::size_t i = 1; i < x_.size(); ++i)
      require(x_[i] > x_[i - 1], ErrorKind::InvalidArgument, "interpolation nodes must increase");
  }

  std::vector<double> estimate_slopes() const {
    const std::size_t n = x_.size();
    std::vector<double> d(n);
    if (n == 2) {
      d[0] = d[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
      return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      const double s0 = (y_[i] - y_[i - 1]) / h0, s1 = (y_[i + 1] - y_[i]) / h1;
      d[i] = (h1 * s0 + h0 * s1) / (h0 + h1);
    }
    d[0] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
    d[n - 1] = (y_[n - 1] - y_[n - 2]) / (x_[n - 1] - x_[n - 2]);
    return d;
  }

  void limit() {
    for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
      const double delta = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
      if (delta == 0.0) {
        d_[k] = d_[k + 1] = 0.0;
        continue;
      }
      if (d_[k] * delta < 0) d_[k] = 0.0;
      if (d_[k + 1] * delta < 0) d_[k + 1] = 0.0;
      const double a = d_[k] / delta, b = d_[k + 1] / delta;
      const double r = a * a + b * b;
      if (r > 9.0) {
        const double tau = 3.0 / std::sqrt(r);
        d_[k] = tau * a * delta;
        d_[k + 1] = tau * b * delta;
      }
    }
  }

  std::vector<double> x_, y_, d_;
};

}  // namespace renyi
