#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include <Eigen/Core>

namespace entropic {

/// log(sum_i exp(x_i)) with max subtraction. Empty or all -inf input gives -inf.
inline double log_sum_exp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - m);
  return m + std::log(acc);
}

/// log(sum_i w_i * exp(x_i)) for non-negative weights; zero weights drop out.
///
/// When the exponents are tightly spread around their weighted mean c the result is
/// c + log(sum w) + log1p(sum w_hat expm1(x - c)), which stays accurate when the caller
/// divides by a tiny beta. Wider spreads use max subtraction.
template <class W, class X>
double weighted_log_sum_exp(const Eigen::MatrixBase<W>& w, const Eigen::MatrixBase<X>& x) {
  double m = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  double mean = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (w(i) > 0.0) {
      m = std::max(m, x(i));
      total += w(i);
      mean += w(i) * x(i);
    }
  if (!std::isfinite(m)) return m;
  mean /= total;
  if (std::isfinite(mean) && m - mean <= 1.0) {
    double acc = 0.0;
    double lo = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (w(i) > 0.0) {
        acc += w(i) * std::expm1(x(i) - mean);
        lo = std::min(lo, x(i) - mean);
      }
    if (lo >= -1.0) return mean + std::log(total) + std::log1p(acc / total);
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (w(i) > 0.0) acc += w(i) * std::exp(x(i) - m);
  return m + std::log(acc);
}

/// Normalized weights proportional to w_i * exp(x_i), computed in log domain.
template <class W, class X>
Eigen::VectorXd twisted_weights(const Eigen::MatrixBase<W>& w, const Eigen::MatrixBase<X>& x) {
  const double lse = weighted_log_sum_exp(w, x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (w(i) > 0.0) out(i) = w(i) * std::exp(x(i) - lse);
  return out / out.sum();
}

}  // namespace entropic
