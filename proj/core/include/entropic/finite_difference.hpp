#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace entropic {

inline constexpr double kFiniteDifferenceStep = 1e-5;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate of x.
template <class Derived, class F>
Derived central_difference_gradient(F&& f, const Eigen::MatrixBase<Derived>& x, double h = kFiniteDifferenceStep) {
  Derived g(x.rows(), x.cols());
  Derived probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = probe(i);
    probe(i) = saved + h;
    const double up = f(probe);
    probe(i) = saved - h;
    const double down = f(probe);
    probe(i) = saved;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||); 0 when both are exactly zero.
template <class A, class B>
double relative_error(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double scale = std::max(a.norm(), b.norm());
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps coordinates that are
/// numerically zero from dominating through rounding noise.
template <class A, class B>
double max_relative_error(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, double floor) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a(i)), std::abs(b(i)), floor});
    if (scale > 0.0) worst = std::max(worst, std::abs(a(i) - b(i)) / scale);
  }
  return worst;
}

}  // namespace entropic
