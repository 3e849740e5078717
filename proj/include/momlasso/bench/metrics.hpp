#pragma once

#include <cmath>

#include <Eigen/Core>

namespace momlasso::bench {

template <typename A, typename B>
double err_lp(const Eigen::MatrixBase<A>& beta_hat, const Eigen::MatrixBase<B>& beta_star, double p) {
  const auto diff = (beta_hat - beta_star).array().abs();
  if (p == 1.0) return diff.sum();
  if (p == 2.0) return std::sqrt(diff.square().sum());
  const double m = diff.maxCoeff();
  if (m == 0.0) return 0.0;
  return m * std::pow((diff / m).pow(p).sum(), 1.0 / p);
}

/// |v|_p <= |v|_1^{2/p - 1} |v|_2^{2 - 2/p} for p in [1, 2].
inline double interpolation_bound(double l1, double l2, double p) {
  return std::pow(l1, 2.0 / p - 1.0) * std::pow(l2, 2.0 - 2.0 / p);
}

inline bool satisfies_interpolation(double lp, double l1, double l2, double p, double rel = 1e-9) {
  return lp <= interpolation_bound(l1, l2, p) * (1.0 + rel);
}

/// err_l2 <= err_l1 <= sqrt(d) err_l2.
inline bool satisfies_norm_ordering(double l1, double l2, Eigen::Index d, double rel = 1e-12) {
  return l2 <= l1 * (1.0 + rel) && l1 <= std::sqrt(static_cast<double>(d)) * l2 * (1.0 + rel);
}

}  // namespace momlasso::bench
