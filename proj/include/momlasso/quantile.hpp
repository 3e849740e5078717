#pragma once

// Quantiles of finite vectors, following the set-valued definition
//
//   Q_alpha[x] = { u : #{k : x_k >= u} >= (1 - alpha) K  and  #{k : x_k <= u} >= alpha K }.
//
// The set is the closed interval [x_(ceil(alpha K)), x_(floor(alpha K) + 1)];
// quantile() returns its lower end. All cardinality comparisons are done in
// exact integer arithmetic, which is why alpha is a Fraction.

#include <algorithm>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "momlasso/errors.hpp"

namespace momlasso {

/// A rational number num/den in the open interval (0, 1).
class Fraction {
 public:
  constexpr Fraction(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den <= 0 || num <= 0 || num >= den) throw InvalidInput("quantile level must lie in (0, 1)");
  }

  static constexpr Fraction half() { return Fraction(1, 2); }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  constexpr double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// 1 - alpha.
  constexpr Fraction complement() const { return Fraction(den_ - num_, den_); }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

/// ceil(alpha * k): the 1-based order statistic returned by quantile().
constexpr std::int64_t quantile_rank(Fraction alpha, std::int64_t k) {
  const std::int64_t p = alpha.num() * k;
  return (p + alpha.den() - 1) / alpha.den();
}

/// Lower representative x_(ceil(alpha K)) of the alpha-quantile set.
template <typename Derived>
typename Derived::Scalar quantile(const Eigen::DenseBase<Derived>& x, Fraction alpha) {
  using Scalar = typename Derived::Scalar;
  const auto k = static_cast<std::int64_t>(x.size());
  if (k == 0) throw InvalidInput("quantile of an empty vector");
  std::vector<Scalar> v(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < x.size(); ++i) v[static_cast<std::size_t>(i)] = x.derived().coeff(i);
  const auto rank = quantile_rank(alpha, k);
  auto nth = v.begin() + (rank - 1);
  std::nth_element(v.begin(), nth, v.end());
  return *nth;
}

template <typename Scalar>
Scalar quantile(const std::vector<Scalar>& x, Fraction alpha) {
  return quantile(Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(
                      x.data(), static_cast<Eigen::Index>(x.size())),
                  alpha);
}

/// "Q_alpha[x] >= t": at least (1 - alpha) K components are >= t.
template <typename Derived>
bool quantile_at_least(const Eigen::DenseBase<Derived>& x, Fraction alpha, typename Derived::Scalar t) {
  const auto count = static_cast<std::int64_t>((x.derived().array() >= t).count());
  return count * alpha.den() >= (alpha.den() - alpha.num()) * static_cast<std::int64_t>(x.size());
}

/// "Q_alpha[x] <= t": at least alpha K components are <= t.
template <typename Derived>
bool quantile_at_most(const Eigen::DenseBase<Derived>& x, Fraction alpha, typename Derived::Scalar t) {
  const auto count = static_cast<std::int64_t>((x.derived().array() <= t).count());
  return count * alpha.den() >= alpha.num() * static_cast<std::int64_t>(x.size());
}

/// Membership u in Q_alpha[x].
template <typename Derived>
bool in_quantile_set(const Eigen::DenseBase<Derived>& x, Fraction alpha, typename Derived::Scalar u) {
  return quantile_at_least(x, alpha, u) && quantile_at_most(x, alpha, u);
}

}  // namespace momlasso
