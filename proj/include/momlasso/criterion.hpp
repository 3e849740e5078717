#pragma once

// Pairwise criterion between a candidate (beta, sigma) and an adversary
// (gamma, chi) in the sparse linear model:
//
//   R_c(l_g, chi, l_f, sigma) = (sigma - chi) (1 - 2 (l_f + l_g) / (sigma + chi)^2)
//                               + 2 c (l_f - l_g) / (sigma + chi)
//
// with l_f = (y - x'beta)^2 and l_g = (y - x'gamma)^2. Block criteria average
// R_c over one block; T_{K,mu} takes the median over blocks and adds
// mu (|beta|_1 - |gamma|_1).

#include <cmath>
#include <span>

#include <Eigen/Core>

#include "momlasso/dataset.hpp"
#include "momlasso/errors.hpp"
#include "momlasso/partition.hpp"
#include "momlasso/quantile.hpp"

namespace momlasso {

template <typename Scalar>
struct BasicCriterionParams {
  Scalar c = Scalar(3);
  Scalar mu = Scalar(0);
  Scalar sigma_plus = Scalar(1);
  Scalar sigma_floor = Scalar(1e-6);

  /// Parameters with the default floor 1e-6 * sigma_plus.
  static BasicCriterionParams with_bound(Scalar c, Scalar mu, Scalar sigma_plus) {
    return {c, mu, sigma_plus, Scalar(1e-6) * sigma_plus};
  }

  void validate() const {
    // c > 2 is the regime of the recovery guarantees.
    if (!(c > Scalar(2))) throw InvalidInput("criterion constant c must exceed 2");
    if (!(mu >= Scalar(0))) throw InvalidInput("penalty mu must be nonnegative");
    if (!(sigma_floor > Scalar(0) && sigma_floor < sigma_plus))
      throw InvalidInput("need 0 < sigma_floor < sigma_plus");
  }
};

/// One player of the game: linear coefficients and a noise scale.
template <typename Scalar>
struct BasicPlayerPoint {
  VectorX<Scalar> beta;
  Scalar sigma = Scalar(1);

  friend bool operator==(const BasicPlayerPoint& a, const BasicPlayerPoint& b) {
    return a.sigma == b.sigma && a.beta.size() == b.beta.size() && (a.beta.array() == b.beta.array()).all();
  }
};

using CriterionParams = BasicCriterionParams<double>;
using PlayerPoint = BasicPlayerPoint<double>;

template <typename Derived, typename OtherDerived>
typename Derived::Scalar squared_loss(const Eigen::MatrixBase<Derived>& beta, const Eigen::MatrixBase<OtherDerived>& x,
                                      typename Derived::Scalar y) {
  if (beta.size() != x.size()) throw InvalidInput("coefficient and covariate dimensions differ");
  const auto r = y - beta.dot(x);
  return r * r;
}

namespace detail {

template <typename Scalar>
inline Scalar r_c_unchecked(Scalar l_g, Scalar chi, Scalar l_f, Scalar sigma, Scalar c) {
  const Scalar u = sigma + chi;
  return (sigma - chi) * (Scalar(1) - Scalar(2) * (l_f + l_g) / (u * u)) + Scalar(2) * c * (l_f - l_g) / u;
}

}  // namespace detail

template <typename Scalar>
Scalar r_c(Scalar l_g, Scalar chi, Scalar l_f, Scalar sigma, Scalar c) {
  if (!(chi > Scalar(0)) || !(sigma > Scalar(0))) throw InvalidInput("scales must be positive");
  return detail::r_c_unchecked(l_g, chi, l_f, sigma, c);
}

/// l_f / sigma + sigma - l_g / chi - chi. Unstable as chi -> 0; kept for
/// comparison with r_c.
template <typename Scalar>
Scalar r_c_naive(Scalar l_g, Scalar chi, Scalar l_f, Scalar sigma) {
  if (!(chi > Scalar(0)) || !(sigma > Scalar(0))) throw InvalidInput("scales must be positive");
  return l_f / sigma + sigma - l_g / chi - chi;
}

/// Partial derivatives of R_c in each of its four arguments.
template <typename Scalar>
struct RcPartials {
  Scalar d_l_g;
  Scalar d_chi;
  Scalar d_l_f;
  Scalar d_sigma;
};

template <typename Scalar>
RcPartials<Scalar> r_c_partials(Scalar l_g, Scalar chi, Scalar l_f, Scalar sigma, Scalar c) {
  const Scalar u = sigma + chi;
  const Scalar u2 = u * u;
  const Scalar diff = sigma - chi;
  const Scalar sum_l = l_f + l_g;
  const Scalar base = Scalar(1) - Scalar(2) * sum_l / u2;
  const Scalar curv = diff * Scalar(4) * sum_l / (u2 * u);
  const Scalar cross = Scalar(2) * c * (l_f - l_g) / u2;
  const Scalar loss_scale = Scalar(-2) * diff / u2;
  return {loss_scale - Scalar(2) * c / u, -base + curv - cross, loss_scale + Scalar(2) * c / u, base + curv - cross};
}

/// 2(c + (sigma - chi)/(sigma + chi)) / (sigma + chi): minus the slope of R_c
/// in l_g. The bracket lies in [c - 1, c + 1].
template <typename Scalar>
Scalar adversary_loss_slope(Scalar chi, Scalar sigma, Scalar c) {
  return Scalar(2) / (sigma + chi) * (c + (sigma - chi) / (sigma + chi));
}

/// y - X beta, skipping zero coefficients.
template <typename Scalar>
VectorX<Scalar> residuals(const BasicDataset<Scalar>& data, const VectorX<Scalar>& beta) {
  if (beta.size() != data.d()) throw InvalidInput("coefficient dimension does not match the design");
  VectorX<Scalar> r = data.y;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != Scalar(0)) r.noalias() -= beta(j) * data.x.col(j);
  }
  return r;
}

/// Mean of R_c over a block, from precomputed residual vectors.
template <typename Scalar>
Scalar block_criterion_from_residuals(std::span<const Eigen::Index> block, const VectorX<Scalar>& r_min,
                                      const VectorX<Scalar>& r_max, Scalar sigma, Scalar chi, Scalar c) {
  Scalar acc(0);
  for (auto i : block) {
    acc += detail::r_c_unchecked(r_max(i) * r_max(i), chi, r_min(i) * r_min(i), sigma, c);
  }
  return acc / static_cast<Scalar>(block.size());
}

template <typename Scalar>
void check_block(std::span<const Eigen::Index> block, const BasicDataset<Scalar>& data) {
  if (block.empty()) throw InvalidInput("empty block");
  for (auto i : block) {
    if (i < 0 || i >= data.n()) throw InvalidInput("block index out of range");
  }
}

template <typename Scalar>
void check_players(const BasicDataset<Scalar>& data, const BasicPlayerPoint<Scalar>& min_player,
                   const BasicPlayerPoint<Scalar>& max_player) {
  if (min_player.beta.size() != data.d() || max_player.beta.size() != data.d())
    throw InvalidInput("player dimension does not match the design");
  if (!(min_player.sigma > Scalar(0)) || !(max_player.sigma > Scalar(0)))
    throw InvalidInput("scales must be positive");
}

/// Criterion of (beta, sigma) against (gamma, chi) on one block.
template <typename Scalar>
Scalar block_criterion(std::span<const Eigen::Index> block, const BasicDataset<Scalar>& data,
                       const BasicPlayerPoint<Scalar>& min_player, const BasicPlayerPoint<Scalar>& max_player,
                       const BasicCriterionParams<Scalar>& params) {
  check_block(block, data);
  check_players(data, min_player, max_player);
  Scalar acc(0);
  for (auto i : block) {
    const Scalar l_f = squared_loss(min_player.beta, data.x.row(i).transpose(), data.y(i));
    const Scalar l_g = squared_loss(max_player.beta, data.x.row(i).transpose(), data.y(i));
    acc += detail::r_c_unchecked(l_g, max_player.sigma, l_f, min_player.sigma, params.c);
  }
  return acc / static_cast<Scalar>(block.size());
}

/// All K block criteria.
template <typename Scalar>
VectorX<Scalar> block_criteria(const BasicDataset<Scalar>& data, const BlockPartition& partition,
                               const BasicPlayerPoint<Scalar>& min_player, const BasicPlayerPoint<Scalar>& max_player,
                               const BasicCriterionParams<Scalar>& params) {
  check_players(data, min_player, max_player);
  if (partition.n() != data.n()) throw InvalidInput("partition does not match the dataset");
  const VectorX<Scalar> r_min = residuals(data, min_player.beta);
  const VectorX<Scalar> r_max = residuals(data, max_player.beta);
  VectorX<Scalar> out(partition.k());
  for (Eigen::Index b = 0; b < partition.k(); ++b) {
    out(b) = block_criterion_from_residuals(partition.block(b), r_min, r_max, min_player.sigma, max_player.sigma,
                                            params.c);
  }
  return out;
}

/// Penalized global criterion T_{K,mu}: median of the block criteria plus
/// mu (|beta|_1 - |gamma|_1).
template <typename Scalar>
Scalar t_k_mu(const BasicDataset<Scalar>& data, const BlockPartition& partition,
              const BasicPlayerPoint<Scalar>& min_player, const BasicPlayerPoint<Scalar>& max_player,
              const BasicCriterionParams<Scalar>& params) {
  const Scalar median = quantile(block_criteria(data, partition, min_player, max_player, params), Fraction::half());
  return median + params.mu * (min_player.beta.template lpNorm<1>() - max_player.beta.template lpNorm<1>());
}

template <typename Scalar>
struct BlockGradients {
  VectorX<Scalar> beta;
  Scalar sigma;
  VectorX<Scalar> gamma;
  Scalar chi;
};

/// Gradients of a block criterion from precomputed residuals.
template <typename Scalar>
BlockGradients<Scalar> block_gradients_from_residuals(std::span<const Eigen::Index> block,
                                                      const BasicDataset<Scalar>& data, const VectorX<Scalar>& r_min,
                                                      const VectorX<Scalar>& r_max, Scalar sigma, Scalar chi,
                                                      Scalar c) {
  BlockGradients<Scalar> g{VectorX<Scalar>::Zero(data.d()), Scalar(0), VectorX<Scalar>::Zero(data.d()), Scalar(0)};
  // dR/dl_f and dR/dl_g depend on the scales only.
  const Scalar u = sigma + chi;
  const Scalar loss_scale = Scalar(-2) * (sigma - chi) / (u * u);
  const Scalar d_l_f = loss_scale + Scalar(2) * c / u;
  const Scalar d_l_g = loss_scale - Scalar(2) * c / u;
  for (auto i : block) {
    const Scalar lf = r_min(i) * r_min(i);
    const Scalar lg = r_max(i) * r_max(i);
    const auto p = r_c_partials(lg, chi, lf, sigma, c);
    g.sigma += p.d_sigma;
    g.chi += p.d_chi;
    g.beta.noalias() += r_min(i) * data.x.row(i).transpose();
    g.gamma.noalias() += r_max(i) * data.x.row(i).transpose();
  }
  const Scalar inv = Scalar(1) / static_cast<Scalar>(block.size());
  // d l / d beta = -2 r x.
  g.beta *= Scalar(-2) * d_l_f * inv;
  g.gamma *= Scalar(-2) * d_l_g * inv;
  g.sigma *= inv;
  g.chi *= inv;
  return g;
}

/// Exact gradients of block_criterion with respect to (beta, sigma, gamma, chi).
template <typename Scalar>
BlockGradients<Scalar> block_criterion_gradients(std::span<const Eigen::Index> block, const BasicDataset<Scalar>& data,
                                                 const BasicPlayerPoint<Scalar>& min_player,
                                                 const BasicPlayerPoint<Scalar>& max_player,
                                                 const BasicCriterionParams<Scalar>& params) {
  check_block(block, data);
  check_players(data, min_player, max_player);
  if (min_player.sigma < params.sigma_floor || max_player.sigma < params.sigma_floor)
    throw InvalidInput("scales below the numerical floor");
  VectorX<Scalar> r_min(data.n()), r_max(data.n());
  r_min.setZero();
  r_max.setZero();
  for (auto i : block) {
    r_min(i) = data.y(i) - data.x.row(i).dot(min_player.beta);
    r_max(i) = data.y(i) - data.x.row(i).dot(max_player.beta);
  }
  return block_gradients_from_residuals(block, data, r_min, r_max, min_player.sigma, max_player.sigma, params.c);
}

}  // namespace momlasso
