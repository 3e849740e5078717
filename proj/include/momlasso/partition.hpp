#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "momlasso/errors.hpp"
#include "momlasso/quantile.hpp"

namespace momlasso {

using Index = Eigen::Index;

/// Assignment of sample indices to K disjoint blocks of equal size.
///
/// Built from a seeded uniform permutation of {0, ..., n-1}; the first
/// K * floor(n / K) permuted indices are cut into K contiguous runs and the
/// remainder is dropped. Indices inside a block are stored in ascending order
/// so that per-block sums are always accumulated in the same order.
class BlockPartition {
 public:
  BlockPartition() = default;

  Index n() const noexcept { return n_; }
  Index n_used() const noexcept { return static_cast<Index>(indices_.size()); }
  Index k() const noexcept { return k_; }
  Index block_size() const noexcept { return k_ == 0 ? 0 : n_used() / k_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::span<const Index> block(Index b) const {
    return {indices_.data() + b * block_size(), static_cast<std::size_t>(block_size())};
  }

  /// All retained indices, block after block.
  std::span<const Index> indices() const noexcept { return indices_; }

  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;

  friend BlockPartition make_partition(Index n, Index k, std::uint64_t seed);
  friend BlockPartition partition_from_blocks(Index n, const std::vector<std::vector<Index>>& blocks);

 private:
  Index n_ = 0;
  Index k_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<Index> indices_;
};

/// Seeded partition of n samples into k equal blocks. Requires 1 <= k <= n.
BlockPartition make_partition(Index n, Index k, std::uint64_t seed);

/// Explicit partition, mostly for fixtures. Blocks must be disjoint, of equal
/// size, and index into [0, n). The recorded seed is 0.
BlockPartition partition_from_blocks(Index n, const std::vector<std::vector<Index>>& blocks);

/// Per-block empirical means of a per-sample statistic.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> block_means(const Eigen::DenseBase<Derived>& values,
                                                                       const BlockPartition& partition) {
  using Scalar = typename Derived::Scalar;
  if (values.size() != partition.n())
    throw InvalidInput("statistic length does not match the partitioned sample size");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> means(partition.k());
  const auto denom = static_cast<Scalar>(partition.block_size());
  for (Index b = 0; b < partition.k(); ++b) {
    Scalar acc(0);
    for (Index i : partition.block(b)) acc += values.derived().coeff(i);
    means(b) = acc / denom;
  }
  return means;
}

/// alpha-quantile of the block means; alpha = 1/2 gives the median-of-means.
template <typename Derived>
typename Derived::Scalar mom_statistic(const Eigen::DenseBase<Derived>& values, const BlockPartition& partition,
                                       Fraction alpha = Fraction::half()) {
  return quantile(block_means(values, partition), alpha);
}

}  // namespace momlasso
