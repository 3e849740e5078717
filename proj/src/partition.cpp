#include "momlasso/partition.hpp"

#include <algorithm>
#include <numeric>

#include "momlasso/random.hpp"

namespace momlasso {

BlockPartition make_partition(Index n, Index k, std::uint64_t seed) {
  if (k < 1 || k > n) throw InvalidInput("number of blocks must satisfy 1 <= k <= n");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  SplitMix64 gen(seed);
  shuffle(std::span<Index>(perm), gen);

  const Index size = n / k;
  BlockPartition p;
  p.n_ = n;
  p.k_ = k;
  p.seed_ = seed;
  p.indices_.assign(perm.begin(), perm.begin() + k * size);
  for (Index b = 0; b < k; ++b) {
    auto first = p.indices_.begin() + b * size;
    std::sort(first, first + size);
  }
  return p;
}

BlockPartition partition_from_blocks(Index n, const std::vector<std::vector<Index>>& blocks) {
  if (blocks.empty()) throw InvalidInput("partition needs at least one block");
  const auto size = blocks.front().size();
  if (size == 0) throw InvalidInput("blocks must be nonempty");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  BlockPartition p;
  p.n_ = n;
  p.k_ = static_cast<Index>(blocks.size());
  for (const auto& block : blocks) {
    if (block.size() != size) throw InvalidInput("blocks must have equal size");
    std::vector<Index> sorted = block;
    std::sort(sorted.begin(), sorted.end());
    for (Index i : sorted) {
      if (i < 0 || i >= n) throw InvalidInput("block index out of range");
      if (seen[static_cast<std::size_t>(i)]) throw InvalidInput("blocks must be disjoint");
      seen[static_cast<std::size_t>(i)] = 1;
    }
    p.indices_.insert(p.indices_.end(), sorted.begin(), sorted.end());
  }
  return p;
}

}  // namespace momlasso
