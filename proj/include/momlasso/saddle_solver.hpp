#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "momlasso/criterion.hpp"
#include "momlasso/dataset.hpp"
#include "momlasso/partition.hpp"

namespace momlasso {

enum class StepDecay { constant, inverse_sqrt };

struct SolverConfig {
  std::int64_t max_iters = 10000;
  /// Base step eta_0. Unset: 1 / (c L), with L the largest per-block
  /// Lipschitz constant of the squared loss gradient (see auto_step_size).
  std::optional<double> step_size;
  /// Base step for the scale variables. Unset: eta_0 * sigma_plus.
  std::optional<double> scale_step_size;
  StepDecay step_decay = StepDecay::constant;
  /// Stop when the averaged (beta, sigma) moves by less than tol (relative)
  /// over one check window.
  double tol = 1e-7;
  std::int64_t check_window = 50;
  /// Fraction of trailing iterates averaged into the returned estimate.
  double averaging_window = 0.5;
  bool record_trace = false;
  /// Start both players at a square-root lasso fit instead of
  /// (0, sigma_plus). Applied by the estimators.
  bool warm_start = false;

  void validate() const;
};

struct TracePoint {
  std::int64_t iter;
  double t_value;
  Index median_block;
};

struct SaddleState {
  PlayerPoint min_player;
  PlayerPoint max_player;
  std::int64_t iter = 0;
  bool converged = false;
  /// Most recent median blocks, oldest first (at most kHistoryLength).
  std::deque<Index> median_block_history;
  /// Average of the trailing iterates of (beta, sigma): the estimate.
  PlayerPoint running_average;
  std::int64_t averaged_iterates = 0;
  std::optional<std::vector<TracePoint>> trace;

  static constexpr std::size_t kHistoryLength = 64;
};

/// 1 / (c L) where L = max_k 2 lambda_max(X_Bk' X_Bk) / |B_k|.
double auto_step_size(const Dataset& data, const BlockPartition& partition, double c);

/// Median-block gradient descent-ascent for the MOM saddle problem.
///
/// Each iteration evaluates all block criteria at the current iterate, takes
/// the lower-median block (exact ties ordered by the block's mean loss under
/// the min player, then by index), and from that block's gradients takes a
/// proximal descent step on (beta, sigma) and a proximal ascent step on
/// (gamma, chi). Coefficient steps are scaled by the player's current scale,
/// which makes them invariant to the units of y. Scales are projected onto
/// [sigma_floor, sigma_plus].
///
/// Initialization is beta = gamma = 0, sigma = chi = sigma_plus unless
/// `init` is given, in which case both players start there.
SaddleState solve(const Dataset& data, const BlockPartition& partition, const CriterionParams& params,
                  const SolverConfig& cfg, const std::optional<PlayerPoint>& init = std::nullopt);

/// Per-iteration (iter, T value, median block); throws AbsentData when the
/// solve was run without record_trace.
const std::vector<TracePoint>& objective_trace(const SaddleState& state);

/// Soft thresholding at level t.
template <typename Derived>
void soft_threshold_inplace(Eigen::MatrixBase<Derived>& v, double t) {
  v = v.unaryExpr([t](double a) { return a > t ? a - t : (a < -t ? a + t : 0.0); });
}

}  // namespace momlasso
