#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "momlasso/dataset.hpp"
#include "momlasso/saddle_solver.hpp"

namespace momlasso {

inline constexpr double kDefaultCriterionC = 3.0;

/// Constants of the block-count and penalty schedules
///   K  = ceil(iota_k * c1_tilde * s * log(e d / s)),
///   mu = iota_mu * c2_tilde * sqrt(log(e d / s) / n).
struct TuningSchedule {
  double c1_tilde = 2.0;
  double c2_tilde = 10.0;
  double iota_k = 1.0;
  double iota_mu = 1.0;

  void validate() const;
};

struct ScheduleResult {
  Index k;             // clamped to [1, n]
  double mu;
  Index k_unclamped;
};

ScheduleResult schedule(Index n, Index d, Index s, const TuningSchedule& t);

struct FitDiagnostics {
  std::int64_t iterations = 0;
  bool converged = false;
  std::int64_t averaged_iterates = 0;
  std::optional<Index> last_median_block;
  double sigma_plus_used = 0;
  std::vector<std::string> flags;
  std::optional<std::vector<TracePoint>> trace;
};

struct FitResult {
  Eigen::VectorXd beta_hat;
  double sigma_hat = 0;
  std::optional<Index> s_selected;
  Index k_used = 0;
  double mu_used = 0;
  FitDiagnostics diagnostics;
};

/// MOM-K square-root lasso with explicit K and mu.
FitResult fit_mom(const Dataset& data, Index k, double mu, double sigma_plus, const SolverConfig& solver_cfg,
                  std::uint64_t seed, double c = kDefaultCriterionC);

/// MOM-K square-root lasso with K and mu from the schedule at sparsity s.
/// Throws InfeasibleConfig when the schedule asks for more blocks than samples.
FitResult fit_fixed_s(const Dataset& data, Index s, double sigma_plus, const TuningSchedule& t,
                      const SolverConfig& solver_cfg, std::uint64_t seed, double c = kDefaultCriterionC);

/// max(0, MOM(y^2) - MOM(y)^2) over one seeded K-block partition.
double mom_variance_bound(const Eigen::VectorXd& y, Index k, std::uint64_t seed);
double mom_variance_bound(const Eigen::VectorXd& y, const BlockPartition& partition);

/// Seeded half split used by fit_estimated_sigma_plus: the first floor(n/2)
/// permuted rows estimate the variance, the rest are fitted.
struct HalfSplit {
  std::vector<Index> variance_rows;
  std::vector<Index> fit_rows;
};
HalfSplit half_split(Index n, std::uint64_t seed);

/// sigma_plus estimated by mom_variance_bound on one half, then fit_fixed_s
/// on the other half with the same K.
FitResult fit_estimated_sigma_plus(const Dataset& data, Index s, const TuningSchedule& t,
                                   const SolverConfig& solver_cfg, std::uint64_t seed,
                                   double c = kDefaultCriterionC);

struct AdaptiveConfig {
  Index s_plus = 1;
  double agg_c1 = 3.0;
  double agg_c2 = 3.0;
  double agg_c3 = 3.0;

  void validate(Index d) const;
};

/// u^{1/p} sqrt(max(1, log(e d / u)) / n).
double rate(double u, double p, Index n, Index d);

/// One level of the dyadic sweep.
struct AdaptiveLevel {
  Index m;
  Index s;
  std::optional<FitResult> fit;
  std::string error;  // non-empty when the level failed
};

struct AdaptiveSelection {
  Index m_selected;
  std::vector<Index> admissible;  // the set of m passing every later comparison
};

/// Lepski-type stopping rule over fitted levels m = 1..M+1 (levels[m-1]).
/// Level m in 1..M is admissible when for every k in m+1..M the consecutive
/// fits 2^{k-1} and 2^k are within C1 sigma_ref r_1(2^k) in l1, C2 sigma_ref
/// r_2(2^k) in l2, and C3 sigma_ref r_2(2^k) in sigma; sigma_ref is the
/// sigma of level M+1. Level M is admissible whenever it was fitted. The
/// selection is the smallest admissible m, or M+1 when there is none.
AdaptiveSelection select_level(const std::vector<AdaptiveLevel>& levels, const AdaptiveConfig& cfg, Index n,
                               Index d);

/// Adaptive-to-sparsity aggregation over s = 2, 4, ..., 2^{M+1},
/// M = ceil(log2 s_plus).
FitResult fit_adaptive(const Dataset& data, const AdaptiveConfig& cfg, double sigma_plus, const TuningSchedule& t,
                       const SolverConfig& solver_cfg, std::uint64_t seed, double c = kDefaultCriterionC,
                       std::vector<AdaptiveLevel>* levels_out = nullptr);

// Non-robust comparators.

/// argmin sqrt(|y - X beta|^2 / n) + mu |beta|_1 by the concomitant scheme:
/// closed-form sigma = rms residual alternating with proximal gradient on
/// |y - X beta|^2 / (2 n sigma) + mu |beta|_1.
FitResult sqrt_lasso_baseline(const Dataset& data, double mu, std::int64_t max_iters = 20000, double tol = 1e-10);

/// argmin |y - X beta|^2 / (2 n) + lambda |beta|_1 by accelerated proximal
/// gradient. sigma_hat is the rms residual.
FitResult lasso_baseline(const Dataset& data, double lambda, std::int64_t max_iters = 20000, double tol = 1e-10);

}  // namespace momlasso
