#include "momlasso/saddle_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "momlasso/random.hpp"

namespace momlasso {

void SolverConfig::validate() const {
  if (max_iters < 1) throw InvalidInput("max_iters must be at least 1");
  if (!(tol > 0)) throw InvalidInput("tol must be positive");
  if (check_window < 1) throw InvalidInput("check_window must be at least 1");
  if (!(averaging_window > 0 && averaging_window <= 1)) throw InvalidInput("averaging_window must lie in (0, 1]");
  if (step_size && !(*step_size > 0)) throw InvalidInput("step_size must be positive");
  if (scale_step_size && !(*scale_step_size > 0)) throw InvalidInput("scale_step_size must be positive");
}

double auto_step_size(const Dataset& data, const BlockPartition& partition, double c) {
  double lipschitz = 0;
  for (Index b = 0; b < partition.k(); ++b) {
    const auto block = partition.block(b);
    Eigen::MatrixXd rows(static_cast<Index>(block.size()), data.d());
    for (std::size_t r = 0; r < block.size(); ++r) rows.row(static_cast<Index>(r)) = data.x.row(block[r]);
    const Eigen::MatrixXd gram =
        rows.rows() <= rows.cols() ? Eigen::MatrixXd(rows * rows.transpose()) : Eigen::MatrixXd(rows.transpose() * rows);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff();
    lipschitz = std::max(lipschitz, 2.0 * top / static_cast<double>(block.size()));
  }
  if (!(lipschitz > 0)) return 1.0 / c;
  return 1.0 / (c * lipschitz);
}

namespace {

// Cumulative sums of the min-player iterates, checkpointed every `stride`
// iterations so that the trailing average can be formed without keeping the
// whole trajectory.
class TrailingAverage {
 public:
  TrailingAverage(Index d, std::int64_t stride, double window)
      : stride_(stride), window_(window), sum_beta_(Eigen::VectorXd::Zero(d)) {
    checkpoints_beta_.push_back(sum_beta_);
    checkpoints_sigma_.push_back(0.0);
  }

  void add(const PlayerPoint& p) {
    sum_beta_ += p.beta;
    sum_sigma_ += p.sigma;
    ++count_;
    if (count_ % stride_ == 0) {
      checkpoints_beta_.push_back(sum_beta_);
      checkpoints_sigma_.push_back(sum_sigma_);
    }
  }

  /// Average over iterates (start, count], start a checkpoint at or below
  /// (1 - window) * count.
  std::pair<PlayerPoint, std::int64_t> average() const {
    auto start = static_cast<std::int64_t>(std::floor((1.0 - window_) * static_cast<double>(count_)));
    start = std::min(start, count_ - 1);
    const auto j = static_cast<std::size_t>(start / stride_);
    start = static_cast<std::int64_t>(j) * stride_;
    const auto len = count_ - start;
    PlayerPoint avg;
    avg.beta = (sum_beta_ - checkpoints_beta_[j]) / static_cast<double>(len);
    avg.sigma = (sum_sigma_ - checkpoints_sigma_[j]) / static_cast<double>(len);
    return {std::move(avg), len};
  }

 private:
  std::int64_t stride_;
  double window_;
  Eigen::VectorXd sum_beta_;
  double sum_sigma_ = 0;
  std::int64_t count_ = 0;
  std::vector<Eigen::VectorXd> checkpoints_beta_;
  std::vector<double> checkpoints_sigma_;
};

double relative_change(const PlayerPoint& now, const PlayerPoint& before) {
  const double num = std::sqrt((now.beta - before.beta).squaredNorm() + (now.sigma - before.sigma) * (now.sigma - before.sigma));
  const double den = std::sqrt(before.beta.squaredNorm() + before.sigma * before.sigma);
  return num / std::max(den, 1e-300);
}

constexpr std::uint64_t kTieStream = 0x544945;  // "TIE"

bool same_coefficients(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a.array() == b.array()).all();
}

}  // namespace

SaddleState solve(const Dataset& data, const BlockPartition& partition, const CriterionParams& params,
                  const SolverConfig& cfg, const std::optional<PlayerPoint>& init) {
  data.validate();
  params.validate();
  cfg.validate();
  if (partition.n() != data.n()) throw InvalidInput("partition does not match the dataset");

  const double eta0 = cfg.step_size ? *cfg.step_size : auto_step_size(data, partition, params.c);
  const double eta0_scale = cfg.scale_step_size ? *cfg.scale_step_size : eta0 * params.sigma_plus;
  auto project = [&](double s) { return std::clamp(s, params.sigma_floor, params.sigma_plus); };

  SaddleState state;
  if (init) {
    if (init->beta.size() != data.d()) throw InvalidInput("initial point has wrong dimension");
    state.min_player = {init->beta, project(init->sigma)};
  } else {
    state.min_player = {Eigen::VectorXd::Zero(data.d()), params.sigma_plus};
  }
  state.max_player = state.min_player;
  if (cfg.record_trace) {
    state.trace.emplace();
    state.trace->reserve(static_cast<std::size_t>(cfg.max_iters));
  }

  const Index k = partition.k();
  const auto median_pos = static_cast<std::size_t>(quantile_rank(Fraction::half(), k) - 1);
  const double inv_block = 1.0 / static_cast<double>(partition.block_size());
  Eigen::VectorXd values(k), losses(k), tilt = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd direction(data.d());
  std::vector<Index> order(static_cast<std::size_t>(k));

  TrailingAverage averager(data.d(), std::max<std::int64_t>(1, cfg.max_iters / 512), cfg.averaging_window);
  std::optional<PlayerPoint> previous_average;

  PlayerPoint& lo = state.min_player;
  PlayerPoint& hi = state.max_player;
  Eigen::VectorXd r_min, r_max;

  for (std::int64_t t = 1; t <= cfg.max_iters; ++t) {
    r_min = residuals(data, lo.beta);
    if (same_coefficients(lo.beta, hi.beta))
      r_max = r_min;
    else
      r_max = residuals(data, hi.beta);

    for (Index b = 0; b < k; ++b) {
      const auto block = partition.block(b);
      values(b) = block_criterion_from_residuals(block, r_min, r_max, lo.sigma, hi.sigma, params.c);
      double acc = 0;
      for (auto i : block) acc += r_min(i) * r_min(i);
      losses(b) = acc * inv_block;
    }
    if (!values.allFinite() || !losses.allFinite()) throw Diverged("non-finite block criterion", t);

    // On the symmetric manifold beta = gamma, sigma = chi every block
    // criterion is exactly 0 and stays so. Ties are then ordered by the first
    // order change of each block criterion when the max player moves to
    // (gamma + eps sigma v, chi + eps sigma), v a fresh pseudo-random
    // direction per iteration. Per sample that change is
    //   sigma (4c/u r_i x_i.v + l_i / sigma^2 - 1),
    // a loss term that puts blocks with outlying residuals at the top for
    // every v, and a projected gradient term that spreads the clean blocks.
    const bool symmetric = lo.sigma == hi.sigma && same_coefficients(lo.beta, hi.beta);
    if (symmetric) {
      SplitMix64 g(derive_seed(kTieStream, static_cast<std::uint64_t>(t)));
      for (Index j = 0; j < data.d(); ++j) direction(j) = standard_normal(g);
      const double slope = 4.0 * params.c / (2.0 * lo.sigma);
      const double inv_s2 = 1.0 / (lo.sigma * lo.sigma);
      const Eigen::VectorXd xv = data.x * direction;
      for (Index b = 0; b < k; ++b) {
        double acc = 0;
        for (auto i : partition.block(b)) acc += slope * r_min(i) * xv(i) + r_min(i) * r_min(i) * inv_s2 - 1.0;
        tilt(b) = lo.sigma * acc * inv_block;
      }
    }

    std::iota(order.begin(), order.end(), Index{0});
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(median_pos), order.end(),
                     [&](Index a, Index b) {
                       if (values(a) != values(b)) return values(a) < values(b);
                       if (symmetric && tilt(a) != tilt(b)) return tilt(a) < tilt(b);
                       if (losses(a) != losses(b)) return losses(a) < losses(b);
                       return a < b;
                     });
    const Index kstar = order[median_pos];

    if (state.trace) {
      const double penalty = params.mu * (lo.beta.lpNorm<1>() - hi.beta.lpNorm<1>());
      state.trace->push_back({t, values(kstar) + penalty, kstar});
    }

    const auto g = block_gradients_from_residuals(partition.block(kstar), data, r_min, r_max, lo.sigma, hi.sigma,
                                                  params.c);
    if (!g.beta.allFinite() || !g.gamma.allFinite() || !std::isfinite(g.sigma) || !std::isfinite(g.chi))
      throw Diverged("non-finite gradient", t);

    const double decay = cfg.step_decay == StepDecay::inverse_sqrt ? 1.0 / std::sqrt(static_cast<double>(t)) : 1.0;
    const double eta = eta0 * decay;
    const double eta_scale = eta0_scale * decay;
    const double step_lo = eta * lo.sigma;
    const double step_hi = eta * hi.sigma;

    lo.beta.noalias() -= step_lo * g.beta;
    soft_threshold_inplace(lo.beta, params.mu * step_lo);
    hi.beta.noalias() += step_hi * g.gamma;
    soft_threshold_inplace(hi.beta, params.mu * step_hi);
    lo.sigma = project(lo.sigma - eta_scale * g.sigma);
    hi.sigma = project(hi.sigma + eta_scale * g.chi);
    if (!lo.beta.allFinite() || !hi.beta.allFinite()) throw Diverged("non-finite iterate", t);

    state.iter = t;
    averager.add(lo);
    state.median_block_history.push_back(kstar);
    if (state.median_block_history.size() > SaddleState::kHistoryLength) state.median_block_history.pop_front();

    if (t % cfg.check_window == 0) {
      auto avg = averager.average().first;
      if (previous_average && relative_change(avg, *previous_average) < cfg.tol) {
        state.converged = true;
        break;
      }
      previous_average = std::move(avg);
    }
  }

  auto [avg, len] = averager.average();
  avg.sigma = project(avg.sigma);  // a mean of feasible values can round out of the box
  state.running_average = std::move(avg);
  state.averaged_iterates = len;
  return state;
}

const std::vector<TracePoint>& objective_trace(const SaddleState& state) {
  if (!state.trace) throw AbsentData("solver trace was not recorded");
  return *state.trace;
}

}  // namespace momlasso
