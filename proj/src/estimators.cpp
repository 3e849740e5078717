#include "momlasso/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "momlasso/random.hpp"

namespace momlasso {

namespace {

// log(e d / u), floored at 1 for u > d.
double log_term(Index d, double u) {
  return std::max(1.0, 1.0 + std::log(static_cast<double>(d) / u));
}

constexpr std::uint64_t kSplitStream = 0x5350'4c49'54ULL;  // "SPLIT"
constexpr std::uint64_t kVarianceStream = 1;
constexpr std::uint64_t kFitStream = 2;

FitResult result_from_state(const SaddleState& state, Index k, double mu, double sigma_plus) {
  FitResult out;
  out.beta_hat = state.running_average.beta;
  out.sigma_hat = state.running_average.sigma;
  out.k_used = k;
  out.mu_used = mu;
  out.diagnostics.iterations = state.iter;
  out.diagnostics.converged = state.converged;
  out.diagnostics.averaged_iterates = state.averaged_iterates;
  if (!state.median_block_history.empty()) out.diagnostics.last_median_block = state.median_block_history.back();
  out.diagnostics.sigma_plus_used = sigma_plus;
  out.diagnostics.trace = state.trace;
  if (!state.converged) out.diagnostics.flags.push_back("max_iters_reached");
  return out;
}

}  // namespace

void TuningSchedule::validate() const {
  if (!(c1_tilde > 0) || !(c2_tilde > 0)) throw InvalidInput("schedule constants must be positive");
  if (!(iota_k >= 0.5 && iota_k <= 2.0)) throw InvalidInput("iota_k must lie in [1/2, 2]");
  if (!(iota_mu >= 0.5 && iota_mu <= 2.0)) throw InvalidInput("iota_mu must lie in [1/2, 2]");
}

ScheduleResult schedule(Index n, Index d, Index s, const TuningSchedule& t) {
  t.validate();
  if (n < 1) throw InvalidInput("need at least one sample");
  if (s < 1 || s > d) throw InvalidInput("sparsity must satisfy 1 <= s <= d");
  const double lt = 1.0 + std::log(static_cast<double>(d) / static_cast<double>(s));
  const auto k_raw = static_cast<Index>(std::ceil(t.iota_k * t.c1_tilde * static_cast<double>(s) * lt));
  const double mu = t.iota_mu * t.c2_tilde * std::sqrt(lt / static_cast<double>(n));
  return {std::clamp<Index>(k_raw, 1, n), mu, k_raw};
}

FitResult fit_mom(const Dataset& data, Index k, double mu, double sigma_plus, const SolverConfig& solver_cfg,
                  std::uint64_t seed, double c) {
  data.validate();
  if (!(sigma_plus > 0) || !std::isfinite(sigma_plus)) throw InvalidInput("sigma_plus must be positive");
  if (k < 1 || k > data.n())
    throw InfeasibleConfig("cannot form " + std::to_string(k) + " blocks from " + std::to_string(data.n()) +
                           " samples");
  const auto partition = make_partition(data.n(), k, seed);
  const auto params = CriterionParams::with_bound(c, mu, sigma_plus);
  std::optional<PlayerPoint> init;
  if (solver_cfg.warm_start) {
    const auto pilot = sqrt_lasso_baseline(data, mu / (2.0 * c));
    init = PlayerPoint{pilot.beta_hat, std::clamp(pilot.sigma_hat, params.sigma_floor, sigma_plus)};
  }
  const auto state = solve(data, partition, params, solver_cfg, init);
  return result_from_state(state, k, mu, sigma_plus);
}

FitResult fit_fixed_s(const Dataset& data, Index s, double sigma_plus, const TuningSchedule& t,
                      const SolverConfig& solver_cfg, std::uint64_t seed, double c) {
  const auto sched = schedule(data.n(), data.d(), s, t);
  if (sched.k_unclamped > data.n())
    throw InfeasibleConfig("schedule asks for " + std::to_string(sched.k_unclamped) + " blocks but n = " +
                           std::to_string(data.n()));
  return fit_mom(data, sched.k, sched.mu, sigma_plus, solver_cfg, seed, c);
}

double mom_variance_bound(const Eigen::VectorXd& y, Index k, std::uint64_t seed) {
  return mom_variance_bound(y, make_partition(y.size(), k, seed));
}

double mom_variance_bound(const Eigen::VectorXd& y, const BlockPartition& partition) {
  if (!y.allFinite()) throw InvalidInput("responses must be finite");
  const double second = mom_statistic(y.array().square().matrix(), partition);
  const double first = mom_statistic(y, partition);
  return std::max(0.0, second - first * first);
}

HalfSplit half_split(Index n, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("need at least two samples to split");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  SplitMix64 gen(derive_seed(seed, kSplitStream));
  shuffle(std::span<Index>(perm), gen);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  HalfSplit out;
  out.variance_rows.assign(perm.begin(), perm.begin() + half);
  out.fit_rows.assign(perm.begin() + half, perm.end());
  return out;
}

FitResult fit_estimated_sigma_plus(const Dataset& data, Index s, const TuningSchedule& t,
                                   const SolverConfig& solver_cfg, std::uint64_t seed, double c) {
  data.validate();
  const auto split = half_split(data.n(), seed);
  const Dataset fit_part = subset_rows(data, split.fit_rows);
  Eigen::VectorXd y_var(static_cast<Index>(split.variance_rows.size()));
  for (std::size_t r = 0; r < split.variance_rows.size(); ++r) y_var(static_cast<Index>(r)) = data.y(split.variance_rows[r]);

  const auto sched = schedule(fit_part.n(), data.d(), s, t);
  if (sched.k_unclamped > y_var.size())
    throw InfeasibleConfig("schedule asks for " + std::to_string(sched.k_unclamped) + " blocks but each half has " +
                           std::to_string(y_var.size()) + " samples");

  const double variance = mom_variance_bound(y_var, sched.k, derive_seed(seed, kVarianceStream));
  double sigma_plus = std::sqrt(variance);
  bool fallback = false;
  if (!(sigma_plus > 0) || !std::isfinite(sigma_plus)) {
    const double range = data.y.maxCoeff() - data.y.minCoeff();
    sigma_plus = std::max(0.5 * range, 1e-12 * std::max(1.0, data.y.cwiseAbs().maxCoeff()));
    fallback = true;
  }
  auto out = fit_mom(fit_part, sched.k, sched.mu, sigma_plus, solver_cfg, derive_seed(seed, kFitStream), c);
  if (fallback) out.diagnostics.flags.push_back("sigma_plus_fallback");
  return out;
}

void AdaptiveConfig::validate(Index d) const {
  if (s_plus < 1 || s_plus > d) throw InvalidInput("s_plus must satisfy 1 <= s_plus <= d");
  if (!(agg_c1 > 0 && agg_c2 > 0 && agg_c3 > 0)) throw InvalidInput("aggregation constants must be positive");
}

double rate(double u, double p, Index n, Index d) {
  return std::pow(u, 1.0 / p) * std::sqrt(log_term(d, u) / static_cast<double>(n));
}

AdaptiveSelection select_level(const std::vector<AdaptiveLevel>& levels, const AdaptiveConfig& cfg, Index n,
                               Index d) {
  if (levels.empty()) throw InvalidInput("no levels to select from");
  const auto top = static_cast<Index>(levels.size());  // M + 1
  std::optional<double> sigma_ref;
  for (Index m = top; m >= 1 && !sigma_ref; --m) {
    if (levels[static_cast<std::size_t>(m - 1)].fit) sigma_ref = levels[static_cast<std::size_t>(m - 1)].fit->sigma_hat;
  }
  if (!sigma_ref) throw InfeasibleConfig("every sparsity level failed");

  // passes[k], k in 2..M: comparison of levels k-1 and k. Level M+1 enters
  // only through sigma_ref.
  std::vector<char> passes(static_cast<std::size_t>(top + 1), 0);
  for (Index k = 2; k < top; ++k) {
    const auto& lo = levels[static_cast<std::size_t>(k - 2)].fit;
    const auto& hi = levels[static_cast<std::size_t>(k - 1)].fit;
    if (!lo || !hi) continue;
    const double u = std::ldexp(1.0, static_cast<int>(k));
    const Eigen::VectorXd diff = lo->beta_hat - hi->beta_hat;
    const bool ok = diff.lpNorm<1>() <= cfg.agg_c1 * *sigma_ref * rate(u, 1.0, n, d) &&
                    diff.norm() <= cfg.agg_c2 * *sigma_ref * rate(u, 2.0, n, d) &&
                    std::abs(lo->sigma_hat - hi->sigma_hat) <= cfg.agg_c3 * *sigma_ref * rate(u, 2.0, n, d);
    passes[static_cast<std::size_t>(k)] = ok ? 1 : 0;
  }

  AdaptiveSelection sel{top, {}};
  const Index big_m = top - 1;
  bool tail_ok = true;  // all comparisons k in m+1..M pass
  for (Index m = big_m; m >= 1; --m) {
    if (m < big_m) tail_ok = tail_ok && passes[static_cast<std::size_t>(m + 1)];
    if (tail_ok && levels[static_cast<std::size_t>(m - 1)].fit) sel.admissible.push_back(m);
  }
  std::reverse(sel.admissible.begin(), sel.admissible.end());
  if (!sel.admissible.empty()) sel.m_selected = sel.admissible.front();
  return sel;
}

FitResult fit_adaptive(const Dataset& data, const AdaptiveConfig& cfg, double sigma_plus, const TuningSchedule& t,
                       const SolverConfig& solver_cfg, std::uint64_t seed, double c,
                       std::vector<AdaptiveLevel>* levels_out) {
  data.validate();
  t.validate();
  cfg.validate(data.d());
  Index big_m = 0;
  while ((Index{1} << big_m) < cfg.s_plus) ++big_m;  // ceil(log2 s_plus)

  std::vector<std::string> flags;
  if (static_cast<double>(cfg.s_plus) > static_cast<double>(data.d()) / (2.0 * std::numbers::e))
    flags.push_back("s_plus_above_d_over_2e");

  std::vector<AdaptiveLevel> levels;
  for (Index m = 1; m <= big_m + 1; ++m) {
    AdaptiveLevel level{m, Index{1} << m, std::nullopt, {}};
    const auto s = static_cast<double>(level.s);
    const double lt = log_term(data.d(), s);
    auto k = static_cast<Index>(std::ceil(t.iota_k * t.c1_tilde * s * lt));
    const double mu = t.iota_mu * t.c2_tilde * std::sqrt(lt / static_cast<double>(data.n()));
    if (1.0 + std::log(static_cast<double>(data.d()) / s) < 1.0)
      flags.push_back("log_clamped_at_s_" + std::to_string(level.s));
    if (k > data.n()) {
      flags.push_back("blocks_clamped_at_s_" + std::to_string(level.s));
      k = data.n();
    }
    try {
      level.fit = fit_mom(data, k, mu, sigma_plus, solver_cfg, seed, c);
    } catch (const Diverged& e) {
      level.error = e.what();
    } catch (const InfeasibleConfig& e) {
      level.error = e.what();
    }
    levels.push_back(std::move(level));
  }

  const auto sel = select_level(levels, cfg, data.n(), data.d());
  Index chosen = sel.m_selected;
  while (chosen <= big_m + 1 && !levels[static_cast<std::size_t>(chosen - 1)].fit) ++chosen;
  if (chosen > big_m + 1) {
    chosen = sel.m_selected;
    while (chosen >= 1 && !levels[static_cast<std::size_t>(chosen - 1)].fit) --chosen;
  }
  if (chosen != sel.m_selected) flags.push_back("selected_level_failed");

  FitResult out = *levels[static_cast<std::size_t>(chosen - 1)].fit;
  out.s_selected = Index{1} << chosen;
  for (auto& f : flags) out.diagnostics.flags.push_back(std::move(f));
  if (levels_out) *levels_out = std::move(levels);
  return out;
}

}  // namespace momlasso
