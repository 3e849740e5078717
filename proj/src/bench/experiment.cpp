#include "momlasso/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "momlasso/bench/metrics.hpp"
#include "momlasso/random.hpp"

namespace momlasso::bench {

namespace {

constexpr std::uint64_t kFitStream = 1;

double log_term(Index d, Index s) {
  return 1.0 + std::log(static_cast<double>(d) / static_cast<double>(s));
}

FitResult run_estimator(const ExperimentConfig& cfg, const GridCell& cell, const std::string& estimator,
                        const Dataset& data, std::uint64_t seed) {
  if (estimator == "mom-fixed")
    return fit_fixed_s(data, cell.s, cfg.sigma_plus, cfg.tuning, cfg.solver, seed, cfg.criterion_c);
  if (estimator == "mom-est-sigma")
    return fit_estimated_sigma_plus(data, cell.s, cfg.tuning, cfg.solver, seed, cfg.criterion_c);
  if (estimator == "mom-adaptive") {
    AdaptiveConfig ac = cfg.adaptive;
    ac.s_plus = std::min(cfg.s_plus, cell.d);
    return fit_adaptive(data, ac, cfg.sigma_plus, cfg.tuning, cfg.solver, seed, cfg.criterion_c);
  }
  const double lt = log_term(cell.d, cell.s);
  if (estimator == "sqrt-lasso")
    return sqrt_lasso_baseline(data, cfg.baseline_scale * std::sqrt(lt / static_cast<double>(cell.n)));
  if (estimator == "lasso")
    return lasso_baseline(data,
                          cfg.baseline_scale * cfg.sigma_plus * std::sqrt(2.0 * lt / static_cast<double>(cell.n)));
  throw InvalidInput("unknown estimator '" + estimator + "'");
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, Index cell, Index trial) {
  return derive_seed(master, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial));
}

Dataset trial_dataset(const ExperimentConfig& cfg, const GridCell& cell, Index trial) {
  GenSpec spec;
  spec.n = cell.n;
  spec.d = cell.d;
  spec.s = cell.s;
  spec.design = cell.design;
  spec.design_nu = cfg.design_nu;
  spec.noise = cell.noise;
  spec.noise_nu = cfg.noise_nu;
  spec.sigma_star = cell.sigma_star;
  spec.beta_pattern = cfg.beta_pattern;
  spec.beta_magnitude = cfg.beta_magnitude;
  spec.contamination = {cell.n_outliers > 0 ? cfg.contamination : ContaminationKind::none, cell.n_outliers,
                        cfg.contamination_magnitude};
  spec.seed = trial_seed(cfg.seed, cell.cell_id, trial);
  return generate(spec);
}

TrialRecord run_trial(const ExperimentConfig& cfg, const GridCell& cell, const std::string& estimator, Index trial,
                      bool timing) {
  TrialRecord rec;
  rec.cell_id = cell.cell_id;
  rec.estimator = estimator;
  rec.trial = trial;
  rec.n = cell.n;
  rec.d = cell.d;
  rec.s = cell.s;
  rec.sigma_star = cell.sigma_star;
  rec.n_outliers = cell.n_outliers;
  rec.seed = trial_seed(cfg.seed, cell.cell_id, trial);
  for (double p : cfg.lp) rec.err_lp.emplace_back(p, std::nullopt);

  const auto start = std::chrono::steady_clock::now();
  try {
    const Dataset data = trial_dataset(cfg, cell, trial);
    const auto fit = run_estimator(cfg, cell, estimator, data, derive_seed(rec.seed, kFitStream));
    const auto& beta_star = data.truth->beta_star;
    rec.err_l1 = err_lp(fit.beta_hat, beta_star, 1.0);
    rec.err_l2 = err_lp(fit.beta_hat, beta_star, 2.0);
    rec.sigma_err = std::abs(fit.sigma_hat - cell.sigma_star);
    rec.s_selected = fit.s_selected;
    for (auto& [p, v] : rec.err_lp) v = err_lp(fit.beta_hat, beta_star, p);
    rec.status = "ok";
  } catch (const Diverged&) {
    rec.status = "diverged";
  } catch (const InfeasibleConfig&) {
    rec.status = "infeasible";
  } catch (const InvalidInput&) {
    rec.status = "invalid";
  } catch (const std::exception&) {
    rec.status = "error";
  }
  if (timing)
    rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, const BenchOptions& opts) {
  cfg.validate();
  struct Task {
    GridCell cell;
    std::string estimator;
    Index trial;
  };
  std::vector<Task> tasks;
  for (const auto& cell : cfg.cells())
    for (const auto& est : cfg.estimators)
      for (Index t = 0; t < cfg.trials; ++t) tasks.push_back({cell, est, t});

  std::vector<TrialRecord> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();)
      out[i] = run_trial(cfg, tasks[i].cell, tasks[i].estimator, tasks[i].trial, opts.timing);
  };
  const std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, std::max<std::size_t>(1, tasks.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

}  // namespace momlasso::bench
