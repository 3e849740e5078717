#include "momlasso/bench/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "momlasso/bench/config.hpp"
#include "momlasso/bench/experiment.hpp"
#include "momlasso/bench/plot.hpp"
#include "momlasso/bench/rates.hpp"
#include "momlasso/datagen.hpp"
#include "momlasso/estimators.hpp"

namespace momlasso::bench {

namespace {

/// Missing or contradictory flags; reported with the usage text.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitArgs {
  std::string estimator;
  std::string data_path;
  std::optional<Index> sparsity;
  std::optional<double> sigma_plus;
  std::string blocks = "auto";
  std::optional<double> mu;
  std::optional<double> lambda;
  std::uint64_t seed = 0;
  std::optional<Index> s_plus;
  std::string trace_path;
  TuningSchedule tuning;
  AdaptiveConfig adaptive;
  double criterion_c = kDefaultCriterionC;
  SolverConfig solver;
  std::string step_decay = "constant";
  std::int64_t baseline_iters = 20000;
};

struct SimulateArgs {
  GenSpec spec;
  std::string design = "gaussian";
  std::string noise = "gaussian";
  std::string beta_pattern = "prefix";
  std::string contamination = "none";
  std::string out_path;
  std::string truth_path;
};

struct BenchArgs {
  std::string config_path;
  std::string out_path;
  std::size_t jobs = 1;
  bool timing = false;
};

struct RatesArgs {
  std::string input;
  std::string group_by = "estimator";
  std::string x_var = "n";
  std::string metric = "err_l2";
  std::string out_path;
};

struct PlotArgs {
  std::string input;
  std::string kind;
  std::string metric = "err_l2";
  std::string format = "svg";
  std::string out_path;
};

template <typename T>
std::string fmt_opt(const std::optional<T>& v) {
  if (!v) return "none";
  if constexpr (std::is_floating_point_v<T>)
    return format_double(*v);
  else
    return std::to_string(*v);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + path + "'");
  f << content;
  if (!f) throw InvalidInput("failed writing '" + path + "'");
}

void print_fit(std::ostream& out, const std::string& estimator, const Dataset& data, const FitResult& fit) {
  out << "estimator: " << estimator << '\n';
  out << "n: " << data.n() << '\n';
  out << "d: " << data.d() << '\n';
  out << "k_used: " << fit.k_used << '\n';
  out << "mu_used: " << format_double(fit.mu_used) << '\n';
  out << "sigma_hat: " << format_double(fit.sigma_hat) << '\n';
  if (fit.s_selected) out << "s_selected: " << *fit.s_selected << '\n';
  Index nnz = 0;
  std::string beta;
  for (Index j = 0; j < fit.beta_hat.size(); ++j) {
    if (fit.beta_hat(j) == 0.0) continue;
    ++nnz;
    beta += (beta.empty() ? "" : " ") + std::to_string(j + 1) + ":" + format_double(fit.beta_hat(j));
  }
  out << "beta_nnz: " << nnz << '\n';
  out << "beta: " << beta << '\n';
  const auto& diag = fit.diagnostics;
  out << "iterations: " << diag.iterations << '\n';
  out << "converged: " << (diag.converged ? "true" : "false") << '\n';
  out << "averaged_iterates: " << diag.averaged_iterates << '\n';
  out << "last_median_block: " << fmt_opt(diag.last_median_block) << '\n';
  out << "sigma_plus_used: " << format_double(diag.sigma_plus_used) << '\n';
  std::string flags;
  for (const auto& f : diag.flags) flags += (flags.empty() ? "" : ",") + f;
  out << "flags: " << (flags.empty() ? "none" : flags) << '\n';
}

int cmd_fit(FitArgs a, std::ostream& out) {
  const Dataset data = read_dataset_csv_file(a.data_path);
  a.solver.step_decay = parse_step_decay(a.step_decay);
  a.solver.record_trace = !a.trace_path.empty();
  const bool mom = a.estimator.rfind("mom-", 0) == 0;
  if (!a.trace_path.empty() && (!mom || a.estimator == "mom-adaptive"))
    throw UsageError("--trace is available for mom-fixed and mom-est-sigma only");
  if (a.blocks != "auto" && a.estimator != "mom-fixed") throw UsageError("--blocks applies to mom-fixed only");

  const auto need = [&](bool ok, const char* flag) {
    if (!ok) throw UsageError(fmt::format("{} requires {}", a.estimator, flag));
  };
  FitResult fit;
  if (a.estimator == "mom-fixed") {
    need(a.sigma_plus.has_value(), "--sigma-plus");
    std::optional<Index> k;
    if (a.blocks != "auto") {
      try {
        k = std::stoll(a.blocks);
      } catch (const std::exception&) {
        throw UsageError("--blocks must be 'auto' or a positive integer");
      }
      if (*k < 1) throw UsageError("--blocks must be 'auto' or a positive integer");
    }
    need(a.sparsity.has_value() || (k && a.mu), "--sparsity");
    std::optional<ScheduleResult> sched;
    if (a.sparsity) sched = schedule(data.n(), data.d(), *a.sparsity, a.tuning);
    if (!k) {
      if (sched->k_unclamped > data.n())
        throw InfeasibleConfig(fmt::format("schedule asks for {} blocks but n = {}", sched->k_unclamped, data.n()));
      k = sched->k;
    }
    fit = fit_mom(data, *k, a.mu ? *a.mu : sched->mu, *a.sigma_plus, a.solver, a.seed, a.criterion_c);
  } else if (a.estimator == "mom-est-sigma") {
    need(a.sparsity.has_value(), "--sparsity");
    fit = fit_estimated_sigma_plus(data, *a.sparsity, a.tuning, a.solver, a.seed, a.criterion_c);
  } else if (a.estimator == "mom-adaptive") {
    need(a.sigma_plus.has_value(), "--sigma-plus");
    need(a.s_plus.has_value(), "--s-plus");
    a.adaptive.s_plus = *a.s_plus;
    fit = fit_adaptive(data, a.adaptive, *a.sigma_plus, a.tuning, a.solver, a.seed, a.criterion_c);
  } else if (a.estimator == "sqrt-lasso") {
    need(a.mu || a.sparsity, "--mu or --sparsity");
    const double mu = a.mu ? *a.mu : std::sqrt((1.0 + std::log(static_cast<double>(data.d()) /
                                                             static_cast<double>(*a.sparsity))) /
                                               static_cast<double>(data.n()));
    fit = sqrt_lasso_baseline(data, mu, a.baseline_iters);
  } else if (a.estimator == "lasso") {
    need(a.lambda || (a.sparsity && a.sigma_plus), "--lambda or --sparsity with --sigma-plus");
    const double lambda =
        a.lambda ? *a.lambda
                 : *a.sigma_plus * std::sqrt(2.0 * (1.0 + std::log(static_cast<double>(data.d()) /
                                                                 static_cast<double>(*a.sparsity))) /
                                             static_cast<double>(data.n()));
    fit = lasso_baseline(data, lambda, a.baseline_iters);
  } else {
    throw UsageError("unknown estimator '" + a.estimator + "'");
  }

  print_fit(out, a.estimator, data, fit);
  if (!a.trace_path.empty()) {
    std::ostringstream t;
    write_trace_csv(t, fit.diagnostics.trace.value_or(std::vector<TracePoint>{}));
    write_text_file(a.trace_path, t.str());
    out << "trace: " << a.trace_path << '\n';
  }
  return kExitOk;
}

int cmd_simulate(SimulateArgs a, std::ostream& out) {
  a.spec.design = parse_design(a.design);
  a.spec.noise = parse_noise(a.noise);
  a.spec.beta_pattern = parse_beta_pattern(a.beta_pattern);
  a.spec.contamination.kind = parse_contamination(a.contamination);
  if (a.spec.contamination.kind == ContaminationKind::none && a.spec.contamination.m > 0)
    throw UsageError("--outliers needs a --contamination model");
  const Dataset data = generate(a.spec);
  std::ostringstream csv;
  write_dataset_csv(csv, data);
  write_text_file(a.out_path, csv.str());
  out << "data: " << a.out_path << '\n';
  if (!a.truth_path.empty()) {
    nlohmann::ordered_json j;
    j["n"] = data.n();
    j["d"] = data.d();
    j["seed"] = a.spec.seed;
    j["sigma_star"] = data.truth->sigma_star;
    j["beta_star"] = std::vector<double>(data.truth->beta_star.begin(), data.truth->beta_star.end());
    j["outlier_indices"] = data.truth->outlier_indices;
    write_text_file(a.truth_path, j.dump(2) + "\n");
    out << "truth: " << a.truth_path << '\n';
  }
  return kExitOk;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const auto cfg = read_experiment_config_file(a.config_path);
  const auto records = run_experiment(cfg, {a.jobs, a.timing});
  std::ostringstream csv;
  write_records_csv(csv, records);
  if (a.out_path.empty()) {
    out << csv.str();
  } else {
    write_text_file(a.out_path, csv.str());
    std::size_t failed = 0;
    for (const auto& r : records) failed += r.status != "ok";
    out << "records: " << records.size() << "\nfailed: " << failed << "\nbench: " << a.out_path << '\n';
  }
  return kExitOk;
}

int cmd_rates(const RatesArgs& a, std::ostream& out) {
  const auto fits = fit_rates(read_records_csv_file(a.input), a.group_by, a.x_var, a.metric);
  std::ostringstream csv;
  write_rates_csv(csv, fits);
  if (a.out_path.empty()) {
    out << csv.str();
  } else {
    write_text_file(a.out_path, csv.str());
    out << "rates: " << a.out_path << '\n';
  }
  return kExitOk;
}

int cmd_plot(const PlotArgs& a, std::ostream& out) {
  const auto kind = parse_plot_kind(a.kind);
  if (a.format != "svg" && a.format != "columns") throw UsageError("--format must be svg or columns");
  PlotData plot;
  if (kind == PlotKind::trace) {
    std::ifstream in(a.input);
    if (!in) throw InvalidInput("cannot open trace '" + a.input + "'");
    plot = trace_plot(read_trace_csv(in));
  } else {
    const auto records = read_records_csv_file(a.input);
    plot = kind == PlotKind::error_vs_n ? error_vs_n(records, a.metric) : error_vs_outliers(records, a.metric);
  }
  write_text_file(a.out_path, a.format == "svg" ? render_svg(plot) : render_columns(plot));
  out << "plot: " << a.out_path << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust sparse regression by median-of-means square-root lasso", "momlasso"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an estimator to a dataset CSV");
  fit_cmd->add_option("data", fit.data_path, "Dataset CSV (header y,x1,...,xd)")->required();
  fit_cmd->add_option("--estimator", fit.estimator, "mom-fixed | mom-est-sigma | mom-adaptive | sqrt-lasso | lasso")
      ->required()
      ->check(CLI::IsMember(known_estimators()));
  fit_cmd->add_option("--sparsity", fit.sparsity, "Sparsity s used by the schedules");
  fit_cmd->add_option("--sigma-plus", fit.sigma_plus, "Upper bound on the noise level");
  fit_cmd->add_option("--blocks", fit.blocks, "Number of blocks K, or 'auto' for the schedule")->capture_default_str();
  fit_cmd->add_option("--mu", fit.mu, "Penalty override");
  fit_cmd->add_option("--lambda", fit.lambda, "Lasso penalty");
  fit_cmd->add_option("--seed", fit.seed, "Partition seed")->capture_default_str();
  fit_cmd->add_option("--s-plus", fit.s_plus, "Sparsity upper bound (mom-adaptive)");
  fit_cmd->add_option("--trace", fit.trace_path, "Write the objective trace CSV to this file");
  fit_cmd->add_option("--c1-tilde", fit.tuning.c1_tilde, "Block-count constant")->capture_default_str();
  fit_cmd->add_option("--c2-tilde", fit.tuning.c2_tilde, "Penalty constant")->capture_default_str();
  fit_cmd->add_option("--iota-k", fit.tuning.iota_k, "Block-count multiplier in [1/2, 2]")->capture_default_str();
  fit_cmd->add_option("--iota-mu", fit.tuning.iota_mu, "Penalty multiplier in [1/2, 2]")->capture_default_str();
  fit_cmd->add_option("--criterion-c", fit.criterion_c, "Criterion constant c > 2")->capture_default_str();
  fit_cmd->add_option("--agg-c1", fit.adaptive.agg_c1, "Aggregation constant (l1)")->capture_default_str();
  fit_cmd->add_option("--agg-c2", fit.adaptive.agg_c2, "Aggregation constant (l2)")->capture_default_str();
  fit_cmd->add_option("--agg-c3", fit.adaptive.agg_c3, "Aggregation constant (sigma)")->capture_default_str();
  fit_cmd->add_option("--max-iters", fit.solver.max_iters, "Solver iteration cap")->capture_default_str();
  fit_cmd->add_option("--step-size", fit.solver.step_size, "Base step size (default: automatic)");
  fit_cmd->add_option("--step-decay", fit.step_decay, "constant | inverse-sqrt")->capture_default_str();
  fit_cmd->add_flag("--warm-start", fit.solver.warm_start, "Start the solver from a square-root lasso fit");
  fit_cmd->add_option("--tol", fit.solver.tol, "Relative tolerance on the averaged iterate")->capture_default_str();
  fit_cmd->add_option("--baseline-iters", fit.baseline_iters, "Iteration cap of the baselines")->capture_default_str();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset");
  sim_cmd->add_option("--n", sim.spec.n, "Samples")->required();
  sim_cmd->add_option("--d", sim.spec.d, "Features")->required();
  sim_cmd->add_option("--s", sim.spec.s, "Sparsity of beta*")->required();
  sim_cmd->add_option("--sigma-star", sim.spec.sigma_star, "Noise standard deviation")->capture_default_str();
  sim_cmd->add_option("--design", sim.design, "gaussian | student-t | rademacher")->capture_default_str();
  sim_cmd->add_option("--design-nu", sim.spec.design_nu, "Student-t design degrees of freedom (0: max(5, log d))")->capture_default_str();
  sim_cmd->add_option("--noise", sim.noise, "gaussian | student-t")->capture_default_str();
  sim_cmd->add_option("--noise-nu", sim.spec.noise_nu, "Student-t noise degrees of freedom (> 4)")->capture_default_str();
  sim_cmd->add_option("--beta-pattern", sim.beta_pattern, "prefix | random-support")->capture_default_str();
  sim_cmd->add_option("--beta-magnitude", sim.spec.beta_magnitude, "Magnitude on the support")->capture_default_str();
  sim_cmd->add_option("--contamination", sim.contamination, "none | response | leverage | flip")->capture_default_str();
  sim_cmd->add_option("--outliers", sim.spec.contamination.m, "Number of corrupted rows")->capture_default_str();
  sim_cmd->add_option("--magnitude", sim.spec.contamination.magnitude, "Contamination magnitude")->capture_default_str();
  sim_cmd->add_option("--seed", sim.spec.seed, "Seed")->capture_default_str();
  sim_cmd->add_option("--out", sim.out_path, "Output dataset CSV")->required();
  sim_cmd->add_option("--truth", sim.truth_path, "Output ground-truth JSON");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a Monte-Carlo experiment grid");
  bench_cmd->add_option("config", bench.config_path, "Experiment config file")->required();
  bench_cmd->add_option("--out", bench.out_path, "Output bench CSV (default: stdout)");
  bench_cmd->add_option("--jobs", bench.jobs, "Concurrent trials")->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--timing", bench.timing, "Fill the runtime_ms column");

  RatesArgs rates;
  auto* rates_cmd = app.add_subcommand("rates", "Log-log slopes of median errors");
  rates_cmd->add_option("bench_csv", rates.input, "Bench CSV")->required();
  rates_cmd->add_option("--group-by", rates.group_by, "Comma-separated grouping columns")->capture_default_str();
  rates_cmd->add_option("--x", rates.x_var, "Regressor column")->capture_default_str();
  rates_cmd->add_option("--metric", rates.metric, "Error column")->capture_default_str();
  rates_cmd->add_option("--out", rates.out_path, "Output CSV (default: stdout)");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render a plot from bench or trace CSV");
  plot_cmd->add_option("input", plot.input, "Bench CSV, or trace CSV for --kind trace")->required();
  plot_cmd->add_option("--kind", plot.kind, "error-vs-n | error-vs-outliers | trace")->required();
  plot_cmd->add_option("--metric", plot.metric, "Error column")->capture_default_str();
  plot_cmd->add_option("--format", plot.format, "svg | columns")->capture_default_str();
  plot_cmd->add_option("--out", plot.out_path, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == fit_cmd) return cmd_fit(fit, out);
    if (active == sim_cmd) return cmd_simulate(sim, out);
    if (active == bench_cmd) return cmd_bench(bench, out);
    if (active == rates_cmd) return cmd_rates(rates, out);
    return cmd_plot(plot, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleConfig& e) {
    err << "infeasible configuration: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace momlasso::bench
