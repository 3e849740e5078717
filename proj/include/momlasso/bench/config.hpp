#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "momlasso/datagen.hpp"
#include "momlasso/estimators.hpp"

namespace momlasso::bench {

inline const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> names{"mom-fixed", "mom-est-sigma", "mom-adaptive", "sqrt-lasso", "lasso"};
  return names;
}

/// One point of the experiment grid.
struct GridCell {
  Index cell_id = 0;
  Index n = 0;
  Index d = 0;
  Index s = 0;
  double sigma_star = 0;
  DesignKind design = DesignKind::gaussian;
  NoiseKind noise = NoiseKind::gaussian;
  Index n_outliers = 0;
};

/// Monte-Carlo experiment description. List-valued keys span the grid; the
/// cells are their Cartesian product with n varying slowest and n_outliers
/// fastest.
struct ExperimentConfig {
  std::vector<Index> n{400};
  std::vector<Index> d{200};
  std::vector<Index> s{4};
  std::vector<double> sigma_star{0.5};
  std::vector<DesignKind> design{DesignKind::gaussian};
  std::vector<NoiseKind> noise{NoiseKind::gaussian};
  std::vector<Index> n_outliers{0};

  ContaminationKind contamination = ContaminationKind::response;
  double contamination_magnitude = 1e4;
  double design_nu = 0;
  double noise_nu = 5;
  BetaPattern beta_pattern = BetaPattern::prefix;
  double beta_magnitude = 1.0;

  Index trials = 1;
  std::vector<std::string> estimators{"mom-fixed"};
  std::uint64_t seed = 0;

  double sigma_plus = 1.0;
  Index s_plus = 32;
  double criterion_c = kDefaultCriterionC;
  TuningSchedule tuning;
  AdaptiveConfig adaptive;  // s_plus is taken from the field above
  SolverConfig solver;
  /// Multiplier of the nominal baseline penalties sqrt(log(ed/s)/n)
  /// (sqrt-lasso) and sigma_plus sqrt(2 log(ed/s)/n) (lasso).
  double baseline_scale = 1.0;
  /// Extra l_p errors to report, p in [1, 2].
  std::vector<double> lp;

  void validate() const;
  std::vector<GridCell> cells() const;
};

/// Flat `key = value` text; list values are comma separated, `#` starts a
/// comment. Unknown or repeated keys are errors.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig read_experiment_config_file(const std::string& path);

DesignKind parse_design(const std::string& s);
NoiseKind parse_noise(const std::string& s);
ContaminationKind parse_contamination(const std::string& s);
BetaPattern parse_beta_pattern(const std::string& s);
StepDecay parse_step_decay(const std::string& s);
std::string to_string(DesignKind k);
std::string to_string(NoiseKind k);
std::string to_string(ContaminationKind k);

}  // namespace momlasso::bench
