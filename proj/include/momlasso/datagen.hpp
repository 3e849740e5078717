#pragma once

#include <cstdint>
#include <vector>

#include "momlasso/dataset.hpp"

namespace momlasso {

enum class DesignKind { gaussian, student_t, rademacher };
enum class NoiseKind { gaussian, student_t };
enum class BetaPattern { prefix, random_support };
enum class ContaminationKind { none, response, leverage, flip };

/// Contamination operator applied to m rows.
///  response: y_i <- +-magnitude (random sign)
///  leverage: x_i <- magnitude * x_i
///  flip:     y_i <- -magnitude * y_i
struct Contamination {
  ContaminationKind kind = ContaminationKind::none;
  Index m = 0;
  double magnitude = 1.0;
};

struct GenSpec {
  Index n = 100;
  Index d = 10;
  Index s = 1;
  DesignKind design = DesignKind::gaussian;
  double design_nu = 0;  // student-t design; 0 picks max(5, log d)
  NoiseKind noise = NoiseKind::gaussian;
  double noise_nu = 5;   // student-t noise, must exceed 4
  double sigma_star = 1.0;
  BetaPattern beta_pattern = BetaPattern::prefix;
  double beta_magnitude = 1.0;
  Contamination contamination;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Rows are drawn from per-row counter-based streams, so the result depends
/// on the spec only. Every design column has unit variance; noise has
/// standard deviation sigma_star.
Dataset generate(const GenSpec& spec);

/// A copy of `data` with exactly m rows (chosen by seed) corrupted. The
/// outlier set in the ground truth becomes the union with the previous one;
/// data without ground truth is corrupted but no outlier set is kept.
Dataset contaminate(const Dataset& data, const Contamination& model, std::uint64_t seed);

/// Rows of `data` that differ from `other` (same shape required).
std::vector<Index> differing_rows(const Dataset& data, const Dataset& other);

}  // namespace momlasso
