#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "momlasso/bench/records.hpp"

namespace momlasso::bench {

struct RateFit {
  std::string group;
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  Index points = 0;
};

struct LineFit {
  double slope;
  double intercept;
  double r2;
};

/// Ordinary least squares y = intercept + slope x.
LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

/// Per group (the comma-separated `group_by` columns), OLS of log(median
/// metric) on log(x_var) over the distinct x values. Only rows with status ok
/// enter. Throws InsufficientData when a group has fewer than 3 distinct x.
std::vector<RateFit> fit_rates(const std::vector<TrialRecord>& records, const std::string& group_by,
                               const std::string& x_var, const std::string& metric = "err_l2");

void write_rates_csv(std::ostream& out, const std::vector<RateFit>& fits);

}  // namespace momlasso::bench
