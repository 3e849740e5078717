#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "momlasso/dataset.hpp"

namespace momlasso::bench {

/// One (cell, estimator, trial) outcome. Error fields are absent when the
/// trial failed (status != "ok").
struct TrialRecord {
  Index cell_id = 0;
  std::string estimator;
  Index trial = 0;
  Index n = 0;
  Index d = 0;
  Index s = 0;
  double sigma_star = 0;
  Index n_outliers = 0;
  std::optional<double> err_l1;
  std::optional<double> err_l2;
  std::optional<double> sigma_err;
  std::optional<Index> s_selected;
  std::optional<double> runtime_ms;
  std::string status = "ok";
  std::uint64_t seed = 0;
  /// (p, |beta_hat - beta_star|_p) for requested p.
  std::vector<std::pair<double, std::optional<double>>> err_lp;

  bool operator==(const TrialRecord&) const = default;
};

/// Sort key (cell, estimator, trial).
bool record_less(const TrialRecord& a, const TrialRecord& b);

inline constexpr const char* kBenchHeader =
    "cell_id,estimator,trial,n,d,s,sigma_star,n_outliers,err_l1,err_l2,sigma_err,s_selected,runtime_ms,status,seed";

/// Bench CSV: the fixed header, then one `err_lp_<p>` column per requested p.
/// Absent values are empty fields.
void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records_csv(std::istream& in);
std::vector<TrialRecord> read_records_csv_file(const std::string& path);

/// Numeric value of a named column (n, d, s, sigma_star, n_outliers,
/// cell_id, trial, err_l1, err_l2, sigma_err, s_selected, runtime_ms,
/// err_lp_<p>); empty when absent.
std::optional<double> numeric_field(const TrialRecord& r, const std::string& column);
/// Text value of a named column, used for grouping.
std::string field_text(const TrialRecord& r, const std::string& column);

}  // namespace momlasso::bench
