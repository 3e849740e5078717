#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "momlasso/bench/records.hpp"
#include "momlasso/saddle_solver.hpp"

namespace momlasso::bench {

enum class PlotKind { error_vs_n, error_vs_outliers, trace };

/// Throws InvalidInput for unknown names.
PlotKind parse_plot_kind(const std::string& name);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // sorted by x
};

struct PlotData {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// One series per estimator (split further by the cell parameters that vary
/// besides x); each point is the median metric over ok trials at one x.
PlotData error_vs_n(const std::vector<TrialRecord>& records, const std::string& metric = "err_l2");
PlotData error_vs_outliers(const std::vector<TrialRecord>& records, const std::string& metric = "err_l2");
PlotData trace_plot(const std::vector<TracePoint>& trace);

/// Trace export: header `iter,t_value,median_block`.
void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace);
std::vector<TracePoint> read_trace_csv(std::istream& in);

/// One `<circle class="mark">` per point.
std::string render_svg(const PlotData& plot);
/// gnuplot-ready blocks, one per series, separated by two blank lines.
std::string render_columns(const PlotData& plot);

}  // namespace momlasso::bench
