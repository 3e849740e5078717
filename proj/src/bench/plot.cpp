#include "momlasso/bench/plot.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "text.hpp"

namespace momlasso::bench {

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "error-vs-n") return PlotKind::error_vs_n;
  if (name == "error-vs-outliers") return PlotKind::error_vs_outliers;
  if (name == "trace") return PlotKind::trace;
  throw InvalidInput("unknown plot kind '" + name + "'");
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

const std::vector<std::string> kCellColumns{"n", "d", "s", "sigma_star", "n_outliers"};

PlotData error_vs(const std::vector<TrialRecord>& records, const std::string& x_var, const std::string& metric) {
  // Cell columns other than x that take more than one value split series.
  std::vector<std::string> split_by;
  for (const auto& c : kCellColumns) {
    if (c == x_var) continue;
    std::set<std::string> values;
    for (const auto& r : records) values.insert(field_text(r, c));
    if (values.size() > 1) split_by.push_back(c);
  }
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const auto& r : records) {
    if (r.status != "ok") continue;
    const auto x = numeric_field(r, x_var);
    const auto y = numeric_field(r, metric);
    if (!x || !y) continue;
    std::string name = r.estimator;
    for (const auto& c : split_by) name += " " + c + "=" + field_text(r, c);
    groups[name][*x].push_back(*y);
  }
  PlotData plot;
  plot.x_label = x_var;
  plot.y_label = metric;
  for (const auto& [name, by_x] : groups) {
    Series s{name, {}};
    for (const auto& [x, ys] : by_x) s.points.emplace_back(x, median(ys));
    plot.series.push_back(std::move(s));
  }
  return plot;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const std::vector<std::string> kPalette{"#1b6ca8", "#d1495b", "#2e8b57", "#edae49", "#6a4c93", "#555555"};

}  // namespace

PlotData error_vs_n(const std::vector<TrialRecord>& records, const std::string& metric) {
  auto plot = error_vs(records, "n", metric);
  plot.title = "median " + metric + " vs n";
  plot.log_x = plot.log_y = true;
  return plot;
}

PlotData error_vs_outliers(const std::vector<TrialRecord>& records, const std::string& metric) {
  auto plot = error_vs(records, "n_outliers", metric);
  plot.title = "median " + metric + " vs number of outliers";
  plot.log_y = true;
  return plot;
}

PlotData trace_plot(const std::vector<TracePoint>& trace) {
  PlotData plot;
  plot.title = "objective trace";
  plot.x_label = "iteration";
  plot.y_label = "T";
  Series s{"T", {}};
  for (const auto& p : trace) s.points.emplace_back(static_cast<double>(p.iter), p.t_value);
  std::sort(s.points.begin(), s.points.end());
  plot.series.push_back(std::move(s));
  return plot;
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
  out << "iter,t_value,median_block\n";
  for (const auto& p : trace) out << p.iter << ',' << format_double(p.t_value) << ',' << p.median_block << '\n';
}

std::vector<TracePoint> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "iter,t_value,median_block") throw ParseError("header does not match the trace schema", 1);
  std::vector<TracePoint> out;
  std::int64_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = text::split(line, ',');
    if (f.size() != 3) throw ParseError("expected 3 fields", lineno);
    try {
      out.push_back({text::parse_int<std::int64_t>(f[0]), parse_double(f[1]), text::parse_int<Index>(f[2])});
    } catch (const InvalidInput& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

std::string render_svg(const PlotData& plot) {
  constexpr double width = 640, height = 420, left = 70, right = 170, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : plot.series)
    for (const auto& [x, y] : s.points) {
      if ((plot.log_x && !(x > 0)) || (plot.log_y && !(y > 0)))
        throw InvalidInput("log axis needs positive values");
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double ypad = 0.05 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };
  auto tick = [](double v, bool log) { return log ? fmt::format("{:.3g}", std::pow(10.0, v)) : fmt::format("{:.3g}", v); };

  std::string svg;
  svg += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
                     width, height, width, height);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     left + pw / 2, xml_escape(plot.title));
  svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n",
                     left, top, pw, ph);
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double sx = left + pw * i / 4.0, sy = top + ph - ph * i / 4.0;
    svg += fmt::format("<text class=\"tick\" x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
                       sx, top + ph + 16, tick(fx, plot.log_x));
    svg += fmt::format("<text class=\"tick\" x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
                       left - 6, sy + 4, tick(fy, plot.log_y));
  }
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"13\">{}{}</text>\n",
                     left + pw / 2, height - 12, xml_escape(plot.x_label), plot.log_x ? " (log)" : "");
  svg += fmt::format(
      "<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 {:.1f})\">{}{}</text>\n",
      top + ph / 2, top + ph / 2, xml_escape(plot.y_label), plot.log_y ? " (log)" : "");

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const auto& color = kPalette[k % kPalette.size()];
    svg += fmt::format("<g class=\"series\" data-name=\"{}\">\n", xml_escape(s.name));
    std::string pts;
    for (const auto& [x, y] : s.points) pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", px(x), py(y));
    if (s.points.size() > 1)
      svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    for (const auto& [x, y] : s.points)
      svg += fmt::format("<circle class=\"mark\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(x), py(y),
                         color);
    svg += "</g>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       left + pw + 12, ly, left + pw + 30, ly, color);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\">{}</text>\n", left + pw + 36, ly + 4,
                       xml_escape(s.name));
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_columns(const PlotData& plot) {
  std::string out = fmt::format("# {}\n# {} {}\n", plot.title, plot.x_label, plot.y_label);
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    if (k) out += "\n\n";
    out += "# series " + plot.series[k].name + "\n";
    for (const auto& [x, y] : plot.series[k].points) out += format_double(x) + " " + format_double(y) + "\n";
  }
  return out;
}

}  // namespace momlasso::bench
