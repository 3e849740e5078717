#include "momlasso/bench/rates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "text.hpp"

namespace momlasso::bench {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("need at least two paired points");
  const auto k = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw InsufficientData("x values do not vary");
  const double slope = sxy / sxx;
  const double r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, my - slope * mx, r2};
}

std::vector<RateFit> fit_rates(const std::vector<TrialRecord>& records, const std::string& group_by,
                               const std::string& x_var, const std::string& metric) {
  std::vector<std::string> keys;
  if (!group_by.empty())
    for (auto k : text::split(group_by, ',')) keys.emplace_back(text::trim(k));

  // group -> x -> metric values
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const auto& r : records) {
    if (r.status != "ok") continue;
    std::string g;
    for (std::size_t i = 0; i < keys.size(); ++i) g += (i ? ";" : "") + keys[i] + "=" + field_text(r, keys[i]);
    const auto x = numeric_field(r, x_var);
    const auto y = numeric_field(r, metric);
    if (!x || !y) continue;
    groups[g][*x].push_back(*y);
  }
  if (groups.empty()) throw InsufficientData("no usable rows");

  std::vector<RateFit> out;
  for (const auto& [g, by_x] : groups) {
    if (by_x.size() < 3)
      throw InsufficientData("group '" + g + "' has " + std::to_string(by_x.size()) + " distinct " + x_var +
                             " values; need at least 3");
    std::vector<double> lx, ly;
    for (const auto& [x, ys] : by_x) {
      const double m = median(ys);
      if (!(x > 0) || !(m > 0)) throw InvalidInput("log-log fit needs positive values in group '" + g + "'");
      lx.push_back(std::log(x));
      ly.push_back(std::log(m));
    }
    const auto fit = least_squares_line(lx, ly);
    out.push_back({g, fit.slope, fit.intercept, fit.r2, static_cast<Index>(lx.size())});
  }
  return out;
}

void write_rates_csv(std::ostream& out, const std::vector<RateFit>& fits) {
  out << "group,slope,intercept,r2,points\n";
  for (const auto& f : fits)
    out << f.group << ',' << format_double(f.slope) << ',' << format_double(f.intercept) << ','
        << format_double(f.r2) << ',' << f.points << '\n';
}

}  // namespace momlasso::bench
