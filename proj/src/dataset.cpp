#include "momlasso/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace momlasso {

Dataset subset_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), data.d());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = rows[r];
    if (i < 0 || i >= data.n()) throw InvalidInput("row index out of range");
    out.x.row(static_cast<Eigen::Index>(r)) = data.x.row(i);
    out.y(static_cast<Eigen::Index>(r)) = data.y(i);
  }
  if (data.truth) {
    GroundTruth t;
    t.beta_star = data.truth->beta_star;
    t.sigma_star = data.truth->sigma_star;
    std::unordered_map<Eigen::Index, Eigen::Index> where;
    for (std::size_t r = 0; r < rows.size(); ++r) where.emplace(rows[r], static_cast<Eigen::Index>(r));
    for (auto o : data.truth->outlier_indices) {
      if (auto it = where.find(o); it != where.end()) t.outlier_indices.push_back(it->second);
    }
    std::sort(t.outlier_indices.begin(), t.outlier_indices.end());
    out.truth = std::move(t);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
    field.remove_suffix(1);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw InvalidInput("not a number: '" + std::string(field) + "'");
  return v;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::int64_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.size() < 2 || header[0] != "y") throw ParseError("header must be y,x1,...,xd", lineno);
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != "x" + std::to_string(j)) throw ParseError("header must be y,x1,...,xd", lineno);
  }
  const auto d = static_cast<Eigen::Index>(header.size() - 1);

  std::vector<double> values;
  Eigen::Index n = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (static_cast<Eigen::Index>(fields.size()) != d + 1)
      throw ParseError("expected " + std::to_string(d + 1) + " fields, got " + std::to_string(fields.size()),
                       lineno);
    for (auto f : fields) {
      try {
        const double v = parse_double(f);
        if (!std::isfinite(v)) throw InvalidInput("non-finite value");
        values.push_back(v);
      } catch (const InvalidInput& e) {
        throw ParseError(e.what(), lineno);
      }
    }
    ++n;
  }
  if (n == 0) throw ParseError("no data rows", lineno);

  Dataset data;
  data.x.resize(n, d);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* row = values.data() + i * (d + 1);
    data.y(i) = row[0];
    for (Eigen::Index j = 0; j < d; ++j) data.x(i, j) = row[j + 1];
  }
  return data;
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  data.validate();
  out << 'y';
  for (Eigen::Index j = 0; j < data.d(); ++j) out << ",x" << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y(i));
    for (Eigen::Index j = 0; j < data.d(); ++j) out << ',' << format_double(data.x(i, j));
    out << '\n';
  }
}

void write_dataset_csv_file(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  write_dataset_csv(out, data);
}

}  // namespace momlasso
