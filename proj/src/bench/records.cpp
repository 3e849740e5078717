#include "momlasso/bench/records.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "text.hpp"

namespace momlasso::bench {

bool record_less(const TrialRecord& a, const TrialRecord& b) {
  return std::tie(a.cell_id, a.estimator, a.trial) < std::tie(b.cell_id, b.estimator, b.trial);
}

namespace {

constexpr std::size_t kFixedColumns = 15;

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::optional<double> opt_real(std::string_view s) {
  if (text::trim(s).empty()) return std::nullopt;
  return parse_double(s);
}

std::string lp_column(double p) { return "err_lp_" + format_double(p); }

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  std::vector<double> ps;
  if (!records.empty())
    for (const auto& [p, v] : records.front().err_lp) ps.push_back(p);
  out << kBenchHeader;
  for (double p : ps) out << ',' << lp_column(p);
  out << '\n';
  for (const auto& r : records) {
    if (r.err_lp.size() != ps.size()) throw InvalidInput("records disagree on the reported l_p errors");
    out << r.cell_id << ',' << r.estimator << ',' << r.trial << ',' << r.n << ',' << r.d << ',' << r.s << ','
        << format_double(r.sigma_star) << ',' << r.n_outliers << ',' << opt(r.err_l1) << ',' << opt(r.err_l2) << ','
        << opt(r.sigma_err) << ',' << (r.s_selected ? std::to_string(*r.s_selected) : std::string()) << ','
        << opt(r.runtime_ms) << ',' << r.status << ',' << r.seed;
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (r.err_lp[j].first != ps[j]) throw InvalidInput("records disagree on the reported l_p errors");
      out << ',' << opt(r.err_lp[j].second);
    }
    out << '\n';
  }
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string fixed = kBenchHeader;
  if (line.compare(0, fixed.size(), fixed) != 0) throw ParseError("header does not match the bench schema", 1);
  std::vector<double> ps;
  if (line.size() > fixed.size()) {
    if (line[fixed.size()] != ',') throw ParseError("header does not match the bench schema", 1);
    for (auto col : text::split(std::string_view(line).substr(fixed.size() + 1), ',')) {
      if (col.substr(0, 7) != "err_lp_") throw ParseError("unexpected column '" + std::string(col) + "'", 1);
      try {
        ps.push_back(parse_double(col.substr(7)));
      } catch (const InvalidInput&) {
        throw ParseError("bad l_p column '" + std::string(col) + "'", 1);
      }
    }
  }
  std::vector<TrialRecord> out;
  std::int64_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = text::split(line, ',');
    if (f.size() != kFixedColumns + ps.size())
      throw ParseError("expected " + std::to_string(kFixedColumns + ps.size()) + " fields, got " +
                           std::to_string(f.size()),
                       lineno);
    try {
      TrialRecord r;
      r.cell_id = text::parse_int<Index>(f[0]);
      r.estimator = std::string(text::trim(f[1]));
      r.trial = text::parse_int<Index>(f[2]);
      r.n = text::parse_int<Index>(f[3]);
      r.d = text::parse_int<Index>(f[4]);
      r.s = text::parse_int<Index>(f[5]);
      r.sigma_star = parse_double(f[6]);
      r.n_outliers = text::parse_int<Index>(f[7]);
      r.err_l1 = opt_real(f[8]);
      r.err_l2 = opt_real(f[9]);
      r.sigma_err = opt_real(f[10]);
      if (!text::trim(f[11]).empty()) r.s_selected = text::parse_int<Index>(f[11]);
      r.runtime_ms = opt_real(f[12]);
      r.status = std::string(text::trim(f[13]));
      r.seed = text::parse_int<std::uint64_t>(f[14]);
      for (std::size_t j = 0; j < ps.size(); ++j) r.err_lp.emplace_back(ps[j], opt_real(f[kFixedColumns + j]));
      out.push_back(std::move(r));
    } catch (const InvalidInput& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

std::vector<TrialRecord> read_records_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open bench CSV '" + path + "'");
  return read_records_csv(in);
}

std::optional<double> numeric_field(const TrialRecord& r, const std::string& column) {
  auto d = [](auto v) { return std::optional<double>(static_cast<double>(v)); };
  if (column == "cell_id") return d(r.cell_id);
  if (column == "trial") return d(r.trial);
  if (column == "n") return d(r.n);
  if (column == "d") return d(r.d);
  if (column == "s") return d(r.s);
  if (column == "sigma_star") return r.sigma_star;
  if (column == "n_outliers") return d(r.n_outliers);
  if (column == "err_l1") return r.err_l1;
  if (column == "err_l2") return r.err_l2;
  if (column == "sigma_err") return r.sigma_err;
  if (column == "s_selected") return r.s_selected ? d(*r.s_selected) : std::nullopt;
  if (column == "runtime_ms") return r.runtime_ms;
  if (column.rfind("err_lp_", 0) == 0) {
    const double p = parse_double(std::string_view(column).substr(7));
    for (const auto& [q, v] : r.err_lp)
      if (q == p) return v;
    throw InvalidInput("no column '" + column + "'");
  }
  throw InvalidInput("unknown numeric column '" + column + "'");
}

std::string field_text(const TrialRecord& r, const std::string& column) {
  if (column == "estimator") return r.estimator;
  if (column == "status") return r.status;
  if (column == "seed") return std::to_string(r.seed);
  const auto v = numeric_field(r, column);
  return v ? format_double(*v) : std::string();
}

}  // namespace momlasso::bench
