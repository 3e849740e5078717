#include "momlasso/bench/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

#include "text.hpp"

namespace momlasso::bench {

DesignKind parse_design(const std::string& s) {
  if (s == "gaussian") return DesignKind::gaussian;
  if (s == "student-t") return DesignKind::student_t;
  if (s == "rademacher") return DesignKind::rademacher;
  throw InvalidInput("unknown design '" + s + "'");
}

NoiseKind parse_noise(const std::string& s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "student-t") return NoiseKind::student_t;
  throw InvalidInput("unknown noise '" + s + "'");
}

ContaminationKind parse_contamination(const std::string& s) {
  if (s == "none") return ContaminationKind::none;
  if (s == "response") return ContaminationKind::response;
  if (s == "leverage") return ContaminationKind::leverage;
  if (s == "flip") return ContaminationKind::flip;
  throw InvalidInput("unknown contamination '" + s + "'");
}

BetaPattern parse_beta_pattern(const std::string& s) {
  if (s == "prefix") return BetaPattern::prefix;
  if (s == "random-support") return BetaPattern::random_support;
  throw InvalidInput("unknown beta pattern '" + s + "'");
}

StepDecay parse_step_decay(const std::string& s) {
  if (s == "constant") return StepDecay::constant;
  if (s == "inverse-sqrt") return StepDecay::inverse_sqrt;
  throw InvalidInput("unknown step decay '" + s + "'");
}

std::string to_string(DesignKind k) {
  switch (k) {
    case DesignKind::gaussian: return "gaussian";
    case DesignKind::student_t: return "student-t";
    case DesignKind::rademacher: return "rademacher";
  }
  return {};
}

std::string to_string(NoiseKind k) { return k == NoiseKind::gaussian ? "gaussian" : "student-t"; }

std::string to_string(ContaminationKind k) {
  switch (k) {
    case ContaminationKind::none: return "none";
    case ContaminationKind::response: return "response";
    case ContaminationKind::leverage: return "leverage";
    case ContaminationKind::flip: return "flip";
  }
  return {};
}

void ExperimentConfig::validate() const {
  if (n.empty() || d.empty() || s.empty() || sigma_star.empty() || design.empty() || noise.empty() ||
      n_outliers.empty())
    throw InvalidInput("every grid key needs at least one value");
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  if (estimators.empty()) throw InvalidInput("no estimators listed");
  for (const auto& e : estimators) {
    bool found = false;
    for (const auto& k : known_estimators()) found = found || e == k;
    if (!found) throw InvalidInput("unknown estimator '" + e + "'");
  }
  for (auto v : n) MOMLASSO_REQUIRE(v >= 1, "n must be positive");
  for (auto v : d) MOMLASSO_REQUIRE(v >= 1, "d must be positive");
  for (auto v : s) MOMLASSO_REQUIRE(v >= 1, "s must be positive");
  for (auto v : sigma_star) MOMLASSO_REQUIRE(v >= 0, "sigma_star must be nonnegative");
  for (auto v : n_outliers) MOMLASSO_REQUIRE(v >= 0, "n_outliers must be nonnegative");
  for (auto p : lp) MOMLASSO_REQUIRE(p >= 1 && p <= 2, "lp exponents must lie in [1, 2]");
  MOMLASSO_REQUIRE(sigma_plus > 0, "sigma_plus must be positive");
  MOMLASSO_REQUIRE(s_plus >= 1, "s_plus must be positive");
  MOMLASSO_REQUIRE(criterion_c > 2, "criterion_c must exceed 2");
  MOMLASSO_REQUIRE(baseline_scale > 0, "baseline_scale must be positive");
  tuning.validate();
  solver.validate();
}

std::vector<GridCell> ExperimentConfig::cells() const {
  std::vector<GridCell> out;
  Index id = 0;
  for (auto vn : n)
    for (auto vd : d)
      for (auto vs : s)
        for (auto vsig : sigma_star)
          for (auto vdes : design)
            for (auto vnoise : noise)
              for (auto vo : n_outliers) out.push_back({id++, vn, vd, vs, vsig, vdes, vnoise, vo});
  return out;
}

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::vector<std::string>&)>;

std::string single(const std::vector<std::string>& v) {
  if (v.size() != 1) throw InvalidInput("expected a single value");
  return v.front();
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw InvalidInput("expected true or false, got '" + s + "'");
}

double real(const std::string& s) { return parse_double(s); }
Index count(const std::string& s) { return text::parse_int<Index>(s); }

template <typename T, typename F>
std::vector<T> each(const std::vector<std::string>& v, F f) {
  std::vector<T> out;
  for (const auto& s : v) out.push_back(f(s));
  return out;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"n", [](auto& c, const auto& v) { c.n = each<Index>(v, count); }},
      {"d", [](auto& c, const auto& v) { c.d = each<Index>(v, count); }},
      {"s", [](auto& c, const auto& v) { c.s = each<Index>(v, count); }},
      {"sigma_star", [](auto& c, const auto& v) { c.sigma_star = each<double>(v, real); }},
      {"design", [](auto& c, const auto& v) { c.design = each<DesignKind>(v, parse_design); }},
      {"noise", [](auto& c, const auto& v) { c.noise = each<NoiseKind>(v, parse_noise); }},
      {"n_outliers", [](auto& c, const auto& v) { c.n_outliers = each<Index>(v, count); }},
      {"contamination", [](auto& c, const auto& v) { c.contamination = parse_contamination(single(v)); }},
      {"contamination_magnitude", [](auto& c, const auto& v) { c.contamination_magnitude = real(single(v)); }},
      {"design_nu", [](auto& c, const auto& v) { c.design_nu = real(single(v)); }},
      {"noise_nu", [](auto& c, const auto& v) { c.noise_nu = real(single(v)); }},
      {"beta_pattern", [](auto& c, const auto& v) { c.beta_pattern = parse_beta_pattern(single(v)); }},
      {"beta_magnitude", [](auto& c, const auto& v) { c.beta_magnitude = real(single(v)); }},
      {"trials", [](auto& c, const auto& v) { c.trials = count(single(v)); }},
      {"estimators", [](auto& c, const auto& v) { c.estimators = v; }},
      {"seed", [](auto& c, const auto& v) { c.seed = text::parse_int<std::uint64_t>(single(v)); }},
      {"sigma_plus", [](auto& c, const auto& v) { c.sigma_plus = real(single(v)); }},
      {"s_plus", [](auto& c, const auto& v) { c.s_plus = count(single(v)); }},
      {"criterion_c", [](auto& c, const auto& v) { c.criterion_c = real(single(v)); }},
      {"c1_tilde", [](auto& c, const auto& v) { c.tuning.c1_tilde = real(single(v)); }},
      {"c2_tilde", [](auto& c, const auto& v) { c.tuning.c2_tilde = real(single(v)); }},
      {"iota_k", [](auto& c, const auto& v) { c.tuning.iota_k = real(single(v)); }},
      {"iota_mu", [](auto& c, const auto& v) { c.tuning.iota_mu = real(single(v)); }},
      {"agg_c1", [](auto& c, const auto& v) { c.adaptive.agg_c1 = real(single(v)); }},
      {"agg_c2", [](auto& c, const auto& v) { c.adaptive.agg_c2 = real(single(v)); }},
      {"agg_c3", [](auto& c, const auto& v) { c.adaptive.agg_c3 = real(single(v)); }},
      {"max_iters", [](auto& c, const auto& v) { c.solver.max_iters = text::parse_int<std::int64_t>(single(v)); }},
      {"step_size", [](auto& c, const auto& v) { c.solver.step_size = real(single(v)); }},
      {"scale_step_size", [](auto& c, const auto& v) { c.solver.scale_step_size = real(single(v)); }},
      {"step_decay", [](auto& c, const auto& v) { c.solver.step_decay = parse_step_decay(single(v)); }},
      {"tol", [](auto& c, const auto& v) { c.solver.tol = real(single(v)); }},
      {"check_window",
       [](auto& c, const auto& v) { c.solver.check_window = text::parse_int<std::int64_t>(single(v)); }},
      {"warm_start", [](auto& c, const auto& v) { c.solver.warm_start = parse_bool(single(v)); }},
      {"averaging_window", [](auto& c, const auto& v) { c.solver.averaging_window = real(single(v)); }},
      {"baseline_scale", [](auto& c, const auto& v) { c.baseline_scale = real(single(v)); }},
      {"lp", [](auto& c, const auto& v) { c.lp = each<double>(v, real); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = text::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", lineno);
    const std::string key(text::trim(body.substr(0, eq)));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError("unknown key '" + key + "'", lineno);
    if (!seen.insert(key).second) throw ParseError("repeated key '" + key + "'", lineno);
    std::vector<std::string> values;
    for (auto part : text::split(body.substr(eq + 1), ',')) {
      part = text::trim(part);
      if (part.empty()) throw ParseError("empty value for '" + key + "'", lineno);
      values.emplace_back(part);
    }
    try {
      it->second(cfg, values);
    } catch (const InvalidInput& e) {
      throw ParseError(key + ": " + e.what(), lineno);
    }
  }
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(e.what(), lineno);
  }
  return cfg;
}

ExperimentConfig read_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  return parse_experiment_config(in);
}

}  // namespace momlasso::bench
