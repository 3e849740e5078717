#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include "momlasso/datagen.hpp"
#include "momlasso/estimators.hpp"
#include "momlasso/random.hpp"
#include "support/fixtures.hpp"

using namespace momlasso;
using doctest::Approx;

namespace {

bool has_flag(const FitResult& r, const std::string& flag) {
  const auto& f = r.diagnostics.flags;
  return std::find(f.begin(), f.end(), flag) != f.end();
}

FitResult fake_fit(Eigen::VectorXd beta, double sigma) {
  FitResult r;
  r.beta_hat = std::move(beta);
  r.sigma_hat = sigma;
  return r;
}

}  // namespace

TEST_CASE("schedule examples") {
  TuningSchedule t;
  t.c1_tilde = 1;
  t.c2_tilde = 1;
  const auto a = schedule(1000, 100, 2, t);
  CHECK(a.k == 10);  // ceil(2 log(50 e)) = ceil(9.824)
  CHECK(a.k_unclamped == 10);
  const auto b = schedule(100, 100, 1, t);
  CHECK(b.mu == Approx(std::sqrt(std::log(100 * std::numbers::e) / 100)).epsilon(1e-14));
  CHECK(b.mu == Approx(0.2368).epsilon(1e-3));
  const auto c = schedule(400, 30, 30, t);
  CHECK(c.k == 30);
  CHECK(c.mu == Approx(std::sqrt(1.0 / 400)).epsilon(1e-14));
}

TEST_CASE("schedule clamps k to [1, n] and keeps the raw value") {
  TuningSchedule t;
  const auto r = schedule(20, 200, 8, t);
  CHECK(r.k == 20);
  CHECK(r.k_unclamped > 20);
}

TEST_CASE("schedule is monotone in s: k up, mu down") {
  const TuningSchedule t;
  for (Index d : {10, 50, 200, 1000}) {
    Index prev_k = 0;
    double prev_mu = 1e300;
    for (Index s = 1; s <= d; ++s) {
      const auto r = schedule(1'000'000, d, s, t);
      REQUIRE(r.k_unclamped >= prev_k);
      REQUIRE(r.mu <= prev_mu);
      prev_k = r.k_unclamped;
      prev_mu = r.mu;
    }
  }
}

TEST_CASE("schedule validation") {
  TuningSchedule t;
  CHECK_THROWS_AS(schedule(100, 10, 11, t), InvalidInput);
  CHECK_THROWS_AS(schedule(100, 10, 0, t), InvalidInput);
  t.iota_k = 3;
  CHECK_THROWS_AS(schedule(100, 10, 1, t), InvalidInput);
  t = TuningSchedule{};
  t.c2_tilde = 0;
  CHECK_THROWS_AS(schedule(100, 10, 1, t), InvalidInput);
}

TEST_CASE("fit_fixed_s recovers noiseless sparse data") {
  const auto data = testing::small_problem(41, 400, 50, 3, 0.0);
  const auto fit = fit_fixed_s(data, 3, 1.0, TuningSchedule{}, SolverConfig{}, 7);
  const double norm = data.truth->beta_star.norm();
  CHECK((fit.beta_hat - data.truth->beta_star).norm() <= 0.05 * norm);
  CHECK(fit.sigma_hat <= 1.0);
}

TEST_CASE("fit_fixed_s on pure noise") {
  GenSpec spec;
  spec.n = 400;
  spec.d = 50;
  spec.s = 0;
  spec.sigma_star = 1.0;
  spec.seed = 42;
  const auto data = generate(spec);
  const auto fit = fit_fixed_s(data, 1, 2.0, TuningSchedule{}, SolverConfig{}, 3);
  CHECK(fit.beta_hat.norm() <= 0.5);
  CHECK(fit.sigma_hat >= 0.6);
  CHECK(fit.sigma_hat <= 1.4);
}

TEST_CASE("fit_fixed_s is deterministic and respects sigma_plus") {
  const auto data = generate(testing::headline_spec(5, 200, 5));
  SolverConfig cfg;
  cfg.max_iters = 2000;
  const auto a = fit_fixed_s(data, 4, 0.3, TuningSchedule{}, cfg, 11);
  const auto b = fit_fixed_s(data, 4, 0.3, TuningSchedule{}, cfg, 11);
  CHECK((a.beta_hat.array() == b.beta_hat.array()).all());
  CHECK(a.sigma_hat == b.sigma_hat);
  CHECK(a.k_used == b.k_used);
  CHECK(a.sigma_hat <= 0.3);
  CHECK(a.diagnostics.sigma_plus_used == 0.3);
}

TEST_CASE("fit_fixed_s rejects a schedule needing more blocks than samples") {
  const auto data = testing::small_problem(43, 30, 100, 3, 0.5);
  CHECK_THROWS_AS(fit_fixed_s(data, 20, 1.0, TuningSchedule{}, SolverConfig{}, 1), InfeasibleConfig);
  CHECK_THROWS_AS(fit_mom(data, 31, 0.1, 1.0, SolverConfig{}, 1), InfeasibleConfig);
  CHECK_THROWS_AS(fit_mom(data, 3, 0.1, 0.0, SolverConfig{}, 1), InvalidInput);
}

TEST_CASE("mom_variance_bound examples") {
  CHECK(mom_variance_bound(Eigen::VectorXd::Constant(50, 3.25), 5, 1) == 0.0);
  Eigen::VectorXd y(6);
  y << -1, 1, -1, 1, -1, 1;
  const auto p = partition_from_blocks(6, {{0, 1}, {2, 3}, {4, 5}});
  CHECK(mom_variance_bound(y, p) == 1.0);
}

TEST_CASE("mom_variance_bound is homogeneous of degree two") {
  SplitMix64 g(44);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd y(101);
    for (Index i = 0; i < y.size(); ++i) y(i) = 3.0 * standard_normal(g) + 1.0;
    const auto seed = g();
    const double base = mom_variance_bound(y, 9, seed);
    CHECK(mom_variance_bound(Eigen::VectorXd(2.0 * y), 9, seed) == 4.0 * base);
    CHECK(mom_variance_bound(Eigen::VectorXd(3.0 * y), 9, seed) == Approx(9.0 * base).epsilon(1e-12));
  }
}

TEST_CASE("mom_variance_bound on Gaussian data with variance 4") {
  int inside = 0;
  for (int t = 0; t < 200; ++t) {
    SplitMix64 g(derive_seed(45, static_cast<std::uint64_t>(t)));
    Eigen::VectorXd y(10000);
    for (Index i = 0; i < y.size(); ++i) y(i) = 2.0 * standard_normal(g);
    const double v = mom_variance_bound(y, 20, g());
    inside += v >= 2.5 && v <= 6.0;
  }
  CHECK(inside >= 190);
}

TEST_CASE("half_split halves are disjoint and cover every sample") {
  for (Index n : {2, 3, 10, 101}) {
    const auto h = half_split(n, 9);
    CHECK(static_cast<Index>(h.variance_rows.size()) == n / 2);
    std::set<Index> all(h.variance_rows.begin(), h.variance_rows.end());
    for (Index i : h.fit_rows) CHECK(all.insert(i).second);
    CHECK(static_cast<Index>(all.size()) == n);
  }
  CHECK_THROWS_AS(half_split(1, 0), InvalidInput);
  CHECK(half_split(50, 3).fit_rows == half_split(50, 3).fit_rows);
}

TEST_CASE("fit_estimated_sigma_plus falls back on constant responses") {
  auto data = testing::small_problem(46, 200, 10, 2, 0.5);
  data.y.setConstant(2.0);
  SolverConfig cfg;
  cfg.max_iters = 500;
  const auto fit = fit_estimated_sigma_plus(data, 2, TuningSchedule{}, cfg, 1);
  CHECK(has_flag(fit, "sigma_plus_fallback"));
  CHECK(fit.diagnostics.sigma_plus_used > 0);
}

TEST_CASE("fit_estimated_sigma_plus at SNR 1 lands within a factor 4 sqrt 2 of sigma*") {
  GenSpec spec;
  spec.n = 800;
  spec.d = 50;
  spec.s = 4;
  spec.beta_magnitude = 0.5;  // |beta*|_2 = 1 = sigma*
  spec.sigma_star = 1.0;
  spec.seed = 47;
  const auto data = generate(spec);
  const auto fit = fit_estimated_sigma_plus(data, 4, TuningSchedule{}, SolverConfig{}, 2);
  const double factor = 4.0 * std::sqrt(2.0);
  CHECK(fit.sigma_hat >= spec.sigma_star / factor);
  CHECK(fit.sigma_hat <= spec.sigma_star * factor);
  CHECK_FALSE(has_flag(fit, "sigma_plus_fallback"));
}

TEST_CASE("fit_estimated_sigma_plus needs enough samples in each half") {
  const auto data = testing::small_problem(48, 60, 100, 2, 0.5);
  CHECK_THROWS_AS(fit_estimated_sigma_plus(data, 8, TuningSchedule{}, SolverConfig{}, 1), InfeasibleConfig);
}

TEST_CASE("rate function") {
  CHECK(rate(4, 2, 100, 200) == Approx(2.0 * std::sqrt((1 + std::log(50.0)) / 100)).epsilon(1e-14));
  CHECK(rate(4, 1, 100, 200) == Approx(4.0 * std::sqrt((1 + std::log(50.0)) / 100)).epsilon(1e-14));
  // log(ed/u) < 1 is clamped at 1.
  CHECK(rate(64, 2, 100, 20) == Approx(8.0 * std::sqrt(1.0 / 100)).epsilon(1e-14));
}

TEST_CASE("select_level with identical fits picks the smallest level") {
  std::vector<AdaptiveLevel> levels;
  for (Index m = 1; m <= 6; ++m)
    levels.push_back({m, Index{1} << m, fake_fit(Eigen::VectorXd::Constant(10, 0.5), 1.0), ""});
  const auto sel = select_level(levels, AdaptiveConfig{32}, 400, 200);
  CHECK(sel.m_selected == 1);
  CHECK(sel.admissible.size() == 5);
}

TEST_CASE("select_level returns M + 1 when nothing is admissible") {
  std::vector<AdaptiveLevel> levels;
  for (Index m = 1; m <= 3; ++m) levels.push_back({m, Index{1} << m, std::nullopt, "failed"});
  levels.push_back({4, 16, fake_fit(Eigen::VectorXd::Zero(10), 1.0), ""});
  const auto sel = select_level(levels, AdaptiveConfig{8}, 400, 200);
  CHECK(sel.m_selected == 4);
  CHECK(sel.admissible.empty());
}

TEST_CASE("select_level stops below a failing comparison") {
  std::vector<AdaptiveLevel> levels;
  for (Index m = 1; m <= 4; ++m) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(10);
    if (m <= 2) b(0) = 100.0;  // levels 1, 2 far from level 3
    levels.push_back({m, Index{1} << m, fake_fit(b, 1.0), ""});
  }
  const auto sel = select_level(levels, AdaptiveConfig{8}, 400, 200);
  CHECK(sel.m_selected == 3);
  CHECK(sel.admissible == std::vector<Index>{3});
  std::vector<AdaptiveLevel> none;
  CHECK_THROWS_AS(select_level(none, AdaptiveConfig{8}, 400, 200), InvalidInput);
}

TEST_CASE("fit_adaptive with s_plus = 2 fits two levels and selects 2") {
  const auto data = testing::small_problem(49, 300, 40, 2, 0.5);
  SolverConfig cfg;
  cfg.max_iters = 3000;
  std::vector<AdaptiveLevel> levels;
  const auto fit = fit_adaptive(data, AdaptiveConfig{2}, 1.0, TuningSchedule{}, cfg, 5, kDefaultCriterionC, &levels);
  CHECK(levels.size() == 2);
  REQUIRE(fit.s_selected);
  CHECK(*fit.s_selected == 2);
}

TEST_CASE("fit_adaptive never exceeds 2^(M+1) and reproduces the fixed fit at the chosen level") {
  const auto data = generate(testing::headline_spec(50, 400, 0));
  SolverConfig cfg;
  cfg.max_iters = 3000;
  for (Index s_plus : {3, 8, 13}) {
    std::vector<AdaptiveLevel> levels;
    const auto fit =
        fit_adaptive(data, AdaptiveConfig{s_plus}, 1.0, TuningSchedule{}, cfg, 6, kDefaultCriterionC, &levels);
    const auto big_m = static_cast<Index>(std::ceil(std::log2(static_cast<double>(s_plus))));
    CHECK(static_cast<Index>(levels.size()) == big_m + 1);
    REQUIRE(fit.s_selected);
    CHECK(*fit.s_selected <= (Index{1} << (big_m + 1)));
    CHECK(std::has_single_bit(static_cast<std::uint64_t>(*fit.s_selected)));
    const auto fixed = fit_fixed_s(data, *fit.s_selected, 1.0, TuningSchedule{}, cfg, 6);
    CHECK((fixed.beta_hat.array() == fit.beta_hat.array()).all());
  }
}

TEST_CASE("fit_adaptive flags a large s_plus and validates the config") {
  const auto data = testing::small_problem(51, 200, 16, 2, 0.5);
  SolverConfig cfg;
  cfg.max_iters = 300;
  const auto fit = fit_adaptive(data, AdaptiveConfig{4}, 1.0, TuningSchedule{}, cfg, 1);
  CHECK(has_flag(fit, "s_plus_above_d_over_2e"));
  CHECK_THROWS_AS(fit_adaptive(data, AdaptiveConfig{17}, 1.0, TuningSchedule{}, cfg, 1), InvalidInput);
  CHECK_THROWS_AS(fit_adaptive(data, AdaptiveConfig{0}, 1.0, TuningSchedule{}, cfg, 1), InvalidInput);
}

TEST_CASE("sqrt-lasso with vanishing penalty recovers noiseless data") {
  const auto data = testing::small_problem(52, 100, 10, 3, 0.0);
  const auto fit = sqrt_lasso_baseline(data, 1e-9);
  CHECK((fit.beta_hat - data.truth->beta_star).norm() <= 1e-6);
  CHECK(fit.sigma_hat <= 1e-3);
}

TEST_CASE("sqrt-lasso at mu = 0.1 on noiseless data has tiny sigma") {
  const auto data = testing::small_problem(53, 200, 20, 3, 0.0);
  const auto fit = sqrt_lasso_baseline(data, 0.1);
  CHECK(fit.sigma_hat <= 1e-3);
}

TEST_CASE("lasso on one orthogonal feature is a soft threshold") {
  Dataset data;
  data.x.resize(4, 1);
  data.x << 1, -1, 1, -1;  // |x|^2 / n = 1
  data.y.resize(4);
  data.y << 2.0, -1.5, 1.0, 0.3;
  const double ls = data.x.col(0).dot(data.y) / 4.0;
  for (double lambda : {0.0, 0.2, 0.5, ls, 2.0}) {
    const auto fit = lasso_baseline(data, lambda);
    const double expected = std::copysign(std::max(std::abs(ls) - lambda, 0.0), ls);
    CHECK(fit.beta_hat(0) == Approx(expected).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("one gross outlier ruins the baselines but not the MOM fit") {
  auto data = generate(testing::headline_spec(54, 400, 0));
  data.y(17) = 1e6;
  const double lt = 1.0 + std::log(200.0 / 4.0);
  const auto base = sqrt_lasso_baseline(data, std::sqrt(lt / 400.0));
  const auto mom = fit_fixed_s(data, 4, 1.0, TuningSchedule{}, SolverConfig{}, 1);
  const auto& b = data.truth->beta_star;
  const double err_base = (base.beta_hat - b).norm();
  const double err_mom = (mom.beta_hat - b).norm();
  CAPTURE(err_base);
  CAPTURE(err_mom);
  CHECK(err_base >= 10.0 * err_mom);
}
