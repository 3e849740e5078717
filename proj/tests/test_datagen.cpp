#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "momlasso/datagen.hpp"
#include "momlasso/random.hpp"

using namespace momlasso;

namespace {

GenSpec base_spec(std::uint64_t seed) {
  GenSpec spec;
  spec.n = 300;
  spec.d = 12;
  spec.s = 3;
  spec.sigma_star = 0.5;
  spec.seed = seed;
  return spec;
}

bool identical(const Dataset& a, const Dataset& b) {
  return a.x.rows() == b.x.rows() && a.x.cols() == b.x.cols() && (a.x.array() == b.x.array()).all() &&
         (a.y.array() == b.y.array()).all();
}

}  // namespace

TEST_CASE("generate without contamination has no outliers and y = X beta* + noise") {
  auto spec = base_spec(1);
  spec.sigma_star = 0.0;
  const auto data = generate(spec);
  REQUIRE(data.truth);
  CHECK(data.truth->outlier_indices.empty());
  CHECK((data.y - data.x * data.truth->beta_star).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(data.truth->beta_star.head(3) == Eigen::Vector3d::Ones());
  CHECK(data.truth->beta_star.tail(9).isZero(0));
}

TEST_CASE("response contamination replaces exactly m responses by +-magnitude") {
  auto spec = base_spec(2);
  spec.contamination = {ContaminationKind::response, 3, 1e6};
  const auto data = generate(spec);
  auto clean_spec = spec;
  clean_spec.contamination = {};
  const auto clean = generate(clean_spec);
  REQUIRE(data.truth->outlier_indices.size() == 3);
  for (Index i : data.truth->outlier_indices) CHECK(std::abs(data.y(i)) == 1e6);
  CHECK(differing_rows(data, clean) == data.truth->outlier_indices);
}

TEST_CASE("contaminate: m = 0, m = n, and repeated application") {
  const auto data = generate(base_spec(3));
  CHECK(identical(contaminate(data, {ContaminationKind::response, 0, 5.0}, 1), data));
  CHECK(identical(contaminate(data, {ContaminationKind::none, 10, 5.0}, 1), data));

  const auto all = contaminate(data, {ContaminationKind::response, data.n(), 1e3}, 2);
  CHECK(static_cast<Index>(all.truth->outlier_indices.size()) == data.n());
  CHECK(static_cast<Index>(differing_rows(all, data).size()) == data.n());

  const auto once = contaminate(data, {ContaminationKind::flip, 20, 3.0}, 4);
  const auto twice = contaminate(once, {ContaminationKind::leverage, 15, 7.0}, 5);
  CHECK(twice.truth->outlier_indices.size() <= 35);
  CHECK(twice.truth->outlier_indices.size() >= 20);
  CHECK(std::is_sorted(twice.truth->outlier_indices.begin(), twice.truth->outlier_indices.end()));
  CHECK_THROWS_AS(contaminate(data, {ContaminationKind::response, data.n() + 1, 1.0}, 1), InvalidInput);
}

TEST_CASE("leverage and flip act as documented") {
  const auto data = generate(base_spec(4));
  const auto lev = contaminate(data, {ContaminationKind::leverage, 5, 10.0}, 6);
  for (Index i : lev.truth->outlier_indices) {
    CHECK(lev.x.row(i) == (10.0 * data.x.row(i)).eval());
    CHECK(lev.y(i) == data.y(i));
  }
  const auto flip = contaminate(data, {ContaminationKind::flip, 5, 2.0}, 6);
  for (Index i : flip.truth->outlier_indices) CHECK(flip.y(i) == -2.0 * data.y(i));
}

TEST_CASE("the outlier set size equals the number of differing rows") {
  SplitMix64 g(7);
  for (int t = 0; t < 40; ++t) {
    auto spec = base_spec(g());
    const auto clean = generate(spec);
    const ContaminationKind kinds[] = {ContaminationKind::response, ContaminationKind::leverage,
                                       ContaminationKind::flip};
    spec.contamination = {kinds[t % 3], static_cast<Index>(uniform_below(g, 60)), 1.0 + 100.0 * uniform01(g)};
    const auto dirty = generate(spec);
    CHECK(differing_rows(dirty, clean) == dirty.truth->outlier_indices);
  }
}

TEST_CASE("gaussian design is isotropic") {
  GenSpec spec;
  spec.n = 20000;
  spec.d = 50;
  spec.s = 1;
  spec.seed = 8;
  const auto data = generate(spec);
  const Eigen::MatrixXd cov = data.x.transpose() * data.x / static_cast<double>(spec.n);
  const double dist = (cov - Eigen::MatrixXd::Identity(spec.d, spec.d)).norm();
  // Expected Frobenius distance is about sqrt(d^2 / n) = 0.35.
  CHECK(dist <= 1.5 * std::sqrt(50.0 * 50.0 / 20000.0));
}

TEST_CASE("every design has unit column variance") {
  for (auto design : {DesignKind::gaussian, DesignKind::student_t, DesignKind::rademacher}) {
    GenSpec spec;
    spec.n = 20000;
    spec.d = 5;
    spec.s = 1;
    spec.design = design;
    spec.seed = 9;
    const auto data = generate(spec);
    for (Index j = 0; j < spec.d; ++j) {
      const double var = data.x.col(j).squaredNorm() / static_cast<double>(spec.n);
      CHECK(var == doctest::Approx(1.0).epsilon(0.1));
    }
  }
}

TEST_CASE("gaussian noise has kurtosis near 3 and the requested scale") {
  GenSpec spec;
  spec.n = 100000;
  spec.d = 2;
  spec.s = 1;
  spec.sigma_star = 0.7;
  spec.seed = 10;
  const auto data = generate(spec);
  const Eigen::VectorXd r = data.y - data.x * data.truth->beta_star;
  const double mean = r.mean();
  const double m2 = (r.array() - mean).square().mean();
  const double m4 = (r.array() - mean).pow(4).mean();
  CHECK(m4 / (m2 * m2) >= 2.9);
  CHECK(m4 / (m2 * m2) <= 3.1);
  CHECK(std::sqrt(m2) == doctest::Approx(0.7).epsilon(0.02));
}

TEST_CASE("student-t noise is scaled to sigma*") {
  GenSpec spec;
  spec.n = 100000;
  spec.d = 2;
  spec.s = 1;
  spec.noise = NoiseKind::student_t;
  spec.noise_nu = 8;
  spec.sigma_star = 2.0;
  spec.seed = 11;
  const auto data = generate(spec);
  const Eigen::VectorXd r = data.y - data.x * data.truth->beta_star;
  CHECK(std::sqrt(r.squaredNorm() / static_cast<double>(spec.n)) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("generate is a pure function of the spec") {
  auto spec = base_spec(12);
  spec.beta_pattern = BetaPattern::random_support;
  spec.contamination = {ContaminationKind::response, 7, 50.0};
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(identical(a, b));
  CHECK(a.truth->outlier_indices == b.truth->outlier_indices);
  CHECK(a.truth->beta_star == b.truth->beta_star);
  spec.seed = 13;
  CHECK_FALSE(identical(generate(spec), a));
}

TEST_CASE("rows do not depend on n") {
  auto small = base_spec(14);
  auto big = small;
  big.n = 2 * small.n;
  const auto a = generate(small);
  const auto b = generate(big);
  CHECK(a.x == b.x.topRows(small.n));
  CHECK(a.y == b.y.head(small.n));
}

TEST_CASE("random support has s entries of the requested magnitude") {
  auto spec = base_spec(15);
  spec.beta_pattern = BetaPattern::random_support;
  spec.beta_magnitude = 2.5;
  const auto data = generate(spec);
  Index nnz = 0;
  for (Index j = 0; j < spec.d; ++j) {
    if (data.truth->beta_star(j) != 0.0) {
      ++nnz;
      CHECK(std::abs(data.truth->beta_star(j)) == 2.5);
    }
  }
  CHECK(nnz == spec.s);
}

TEST_CASE("GenSpec validation") {
  auto spec = base_spec(16);
  spec.s = spec.d + 1;
  CHECK_THROWS_AS(generate(spec), InvalidInput);
  spec = base_spec(16);
  spec.noise = NoiseKind::student_t;
  spec.noise_nu = 4;
  CHECK_THROWS_AS(generate(spec), InvalidInput);
  spec = base_spec(16);
  spec.contamination = {ContaminationKind::response, spec.n + 1, 1.0};
  CHECK_THROWS_AS(generate(spec), InvalidInput);
  spec = base_spec(16);
  spec.sigma_star = -1;
  CHECK_THROWS_AS(generate(spec), InvalidInput);
}
