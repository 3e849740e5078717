#include "momlasso/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "momlasso/random.hpp"

namespace momlasso {

namespace {

constexpr std::uint64_t kRowStream = 0x524f57;     // "ROW"
constexpr std::uint64_t kBetaStream = 0x42455441;  // "BETA"
constexpr std::uint64_t kContaminationStream = 0x434f4e54;  // "CONT"

double design_nu(const GenSpec& spec) {
  if (spec.design_nu > 0) return spec.design_nu;
  return std::max(5.0, std::log(static_cast<double>(spec.d)));
}

}  // namespace

void GenSpec::validate() const {
  if (n < 1 || d < 1) throw InvalidInput("n and d must be positive");
  if (s < 0 || s > d) throw InvalidInput("sparsity must satisfy 0 <= s <= d");
  if (!(sigma_star >= 0) || !std::isfinite(sigma_star)) throw InvalidInput("sigma_star must be nonnegative");
  if (!std::isfinite(beta_magnitude)) throw InvalidInput("beta magnitude must be finite");
  if (design == DesignKind::student_t && design_nu != 0 && !(design_nu > 2))
    throw InvalidInput("student-t design needs nu > 2");
  if (noise == NoiseKind::student_t && !(noise_nu > 4)) throw InvalidInput("student-t noise needs nu > 4");
  if (contamination.m < 0 || contamination.m > n) throw InvalidInput("contamination count must satisfy 0 <= m <= n");
  if (!std::isfinite(contamination.magnitude)) throw InvalidInput("contamination magnitude must be finite");
}

Dataset generate(const GenSpec& spec) {
  spec.validate();
  Dataset data;
  GroundTruth truth;
  truth.sigma_star = spec.sigma_star;
  truth.beta_star = Eigen::VectorXd::Zero(spec.d);
  if (spec.beta_pattern == BetaPattern::prefix) {
    truth.beta_star.head(spec.s).setConstant(spec.beta_magnitude);
  } else {
    SplitMix64 g(derive_seed(spec.seed, kBetaStream));
    std::vector<Index> cols(static_cast<std::size_t>(spec.d));
    std::iota(cols.begin(), cols.end(), Index{0});
    shuffle(std::span<Index>(cols), g);
    for (Index j = 0; j < spec.s; ++j) truth.beta_star(cols[static_cast<std::size_t>(j)]) = rademacher(g) * spec.beta_magnitude;
  }

  const double dnu = design_nu(spec);
  const double design_scale = spec.design == DesignKind::student_t ? std::sqrt((dnu - 2.0) / dnu) : 1.0;
  const double noise_scale = spec.noise == NoiseKind::student_t
                                 ? spec.sigma_star * std::sqrt((spec.noise_nu - 2.0) / spec.noise_nu)
                                 : spec.sigma_star;

  // Row-major fill keeps each row's stream contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(spec.n, spec.d);
  Eigen::VectorXd noise(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    SplitMix64 g(derive_seed(spec.seed, kRowStream, static_cast<std::uint64_t>(i)));
    for (Index j = 0; j < spec.d; ++j) {
      switch (spec.design) {
        case DesignKind::gaussian: x(i, j) = standard_normal(g); break;
        case DesignKind::student_t: x(i, j) = design_scale * student_t(g, dnu); break;
        case DesignKind::rademacher: x(i, j) = rademacher(g); break;
      }
    }
    noise(i) = noise_scale * (spec.noise == NoiseKind::gaussian ? standard_normal(g) : student_t(g, spec.noise_nu));
  }
  data.x = x;
  data.y = data.x * truth.beta_star + noise;
  data.truth = std::move(truth);
  if (spec.contamination.kind == ContaminationKind::none || spec.contamination.m == 0) return data;
  return contaminate(data, spec.contamination, derive_seed(spec.seed, kContaminationStream));
}

Dataset contaminate(const Dataset& data, const Contamination& model, std::uint64_t seed) {
  data.validate();
  if (model.m < 0 || model.m > data.n()) throw InvalidInput("contamination count must satisfy 0 <= m <= n");
  if (!std::isfinite(model.magnitude)) throw InvalidInput("contamination magnitude must be finite");
  Dataset out = data;
  if (model.kind == ContaminationKind::none || model.m == 0) return out;

  SplitMix64 g(seed);
  std::vector<Index> rows(static_cast<std::size_t>(data.n()));
  std::iota(rows.begin(), rows.end(), Index{0});
  shuffle(std::span<Index>(rows), g);
  rows.resize(static_cast<std::size_t>(model.m));
  std::sort(rows.begin(), rows.end());

  for (const Index i : rows) {
    switch (model.kind) {
      case ContaminationKind::response: out.y(i) = rademacher(g) * model.magnitude; break;
      case ContaminationKind::leverage: out.x.row(i) *= model.magnitude; break;
      case ContaminationKind::flip: out.y(i) = -model.magnitude * out.y(i); break;
      case ContaminationKind::none: break;
    }
  }
  if (out.truth) {
    std::vector<Index> merged;
    std::set_union(out.truth->outlier_indices.begin(), out.truth->outlier_indices.end(), rows.begin(), rows.end(),
                   std::back_inserter(merged));
    out.truth->outlier_indices = std::move(merged);
  }
  return out;
}

std::vector<Index> differing_rows(const Dataset& data, const Dataset& other) {
  if (data.n() != other.n() || data.d() != other.d()) throw InvalidInput("datasets have different shapes");
  std::vector<Index> rows;
  for (Index i = 0; i < data.n(); ++i) {
    if (data.y(i) != other.y(i) || data.x.row(i) != other.x.row(i)) rows.push_back(i);
  }
  return rows;
}

}  // namespace momlasso
