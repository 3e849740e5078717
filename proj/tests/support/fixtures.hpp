#pragma once

#include <cstdint>

#include "momlasso/datagen.hpp"
#include "momlasso/dataset.hpp"

namespace momlasso::testing {

inline GenSpec headline_spec(std::uint64_t seed, Index n = 400, Index outliers = 20) {
  GenSpec spec;
  spec.n = n;
  spec.d = 200;
  spec.s = 4;
  spec.sigma_star = 0.5;
  spec.seed = seed;
  if (outliers > 0) spec.contamination = {ContaminationKind::response, outliers, 1e4};
  return spec;
}

/// Small Gaussian regression problem, optionally noiseless.
inline Dataset small_problem(std::uint64_t seed, Index n = 200, Index d = 20, Index s = 3, double sigma = 0.5) {
  GenSpec spec;
  spec.n = n;
  spec.d = d;
  spec.s = s;
  spec.sigma_star = sigma;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace momlasso::testing
