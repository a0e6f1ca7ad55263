#pragma once

// Monte Carlo estimate of the Gaussian width w(S) = E sup_{x∈S} ⟨g, x⟩.

#include "onebit/common.hpp"

#include <cstdint>
#include <functional>

namespace onebit {

struct WidthEstimate {
  double width = 0.0;
  double std_error = 0.0;
  double radius = 0.0;  // rad(S) = max ‖x‖₂
  Index draws = 0;
};

/// S given as a finite point set, one point per row.
WidthEstimate estimate_gaussian_width(const PointMatrix& points, Index n_draws, std::uint64_t seed);

/// S given by its support function h(g) = sup_{x∈S} ⟨g, x⟩ on ℝ^dim.
WidthEstimate estimate_gaussian_width(const std::function<double(const Vector&)>& support, Index dim,
                                      double radius, Index n_draws, std::uint64_t seed);

}  // namespace onebit
