#include "onebit/width.hpp"

#include "onebit/rng.hpp"

#include <cmath>

namespace onebit {

namespace {

WidthEstimate summarize(const Vector& sups, double radius) {
  WidthEstimate w;
  w.draws = sups.size();
  w.radius = radius;
  w.width = sups.mean();
  if (sups.size() > 1) {
    const double var = (sups.array() - w.width).square().sum() / static_cast<double>(sups.size() - 1);
    w.std_error = std::sqrt(var / static_cast<double>(sups.size()));
  }
  return w;
}

}  // namespace

WidthEstimate estimate_gaussian_width(const PointMatrix& points, Index n_draws, std::uint64_t seed) {
  if (points.rows() == 0) throw InvalidArgument("estimate_gaussian_width: empty point set");
  if (n_draws < 1) throw InvalidArgument("estimate_gaussian_width: need at least one draw");
  Rng rng(seed);
  const Matrix g = gaussian_matrix(rng, n_draws, points.cols());
  Vector sups(n_draws);
  // Bound the n_draws x n product to a few million entries at a time.
  const Index chunk = std::max<Index>(1, (Index{1} << 22) / std::max<Index>(1, points.rows()));
  for (Index start = 0; start < n_draws; start += chunk) {
    const Index len = std::min(chunk, n_draws - start);
    const Matrix dots = g.middleRows(start, len) * points.transpose();
    sups.segment(start, len) = dots.rowwise().maxCoeff();
  }
  return summarize(sups, points.rowwise().norm().maxCoeff());
}

WidthEstimate estimate_gaussian_width(const std::function<double(const Vector&)>& support, Index dim,
                                      double radius, Index n_draws, std::uint64_t seed) {
  if (dim < 1 || n_draws < 1) throw InvalidArgument("estimate_gaussian_width: dim and draws must be positive");
  Rng rng(seed);
  const Matrix g = gaussian_matrix(rng, n_draws, dim);
  Vector sups(n_draws);
  for (Index i = 0; i < n_draws; ++i) sups(i) = support(g.row(i).transpose());
  return summarize(sups, radius);
}

}  // namespace onebit
