#include "onebit/gmra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace onebit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double min_pairwise_distance(const PointMatrix& centers) {
  double best = kInf;
  for (Index a = 0; a < centers.rows(); ++a)
    for (Index b = a + 1; b < centers.rows(); ++b)
      best = std::min(best, (centers.row(a) - centers.row(b)).squaredNorm());
  return std::sqrt(best);
}

double distance_to_cloud(const Vector& c, const PointMatrix& cloud) {
  if (cloud.rows() == 0) return kInf;
  return std::sqrt((cloud.rowwise() - c.transpose()).rowwise().squaredNorm().minCoeff());
}

// Parent-proximity ratio for one child: ‖c - c_parent‖ over the distance to the nearest
// non-parent center one level up. Zero when the parent is the only candidate.
double parent_ratio(const Vector& c, const PointMatrix& up, std::uint32_t parent) {
  double other = kInf;
  for (Index k = 0; k < up.rows(); ++k)
    if (k != static_cast<Index>(parent)) other = std::min(other, (up.row(k).transpose() - c).norm());
  const double own = (up.row(parent).transpose() - c).norm();
  if (other == kInf) return 0.0;
  if (other == 0.0) return own == 0.0 ? 0.0 : kInf;
  return own / other;
}

}  // namespace

bool GmraValidationReport::any_violation() const {
  return std::any_of(levels.begin(), levels.end(), [](const LevelValidation& l) {
    return l.count_violation || l.separation_violation || l.parent_violation;
  });
}

GmraValidationReport validate_gmra(const Gmra& gmra, const PointMatrix& test_points) {
  require_dims(test_points.rows() == 0 || test_points.cols() == gmra.ambient_dim(),
               "validate_gmra: dimension mismatch");
  GmraValidationReport report;
  const auto& levels = gmra.levels();
  const double d = static_cast<double>(gmra.intrinsic_dim());

  for (std::size_t l = 0; l < levels.size(); ++l) {
    const GmraLevel& lv = levels[l];
    LevelValidation v;
    v.j = lv.j;
    v.count = lv.size();
    const double scale = std::ldexp(1.0, lv.j);

    v.separation_ratio = lv.size() <= 1 ? kInf : min_pairwise_distance(lv.centers) * scale;
    v.separation_violation = v.separation_ratio == 0.0;
    v.count_ratio = static_cast<double>(lv.size()) / std::pow(2.0, d * lv.j);
    if (l + 1 < levels.size()) v.count_violation = lv.size() > levels[l + 1].size();

    if (l > 0) {
      for (Index k = 0; k < lv.size(); ++k)
        v.parent_ratio = std::max(
            v.parent_ratio, parent_ratio(lv.centers.row(k).transpose(), levels[l - 1].centers,
                                         lv.parents[static_cast<std::size_t>(k)]));
      v.parent_violation = v.parent_ratio > 1.0;
    }

    if (test_points.rows() > 0) {
      Index inside = 0;
      const double radius = v.separation_ratio == kInf ? kInf : v.separation_ratio / (4.0 * scale);
      for (Index k = 0; k < lv.size(); ++k) {
        const double dist = distance_to_cloud(lv.centers.row(k).transpose(), test_points);
        v.tube_constant = std::max(v.tube_constant, dist * 4.0 * scale);
        if (dist <= radius) ++inside;
      }
      v.tube_fraction = lv.size() == 0 ? 1.0 : static_cast<double>(inside) / lv.size();

      ApproximationStats stats = approximation_error(gmra, lv.j, test_points);
      v.mean_error = stats.mean;
      v.max_error = stats.max;
      v.errors = std::move(stats.errors);
    }
    if (report.first_reliable_level < 0 && test_points.rows() > 0 && v.tube_fraction >= 0.99)
      report.first_reliable_level = lv.j;
    report.levels.push_back(std::move(v));
  }
  return report;
}

}  // namespace onebit
