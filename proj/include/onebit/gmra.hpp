#pragma once

// Geometric multi-resolution analysis of a sampled manifold: a tree of cells
// refined by dyadic 2-means splitting, each cell carrying a center and an
// orthonormal basis for a d-dimensional affine approximation.

#include "onebit/common.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

namespace onebit {

inline constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();

struct GmraLevel {
  int j = 0;
  PointMatrix centers;                 // K_j x N
  std::vector<Matrix> bases;           // K_j bases, each N x d, orthonormal columns
  std::vector<std::uint32_t> parents;  // K_j indices into level j-1 (kNoParent at the root level)

  Index size() const { return centers.rows(); }
  bool operator==(const GmraLevel&) const;
};

struct GmraBuildParams {
  std::uint64_t seed = 0;
  std::uint32_t min_cell_points = 0;  // cells below this stop splitting (d + 1)
  bool operator==(const GmraBuildParams&) const = default;
};

struct NearestCenter {
  Index k = 0;
  double dist = 0.0;
};

class Gmra {
 public:
  Gmra() = default;
  Gmra(Index ambient_dim, Index intrinsic_dim, std::vector<GmraLevel> levels,
       GmraBuildParams params);

  Index ambient_dim() const { return ambient_dim_; }
  Index intrinsic_dim() const { return intrinsic_dim_; }
  int j_min() const { return levels_.empty() ? 0 : levels_.front().j; }
  int j_max() const { return levels_.empty() ? -1 : levels_.back().j; }
  bool has_level(int j) const { return j >= j_min() && j <= j_max() && !levels_.empty(); }
  const GmraLevel& level(int j) const;
  const std::vector<GmraLevel>& levels() const { return levels_; }
  const GmraBuildParams& build_params() const { return params_; }

  /// Exhaustive scan; ties go to the smallest index.
  NearestCenter nearest_center(int j, const Vector& z) const;

  /// P_{j,k} z = c + B Bᵀ (z - c).
  Vector project(int j, Index k, const Vector& z) const;

  bool operator==(const Gmra&) const;

 private:
  Index ambient_dim_ = 0;
  Index intrinsic_dim_ = 0;
  std::vector<GmraLevel> levels_;
  GmraBuildParams params_;
};

/// Thrown when the data cannot support refinement down to the requested level.
class GmraDepthError : public Error {
 public:
  GmraDepthError(const std::string& what, int deepest_level)
      : Error(what), deepest_level_(deepest_level) {}
  int deepest_level() const { return deepest_level_; }

 private:
  int deepest_level_;
};

/// Builds levels 0..j_max. Points must lie in the closed unit ball.
Gmra build_gmra(const PointMatrix& points, int d, int j_max, std::uint64_t seed);

/// Scales the cloud so its largest norm is 1 - margin (no-op for an all-zero cloud).
PointMatrix rescale_to_ball(const PointMatrix& points, double margin);

/// Branch-and-bound nearest-center search that descends the parent tree.
/// Answers are identical to Gmra::nearest_center, tie-break included.
class NearestCenterTree {
 public:
  explicit NearestCenterTree(const Gmra& gmra);
  NearestCenter query(int j, const Vector& z) const;

 private:
  const Gmra* gmra_;
  std::vector<std::vector<std::vector<std::uint32_t>>> children_;  // [level][k] -> children at level+1
  std::vector<std::vector<double>> reach_;  // [level][k] bound on distance to any descendant center
};

struct ApproximationStats {
  std::vector<double> errors;  // ‖z - P_{j,k_j(z)} z‖ per test point
  double mean = 0.0;
  double max = 0.0;
};

ApproximationStats approximation_error(const Gmra& gmra, int j, const PointMatrix& test_points);

struct LevelValidation {
  int j = 0;
  Index count = 0;
  double separation_ratio = 0.0;   // min pairwise center distance * 2^j, +inf for a single center
  double count_ratio = 0.0;        // K_j / 2^{dj}
  double parent_ratio = 0.0;       // max_k ‖c - c_parent‖ / min_{k' != parent} ‖c - c_{j-1,k'}‖
  double tube_constant = 0.0;      // max_k dist(c_{j,k}, test cloud) * 2^{j+2}
  double tube_fraction = 0.0;      // share of centers within separation_ratio * 2^{-j-2} of the cloud
  double mean_error = 0.0;
  double max_error = 0.0;
  bool count_violation = false;       // K_j > K_{j+1}
  bool separation_violation = false;  // coincident centers
  bool parent_violation = false;      // parent_ratio > 1
  std::vector<double> errors;         // per test point
};

struct GmraValidationReport {
  std::vector<LevelValidation> levels;
  int first_reliable_level = -1;  // first j whose tube_fraction >= 0.99, -1 if none
  bool any_violation() const;
};

GmraValidationReport validate_gmra(const Gmra& gmra, const PointMatrix& test_points);

void save_gmra(const Gmra& gmra, const std::filesystem::path& path);
Gmra load_gmra(const std::filesystem::path& path);

}  // namespace onebit
