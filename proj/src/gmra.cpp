#include "onebit/gmra.hpp"

#include "onebit/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <utility>

namespace onebit {

namespace {

constexpr Index kExactFarthestPairLimit = 4096;
constexpr int kTwoMeansIterations = 50;

struct Cell {
  std::vector<Index> members;
  Vector center;
  Matrix basis;
  std::uint32_t parent = kNoParent;
};

Vector cell_mean(const PointMatrix& points, const std::vector<Index>& members) {
  Vector mean = Vector::Zero(points.cols());
  for (Index i : members) mean += points.row(i).transpose();
  return mean / static_cast<double>(members.size());
}

// Top-d principal directions of the centered cell, largest first.
Matrix principal_basis(const PointMatrix& points, const std::vector<Index>& members,
                       const Vector& center, Index d) {
  const Index n_dim = points.cols();
  Matrix scatter = Matrix::Zero(n_dim, n_dim);
  for (Index i : members) {
    const Vector diff = points.row(i).transpose() - center;
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(diff);
  }
  scatter = scatter.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter);
  Matrix basis(n_dim, d);
  for (Index c = 0; c < d; ++c) basis.col(c) = eig.eigenvectors().col(n_dim - 1 - c);
  return basis;
}

double sq_dist(const PointMatrix& points, Index a, Index b) {
  return (points.row(a) - points.row(b)).squaredNorm();
}

Index farthest_from(const PointMatrix& points, const std::vector<Index>& members, Index from,
                    double* best_out) {
  Index best = members.front();
  double best_d = -1.0;
  for (Index i : members) {
    const double d = sq_dist(points, i, from);
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  *best_out = best_d;
  return best;
}

std::pair<Index, Index> farthest_pair(const PointMatrix& points, const std::vector<Index>& members,
                                      Rng& rng) {
  const auto n = static_cast<Index>(members.size());
  if (n <= kExactFarthestPairLimit) {
    Index ba = members[0], bb = members[0];
    double best = -1.0;
    for (Index x = 0; x < n; ++x)
      for (Index y = x + 1; y < n; ++y) {
        const double d = sq_dist(points, members[x], members[y]);
        if (d > best) {
          best = d;
          ba = members[x];
          bb = members[y];
        }
      }
    return {ba, bb};
  }
  // Iterated double sweep from a seeded start point.
  std::uniform_int_distribution<Index> pick(0, n - 1);
  Index a = members[pick(rng)];
  double d_ab = 0.0;
  Index b = farthest_from(points, members, a, &d_ab);
  for (int sweep = 0; sweep < 16; ++sweep) {
    double d_next = 0.0;
    const Index c = farthest_from(points, members, b, &d_next);
    if (d_next <= d_ab) break;
    a = b;
    b = c;
    d_ab = d_next;
  }
  return {a, b};
}

// 2-means seeded at the farthest pair. Returns nullopt when the cell cannot
// be divided into two non-empty parts.
std::optional<std::pair<std::vector<Index>, std::vector<Index>>> split_cell(
    const PointMatrix& points, const std::vector<Index>& members, Rng& rng) {
  if (members.size() < 2) return std::nullopt;
  const auto [ia, ib] = farthest_pair(points, members, rng);
  if (sq_dist(points, ia, ib) == 0.0) return std::nullopt;

  Vector ca = points.row(ia).transpose();
  Vector cb = points.row(ib).transpose();
  std::vector<char> side(members.size(), 0), prev;
  for (int it = 0; it < kTwoMeansIterations; ++it) {
    for (std::size_t s = 0; s < members.size(); ++s) {
      const auto row = points.row(members[s]).transpose();
      side[s] = (row - cb).squaredNorm() < (row - ca).squaredNorm() ? 1 : 0;
    }
    if (side == prev) break;
    prev = side;
    Vector sa = Vector::Zero(points.cols()), sb = Vector::Zero(points.cols());
    std::size_t na = 0, nb = 0;
    for (std::size_t s = 0; s < members.size(); ++s) {
      if (side[s]) {
        sb += points.row(members[s]).transpose();
        ++nb;
      } else {
        sa += points.row(members[s]).transpose();
        ++na;
      }
    }
    if (na == 0 || nb == 0) return std::nullopt;
    ca = sa / static_cast<double>(na);
    cb = sb / static_cast<double>(nb);
  }
  std::vector<Index> a, b;
  for (std::size_t s = 0; s < members.size(); ++s) (side[s] ? b : a).push_back(members[s]);
  if (a.empty() || b.empty()) return std::nullopt;
  return std::make_pair(std::move(a), std::move(b));
}

void fit_cell(const PointMatrix& points, Cell& cell, Index d, const Matrix* parent_basis) {
  cell.center = cell_mean(points, cell.members);
  if (static_cast<Index>(cell.members.size()) >= d + 1 || parent_basis == nullptr)
    cell.basis = principal_basis(points, cell.members, cell.center, d);
  else
    cell.basis = *parent_basis;
}

GmraLevel make_level(int j, const std::vector<Cell>& cells, Index n_dim) {
  GmraLevel level;
  level.j = j;
  level.centers.resize(static_cast<Index>(cells.size()), n_dim);
  level.bases.reserve(cells.size());
  level.parents.reserve(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    level.centers.row(static_cast<Index>(k)) = cells[k].center.transpose();
    level.bases.push_back(cells[k].basis);
    level.parents.push_back(cells[k].parent);
  }
  return level;
}

}  // namespace

bool GmraLevel::operator==(const GmraLevel& other) const {
  if (j != other.j || parents != other.parents || bases.size() != other.bases.size()) return false;
  if (centers.rows() != other.centers.rows() || centers.cols() != other.centers.cols()) return false;
  if (centers != other.centers) return false;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (bases[k].rows() != other.bases[k].rows() || bases[k].cols() != other.bases[k].cols())
      return false;
    if (bases[k] != other.bases[k]) return false;
  }
  return true;
}

Gmra::Gmra(Index ambient_dim, Index intrinsic_dim, std::vector<GmraLevel> levels,
           GmraBuildParams params)
    : ambient_dim_(ambient_dim),
      intrinsic_dim_(intrinsic_dim),
      levels_(std::move(levels)),
      params_(params) {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const GmraLevel& lv = levels_[i];
    require_dims(lv.centers.cols() == ambient_dim_, "gmra: center dimension mismatch");
    require_dims(lv.bases.size() == static_cast<std::size_t>(lv.size()) &&
                     lv.parents.size() == static_cast<std::size_t>(lv.size()),
                 "gmra: level arrays disagree in length");
    for (const Matrix& b : lv.bases)
      require_dims(b.rows() == ambient_dim_ && b.cols() == intrinsic_dim_,
                   "gmra: basis shape mismatch");
    if (i > 0) {
      if (lv.j != levels_[i - 1].j + 1) throw FormatError("gmra: levels are not consecutive");
      for (std::uint32_t p : lv.parents)
        if (p >= static_cast<std::uint32_t>(levels_[i - 1].size()))
          throw FormatError("gmra: parent index out of range");
    }
  }
}

const GmraLevel& Gmra::level(int j) const {
  if (!has_level(j)) throw InvalidArgument("gmra: level " + std::to_string(j) + " not stored");
  return levels_[static_cast<std::size_t>(j - j_min())];
}

NearestCenter Gmra::nearest_center(int j, const Vector& z) const {
  const GmraLevel& lv = level(j);
  require_dims(z.size() == ambient_dim_, "nearest_center: point dimension mismatch");
  Index best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < lv.size(); ++k) {
    const double sq = (lv.centers.row(k).transpose() - z).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best = k;
    }
  }
  return {best, std::sqrt(best_sq)};
}

Vector Gmra::project(int j, Index k, const Vector& z) const {
  const GmraLevel& lv = level(j);
  if (k < 0 || k >= lv.size()) throw InvalidArgument("project: center index out of range");
  require_dims(z.size() == ambient_dim_, "project: point dimension mismatch");
  const Vector c = lv.centers.row(k).transpose();
  const Matrix& b = lv.bases[static_cast<std::size_t>(k)];
  return c + b * (b.transpose() * (z - c));
}

bool Gmra::operator==(const Gmra& other) const {
  return ambient_dim_ == other.ambient_dim_ && intrinsic_dim_ == other.intrinsic_dim_ &&
         params_ == other.params_ && levels_ == other.levels_;
}

PointMatrix rescale_to_ball(const PointMatrix& points, double margin) {
  if (!(margin >= 0.0 && margin < 1.0)) throw InvalidArgument("rescale_to_ball: margin not in [0,1)");
  const double r = points.rows() == 0 ? 0.0 : points.rowwise().norm().maxCoeff();
  if (r == 0.0) return points;
  return points * ((1.0 - margin) / r);
}

Gmra build_gmra(const PointMatrix& points, int d, int j_max, std::uint64_t seed) {
  const Index n = points.rows();
  const Index n_dim = points.cols();
  if (d < 1 || d >= n_dim)
    throw DimensionError("build_gmra: need 1 <= d < N (d=" + std::to_string(d) +
                         ", N=" + std::to_string(n_dim) + ")");
  if (j_max < 0 || j_max > 30) throw InvalidArgument("build_gmra: j_max must lie in [0, 30]");
  const Index min_points = j_max == 0 ? d + 1 : Index{4} << d;
  if (n < min_points)
    throw GmraDepthError("build_gmra: " + std::to_string(n) + " points, need at least " +
                             std::to_string(min_points),
                         -1);
  if (!points.allFinite()) throw InvalidArgument("build_gmra: non-finite coordinates");
  if (points.rowwise().norm().maxCoeff() > 1.0 + 1e-12)
    throw InvalidArgument("build_gmra: points must lie in the unit ball");

  Rng rng(derive_seed(seed, {0x676d7261}));
  const auto min_cell = static_cast<std::uint32_t>(d + 1);

  std::vector<Cell> cells(1);
  cells[0].members.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) cells[0].members[static_cast<std::size_t>(i)] = i;
  fit_cell(points, cells[0], d, nullptr);

  std::vector<GmraLevel> levels;
  for (int j = 0;; ++j) {
    levels.push_back(make_level(j, cells, n_dim));
    if (j == j_max) break;

    std::vector<Cell> next;
    next.reserve(cells.size() * 2);
    bool refined = false;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      Cell& cell = cells[k];
      std::optional<std::pair<std::vector<Index>, std::vector<Index>>> halves;
      if (cell.members.size() >= min_cell) halves = split_cell(points, cell.members, rng);
      if (!halves) {
        Cell copy = cell;
        copy.parent = static_cast<std::uint32_t>(k);
        next.push_back(std::move(copy));
        continue;
      }
      refined = true;
      for (auto* part : {&halves->first, &halves->second}) {
        Cell child;
        child.members = std::move(*part);
        child.parent = static_cast<std::uint32_t>(k);
        fit_cell(points, child, d, &cell.basis);
        next.push_back(std::move(child));
      }
    }
    if (!refined)
      throw GmraDepthError("build_gmra: refinement stalls after level " + std::to_string(j) +
                               " (requested j_max=" + std::to_string(j_max) + ")",
                           j);
    cells = std::move(next);
  }
  return Gmra(n_dim, d, std::move(levels), GmraBuildParams{seed, min_cell});
}

NearestCenterTree::NearestCenterTree(const Gmra& gmra) : gmra_(&gmra) {
  const auto& levels = gmra.levels();
  children_.resize(levels.size());
  reach_.resize(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    children_[l].resize(static_cast<std::size_t>(levels[l].size()));
    reach_[l].assign(static_cast<std::size_t>(levels[l].size()), 0.0);
  }
  for (std::size_t l = 1; l < levels.size(); ++l)
    for (std::size_t k = 0; k < levels[l].parents.size(); ++k)
      children_[l - 1][levels[l].parents[k]].push_back(static_cast<std::uint32_t>(k));
  for (std::size_t l = levels.size(); l-- > 1;) {
    for (std::size_t k = 0; k < children_[l - 1].size(); ++k) {
      double r = 0.0;
      for (std::uint32_t c : children_[l - 1][k]) {
        const double step =
            (levels[l - 1].centers.row(static_cast<Index>(k)) - levels[l].centers.row(c)).norm();
        r = std::max(r, step + reach_[l][c]);
      }
      reach_[l - 1][k] = r;
    }
  }
}

NearestCenter NearestCenterTree::query(int j, const Vector& z) const {
  const Gmra& g = *gmra_;
  const GmraLevel& target = g.level(j);
  require_dims(z.size() == g.ambient_dim(), "nearest_center: point dimension mismatch");
  const auto depth = static_cast<std::size_t>(j - g.j_min());
  const auto& levels = g.levels();

  struct Node {
    double bound;
    std::size_t level;
    std::uint32_t k;
    bool operator>(const Node& o) const { return bound > o.bound; }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  for (std::size_t k = 0; k < static_cast<std::size_t>(levels[0].size()); ++k)
    open.push({0.0, 0, static_cast<std::uint32_t>(k)});

  Index best = -1;
  double best_sq = std::numeric_limits<double>::infinity();
  while (!open.empty()) {
    const Node node = open.top();
    open.pop();
    const double best_dist = std::sqrt(best_sq);
    if (node.bound > best_dist + 1e-9 * (1.0 + best_dist)) break;
    if (node.level == depth) {
      const double sq = (target.centers.row(node.k).transpose() - z).squaredNorm();
      if (sq < best_sq || (sq == best_sq && node.k < best)) {
        best_sq = sq;
        best = node.k;
      }
      continue;
    }
    for (std::uint32_t c : children_[node.level][node.k]) {
      const std::size_t l = node.level + 1;
      const double dist = (levels[l].centers.row(c).transpose() - z).norm();
      const double bound = l == depth ? dist : std::max(0.0, dist - reach_[l][c]);
      open.push({bound, l, c});
    }
  }
  return {best, std::sqrt(best_sq)};
}

ApproximationStats approximation_error(const Gmra& gmra, int j, const PointMatrix& test_points) {
  require_dims(test_points.cols() == gmra.ambient_dim(), "approximation_error: dimension mismatch");
  ApproximationStats stats;
  stats.errors.reserve(static_cast<std::size_t>(test_points.rows()));
  for (Index i = 0; i < test_points.rows(); ++i) {
    const Vector z = test_points.row(i).transpose();
    const NearestCenter nc = gmra.nearest_center(j, z);
    const double e = (z - gmra.project(j, nc.k, z)).norm();
    stats.errors.push_back(e);
    stats.mean += e;
    stats.max = std::max(stats.max, e);
  }
  if (!stats.errors.empty()) stats.mean /= static_cast<double>(stats.errors.size());
  return stats;
}

}  // namespace onebit
