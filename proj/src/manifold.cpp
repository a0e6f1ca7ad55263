#include "onebit/manifold.hpp"

#include "onebit/rng.hpp"

#include <Eigen/QR>

#include <charconv>
#include <cmath>

namespace onebit {

ManifoldSpec parse_manifold(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  ManifoldSpec spec;
  if (name == "circle") {
    if (colon != std::string_view::npos) throw InvalidArgument("manifold: circle takes no dimension");
    return {ManifoldKind::Circle, 1};
  }
  if (name == "sphere")
    spec.kind = ManifoldKind::Sphere;
  else if (name == "flat_disk")
    spec.kind = ManifoldKind::FlatDisk;
  else
    throw InvalidArgument("manifold: unknown kind '" + std::string(text) + "'");
  if (colon == std::string_view::npos) return spec;
  const std::string_view digits = text.substr(colon + 1);
  int d = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || d < 1)
    throw InvalidArgument("manifold: bad dimension in '" + std::string(text) + "'");
  spec.dim = d;
  return spec;
}

std::string to_string(const ManifoldSpec& spec) {
  switch (spec.kind) {
    case ManifoldKind::Circle:
      return "circle";
    case ManifoldKind::Sphere:
      return "sphere:" + std::to_string(spec.dim);
    case ManifoldKind::FlatDisk:
      return "flat_disk:" + std::to_string(spec.dim);
  }
  return "unknown";
}

Matrix random_embedding(const ManifoldSpec& spec, Index ambient_dim, std::uint64_t seed) {
  const Index k = spec.chart_dim();
  if (spec.dim >= ambient_dim || k > ambient_dim)
    throw DimensionError("manifold: " + to_string(spec) + " does not fit in dimension " +
                         std::to_string(ambient_dim));
  Rng rng(seed);
  const Matrix g = gaussian_matrix(rng, ambient_dim, k);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(ambient_dim, k);
  // Fix the column signs so the map does not depend on QR conventions.
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Index c = 0; c < k; ++c)
    if (r(c, c) < 0) q.col(c) = -q.col(c);
  return q;
}

PointMatrix sample_manifold(const ManifoldSpec& spec, Index n, const Matrix& embedding, std::uint64_t seed,
                            double margin) {
  const Index k = spec.chart_dim();
  require_dims(embedding.cols() == k, "sample_manifold: embedding has the wrong width");
  if (n < 1) throw InvalidArgument("sample_manifold: n must be positive");
  if (!(margin >= 0.0 && margin < 1.0)) throw InvalidArgument("sample_manifold: margin must lie in [0, 1)");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointMatrix chart(n, k);
  for (Index i = 0; i < n; ++i) {
    Vector g = gaussian_vector(rng, k);
    double norm = g.norm();
    while (norm == 0.0) {
      g = gaussian_vector(rng, k);
      norm = g.norm();
    }
    g /= norm;
    if (spec.kind == ManifoldKind::FlatDisk) g *= std::pow(unit(rng), 1.0 / static_cast<double>(k));
    chart.row(i) = g.transpose();
  }
  return (1.0 - margin) * (chart * embedding.transpose());
}

PointMatrix sample_manifold(const ManifoldSpec& spec, Index n, Index ambient_dim, std::uint64_t seed,
                            double margin) {
  const Matrix embedding = random_embedding(spec, ambient_dim, derive_seed(seed, {0}));
  return sample_manifold(spec, n, embedding, derive_seed(seed, {1}), margin);
}

}  // namespace onebit
