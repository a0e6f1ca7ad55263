#pragma once

// Synthetic manifolds embedded isometrically in ℝ^N.

#include "onebit/common.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace onebit {

enum class ManifoldKind { Sphere, Circle, FlatDisk };

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Sphere;
  int dim = 2;  // intrinsic dimension d

  /// Dimension of the coordinate space before embedding: d + 1 for spheres, d for disks.
  int chart_dim() const { return kind == ManifoldKind::FlatDisk ? dim : dim + 1; }
  bool operator==(const ManifoldSpec&) const = default;
};

/// "sphere:2", "circle", "flat_disk:2".
ManifoldSpec parse_manifold(std::string_view text);
std::string to_string(const ManifoldSpec& spec);

/// Random N x chart_dim matrix with orthonormal columns.
Matrix random_embedding(const ManifoldSpec& spec, Index ambient_dim, std::uint64_t seed);

/// n points: uniform on S^d (or the unit d-disk), mapped through `embedding`
/// and scaled by 1 - margin.
PointMatrix sample_manifold(const ManifoldSpec& spec, Index n, const Matrix& embedding, std::uint64_t seed,
                            double margin);

/// Convenience form drawing the embedding from `seed` as well.
PointMatrix sample_manifold(const ManifoldSpec& spec, Index n, Index ambient_dim, std::uint64_t seed,
                            double margin);

}  // namespace onebit
