#pragma once

// Sensing operators Φ = m^{-1/2} A D_ε for Gaussian, partial circulant (PCE)
// and bounded orthonormal (BOE, subsampled DCT-II) ensembles.

#include "onebit/common.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace onebit {

enum class EnsembleKind { Gaussian, PartialCirculant, BoundedOrthonormal };

/// Which m rows PCE keeps. BOE always samples uniformly.
enum class RowSelection { Uniform, First };

std::string to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(std::string_view text);

inline constexpr Index kDefaultMaterializeCap = Index{1} << 27;

class Ensemble {
 public:
  static Ensemble sample(EnsembleKind kind, Index m, Index n, std::uint64_t seed,
                         RowSelection selection = RowSelection::Uniform);

  /// PCE with an explicit generator, sign pattern and row set (sorted, distinct).
  static Ensemble partial_circulant(Vector generator, Vector signs, std::vector<Index> rows);

  EnsembleKind kind() const { return kind_; }
  Index rows() const { return m_; }
  Index cols() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  RowSelection selection() const { return selection_; }
  const Vector& signs() const { return signs_; }
  const Matrix& gaussian() const { return gaussian_; }
  const Vector& generator() const { return generator_; }
  const std::vector<Index>& selected_rows() const { return rows_; }

  /// y = m^{-1/2} A (D_ε x).
  Vector apply(const Vector& x) const;

  /// Dense m x N matrix with M x = apply(x).
  Matrix materialize(Index max_entries = kDefaultMaterializeCap) const;

  /// Structured ensembles only: the full N-row transform A D_ε x before row
  /// selection and the m^{-1/2} factor. For BOE this is sqrt(N) times an isometry.
  Vector transform(const Vector& x) const;

 private:
  struct FftPlans;

  Ensemble() = default;
  Vector circulant_full(const Vector& x) const;
  Vector dct_full(const Vector& x) const;

  EnsembleKind kind_ = EnsembleKind::Gaussian;
  Index m_ = 0;
  Index n_ = 0;
  std::uint64_t seed_ = 0;
  RowSelection selection_ = RowSelection::Uniform;
  Vector signs_;
  Matrix gaussian_;
  Vector generator_;
  std::vector<Index> rows_;
  std::shared_ptr<const FftPlans> plans_;
};

}  // namespace onebit
