#pragma once

// Two-step reconstruction from one-bit measurements q:
//  1. pick the center c_{j,k'} whose quantized measurements are closest to q
//     in the condensed pseudo-metric;
//  2. minimize the condensed residual over the affine piece of (j, k')
//     intersected with the unit ball.

#include "onebit/condenser.hpp"
#include "onebit/ensemble.hpp"
#include "onebit/gmra.hpp"
#include "onebit/lsqi.hpp"
#include "onebit/quantizer.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace onebit {

inline constexpr double kStepOneZero = 1e-12;

struct RecoveryResult {
  Vector x_sharp;
  Index center_index = 0;
  double step1_value = 0.0;
  double step2_residual = 0.0;  // ‖Ṽ(Φx♯ - q)‖₂ (scaled Euclidean for the MSQ baseline)
  bool skipped_step2 = false;
  double lagrange_multiplier = 0.0;
  bool converged = true;
};

/// Quantized measurements of every center of one level, stored in the form
/// Step 1 compares against: condensed vectors for noise-shaping schemes,
/// packed sign bits for MSQ.
struct CenterCodebook {
  Index m = 0;
  Matrix condensed;                             // p x K (noise shaping)
  std::vector<std::vector<std::uint64_t>> bits; // K packed sign vectors (MSQ)
  Index size() const;
};

CenterCodebook build_codebook(const Gmra& gmra, int j, const Ensemble& ens, const QuantizerSpec& spec,
                              const Condenser* cond);

/// Populate-once cache keyed by (level, ensemble, scheme). Lookups are safe
/// from many threads; each entry is built exactly once.
class CodebookCache {
 public:
  std::shared_ptr<const CenterCodebook> get(const Gmra& gmra, int j, const Ensemble& ens,
                                            const QuantizerSpec& spec, const Condenser* cond);
  std::size_t size() const;

 private:
  using Key = std::tuple<const Gmra*, int, int, std::uint64_t, Index, Index, std::string, Index>;
  struct Slot {
    std::once_flag once;
    std::shared_ptr<const CenterCodebook> book;
  };
  mutable std::mutex mu_;
  std::map<Key, std::shared_ptr<Slot>> slots_;
};

struct CenterChoice {
  Index k = 0;
  double value = 0.0;
};

/// Step 1. Ties go to the smallest index.
CenterChoice select_center(const Gmra& gmra, int j, const Ensemble& ens, const QuantizerSpec& spec,
                           const Condenser& cond, const Vector& q, CodebookCache* cache = nullptr);

/// Step 2 on the piece (center, basis).
AffineLsqiResult solve_tangent_lsqi(const Vector& center, const Matrix& basis, const Ensemble& ens,
                                    const Condenser& cond, const Vector& q, const LsqiOptions& options = {});

RecoveryResult reconstruct(const Gmra& gmra, int j, const Ensemble& ens, const QuantizerSpec& spec,
                           const Condenser& cond, const Vector& q, CodebookCache* cache = nullptr);

/// Same two steps for memoryless bits, with m^{-1/2}‖·‖₂ in place of the
/// condensed pseudo-metric.
RecoveryResult reconstruct_msq_baseline(const Gmra& gmra, int j, const Ensemble& ens, const Vector& q,
                                        CodebookCache* cache = nullptr);

/// Φ applied to every column of x (N x c), giving m x c.
Matrix measure_columns(const Ensemble& ens, const Matrix& x);

}  // namespace onebit
