#pragma once

// One-bit quantizers over the alphabet {±1}: memoryless sign (MSQ), r-th order
// Sigma-Delta and distributed (β) noise shaping. Every scheme reports its state
// vector u, which satisfies y - q = H u for the matrix from state_matrix().

#include "onebit/common.hpp"

#include <string>
#include <variant>
#include <vector>

namespace onebit {

/// How ΣΔ(r) picks each bit.
///  - Greedy: q_j minimizes |u_j| directly. Stable for r <= 2 with small inputs.
///  - Filtered: greedy on an auxiliary state v with a sparse feedback filter h,
///    u = g * v where (1 - z)^r G(z) = 1 - H(z). Stable for any r whenever
///    ‖y‖∞ <= 2 - ‖h‖₁.
///  - Auto: Greedy for r <= 2, Filtered otherwise.
enum class SigmaDeltaRule { Auto, Greedy, Filtered };

struct Msq {
  bool operator==(const Msq&) const = default;
};

struct SigmaDelta {
  int order = 1;
  SigmaDeltaRule rule = SigmaDeltaRule::Auto;
  bool operator==(const SigmaDelta&) const = default;
};

struct Beta {
  double beta = 1.5;
  Index blocks = 1;  // p; the state resets at the start of every block
  bool operator==(const Beta&) const = default;
};

using QuantizerSpec = std::variant<Msq, SigmaDelta, Beta>;

/// Short label, e.g. "msq", "sd2", "beta1.5/p10".
std::string describe(const QuantizerSpec& spec);

struct QuantizationResult {
  Vector q;
  Vector u;
  double stability_norm = 0.0;  // ‖u‖∞
};

/// Feedback filter used by SigmaDeltaRule::Filtered.
struct NoiseShapingFilter {
  int order = 0;
  std::vector<Index> taps;     // lags n_1 < ... < n_r where h is non-zero
  std::vector<double> weights; // h at those lags
  Vector g;                    // u = g * v, g(0) = 1
  double l1_norm() const;      // ‖h‖₁
};

/// Taps at lags spacing*i^2 + 1, i = 0..r-1, with weights making 1 - H(z)
/// vanish to order r at z = 1.
NoiseShapingFilter design_filter(int order, int spacing = 6);

SigmaDeltaRule resolve_rule(const SigmaDelta& sd);

QuantizationResult quantize(const QuantizerSpec& spec, const Vector& y);

/// Bits only; skips the state bookkeeping where that is cheaper.
Vector quantize_bits(const QuantizerSpec& spec, const Vector& y);

/// Lower-triangular H with y - q = H u: identity (MSQ), D^r (ΣΔ), or
/// block-diagonal copies of I - β·shift (β).
Matrix state_matrix(const QuantizerSpec& spec, Index m);

/// ‖y - q - H u‖∞.
double verify_state_relation(const Vector& y, const QuantizationResult& result, const Matrix& h);

}  // namespace onebit
