#pragma once

// Condensation operator Ṽ = scale · (I_p ⊗ v) and the pseudo-metric
// d(a, b) = ‖Ṽ(a - b)‖₂ it induces on length-m vectors.

#include "onebit/common.hpp"
#include "onebit/quantizer.hpp"

namespace onebit {

class Condenser {
 public:
  /// v = coefficients of (1 + z + ... + z^{λ̃-1})^r with λ = m/p = rλ̃ - r + 1.
  static Condenser sigma_delta(int r, Index m, Index p);
  /// v = (β^{-1}, ..., β^{-λ}) with λ = m/p.
  static Condenser beta(double beta, Index m, Index p);
  /// Dispatches on the scheme. MSQ has no condenser.
  static Condenser for_scheme(const QuantizerSpec& spec, Index m, Index p);

  Index blocks() const { return p_; }
  Index block_length() const { return v_.size(); }
  Index input_length() const { return p_ * v_.size(); }
  const Vector& v() const { return v_; }
  double scale() const { return scale_; }
  double gamma() const { return v_.lpNorm<1>() / v_.norm(); }

  /// Length-p output; block b is scale · ⟨v, w_b⟩.
  Vector condense(const Vector& w) const;
  /// Applies condense to every column of an m x c matrix, giving p x c.
  Matrix condense_columns(const Matrix& w) const;
  double pseudo_distance(const Vector& a, const Vector& b) const;

 private:
  Condenser(Vector v, Index p);
  Vector v_;
  Index p_ = 0;
  double scale_ = 0.0;
};

/// λ̃ for a ΣΔ(r) block length λ, or 0 when λ - 1 is not a multiple of r.
Index sigma_delta_base_length(int r, Index lambda);

}  // namespace onebit
