#pragma once

// Least squares with a quadratic (ball) inequality constraint:
//   minimize ‖M s - b‖₂  subject to  ‖s‖₂ <= ρ,
// and the affine variant over z = c + B t with ‖z‖₂ <= 1.

#include "onebit/common.hpp"

namespace onebit {

struct LsqiOptions {
  double tolerance = 1e-12;  // on |‖s‖ - ρ| when the constraint is active
  int max_iterations = 200;
};

struct BallLsqiResult {
  Vector s;
  double multiplier = 0.0;  // ν >= 0 with (MᵀM + νI) s = Mᵀb
  double residual = 0.0;    // ‖M s - b‖₂
  int iterations = 0;
  bool converged = true;
};

/// Minimum-norm least squares when that is feasible (ν = 0); otherwise the
/// boundary solution found by a safeguarded Newton iteration on the secular
/// equation 1/ρ - 1/‖s(ν)‖ = 0.
BallLsqiResult solve_ball_lsqi(const Matrix& m, const Vector& b, double radius,
                               const LsqiOptions& options = {});

struct KktResiduals {
  double stationarity = 0.0;  // ‖Mᵀ(M s - b) + ν s‖₂
  double boundary = 0.0;      // |‖s‖ - ρ| when ν > 0, else 0
  double infeasibility = 0.0; // max(0, ‖s‖ - ρ)
};

KktResiduals ball_lsqi_kkt(const Matrix& m, const Vector& b, double radius, const Vector& s,
                           double multiplier);

struct AffineLsqiResult {
  Vector x;                 // c + B t
  Vector t;
  double multiplier = 0.0;
  double residual = 0.0;    // ‖M t - b‖₂
  int iterations = 0;
  bool converged = true;
};

/// minimize ‖M t - b‖₂ subject to ‖c + B t‖₂ <= 1, for B with orthonormal
/// columns. Writing s = Bᵀc + t splits ‖c + Bt‖² = ‖c - BBᵀc‖² + ‖s‖², which
/// reduces the problem to solve_ball_lsqi.
AffineLsqiResult solve_affine_lsqi(const Vector& c, const Matrix& basis, const Matrix& m, const Vector& b,
                                   const LsqiOptions& options = {});

}  // namespace onebit
