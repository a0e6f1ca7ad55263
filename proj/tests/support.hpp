#pragma once

#include "onebit/common.hpp"
#include "onebit/rng.hpp"

#include <cmath>

namespace onebit::testing {

inline Vector uniform_vector(Rng& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline Matrix orthonormal_columns(Rng& rng, Index rows, Index cols) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rng, rows, cols));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

inline double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace onebit::testing
