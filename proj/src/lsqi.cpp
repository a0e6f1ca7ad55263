#include "onebit/lsqi.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace onebit {

BallLsqiResult solve_ball_lsqi(const Matrix& m, const Vector& b, double radius, const LsqiOptions& options) {
  require_dims(m.rows() == b.size(), "solve_ball_lsqi: M and b disagree in row count");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InvalidArgument("solve_ball_lsqi: radius must be >= 0");
  const Index d = m.cols();
  BallLsqiResult res;
  res.s = Vector::Zero(d);
  if (d == 0) {
    res.residual = b.norm();
    return res;
  }

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const Matrix& w = svd.matrixV();
  const Vector beta = svd.matrixU().transpose() * b;
  const double cutoff = sigma.size() ? sigma(0) * std::numeric_limits<double>::epsilon() *
                                           static_cast<double>(std::max(m.rows(), m.cols()))
                                     : 0.0;
  const Index rank = (sigma.array() > cutoff).count();

  // Coordinates of s(ν) in the right singular basis.
  auto coords = [&](double nu) {
    Vector a = Vector::Zero(sigma.size());
    for (Index i = 0; i < rank; ++i) a(i) = sigma(i) * beta(i) / (sigma(i) * sigma(i) + nu);
    return a;
  };
  auto finish = [&](const Vector& a, double nu) {
    res.s = w.leftCols(a.size()) * a;
    res.multiplier = nu;
    res.residual = (m * res.s - b).norm();
  };

  Vector a = coords(0.0);
  if (a.norm() <= radius) {
    finish(a, 0.0);
    return res;
  }
  if (radius == 0.0) {
    finish(Vector::Zero(sigma.size()), 0.0);
    res.converged = false;
    return res;
  }

  // φ(ν) = 1/ρ - 1/‖s(ν)‖ is decreasing with φ(0) > 0; ‖s(ν)‖ <= ‖Mᵀb‖/ν
  // gives a right endpoint.
  double lo = 0.0;
  double hi = 0.0;
  for (Index i = 0; i < rank; ++i) hi = std::max(hi, std::abs(sigma(i) * beta(i)));
  hi = hi * std::sqrt(static_cast<double>(rank)) / radius;
  double nu = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    res.iterations = it;
    a = coords(nu);
    const double norm = a.norm();
    if (std::abs(norm - radius) <= options.tolerance * std::max(1.0, radius)) {
      finish(a, nu);
      return res;
    }
    if (norm > radius)
      lo = nu;
    else
      hi = nu;
    double slope = 0.0;  // -dφ/dν · ‖s‖³
    for (Index i = 0; i < rank; ++i) {
      const double den = sigma(i) * sigma(i) + nu;
      slope += a(i) * a(i) / den;
    }
    const double phi = 1.0 / radius - 1.0 / norm;
    double next = nu + phi * norm * norm * norm / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == nu) break;
    nu = next;
  }
  finish(coords(nu), nu);
  res.converged = std::abs(res.s.norm() - radius) <= options.tolerance * std::max(1.0, radius);
  return res;
}

KktResiduals ball_lsqi_kkt(const Matrix& m, const Vector& b, double radius, const Vector& s, double multiplier) {
  KktResiduals k;
  k.stationarity = (m.transpose() * (m * s - b) + multiplier * s).norm();
  const double norm = s.norm();
  k.boundary = multiplier > 0.0 ? std::abs(norm - radius) : 0.0;
  k.infeasibility = std::max(0.0, norm - radius);
  return k;
}

AffineLsqiResult solve_affine_lsqi(const Vector& c, const Matrix& basis, const Matrix& m, const Vector& b,
                                   const LsqiOptions& options) {
  require_dims(basis.rows() == c.size() && m.cols() == basis.cols() && m.rows() == b.size(),
               "solve_affine_lsqi: dimension mismatch");
  const Vector a = basis.transpose() * c;
  const double outside = (c - basis * a).squaredNorm();
  if (outside > 1.0 + 1e-12) throw InvalidArgument("solve_affine_lsqi: affine piece misses the unit ball");
  const double radius = std::sqrt(std::max(0.0, 1.0 - outside));
  const BallLsqiResult ball = solve_ball_lsqi(m, b + m * a, radius, options);
  AffineLsqiResult res;
  res.t = ball.s - a;
  res.x = c + basis * res.t;
  res.multiplier = ball.multiplier;
  res.residual = ball.residual;
  res.iterations = ball.iterations;
  res.converged = ball.converged;
  return res;
}

}  // namespace onebit
