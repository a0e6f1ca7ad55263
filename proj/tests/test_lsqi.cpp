#include "onebit/lsqi.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace onebit;
using onebit::testing::orthonormal_columns;

namespace {

// Projected gradient with a fixed step 1/L on ‖Ms - b‖²/2 over the ball.
Vector projected_gradient(const Matrix& m, const Vector& b, double radius, int iterations) {
  const double lip = m.operatorNorm() * m.operatorNorm();
  Vector s = Vector::Zero(m.cols());
  for (int it = 0; it < iterations; ++it) {
    s -= (m.transpose() * (m * s - b)) / lip;
    const double n = s.norm();
    if (n > radius) s *= radius / n;
  }
  return s;
}

}  // namespace

TEST_CASE("interior minimizer has zero multiplier") {
  const Matrix m = (Matrix(3, 2) << 2, 0, 0, 1, 1, 1).finished();
  const Vector s_true = (Vector(2) << 0.1, -0.2).finished();
  const auto r = solve_ball_lsqi(m, m * s_true, 1.0);
  CHECK(r.multiplier == 0.0);
  CHECK((r.s - s_true).norm() < 1e-14);
  const auto k = ball_lsqi_kkt(m, m * s_true, 1.0, r.s, r.multiplier);
  CHECK(k.stationarity < 1e-12);
}

TEST_CASE("one-dimensional boundary solution") {
  Matrix m = Matrix::Zero(4, 1);
  m(0, 0) = 1.0;
  Vector b = Vector::Zero(4);
  b(0) = 3.0;
  const auto r = solve_ball_lsqi(m, b, 0.5);
  CHECK(r.s(0) == doctest::Approx(0.5).epsilon(1e-12));
  // (1 + ν) s = 3 with s = 0.5.
  CHECK(r.multiplier == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(r.converged);
}

TEST_CASE("affine problem with centered point") {
  SUBCASE("zero residual at the center") {
    Rng rng(1);
    const Matrix basis = orthonormal_columns(rng, 6, 2);
    const Vector c = 0.3 * gaussian_vector(rng, 6).normalized();
    const auto r = solve_affine_lsqi(c, basis, gaussian_matrix(rng, 5, 2), Vector::Zero(5));
    CHECK(r.multiplier == 0.0);
    CHECK((r.x - c).norm() < 1e-15);
  }
  SUBCASE("d = 1 boundary case hits the sphere") {
    const Vector c = (Vector(3) << 0.0, 0.6, 0.0).finished();
    const Matrix basis = (Matrix(3, 1) << 1.0, 0.0, 0.0).finished();
    Matrix m = Matrix::Zero(4, 1);
    m(0, 0) = 1.0;
    Vector b = Vector::Zero(4);
    b(0) = 5.0;
    const auto r = solve_affine_lsqi(c, basis, m, b);
    CHECK(std::abs(r.x.norm() - 1.0) <= 1e-8);
    CHECK(r.x(0) == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(r.multiplier > 0.0);
  }
}

TEST_CASE("matches projected gradient on small instances") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Matrix m = gaussian_matrix(rng, 8, 3);
    const Vector b = 3.0 * gaussian_vector(rng, 8);
    const double radius = 0.2 + 0.1 * t / 20.0;
    const auto r = solve_ball_lsqi(m, b, radius);
    const Vector pg = projected_gradient(m, b, radius, 1000000);
    const double f = (m * r.s - b).squaredNorm(), f_pg = (m * pg - b).squaredNorm();
    CHECK(f <= f_pg + 1e-4);
    CHECK(std::abs(f - f_pg) <= 1e-4);
    const auto k = ball_lsqi_kkt(m, b, radius, r.s, r.multiplier);
    CHECK(k.stationarity <= 1e-8);
    CHECK(k.boundary <= 1e-8);
    CHECK(k.infeasibility <= 1e-12);
  }
}

TEST_CASE("rank-deficient operator uses the minimum-norm solution") {
  Matrix m = Matrix::Zero(3, 2);
  m(0, 0) = 1.0;
  m(1, 0) = 1.0;
  const Vector b = (Vector(3) << 0.2, 0.2, 1.0).finished();
  const auto r = solve_ball_lsqi(m, b, 1.0);
  CHECK(r.multiplier == 0.0);
  CHECK(r.s(0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(std::abs(r.s(1)) < 1e-15);

  const auto boundary = solve_ball_lsqi(m, 10.0 * b, 1.0);
  CHECK(boundary.s(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(boundary.s(1)) < 1e-15);
}

TEST_CASE("zero operator and zero radius") {
  const auto r = solve_ball_lsqi(Matrix::Zero(3, 2), Vector::Ones(3), 1.0);
  CHECK(r.s.norm() == 0.0);
  CHECK(r.residual == doctest::Approx(std::sqrt(3.0)));
  const auto z = solve_ball_lsqi(Matrix::Identity(2, 2), Vector::Ones(2), 0.0);
  CHECK(z.s.norm() == 0.0);
}

TEST_CASE("iteration cap reports non-convergence") {
  Rng rng(4);
  const Matrix m = gaussian_matrix(rng, 5, 2);
  const auto r = solve_ball_lsqi(m, 100.0 * gaussian_vector(rng, 5), 0.1, LsqiOptions{1e-12, 1});
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(solve_ball_lsqi(Matrix::Identity(2, 2), Vector::Ones(3), 1.0), DimensionError);
  CHECK_THROWS_AS(solve_ball_lsqi(Matrix::Identity(2, 2), Vector::Ones(2), -1.0), InvalidArgument);
  const Matrix basis = Matrix::Identity(3, 1);
  const Vector far = (Vector(3) << 0, 2, 0).finished();
  CHECK_THROWS_AS(solve_affine_lsqi(far, basis, Matrix::Identity(1, 1), Vector::Ones(1)), InvalidArgument);
}
