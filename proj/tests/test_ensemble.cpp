#include "onebit/ensemble.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace onebit;
using onebit::testing::max_abs;

namespace {

// Entrywise oracles, independent of the transform code.
Matrix circulant_oracle(const Vector& g) {
  const Index n = g.size();
  Matrix c(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) c(i, k) = g((i - k + n) % n);
  return c;
}

Matrix scaled_dct_oracle(Index n) {
  Matrix c(n, n);
  for (Index k = 0; k < n; ++k) {
    const double a = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (Index i = 0; i < n; ++i)
      c(k, i) = std::sqrt(static_cast<double>(n)) * a * std::cos(std::numbers::pi * (i + 0.5) * k / n);
  }
  return c;
}

Matrix select_rows(const Matrix& full, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), full.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = full.row(rows[i]);
  return out;
}

}  // namespace

TEST_CASE("sampling is seed-deterministic") {
  const auto a = Ensemble::sample(EnsembleKind::Gaussian, 30, 20, 7);
  const auto b = Ensemble::sample(EnsembleKind::Gaussian, 30, 20, 7);
  CHECK(a.gaussian() == b.gaussian());
  CHECK(a.signs() == b.signs());
  const auto c = Ensemble::sample(EnsembleKind::PartialCirculant, 12, 20, 9);
  const auto d = Ensemble::sample(EnsembleKind::PartialCirculant, 12, 20, 9);
  CHECK(c.generator() == d.generator());
  CHECK(c.selected_rows() == d.selected_rows());
  CHECK(Ensemble::sample(EnsembleKind::Gaussian, 30, 20, 8).gaussian() != a.gaussian());
}

TEST_CASE("structured ensembles need m <= N") {
  CHECK_THROWS_AS(Ensemble::sample(EnsembleKind::PartialCirculant, 25, 20, 1), InvalidArgument);
  CHECK_THROWS_AS(Ensemble::sample(EnsembleKind::BoundedOrthonormal, 25, 20, 1), InvalidArgument);
  CHECK_NOTHROW(Ensemble::sample(EnsembleKind::Gaussian, 25, 20, 1));
}

TEST_CASE("gaussian payload columns are nearly uncorrelated") {
  const auto e = Ensemble::sample(EnsembleKind::Gaussian, 10000, 20, 3);
  const Matrix& a = e.gaussian();
  const Matrix centered = a.rowwise() - a.colwise().mean();
  const Vector sd = (centered.colwise().squaredNorm() / 9999.0).cwiseSqrt().transpose();
  const Matrix corr = (centered.transpose() * centered / 9999.0).array() / (sd * sd.transpose()).array();
  double worst = 0.0;
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < i; ++j) worst = std::max(worst, std::abs(corr(i, j)));
  CHECK(worst <= 0.05);
}

TEST_CASE("signs and rows are well formed") {
  for (auto kind : {EnsembleKind::Gaussian, EnsembleKind::PartialCirculant, EnsembleKind::BoundedOrthonormal}) {
    const auto e = Ensemble::sample(kind, 16, 32, 4);
    CHECK((e.signs().array().abs() == 1.0).all());
    CHECK(e.apply(Vector::Zero(32)) == Vector::Zero(16));
    const auto& rows = e.selected_rows();
    if (kind != EnsembleKind::Gaussian) {
      REQUIRE(rows.size() == 16);
      CHECK(std::is_sorted(rows.begin(), rows.end()));
      CHECK(std::adjacent_find(rows.begin(), rows.end()) == rows.end());
    }
  }
}

TEST_CASE("gaussian apply matches the entrywise formula") {
  const auto e = Ensemble::sample(EnsembleKind::Gaussian, 15, 9, 5);
  Rng rng(1);
  const Vector x = gaussian_vector(rng, 9);
  Vector y(15);
  for (Index i = 0; i < 15; ++i) {
    double s = 0.0;
    for (Index k = 0; k < 9; ++k) s += e.gaussian()(i, k) * e.signs()(k) * x(k);
    y(i) = s / std::sqrt(15.0);
  }
  CHECK(max_abs(e.apply(x) - y) <= 1e-12);
  CHECK(max_abs(e.materialize() - e.gaussian() * e.signs().asDiagonal() / std::sqrt(15.0)) <= 1e-15);
}

TEST_CASE("planted identity generator selects the first entries") {
  Vector g = Vector::Zero(10);
  g(0) = 1.0;
  const auto e = Ensemble::partial_circulant(g, Vector::Ones(10), {0, 1, 2, 3});
  Rng rng(2);
  const Vector x = gaussian_vector(rng, 10);
  CHECK(max_abs(e.apply(x) - x.head(4) / 2.0) <= 1e-14);
}

TEST_CASE("partial circulant matches the dense circulant oracle") {
  for (Index n : {7, 16, 31}) {
    const auto e = Ensemble::sample(EnsembleKind::PartialCirculant, n / 2, n, 11 + n);
    const Matrix oracle = select_rows(circulant_oracle(e.generator()), e.selected_rows()) *
                          e.signs().asDiagonal() / std::sqrt(static_cast<double>(n / 2));
    CHECK(max_abs(e.materialize() - oracle) <= 1e-12);
  }
  const auto first = Ensemble::sample(EnsembleKind::PartialCirculant, 5, 12, 3, RowSelection::First);
  CHECK(first.selected_rows() == std::vector<Index>{0, 1, 2, 3, 4});
}

TEST_CASE("bounded orthonormal matches the scaled cosine oracle") {
  for (Index n : {5, 16, 20}) {
    const auto e = Ensemble::sample(EnsembleKind::BoundedOrthonormal, 4, n, 21 + n);
    const Matrix oracle = select_rows(scaled_dct_oracle(n), e.selected_rows()) * e.signs().asDiagonal() / 2.0;
    CHECK(max_abs(e.materialize() - oracle) <= 1e-12);
    const Vector norms = e.materialize().rowwise().norm();
    CHECK(norms.maxCoeff() - norms.minCoeff() <= 1e-12);
  }
}

TEST_CASE("bounded orthonormal transform is sqrt(N) times an isometry") {
  const auto e = Ensemble::sample(EnsembleKind::BoundedOrthonormal, 8, 64, 6);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Vector x = gaussian_vector(rng, 64);
    CHECK(std::abs(e.transform(x).norm() / 8.0 - x.norm()) <= 1e-10);
  }
  CHECK_THROWS_AS(Ensemble::sample(EnsembleKind::Gaussian, 3, 4, 1).transform(Vector::Zero(4)), InvalidArgument);
}

TEST_CASE("apply is linear and agrees with materialize") {
  Rng rng(4);
  for (auto kind : {EnsembleKind::Gaussian, EnsembleKind::PartialCirculant, EnsembleKind::BoundedOrthonormal}) {
    const auto e = Ensemble::sample(kind, 10, 20, 8);
    const Matrix m = e.materialize();
    for (int t = 0; t < 10; ++t) {
      const Vector x = gaussian_vector(rng, 20), y = gaussian_vector(rng, 20);
      CHECK(max_abs(e.apply(x + y) - e.apply(x) - e.apply(y)) <= 1e-10);
      CHECK(max_abs(e.apply(2.5 * x) - 2.5 * e.apply(x)) <= 1e-10);
      CHECK(max_abs(m * x - e.apply(x)) <= 1e-10);
    }
  }
}

TEST_CASE("errors") {
  const auto e = Ensemble::sample(EnsembleKind::Gaussian, 10, 20, 1);
  CHECK_THROWS_AS(e.apply(Vector::Zero(19)), DimensionError);
  CHECK_THROWS_AS(e.materialize(100), InvalidArgument);
  CHECK_THROWS_AS(parse_ensemble_kind("bernoulli"), InvalidArgument);
  CHECK(parse_ensemble_kind("boe") == EnsembleKind::BoundedOrthonormal);
  CHECK(to_string(EnsembleKind::PartialCirculant) == "pce");
  CHECK_THROWS_AS(Ensemble::partial_circulant(Vector::Ones(4), Vector::Ones(4), {2, 1}), InvalidArgument);
  CHECK_THROWS_AS(Ensemble::partial_circulant(Vector::Ones(4), Vector::Constant(4, 0.5), {1}), InvalidArgument);
  CHECK_THROWS_AS(Ensemble::partial_circulant(Vector::Ones(4), Vector::Ones(3), {1}), DimensionError);
}
