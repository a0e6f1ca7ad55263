#include "onebit/condenser.hpp"

#include <cmath>

namespace onebit {

namespace {

Index lambda_of(Index m, Index p) {
  if (m < 1 || p < 1) throw InvalidArgument("condenser: m and p must be positive");
  if (m % p != 0)
    throw InvalidArgument("condenser: p=" + std::to_string(p) + " does not divide m=" + std::to_string(m));
  return m / p;
}

}  // namespace

Index sigma_delta_base_length(int r, Index lambda) {
  if (r < 1 || lambda < 1 || (lambda - 1) % r != 0) return 0;
  return (lambda - 1) / r + 1;
}

Condenser::Condenser(Vector v, Index p) : v_(std::move(v)), p_(p) {
  scale_ = 9.0 / (8.0 * v_.norm() * std::sqrt(static_cast<double>(p_)));
}

Condenser Condenser::sigma_delta(int r, Index m, Index p) {
  if (r < 1) throw InvalidArgument("condenser: order must be >= 1");
  const Index lambda = lambda_of(m, p);
  const Index base = sigma_delta_base_length(r, lambda);
  if (base == 0)
    throw InvalidArgument("condenser: block length " + std::to_string(lambda) + " - 1 is not divisible by r=" +
                          std::to_string(r));
  Vector v = Vector::Ones(1);
  for (int k = 0; k < r; ++k) {
    Vector next = Vector::Zero(v.size() + base - 1);
    for (Index i = 0; i < v.size(); ++i) next.segment(i, base).array() += v(i);
    v = std::move(next);
  }
  return Condenser(std::move(v), p);
}

Condenser Condenser::beta(double beta, Index m, Index p) {
  if (!(beta > 1.0 && beta < 2.0)) throw InvalidArgument("condenser: beta must lie in (1, 2)");
  const Index lambda = lambda_of(m, p);
  Vector v(lambda);
  double w = 1.0;
  for (Index i = 0; i < lambda; ++i) v(i) = (w /= beta);
  return Condenser(std::move(v), p);
}

Condenser Condenser::for_scheme(const QuantizerSpec& spec, Index m, Index p) {
  if (const auto* sd = std::get_if<SigmaDelta>(&spec)) return sigma_delta(sd->order, m, p);
  if (const auto* b = std::get_if<Beta>(&spec)) {
    if (b->blocks != p) throw InvalidArgument("condenser: beta scheme block count differs from p");
    return beta(b->beta, m, p);
  }
  throw InvalidArgument("condenser: MSQ has no condensation operator");
}

Vector Condenser::condense(const Vector& w) const {
  require_dims(w.size() == input_length(), "condense: expected length " + std::to_string(input_length()) +
                                               ", got " + std::to_string(w.size()));
  const Index len = v_.size();
  Vector out(p_);
  for (Index b = 0; b < p_; ++b) out(b) = scale_ * v_.dot(w.segment(b * len, len));
  return out;
}

Matrix Condenser::condense_columns(const Matrix& w) const {
  require_dims(w.rows() == input_length(), "condense_columns: row count mismatch");
  const Index len = v_.size();
  Matrix out(p_, w.cols());
  for (Index b = 0; b < p_; ++b) out.row(b) = scale_ * (v_.transpose() * w.middleRows(b * len, len));
  return out;
}

double Condenser::pseudo_distance(const Vector& a, const Vector& b) const {
  require_dims(a.size() == b.size(), "pseudo_distance: length mismatch");
  return condense(a - b).norm();
}

}  // namespace onebit
