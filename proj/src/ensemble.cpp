#include "onebit/ensemble.hpp"

#include "onebit/rng.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

namespace onebit {

namespace {

// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct Ensemble::FftPlans {
  Index n = 0;
  fftw_plan forward = nullptr;   // r2c, length n
  fftw_plan backward = nullptr;  // c2r, length n
  fftw_plan dct = nullptr;       // REDFT10 (DCT-II), length n
  std::vector<std::complex<double>> generator_hat;

  explicit FftPlans(Index len) : n(len) {
    const int size = static_cast<int>(len);
    std::vector<double> real(static_cast<std::size_t>(len)), real2(static_cast<std::size_t>(len));
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(len / 2 + 1));
    auto* spec_ptr = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(size, real.data(), spec_ptr, flags);
    backward = fftw_plan_dft_c2r_1d(size, spec_ptr, real.data(), flags);
    dct = fftw_plan_r2r_1d(size, real.data(), real2.data(), FFTW_REDFT10, flags);
    if (!forward || !backward || !dct) throw Error("fftw: plan creation failed");
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_destroy_plan(dct);
  }

  std::vector<std::complex<double>> r2c(const Vector& x) const {
    std::vector<double> in(x.data(), x.data() + x.size());
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
    fftw_execute_dft_r2c(forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
  }

  Vector c2r(std::vector<std::complex<double>> spec) const {
    Vector out(n);
    // c2r destroys its input; `spec` is a private copy.
    fftw_execute_dft_c2r(backward, reinterpret_cast<fftw_complex*>(spec.data()), out.data());
    return out / static_cast<double>(n);
  }

  Vector redft10(const Vector& x) const {
    std::vector<double> in(x.data(), x.data() + x.size());
    Vector out(n);
    fftw_execute_r2r(dct, in.data(), out.data());
    return out;
  }
};

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::Gaussian:
      return "gaussian";
    case EnsembleKind::PartialCirculant:
      return "pce";
    case EnsembleKind::BoundedOrthonormal:
      return "boe";
  }
  return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view text) {
  if (text == "gaussian") return EnsembleKind::Gaussian;
  if (text == "pce") return EnsembleKind::PartialCirculant;
  if (text == "boe") return EnsembleKind::BoundedOrthonormal;
  throw InvalidArgument("unknown ensemble kind '" + std::string(text) + "'");
}

namespace {

Vector random_signs(Rng& rng, Index n) {
  std::bernoulli_distribution coin(0.5);
  Vector s(n);
  for (Index i = 0; i < n; ++i) s(i) = coin(rng) ? 1.0 : -1.0;
  return s;
}

std::vector<Index> sample_rows(Rng& rng, Index m, Index n, RowSelection selection) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  if (selection == RowSelection::Uniform) {
    // Partial Fisher-Yates.
    for (Index i = 0; i < m; ++i) {
      std::uniform_int_distribution<Index> pick(i, n - 1);
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
    }
  }
  all.resize(static_cast<std::size_t>(m));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

Ensemble Ensemble::sample(EnsembleKind kind, Index m, Index n, std::uint64_t seed,
                          RowSelection selection) {
  if (m < 1 || n < 1) throw InvalidArgument("sample_ensemble: m and N must be positive");
  if (kind != EnsembleKind::Gaussian && m > n)
    throw InvalidArgument("sample_ensemble: " + to_string(kind) + " requires m <= N (m=" +
                          std::to_string(m) + ", N=" + std::to_string(n) + ")");
  Ensemble e;
  e.kind_ = kind;
  e.m_ = m;
  e.n_ = n;
  e.seed_ = seed;
  e.selection_ = selection;
  Rng rng(seed);
  switch (kind) {
    case EnsembleKind::Gaussian:
      e.gaussian_ = gaussian_matrix(rng, m, n);
      e.signs_ = random_signs(rng, n);
      break;
    case EnsembleKind::PartialCirculant:
      e.generator_ = gaussian_vector(rng, n);
      e.signs_ = random_signs(rng, n);
      e.rows_ = sample_rows(rng, m, n, selection);
      break;
    case EnsembleKind::BoundedOrthonormal:
      e.signs_ = random_signs(rng, n);
      e.rows_ = sample_rows(rng, m, n, selection);
      break;
  }
  if (kind != EnsembleKind::Gaussian) {
    auto plans = std::make_shared<FftPlans>(n);
    if (kind == EnsembleKind::PartialCirculant) plans->generator_hat = plans->r2c(e.generator_);
    e.plans_ = std::move(plans);
  }
  return e;
}

Ensemble Ensemble::partial_circulant(Vector generator, Vector signs, std::vector<Index> rows) {
  const Index n = generator.size();
  require_dims(signs.size() == n, "partial_circulant: sign vector length mismatch");
  if (rows.empty() || static_cast<Index>(rows.size()) > n)
    throw InvalidArgument("partial_circulant: need 1 <= m <= N rows");
  if (!std::is_sorted(rows.begin(), rows.end()) ||
      std::adjacent_find(rows.begin(), rows.end()) != rows.end() || rows.front() < 0 ||
      rows.back() >= n)
    throw InvalidArgument("partial_circulant: rows must be sorted, distinct and in range");
  for (Index i = 0; i < n; ++i)
    if (signs(i) != 1.0 && signs(i) != -1.0)
      throw InvalidArgument("partial_circulant: signs must be +-1");
  Ensemble e;
  e.kind_ = EnsembleKind::PartialCirculant;
  e.m_ = static_cast<Index>(rows.size());
  e.n_ = n;
  e.generator_ = std::move(generator);
  e.signs_ = std::move(signs);
  e.rows_ = std::move(rows);
  auto plans = std::make_shared<FftPlans>(n);
  plans->generator_hat = plans->r2c(e.generator_);
  e.plans_ = std::move(plans);
  return e;
}

Vector Ensemble::circulant_full(const Vector& x) const {
  auto spec = plans_->r2c(x);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= plans_->generator_hat[i];
  return plans_->c2r(std::move(spec));
}

Vector Ensemble::dct_full(const Vector& x) const {
  // REDFT10 is 2x the unnormalized DCT-II; rescale to the orthonormal basis,
  // then by sqrt(N) so entries are O(1).
  Vector y = plans_->redft10(x);
  const double dn = static_cast<double>(n_);
  y(0) *= std::sqrt(1.0 / (4.0 * dn));
  y.tail(n_ - 1) *= std::sqrt(1.0 / (2.0 * dn));
  return y * std::sqrt(dn);
}

Vector Ensemble::apply(const Vector& x) const {
  require_dims(x.size() == n_, "apply: expected length " + std::to_string(n_) + ", got " +
                                   std::to_string(x.size()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
  if (kind_ == EnsembleKind::Gaussian) return scale * (gaussian_ * signs_.cwiseProduct(x));

  const Vector full = transform(x);
  Vector y(m_);
  for (Index i = 0; i < m_; ++i) y(i) = scale * full(rows_[static_cast<std::size_t>(i)]);
  return y;
}

Matrix Ensemble::materialize(Index max_entries) const {
  if (m_ * n_ > max_entries)
    throw InvalidArgument("materialize: " + std::to_string(m_) + "x" + std::to_string(n_) +
                          " exceeds the memory cap of " + std::to_string(max_entries) + " entries");
  if (kind_ == EnsembleKind::Gaussian)
    return (gaussian_ * signs_.asDiagonal()) / std::sqrt(static_cast<double>(m_));
  Matrix out(m_, n_);
  for (Index c = 0; c < n_; ++c) out.col(c) = apply(Vector::Unit(n_, c));
  return out;
}

Vector Ensemble::transform(const Vector& x) const {
  if (kind_ == EnsembleKind::Gaussian)
    throw InvalidArgument("transform: Gaussian ensembles have no full transform");
  require_dims(x.size() == n_, "transform: dimension mismatch");
  const Vector dx = signs_.cwiseProduct(x);
  return kind_ == EnsembleKind::PartialCirculant ? circulant_full(dx) : dct_full(dx);
}

}  // namespace onebit
