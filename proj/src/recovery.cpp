#include "onebit/recovery.hpp"

#include <bit>
#include <cmath>

namespace onebit {

namespace {

constexpr Index kChunk = 256;

std::vector<std::uint64_t> pack_signs(const Vector& q) {
  std::vector<std::uint64_t> words(static_cast<std::size_t>((q.size() + 63) / 64), 0);
  for (Index i = 0; i < q.size(); ++i)
    if (q(i) > 0) words[static_cast<std::size_t>(i / 64)] |= std::uint64_t{1} << (i % 64);
  return words;
}

Index hamming(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  Index n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += std::popcount(a[i] ^ b[i]);
  return n;
}

void check_bits(const Ensemble& ens, const Vector& q) {
  require_dims(q.size() == ens.rows(), "recovery: expected " + std::to_string(ens.rows()) + " bits, got " +
                                           std::to_string(q.size()));
}

void check_level(const Gmra& gmra, int j, const Ensemble& ens) {
  if (!gmra.has_level(j)) throw InvalidArgument("recovery: GMRA has no level " + std::to_string(j));
  require_dims(ens.cols() == gmra.ambient_dim(), "recovery: ensemble and GMRA disagree on N");
}

}  // namespace

Matrix measure_columns(const Ensemble& ens, const Matrix& x) {
  require_dims(x.rows() == ens.cols(), "measure_columns: dimension mismatch");
  if (ens.rows() * ens.cols() <= kDefaultMaterializeCap) return ens.materialize() * x;
  Matrix out(ens.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c) out.col(c) = ens.apply(x.col(c));
  return out;
}

Index CenterCodebook::size() const {
  return bits.empty() ? condensed.cols() : static_cast<Index>(bits.size());
}

CenterCodebook build_codebook(const Gmra& gmra, int j, const Ensemble& ens, const QuantizerSpec& spec,
                              const Condenser* cond) {
  check_level(gmra, j, ens);
  const bool msq = std::holds_alternative<Msq>(spec);
  if (!msq) {
    if (!cond) throw InvalidArgument("build_codebook: noise-shaping schemes need a condenser");
    require_dims(cond->input_length() == ens.rows(), "build_codebook: condenser length differs from m");
  }
  const GmraLevel& lv = gmra.level(j);
  const Index k_count = lv.size();
  CenterCodebook book;
  book.m = ens.rows();
  const Matrix phi = ens.rows() * ens.cols() <= kDefaultMaterializeCap ? ens.materialize() : Matrix();
  if (msq)
    book.bits.reserve(static_cast<std::size_t>(k_count));
  else
    book.condensed.resize(cond->blocks(), k_count);
  for (Index start = 0; start < k_count; start += kChunk) {
    const Index len = std::min(kChunk, k_count - start);
    const Matrix centers = lv.centers.middleRows(start, len).transpose();
    const Matrix y = phi.size() ? Matrix(phi * centers) : measure_columns(ens, centers);
    for (Index c = 0; c < len; ++c) {
      const Vector bits = quantize_bits(spec, y.col(c));
      if (msq)
        book.bits.push_back(pack_signs(bits));
      else
        book.condensed.col(start + c) = cond->condense(bits);
    }
  }
  return book;
}

std::shared_ptr<const CenterCodebook> CodebookCache::get(const Gmra& gmra, int j, const Ensemble& ens,
                                                         const QuantizerSpec& spec, const Condenser* cond) {
  const Key key{&gmra, j, static_cast<int>(ens.kind()), ens.seed(), ens.rows(), ens.cols(), describe(spec),
                cond ? cond->blocks() : 0};
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto& entry = slots_[key];
    if (!entry) entry = std::make_shared<Slot>();
    slot = entry;
  }
  std::call_once(slot->once, [&] {
    slot->book = std::make_shared<const CenterCodebook>(build_codebook(gmra, j, ens, spec, cond));
  });
  return slot->book;
}

std::size_t CodebookCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return slots_.size();
}

CenterChoice select_center(const Gmra& gmra, int j, const Ensemble& ens, const QuantizerSpec& spec,
                           const Condenser& cond, const Vector& q, CodebookCache* cache) {
  if (std::holds_alternative<Msq>(spec))
    throw InvalidArgument("select_center: use reconstruct_msq_baseline for memoryless bits");
  check_level(gmra, j, ens);
  check_bits(ens, q);
  std::shared_ptr<const CenterCodebook> book =
      cache ? cache->get(gmra, j, ens, spec, &cond)
            : std::make_shared<const CenterCodebook>(build_codebook(gmra, j, ens, spec, &cond));
  const Vector target = cond.condense(q);
  CenterChoice best{0, std::numeric_limits<double>::infinity()};
  for (Index k = 0; k < book->condensed.cols(); ++k) {
    const double sq = (book->condensed.col(k) - target).squaredNorm();
    if (sq < best.value) best = {k, sq};
  }
  best.value = std::sqrt(best.value);
  return best;
}

AffineLsqiResult solve_tangent_lsqi(const Vector& center, const Matrix& basis, const Ensemble& ens,
                                    const Condenser& cond, const Vector& q, const LsqiOptions& options) {
  check_bits(ens, q);
  require_dims(center.size() == ens.cols() && basis.rows() == ens.cols(), "solve_tangent_lsqi: dimension mismatch");
  const Matrix m = cond.condense_columns(measure_columns(ens, basis));
  const Vector b = cond.condense(q - ens.apply(center));
  return solve_affine_lsqi(center, basis, m, b, options);
}

RecoveryResult reconstruct(const Gmra& gmra, int j, const Ensemble& ens, const QuantizerSpec& spec,
                           const Condenser& cond, const Vector& q, CodebookCache* cache) {
  const CenterChoice choice = select_center(gmra, j, ens, spec, cond, q, cache);
  const GmraLevel& lv = gmra.level(j);
  RecoveryResult res;
  res.center_index = choice.k;
  res.step1_value = choice.value;
  const Vector center = lv.centers.row(choice.k).transpose();
  if (choice.value <= kStepOneZero) {
    res.x_sharp = center;
    res.skipped_step2 = true;
    res.step2_residual = cond.pseudo_distance(ens.apply(center), q);
    return res;
  }
  const AffineLsqiResult sol = solve_tangent_lsqi(center, lv.bases[static_cast<std::size_t>(choice.k)], ens, cond, q);
  res.x_sharp = sol.x;
  res.step2_residual = sol.residual;
  res.lagrange_multiplier = sol.multiplier;
  res.converged = sol.converged;
  return res;
}

RecoveryResult reconstruct_msq_baseline(const Gmra& gmra, int j, const Ensemble& ens, const Vector& q,
                                        CodebookCache* cache) {
  check_level(gmra, j, ens);
  check_bits(ens, q);
  const QuantizerSpec spec = Msq{};
  std::shared_ptr<const CenterCodebook> book =
      cache ? cache->get(gmra, j, ens, spec, nullptr)
            : std::make_shared<const CenterCodebook>(build_codebook(gmra, j, ens, spec, nullptr));
  const auto packed = pack_signs(q);
  Index best_k = 0;
  Index best_h = std::numeric_limits<Index>::max();
  for (Index k = 0; k < book->size(); ++k) {
    const Index h = hamming(book->bits[static_cast<std::size_t>(k)], packed);
    if (h < best_h) {
      best_h = h;
      best_k = k;
    }
  }
  const double inv_root_m = 1.0 / std::sqrt(static_cast<double>(ens.rows()));
  RecoveryResult res;
  res.center_index = best_k;
  // Sign vectors differing in h entries are 2√h apart.
  res.step1_value = inv_root_m * 2.0 * std::sqrt(static_cast<double>(best_h));
  const GmraLevel& lv = gmra.level(j);
  const Vector center = lv.centers.row(best_k).transpose();
  if (res.step1_value <= kStepOneZero) {
    res.x_sharp = center;
    res.skipped_step2 = true;
    res.step2_residual = inv_root_m * (ens.apply(center) - q).norm();
    return res;
  }
  const Matrix& basis = lv.bases[static_cast<std::size_t>(best_k)];
  const Matrix m = inv_root_m * measure_columns(ens, basis);
  const Vector b = inv_root_m * (q - ens.apply(center));
  const AffineLsqiResult sol = solve_affine_lsqi(center, basis, m, b);
  res.x_sharp = sol.x;
  res.step2_residual = sol.residual;
  res.lagrange_multiplier = sol.multiplier;
  res.converged = sol.converged;
  return res;
}

}  // namespace onebit
