#include "onebit/gmra.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace onebit {

namespace {

constexpr std::array<char, 4> kMagic = {'G', 'M', 'R', 'A'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : buf_(std::move(bytes)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  bool at_end() const { return pos_ == buf_.size(); }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw FormatError("gmra file: truncated");
  }
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_gmra(const Gmra& gmra, const std::filesystem::path& path) {
  Writer w;
  w.raw(kMagic.data(), kMagic.size());
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(gmra.ambient_dim()));
  w.u32(static_cast<std::uint32_t>(gmra.intrinsic_dim()));
  w.u32(static_cast<std::uint32_t>(gmra.levels().size()));
  w.u64(gmra.build_params().seed);
  w.u32(gmra.build_params().min_cell_points);
  for (const GmraLevel& lv : gmra.levels()) {
    w.u32(static_cast<std::uint32_t>(lv.j));
    w.u32(static_cast<std::uint32_t>(lv.size()));
    for (Index k = 0; k < lv.size(); ++k)
      for (Index c = 0; c < lv.centers.cols(); ++c) w.f64(lv.centers(k, c));
    for (const Matrix& b : lv.bases)
      for (Index r = 0; r < b.rows(); ++r)
        for (Index c = 0; c < b.cols(); ++c) w.f64(b(r, c));
    for (std::uint32_t p : lv.parents) w.u32(p);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("save_gmra: cannot open " + path.string());
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("save_gmra: write failed for " + path.string());
}

Gmra load_gmra(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_gmra: cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(bytes));

  std::array<char, 4> magic{};
  if (r.remaining() < magic.size()) throw FormatError("gmra file: truncated");
  r.raw(magic.data(), magic.size());
  if (magic != kMagic) throw VersionError("gmra file: bad magic header");
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw VersionError("gmra file: unsupported format version " + std::to_string(version));

  const Index n_dim = r.u32();
  const Index d = r.u32();
  const std::uint32_t level_count = r.u32();
  GmraBuildParams params;
  params.seed = r.u64();
  params.min_cell_points = r.u32();
  if (n_dim == 0 || d == 0 || d >= n_dim) throw FormatError("gmra file: invalid dimensions");

  std::vector<GmraLevel> levels;
  levels.reserve(level_count);
  for (std::uint32_t l = 0; l < level_count; ++l) {
    GmraLevel lv;
    lv.j = static_cast<int>(r.u32());
    const Index count = r.u32();
    // Guard against absurd counts before allocating.
    const std::size_t per_center = static_cast<std::size_t>(n_dim + n_dim * d) * 8 + 4;
    if (static_cast<std::size_t>(count) > r.remaining() / per_center)
      throw FormatError("gmra file: truncated");
    lv.centers.resize(count, n_dim);
    for (Index k = 0; k < count; ++k)
      for (Index c = 0; c < n_dim; ++c) lv.centers(k, c) = r.f64();
    lv.bases.assign(static_cast<std::size_t>(count), Matrix(n_dim, d));
    for (Matrix& b : lv.bases)
      for (Index row = 0; row < n_dim; ++row)
        for (Index c = 0; c < d; ++c) b(row, c) = r.f64();
    lv.parents.resize(static_cast<std::size_t>(count));
    for (auto& p : lv.parents) p = r.u32();
    levels.push_back(std::move(lv));
  }
  if (!r.at_end()) throw FormatError("gmra file: trailing bytes");
  return Gmra(n_dim, d, std::move(levels), params);
}

}  // namespace onebit
