#include "onebit/rng.hpp"

namespace onebit {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t tag : path) {
    state = out ^ (tag * 0xD1B54A32D192ED03ULL);
    out = splitmix64(state);
  }
  return out;
}

Vector gaussian_vector(Rng& rng, Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector g(n);
  for (Index i = 0; i < n; ++i) g(i) = normal(rng);
  return g;
}

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(rows, cols);
  // Row-major fill order so a matrix and its first rows agree across shapes.
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = normal(rng);
  return a;
}

}  // namespace onebit
