#pragma once

#include "onebit/common.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace onebit {

using Rng = std::mt19937_64;

/// One SplitMix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent seed from a master seed and a path of counters.
/// Every random draw in the harness is keyed this way, so any sweep point
/// can be recomputed in isolation.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

Vector gaussian_vector(Rng& rng, Index n);
Matrix gaussian_matrix(Rng& rng, Index rows, Index cols);

}  // namespace onebit
