#pragma once

// End-to-end sweeps: sample a manifold, build its GMRA, and for every
// (scheme, level, λ) measure, quantize and reconstruct the test points.

#include "onebit/config.hpp"
#include "onebit/gmra.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace onebit {

struct ResultRow {
  std::string scheme;      // "msq", "sigma_delta" or "beta"
  double r_or_beta = 0.0;  // ΣΔ order, β, or 0 for MSQ
  int j = 0;
  Index p = 0;
  Index lambda = 0;
  Index m = 0;
  std::string ensemble;
  std::uint64_t seed = 0;  // ensemble seed of this sweep point
  double mean_rel_err = 0.0;
  double median_rel_err = 0.0;
  double max_rel_err = 0.0;
  double wall_ms = 0.0;
  std::vector<double> errors;  // per test point, in test-set order
};

/// Seed streams under the master seed.
enum class SeedStream : std::uint64_t { Embedding = 0, Train = 1, Test = 2, Gmra = 3, Ensemble = 4 };

struct ExperimentData {
  PointMatrix train;
  PointMatrix test;
  Gmra gmra;
};

/// Samples train/test clouds through one shared embedding and builds (or
/// loads) the GMRA.
ExperimentData prepare_experiment(const ExperimentConfig& cfg);

/// Failed sweep points are reported on `log` and left out; the rest still run.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const ExperimentData& data, int threads = 1,
                                      std::ostream* log = nullptr, std::size_t* failures = nullptr);
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, int threads = 1, std::ostream* log = nullptr,
                                      std::size_t* failures = nullptr);

inline constexpr const char* kCsvHeader =
    "scheme,r_or_beta,j,p,lambda,m,ensemble,seed,mean_rel_err,median_rel_err,max_rel_err,wall_ms";

std::string format_csv(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

}  // namespace onebit
