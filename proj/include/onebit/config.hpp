#pragma once

// Experiment configuration and its key = value text form.

#include "onebit/ensemble.hpp"
#include "onebit/manifold.hpp"
#include "onebit/quantizer.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace onebit {

struct ExperimentConfig {
  Index ambient_dim = 20;
  ManifoldSpec manifold{};
  Index n_train = 20000;
  Index n_test = 100;
  std::vector<int> levels{6, 12};
  int gmra_jmax = -1;  // -1: deepest requested level
  std::vector<QuantizerSpec> schemes{SigmaDelta{2}, SigmaDelta{4}};
  Index p = 10;
  std::vector<Index> lambdas{5, 9, 17, 33, 65, 129, 257, 513, 1025};
  EnsembleKind ensemble = EnsembleKind::Gaussian;
  std::uint64_t seed = 1;
  double margin = 0.05;
  std::filesystem::path output;
  std::filesystem::path gmra_file;  // load instead of building when set
  bool record_timing = false;

  int effective_jmax() const;
  /// Throws InvalidArgument naming the first inconsistency.
  void validate() const;
};

/// "msq", "sd:2", "sd:4:filtered", "beta:1.5". β-schemes take their block
/// count from p.
QuantizerSpec parse_scheme(std::string_view text, Index p);
std::string format_scheme(const QuantizerSpec& spec);

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& cfg);

}  // namespace onebit
