// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "types.hpp"

namespace vf {

struct DatasetMeta {
  std::optional<LoadingProgram> program;
  std::optional<std::uint64_t> seed;   // RNG seed, present once noise was applied
  double target_noise_rel = 0.0;       // requested delta_rel
  double achieved_noise_rel = 0.0;     // ||sigma - sigma^d|| / ||sigma^d||
  std::optional<MaterialModel> truth;  // generating model, when synthetic
};

/// Stress-time samples plus provenance. Times are strictly increasing.
struct StressDataset {
  std::vector<double> times;
  std::vector<double> stresses;
  DatasetMeta meta;

  std::size_t size() const { return times.size(); }
  bool noisy() const { return meta.target_noise_rel > 0.0 || meta.achieved_noise_rel > 0.0; }
  void validate() const;
};

struct NoiseSpec {
  double target_rel = 0.0;
  std::uint64_t seed = 0;
};

/// Exact stresses of `mdl` on the uniform grid with m+1 nodes over the program horizon.
StressDataset simulate_dataset(const MaterialModel& mdl, const LoadingProgram& p, std::size_t m);

/// Adds seeded i.i.d. Gaussian noise scaled so that ||sigma - sigma^d||_2 equals
/// target_rel * ||sigma||_2 exactly; records the achieved relative level
/// (measured against the noisy vector, the paper's convention) in the metadata.
StressDataset add_noise(const StressDataset& d, const NoiseSpec& spec);

/// Keeps samples with t <= t_cut. The ramp must stay fully contained.
StressDataset truncate(const StressDataset& d, double t_cut);

/// CSV with header "t,sigma", LF line endings; metadata in a "*.meta.json" sidecar.
StressDataset read_dataset(const std::string& path);
void write_dataset(const StressDataset& d, const std::string& path);

}  // namespace vf
