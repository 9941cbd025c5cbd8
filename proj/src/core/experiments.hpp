// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "cluster.hpp"
#include "dataset.hpp"
#include "optimize.hpp"
#include "report.hpp"
#include "types.hpp"

namespace vf {

/// Noisy-replica sweep: replica k perturbs the exact dataset with seed base_seed+k
/// and runs fit+cluster once per configured variant (matched seeds across variants).
struct SweepSpec {
  int replicas = 100;
  std::uint64_t base_seed = 1;
  double noise_rel = 0.01;
  LoadingProgram program;
  MaterialModel truth;
  std::size_t grid_intervals = 1000;
  std::vector<FitConfig> fits;  // one per regularizer variant under comparison
  ClusterConfig cluster;
  int threads = 0;
  void validate() const;
};

struct RateComparisonSpec {
  MaterialModel truth;
  std::vector<double> rates{1.0, 10.0};
  double max_strain = 20.0;
  double horizon = 100.0;
  std::size_t grid_intervals = 1000;
  double noise_rel = 0.01;
  int replicas = 4;
  std::uint64_t base_seed = 1;
  FitConfig fit;
  ClusterConfig cluster;
  int threads = 0;
  void validate() const;
};

struct TruncationSpec {
  MaterialModel truth;
  std::vector<double> rates{1.0, 10.0};
  double max_strain = 20.0;
  double full_horizon = 100.0;
  std::size_t grid_intervals = 1000;
  double noise_rel = 0.01;
  std::uint64_t seed = 1;
  std::vector<double> horizons;  // empty -> full_horizon down to 25 in steps of 5
  FitConfig fit;
  ClusterConfig cluster;
  int threads = 0;
  double stiffness_band = 0.02;  // conclusive-identification bands, relative
  double tau_band = 0.10;
  void validate() const;
};

/// Simulate -> fit at the element budget -> cluster; reports parameters and
/// residuals before and after clustering.
Report run_exact_recovery(const MaterialModel& truth, const LoadingProgram& program,
                          std::size_t grid_intervals, const FitConfig& fit_cfg,
                          const ClusterConfig& cluster_cfg, int threads = 0);

Report run_noise_sweep(const SweepSpec& spec);

/// Same engine as run_noise_sweep but requires at least two variants and adds
/// the spread/bias comparison of the clustered tau estimates.
Report run_regularizer_comparison(const SweepSpec& spec);

Report run_rate_comparison(const RateComparisonSpec& spec);

Report run_truncation_study(const TruncationSpec& spec);

/// Matches the clustered elements of `model` onto the truth decades; returns
/// one entry per truth element (NaN stiffness/time when the decade is empty).
std::vector<MaxwellElement> match_to_truth(const MaterialModel& model,
                                           const MaterialModel& truth,
                                           const ClusterConfig& cfg);

}  // namespace vf
