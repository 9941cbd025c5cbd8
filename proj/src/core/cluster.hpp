// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optimize.hpp"
#include "types.hpp"

namespace vf {

enum class PostStep { merge, refit };

struct ClusterConfig {
  PostStep post_step = PostStep::merge;
  double stiffness_drop = 1e-6;  // elements with mu_j <= this are discarded before binning
  /// When set, every bin below this decade is clamped into one bucket
  /// (e.g. 0 pools all relaxation times in [0, 1)).
  std::optional<int> min_decade;
  void validate() const;
};

struct ClusterBin {
  int decade;  // tau in [10^decade, 10^(decade+1))
  std::vector<MaxwellElement> members;
};

struct ClusterReport {
  std::vector<ClusterBin> bins;  // ascending by decade, dropped members excluded
  MaterialModel merged;          // one element per bin (or the refit winner)
  std::size_t count = 0;         // n, the recovered number of elements
  bool refit_used = false;
  double residual_before = 0.0;  // fitted N-element model on the data
  double residual_after = 0.0;   // reported model on the data
  std::vector<std::string> warnings;
  std::optional<FitResult> refit;  // present when post_step was refit
};

/// Decade index k with tau in [10^k, 10^(k+1)).
int decade_of(double tau);

/// Drops negligible elements, then groups the rest by decade.
std::vector<ClusterBin> assign_bins(const MaterialModel& mdl, const ClusterConfig& cfg);

/// Stiffness-weighted merge: mu = sum mu_j, tau = sum (mu_j/mu) tau_j.
MaxwellElement merge_bin(std::span<const MaxwellElement> members);

/// Full post-fit step: bin, merge, optionally refit at the recovered count with
/// starts seeded around the merged parameters; returns the lower-cost model.
ClusterReport cluster(const FitResult& fit, const StressDataset& d, const ClusterConfig& cfg,
                      const FitConfig& fit_cfg, int threads = 1);

}  // namespace vf
