// SPDX-License-Identifier: Apache-2.0
#include "cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rng.hpp"

namespace vf {

void ClusterConfig::validate() const {
  if (!(stiffness_drop >= 0.0) || !std::isfinite(stiffness_drop)) {
    throw Error(errc::config, "cluster: stiffness drop threshold must be >= 0");
  }
}

int decade_of(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(errc::argument, "cluster: relaxation time must be strictly positive");
  }
  int k = static_cast<int>(std::floor(std::log10(tau)));
  // repair boundary rounding so that [10^k, 10^(k+1)) is half-open exactly
  if (tau < std::pow(10.0, k)) --k;
  if (tau >= std::pow(10.0, k + 1)) ++k;
  return k;
}

std::vector<ClusterBin> assign_bins(const MaterialModel& mdl, const ClusterConfig& cfg) {
  cfg.validate();
  std::map<int, ClusterBin> bins;
  for (const auto& e : mdl.elements()) {
    if (e.stiffness <= cfg.stiffness_drop) continue;
    int k = decade_of(e.relaxation_time);
    if (cfg.min_decade && k < *cfg.min_decade) k = *cfg.min_decade - 1;
    auto [it, inserted] = bins.try_emplace(k, ClusterBin{k, {}});
    it->second.members.push_back(e);
  }
  std::vector<ClusterBin> out;
  out.reserve(bins.size());
  for (auto& [k, bin] : bins) out.push_back(std::move(bin));
  return out;
}

MaxwellElement merge_bin(std::span<const MaxwellElement> members) {
  if (members.empty()) throw Error(errc::argument, "cluster: cannot merge an empty bin");
  double total = 0.0;
  for (const auto& e : members) total += e.stiffness;
  if (total <= 0.0) {
    throw Error(errc::argument,
                "cluster: all stiffnesses in the bin are zero; weighted mean undefined");
  }
  double tau = 0.0;
  for (const auto& e : members) tau += (e.stiffness / total) * e.relaxation_time;
  return {total, tau};
}

ClusterReport cluster(const FitResult& fit, const StressDataset& d, const ClusterConfig& cfg,
                      const FitConfig& fit_cfg, int threads) {
  cfg.validate();
  fit_cfg.validate();
  d.validate();

  ClusterReport report;
  report.residual_before = residual_norm2(fit.model, d);

  auto bins = assign_bins(fit.model, cfg);
  std::vector<MaxwellElement> merged;
  for (auto it = bins.begin(); it != bins.end();) {
    double total = 0.0;
    for (const auto& e : it->members) total += e.stiffness;
    if (total <= 0.0) {
      report.warnings.push_back("dropped decade " + std::to_string(it->decade) +
                                ": all member stiffnesses are zero");
      it = bins.erase(it);
      continue;
    }
    merged.push_back(merge_bin(it->members));
    ++it;
  }
  report.bins = std::move(bins);
  report.count = merged.size();
  MaterialModel merged_model(fit.model.base_stiffness(), merged);
  report.merged = merged_model;
  report.residual_after = residual_norm2(merged_model, d);

  if (cfg.post_step == PostStep::refit && report.count > 0) {
    FitConfig refit_cfg = fit_cfg;
    refit_cfg.max_elements = static_cast<int>(report.count);
    refit_cfg.seed = splitmix64(fit_cfg.seed ^ 0x5eedULL);

    // half the budget explores around the merged parameters, the rest stays global
    const int jittered = std::max(1, refit_cfg.start_count / 2);
    GaussianSampler rng(refit_cfg.seed);
    std::vector<MaterialModel> seeds;
    seeds.reserve(static_cast<std::size_t>(jittered));
    seeds.push_back(merged_model);
    const auto bounds = fit.resolved_bounds;
    for (int s = 1; s < jittered; ++s) {
      auto jitter = [&](double v) { return v * (1.0 + 0.2 * (2.0 * rng.uniform_open() - 1.0)); };
      std::vector<MaxwellElement> elems;
      for (const auto& e : merged_model.elements()) {
        elems.push_back({std::min(jitter(e.stiffness), bounds.mu_max),
                         std::clamp(jitter(e.relaxation_time), bounds.tau_min, bounds.tau_max)});
      }
      seeds.emplace_back(std::min(jitter(merged_model.base_stiffness()), bounds.mu_max),
                         std::move(elems));
    }
    FitResult refit = multistart_fit(d, refit_cfg, seeds, threads);
    const double merged_cost = regularized_cost(merged_model, d, fit_cfg.regularizer);
    if (refit.cost < merged_cost) {
      report.merged = refit.model;
      report.residual_after = refit.residual;
      report.refit_used = true;
    }
    report.refit = std::move(refit);
  }
  return report;
}

}  // namespace vf
