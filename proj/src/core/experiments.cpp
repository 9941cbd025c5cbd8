// SPDX-License-Identifier: Apache-2.0
#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "json_io.hpp"
#include "parallel.hpp"
#include "rheology.hpp"
#include "stats.hpp"

namespace vf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string variant_name(const FitConfig& cfg) {
  switch (cfg.regularizer.kind) {
    case RegularizerKind::none: return "none";
    case RegularizerKind::tikhonov_full: return "tikhonov_full";
    case RegularizerKind::first_stiffness: return "first_stiffness";
  }
  return "none";
}

std::vector<std::string> replica_columns(std::size_t truth_elements) {
  std::vector<std::string> cols{"seed", "n", "residual", "mu"};
  for (std::size_t k = 1; k <= truth_elements; ++k) {
    cols.push_back("mu" + std::to_string(k));
    cols.push_back("tau" + std::to_string(k));
  }
  return cols;
}

nlohmann::json column_stats(const std::vector<double>& values) {
  nlohmann::json j;
  j["median"] = median(values);
  j["q25"] = quantile(values, 0.25);
  j["q75"] = quantile(values, 0.75);
  j["iqr"] = interquartile_range(values);
  std::size_t present = 0;
  for (double v : values) {
    if (!std::isnan(v)) ++present;
  }
  j["count"] = present;
  return j;
}

// JSON cannot carry NaN; encode as null.
nlohmann::json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

nlohmann::json sweep_variant_summary(const Table& replicas, std::size_t truth_elements) {
  nlohmann::json j;
  for (const auto& col : replicas.columns) {
    if (col == "seed") continue;
    j[col] = column_stats(replicas.column(col));
  }
  if (truth_elements >= 1) {
    j["spearman_mu1_tau1"] =
        num_or_null(spearman(replicas.column("mu1"), replicas.column("tau1")));
  }
  return j;
}

struct ReplicaOutcome {
  std::uint64_t seed = 0;
  double n = kNaN;
  double residual = kNaN;
  double mu = kNaN;
  std::vector<MaxwellElement> matched;  // one per truth element
};

ReplicaOutcome fit_and_cluster_once(const StressDataset& noisy, const MaterialModel& truth,
                                    const FitConfig& fit_cfg, const ClusterConfig& cluster_cfg,
                                    std::uint64_t seed) {
  ReplicaOutcome out;
  out.seed = seed;
  FitConfig cfg = fit_cfg;
  cfg.seed = seed;  // the replica seed also steers the start sequence
  const FitResult fit = multistart_fit(noisy, cfg, 1);
  const ClusterReport rep = cluster(fit, noisy, cluster_cfg, cfg, 1);
  out.n = static_cast<double>(rep.count);
  out.residual = rep.residual_after;
  out.mu = rep.merged.base_stiffness();
  out.matched = match_to_truth(rep.merged, truth, cluster_cfg);
  return out;
}

std::vector<double> outcome_row(const ReplicaOutcome& o) {
  std::vector<double> row{static_cast<double>(o.seed), o.n, o.residual, o.mu};
  for (const auto& e : o.matched) {
    row.push_back(e.stiffness);
    row.push_back(e.relaxation_time);
  }
  return row;
}

Report sweep_engine(const SweepSpec& spec, const std::string& report_name) {
  spec.validate();
  const auto base = simulate_dataset(spec.truth, spec.program, spec.grid_intervals);
  const std::size_t nvar = spec.fits.size();
  const auto reps = static_cast<std::size_t>(spec.replicas);
  const std::size_t truth_n = spec.truth.element_count();

  std::vector<std::string> names(nvar);
  {
    std::set<std::string> used;
    for (std::size_t v = 0; v < nvar; ++v) {
      std::string name = variant_name(spec.fits[v]);
      while (used.count(name)) name += "_";
      used.insert(name);
      names[v] = name;
    }
  }

  std::vector<std::vector<ReplicaOutcome>> outcomes(nvar,
                                                    std::vector<ReplicaOutcome>(reps));
  parallel_for(nvar * reps, spec.threads, [&](std::size_t item) {
    const std::size_t v = item / reps;
    const std::size_t k = item % reps;
    const std::uint64_t seed = spec.base_seed + k;
    const auto noisy = add_noise(base, {spec.noise_rel, seed});
    outcomes[v][k] = fit_and_cluster_once(noisy, spec.truth, spec.fits[v], spec.cluster, seed);
  });

  Report report;
  report.name = report_name;
  report.config = sweep_spec_to_json(spec);
  report.config_hash = config_hash_hex(report.config);

  nlohmann::json variants_summary;
  for (std::size_t v = 0; v < nvar; ++v) {
    Table t;
    t.name = "replicas." + names[v];
    t.columns = replica_columns(truth_n);
    for (const auto& o : outcomes[v]) t.add_row(outcome_row(o));
    variants_summary[names[v]] = sweep_variant_summary(t, truth_n);
    report.tables.push_back(std::move(t));

    if (truth_n >= 1) {
      Table scatter;
      scatter.name = "scatter.first_element." + names[v];
      scatter.columns = {"tau1", "mu1"};
      for (const auto& o : outcomes[v]) {
        scatter.add_row({o.matched[0].relaxation_time, o.matched[0].stiffness});
      }
      report.tables.push_back(std::move(scatter));
    }
  }

  if (truth_n >= 1) {
    auto box_table = [&](const std::string& param, auto&& getter) {
      Table t;
      t.name = "box." + param;
      t.label_column = "variant";
      t.columns = {param};
      for (std::size_t v = 0; v < nvar; ++v) {
        for (const auto& o : outcomes[v]) t.add_row(names[v], {getter(o)});
      }
      report.tables.push_back(std::move(t));
    };
    box_table("tau1", [](const ReplicaOutcome& o) { return o.matched.front().relaxation_time; });
    if (truth_n >= 2) {
      box_table("tau" + std::to_string(truth_n),
                [](const ReplicaOutcome& o) { return o.matched.back().relaxation_time; });
    }
  }

  report.summary["variants"] = variants_summary;
  report.summary["replicas"] = spec.replicas;
  report.summary["noise_rel"] = spec.noise_rel;
  return report;
}

void model_table(Table& t, const MaterialModel& m) {
  t.columns = {"j", "stiffness", "relaxation_time"};
  t.add_row({0.0, m.base_stiffness(), kNaN});
  for (std::size_t j = 0; j < m.element_count(); ++j) {
    t.add_row({static_cast<double>(j + 1), m.elements()[j].stiffness,
               m.elements()[j].relaxation_time});
  }
}

}  // namespace

void SweepSpec::validate() const {
  if (replicas < 1) throw Error(errc::config, "sweep: replica count must be >= 1");
  if (!(noise_rel >= 0.0)) throw Error(errc::config, "sweep: noise level must be >= 0");
  if (fits.empty()) throw Error(errc::config, "sweep: need at least one fit configuration");
  program.validate();
  for (const auto& f : fits) f.validate();
  cluster.validate();
}

void RateComparisonSpec::validate() const {
  if (rates.empty()) throw Error(errc::config, "rate comparison: need at least one rate");
  if (replicas < 0) throw Error(errc::config, "rate comparison: replica count must be >= 0");
  if (!(noise_rel >= 0.0)) throw Error(errc::config, "rate comparison: noise level must be >= 0");
  for (double r : rates) {
    LoadingProgram p{r, max_strain, horizon};
    p.validate();  // every rate must finish its ramp within the horizon
  }
  fit.validate();
  cluster.validate();
}

void TruncationSpec::validate() const {
  if (rates.empty()) throw Error(errc::config, "truncation study: need at least one rate");
  if (!(noise_rel >= 0.0)) throw Error(errc::config, "truncation study: noise level must be >= 0");
  for (double r : rates) {
    LoadingProgram p{r, max_strain, full_horizon};
    p.validate();
    for (double T : horizons) {
      if (!(T > p.ramp_end())) {
        throw Error(errc::config, "truncation study: horizon " + std::to_string(T) +
                                      " does not contain the ramp at rate " + std::to_string(r));
      }
      if (T > full_horizon) {
        throw Error(errc::config, "truncation study: horizon exceeds the full duration");
      }
    }
  }
  fit.validate();
  cluster.validate();
}

std::vector<MaxwellElement> match_to_truth(const MaterialModel& model,
                                           const MaterialModel& truth,
                                           const ClusterConfig& cfg) {
  // normalize: bin + merge the candidate model so each decade holds one element
  auto bins = assign_bins(model, cfg);
  std::vector<MaxwellElement> merged;
  for (const auto& b : bins) {
    double total = 0.0;
    for (const auto& e : b.members) total += e.stiffness;
    if (total <= 0.0) continue;
    merged.push_back(merge_bin(b.members));
  }

  // Greedy nearest-log-time assignment. Runaway estimates still count for the
  // slot they came from (the paper records pairs like (66.75, 0.0127) as the
  // first element), so the cap is generous: two decades.
  constexpr double kMaxLogDistance = 2.0;
  const std::size_t slots = truth.element_count();
  std::vector<MaxwellElement> out(slots, MaxwellElement{kNaN, kNaN});
  std::vector<bool> slot_used(slots, false), cand_used(merged.size(), false);
  for (;;) {
    double best = kMaxLogDistance;
    std::size_t bs = slots, bc = merged.size();
    for (std::size_t s = 0; s < slots; ++s) {
      if (slot_used[s]) continue;
      const double wanted = std::log10(truth.elements()[s].relaxation_time);
      for (std::size_t c = 0; c < merged.size(); ++c) {
        if (cand_used[c]) continue;
        const double dist = std::abs(std::log10(merged[c].relaxation_time) - wanted);
        if (dist <= best) {
          best = dist;
          bs = s;
          bc = c;
        }
      }
    }
    if (bs == slots) break;
    slot_used[bs] = true;
    cand_used[bc] = true;
    out[bs] = merged[bc];
  }
  return out;
}

Report run_exact_recovery(const MaterialModel& truth, const LoadingProgram& program,
                          std::size_t grid_intervals, const FitConfig& fit_cfg,
                          const ClusterConfig& cluster_cfg, int threads) {
  fit_cfg.validate();
  cluster_cfg.validate();
  const auto data = simulate_dataset(truth, program, grid_intervals);
  const FitResult fit = multistart_fit(data, fit_cfg, threads);
  const ClusterReport rep = cluster(fit, data, cluster_cfg, fit_cfg, threads);

  Report report;
  report.name = "exact_recovery";
  report.config = {{"truth", model_to_json(truth)},
                   {"program", program_to_json(program)},
                   {"grid_intervals", grid_intervals},
                   {"fit", fit_config_to_json(fit_cfg)},
                   {"cluster", cluster_config_to_json(cluster_cfg)}};
  report.config_hash = config_hash_hex(report.config);

  Table pre;
  pre.name = "table.prefit_elements";
  model_table(pre, fit.model);
  report.tables.push_back(std::move(pre));

  Table post;
  post.name = "table.clustered_elements";
  model_table(post, rep.merged);
  report.tables.push_back(std::move(post));

  Table curves;
  curves.name = "curves.fit";
  curves.columns = {"t", "data", "fit"};
  const auto fitted = stress_series(rep.merged, program, data.times);
  for (std::size_t i = 0; i < data.size(); ++i) {
    curves.add_row({data.times[i], data.stresses[i], fitted[static_cast<Eigen::Index>(i)]});
  }
  report.tables.push_back(std::move(curves));

  report.summary["residual_best"] = fit.residual;
  report.summary["cost_best"] = fit.cost;
  report.summary["n"] = rep.count;
  report.summary["residual_after_cluster"] = rep.residual_after;
  report.summary["refit_used"] = rep.refit_used;
  report.summary["clustered_model"] = model_to_json(rep.merged);
  report.summary["prefit_model"] = model_to_json(fit.model);
  report.summary["warnings"] = rep.warnings;
  return report;
}

Report run_noise_sweep(const SweepSpec& spec) { return sweep_engine(spec, "noise_sweep"); }

Report run_regularizer_comparison(const SweepSpec& spec) {
  if (spec.fits.size() < 2) {
    throw Error(errc::config, "regularizer comparison: need at least two fit variants");
  }
  Report report = sweep_engine(spec, "regularizer_comparison");

  // spread of the smallest relaxation time and bias of the largest one
  nlohmann::json iqr_tau1, median_last;
  const std::size_t truth_n = spec.truth.element_count();
  const std::string last = "tau" + std::to_string(truth_n);
  for (const auto& t : report.tables) {
    if (t.name.rfind("replicas.", 0) != 0) continue;
    const std::string variant = t.name.substr(std::string("replicas.").size());
    if (truth_n >= 1) iqr_tau1[variant] = num_or_null(interquartile_range(t.column("tau1")));
    if (truth_n >= 2) median_last[variant] = num_or_null(median(t.column(last)));
  }
  report.summary["iqr_tau1"] = iqr_tau1;
  report.summary["median_" + last] = median_last;
  return report;
}

Report run_rate_comparison(const RateComparisonSpec& spec) {
  spec.validate();

  Report report;
  report.name = "rate_comparison";
  report.config = rate_spec_to_json(spec);
  report.config_hash = config_hash_hex(report.config);

  const TimeGrid grid{spec.grid_intervals, spec.horizon};
  const auto nodes = grid.nodes();
  const std::size_t truth_n = spec.truth.element_count();

  Table strain_curves;
  strain_curves.name = "curves.strain";
  Table stress_curves;
  stress_curves.name = "curves.stress";
  strain_curves.columns = {"t"};
  stress_curves.columns = {"t"};
  std::vector<std::string> rate_labels;
  for (double r : spec.rates) {
    rate_labels.push_back("rate" + trim_number(r));
    strain_curves.columns.push_back("eta=" + trim_number(r));
    stress_curves.columns.push_back("eta=" + trim_number(r));
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::vector<double> srow{nodes[i]}, crow{nodes[i]};
    for (double r : spec.rates) {
      const LoadingProgram p{r, spec.max_strain, spec.horizon};
      srow.push_back(strain_at(p, nodes[i]));
      crow.push_back(total_stress_at(spec.truth, p, nodes[i]));
    }
    strain_curves.add_row(srow);
    stress_curves.add_row(crow);
  }
  report.tables.push_back(std::move(strain_curves));
  report.tables.push_back(std::move(stress_curves));

  Table maxima;
  maxima.name = "table.decomposition_maxima";
  maxima.label_column = "rate";
  for (std::size_t k = 1; k <= truth_n; ++k) maxima.columns.push_back("sigma" + std::to_string(k));
  nlohmann::json maxima_summary;
  for (std::size_t ri = 0; ri < spec.rates.size(); ++ri) {
    const double r = spec.rates[ri];
    const LoadingProgram p{r, spec.max_strain, spec.horizon};
    std::vector<double> row;
    nlohmann::json jrow;
    for (std::size_t k = 0; k < truth_n; ++k) {
      const double peak = element_stress_at(spec.truth.elements()[k], p, p.ramp_end());
      row.push_back(peak);
      jrow["sigma" + std::to_string(k + 1)] = peak;
    }
    maxima.add_row(rate_labels[ri], row);
    maxima_summary[rate_labels[ri]] = jrow;

    Table decomp;
    decomp.name = "curves.decomposition." + rate_labels[ri];
    decomp.columns = {"t", "sigma0"};
    for (std::size_t k = 1; k <= truth_n; ++k) decomp.columns.push_back("sigma" + std::to_string(k));
    const auto parts = stress_decomposition(spec.truth, p, grid);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      std::vector<double> row2{nodes[i]};
      for (const auto& part : parts) row2.push_back(part[static_cast<Eigen::Index>(i)]);
      decomp.add_row(row2);
    }
    report.tables.push_back(std::move(decomp));
  }
  report.tables.push_back(std::move(maxima));
  report.summary["decomposition_maxima"] = maxima_summary;

  bool monotone = true;
  for (std::size_t k = 0; k < truth_n; ++k) {
    for (std::size_t ri = 1; ri < spec.rates.size(); ++ri) {
      if (spec.rates[ri] <= spec.rates[ri - 1]) continue;
      const LoadingProgram lo{spec.rates[ri - 1], spec.max_strain, spec.horizon};
      const LoadingProgram hi{spec.rates[ri], spec.max_strain, spec.horizon};
      if (!(element_stress_at(spec.truth.elements()[k], hi, hi.ramp_end()) >
            element_stress_at(spec.truth.elements()[k], lo, lo.ramp_end()))) {
        monotone = false;
      }
    }
  }
  report.summary["maxima_increase_with_rate"] = monotone;

  if (spec.replicas > 0 && spec.noise_rel > 0.0) {
    const auto reps = static_cast<std::size_t>(spec.replicas);
    std::vector<std::vector<ReplicaOutcome>> outcomes(spec.rates.size(),
                                                      std::vector<ReplicaOutcome>(reps));
    parallel_for(spec.rates.size() * reps, spec.threads, [&](std::size_t item) {
      const std::size_t ri = item / reps;
      const std::size_t k = item % reps;
      const LoadingProgram p{spec.rates[ri], spec.max_strain, spec.horizon};
      const auto base = simulate_dataset(spec.truth, p, spec.grid_intervals);
      const std::uint64_t seed = spec.base_seed + k;
      const auto noisy = add_noise(base, {spec.noise_rel, seed});
      outcomes[ri][k] = fit_and_cluster_once(noisy, spec.truth, spec.fit, spec.cluster, seed);
    });
    nlohmann::json fits_summary;
    for (std::size_t ri = 0; ri < spec.rates.size(); ++ri) {
      Table t;
      t.name = "replicas." + rate_labels[ri];
      t.columns = replica_columns(truth_n);
      for (const auto& o : outcomes[ri]) t.add_row(outcome_row(o));
      fits_summary[rate_labels[ri]] = sweep_variant_summary(t, truth_n);
      report.tables.push_back(std::move(t));
    }
    report.summary["noisy_fits"] = fits_summary;
  }
  return report;
}

Report run_truncation_study(const TruncationSpec& spec) {
  TruncationSpec s = spec;
  if (s.horizons.empty()) {
    for (double T = s.full_horizon; T >= 25.0 - 1e-9; T -= 5.0) s.horizons.push_back(T);
  }
  s.validate();
  std::sort(s.horizons.begin(), s.horizons.end());

  Report report;
  report.name = "truncation_study";
  report.config = truncation_spec_to_json(s);
  report.config_hash = config_hash_hex(report.config);

  const std::size_t truth_n = s.truth.element_count();
  const std::size_t n_T = s.horizons.size();

  std::vector<std::vector<ReplicaOutcome>> outcomes(s.rates.size(),
                                                    std::vector<ReplicaOutcome>(n_T));
  std::vector<StressDataset> noisy_full;
  noisy_full.reserve(s.rates.size());
  for (double r : s.rates) {
    const LoadingProgram p{r, s.max_strain, s.full_horizon};
    noisy_full.push_back(
        add_noise(simulate_dataset(s.truth, p, s.grid_intervals), {s.noise_rel, s.seed}));
  }
  parallel_for(s.rates.size() * n_T, s.threads, [&](std::size_t item) {
    const std::size_t ri = item / n_T;
    const std::size_t ti = item % n_T;
    const auto shortened = truncate(noisy_full[ri], s.horizons[ti]);
    outcomes[ri][ti] =
        fit_and_cluster_once(shortened, s.truth, s.fit, s.cluster, s.seed);
  });

  std::vector<std::string> rate_labels;
  for (double r : s.rates) rate_labels.push_back("rate" + trim_number(r));

  for (std::size_t ri = 0; ri < s.rates.size(); ++ri) {
    Table t;
    t.name = "table.estimates." + rate_labels[ri];
    t.columns = {"T"};
    const auto rest = replica_columns(truth_n);
    for (std::size_t c = 1; c < rest.size(); ++c) t.columns.push_back(rest[c]);
    for (std::size_t ti = 0; ti < n_T; ++ti) {
      auto row = outcome_row(outcomes[ri][ti]);
      row[0] = s.horizons[ti];  // the seed column becomes the horizon
      t.add_row(row);
    }
    report.tables.push_back(std::move(t));
  }

  // focus parameters: base stiffness plus every (mu_k, tau_k)
  std::vector<std::string> params{"mu"};
  std::vector<double> truth_values{s.truth.base_stiffness()};
  std::vector<double> bands{s.stiffness_band};
  for (std::size_t k = 0; k < truth_n; ++k) {
    params.push_back("mu" + std::to_string(k + 1));
    truth_values.push_back(s.truth.elements()[k].stiffness);
    bands.push_back(s.stiffness_band);
    params.push_back("tau" + std::to_string(k + 1));
    truth_values.push_back(s.truth.elements()[k].relaxation_time);
    bands.push_back(s.tau_band);
  }

  auto estimate_of = [&](std::size_t ri, std::size_t ti, const std::string& param) {
    const auto& o = outcomes[ri][ti];
    if (param == "mu") return o.mu;
    for (std::size_t k = 0; k < truth_n; ++k) {
      if (param == "mu" + std::to_string(k + 1)) return o.matched[k].stiffness;
      if (param == "tau" + std::to_string(k + 1)) return o.matched[k].relaxation_time;
    }
    return kNaN;
  };

  nlohmann::json conclusive;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Table trend;
    trend.name = "trend." + params[pi];
    trend.columns = {"T"};
    for (const auto& rl : rate_labels) trend.columns.push_back(rl);
    trend.columns.push_back("truth");
    for (std::size_t ti = 0; ti < n_T; ++ti) {
      std::vector<double> row{s.horizons[ti]};
      for (std::size_t ri = 0; ri < s.rates.size(); ++ri) {
        row.push_back(estimate_of(ri, ti, params[pi]));
      }
      row.push_back(truth_values[pi]);
      trend.add_row(row);
    }
    report.tables.push_back(std::move(trend));

    nlohmann::json per_rate;
    for (std::size_t ri = 0; ri < s.rates.size(); ++ri) {
      double threshold = kNaN;
      for (std::size_t ti = n_T; ti-- > 0;) {  // walk from the longest horizon down
        const double est = estimate_of(ri, ti, params[pi]);
        const double rel = std::abs(est - truth_values[pi]) /
                           std::max(std::abs(truth_values[pi]), 1e-300);
        if (std::isnan(est) || rel > bands[pi]) break;
        threshold = s.horizons[ti];
      }
      per_rate[rate_labels[ri]] = num_or_null(threshold);
    }
    conclusive[params[pi]] = per_rate;
  }
  report.summary["conclusive_time"] = conclusive;
  report.summary["stiffness_band"] = s.stiffness_band;
  report.summary["tau_band"] = s.tau_band;
  return report;
}

}  // namespace vf
