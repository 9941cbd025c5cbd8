// SPDX-License-Identifier: Apache-2.0
//
// Batch CLI for the viscofit shared library. All numerics go through the C API
// declared in viscofit.h; this file only parses flags, shuttles JSON documents
// and maps statuses onto exit codes (0 ok, 2 config, 3 fit failure, 4 i/o).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "viscofit.h"

namespace {

using nlohmann::json;

int exit_code(vf_status status) {
  switch (status) {
    case VF_OK: return 0;
    case VF_ERROR_ARGUMENT: return 2;
    case VF_ERROR_CONFIG: return 2;
    case VF_ERROR_FIT: return 3;
    case VF_ERROR_IO: return 4;
  }
  return 2;
}

int fail(vf_status status) {
  std::cerr << "error (" << vf_status_name(status) << "): " << vf_last_error() << "\n";
  return exit_code(status);
}

int fail_config(const std::string& message) {
  std::cerr << "error (config error): " << message << "\n";
  return 2;
}

int fail_io(const std::string& message) {
  std::cerr << "error (i/o error): " << message << "\n";
  return 4;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << content;
  return static_cast<bool>(f);
}

struct StringOut {
  char* value = nullptr;
  ~StringOut() { vf_string_free(value); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
};

using ModelHandle = Handle<vf_model, vf_model_free>;
using DatasetHandle = Handle<vf_dataset, vf_dataset_free>;
using FitHandle = Handle<vf_fit_result, vf_fit_result_free>;
using ClusterHandle = Handle<vf_cluster_report, vf_cluster_report_free>;

int load_model(const std::string& path, ModelHandle& model) {
  std::string text;
  if (!read_file(path, text)) return fail_io("cannot read model file '" + path + "'");
  const vf_status st = vf_model_from_json(text.c_str(), model.out());
  return st == VF_OK ? 0 : fail(st);
}

int load_json_file(const std::string& path, json& out) {
  std::string text;
  if (!read_file(path, text)) return fail_io("cannot read '" + path + "'");
  out = json::parse(text, nullptr, false);
  if (out.is_discarded()) return fail_config("'" + path + "' is not valid JSON");
  return 0;
}

std::string canonical_regularizer(const std::string& name) {
  if (name == "tikhonov" || name == "tikhonov_full" || name == "tikhonov-full") {
    return "tikhonov_full";
  }
  if (name == "first-stiffness" || name == "first_stiffness") return "first_stiffness";
  return "none";
}

// Per-subcommand option bag. A value participates in the final JSON config only
// when the flag was given, so file-provided settings are never clobbered.
struct CommonFit {
  int n_max = 5;
  int starts = 40;
  std::string regularizer = "none";
  double lambda = 0.0;
  double tau_min = 1e-2;
  double tau_max = 1e3;
  double mu_max = 0.0;
  int max_iter = 500;

  CLI::Option* n_max_opt = nullptr;
  CLI::Option* starts_opt = nullptr;
  CLI::Option* reg_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* tau_min_opt = nullptr;
  CLI::Option* tau_max_opt = nullptr;
  CLI::Option* mu_max_opt = nullptr;
  CLI::Option* max_iter_opt = nullptr;

  void attach(CLI::App* cmd) {
    n_max_opt = cmd->add_option("--n-max", n_max, "Element budget N for the minimization");
    starts_opt = cmd->add_option("--starts", starts, "Number of multistart points");
    reg_opt = cmd->add_option("--regularizer", regularizer,
                              "Penalty variant: none|tikhonov|first-stiffness");
    lambda_opt = cmd->add_option("--lambda", lambda, "Regularization weight");
    tau_min_opt = cmd->add_option("--tau-min", tau_min, "Lower relaxation-time bound [s]");
    tau_max_opt = cmd->add_option("--tau-max", tau_max, "Upper relaxation-time bound [s]");
    mu_max_opt = cmd->add_option("--mu-max", mu_max,
                                 "Upper stiffness bound [MPa] (0 = auto from data)");
    max_iter_opt = cmd->add_option("--max-iter", max_iter, "Iteration cap per start");
  }

  void overlay(json& cfg) const {
    if (n_max_opt->count()) cfg["max_elements"] = n_max;
    if (starts_opt->count()) cfg["start_count"] = starts;
    if (reg_opt->count()) cfg["regularizer"]["kind"] = canonical_regularizer(regularizer);
    if (lambda_opt->count()) cfg["regularizer"]["lambda"] = lambda;
    if (tau_min_opt->count()) cfg["bounds"]["tau_min"] = tau_min;
    if (tau_max_opt->count()) cfg["bounds"]["tau_max"] = tau_max;
    if (mu_max_opt->count()) cfg["bounds"]["mu_max"] = mu_max;
    if (max_iter_opt->count()) cfg["stopping"]["max_iterations"] = max_iter;
  }

  bool any() const {
    return n_max_opt->count() || starts_opt->count() || reg_opt->count() ||
           lambda_opt->count() || tau_min_opt->count() || tau_max_opt->count() ||
           mu_max_opt->count() || max_iter_opt->count();
  }
};

// flags override the config file field-by-field; untouched fields survive
void merge_program(json& spec, CLI::Option* rate_opt, double rate, CLI::Option* ms_opt,
                   double max_strain, CLI::Option* hz_opt, double horizon) {
  json prog = spec.contains("program") ? spec["program"] : json::object();
  if (rate_opt->count() || !prog.contains("rate")) prog["rate"] = rate;
  if (ms_opt->count() || !prog.contains("max_strain")) prog["max_strain"] = max_strain;
  if (hz_opt->count() || !prog.contains("horizon")) prog["horizon"] = horizon;
  spec["program"] = prog;
}

int emit_report_summary(const StringOut& report) {
  if (report.value != nullptr) std::cout << report.value << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viscofit - generalized Maxwell relaxation simulation and parameter recovery"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  app.add_option("--out-dir", out_dir, "Directory for experiment artifacts")->capture_default_str();
  std::uint64_t seed = 1;
  auto* seed_opt =
      app.add_option("--seed", seed, "Seed for noise and start generation")->capture_default_str();

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "Simulate an exact relaxation dataset");
  std::string sim_model, sim_out = "dataset.csv";
  double sim_rate = 1.0, sim_max_strain = 20.0, sim_horizon = 100.0;
  std::size_t sim_m = 1000;
  simulate->add_option("--model", sim_model, "Material model JSON file")->required();
  simulate->add_option("--rate", sim_rate, "Displacement rate [%/s]")->capture_default_str();
  simulate->add_option("--max-strain", sim_max_strain, "Plateau strain [%]")
      ->capture_default_str();
  simulate->add_option("--horizon", sim_horizon, "Experiment duration [s]")
      ->capture_default_str();
  simulate->add_option("-m,--grid-intervals", sim_m, "Grid intervals (m+1 samples)")
      ->capture_default_str();
  simulate->add_option("--out", sim_out, "Output CSV path")->capture_default_str();

  // ---- add-noise ----
  auto* add_noise = app.add_subcommand("add-noise", "Perturb a dataset at a relative noise level");
  std::string noise_in, noise_out = "noisy.csv";
  double noise_rel = 0.01;
  add_noise->add_option("--in", noise_in, "Input dataset CSV")->required();
  add_noise->add_option("--delta-rel", noise_rel, "Target relative noise level")
      ->capture_default_str();
  add_noise->add_option("--out", noise_out, "Output CSV path")->capture_default_str();

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "Multi-start regularized least-squares fit");
  std::string fit_data, fit_out, fit_config;
  double fit_rate = 0.0, fit_max_strain = 0.0, fit_horizon = 0.0;
  int fit_threads = 0;
  CommonFit fit_opts;
  fit->add_option("--data", fit_data, "Dataset CSV")->required();
  fit->add_option("--config", fit_config, "Fit configuration JSON file");
  fit_opts.attach(fit);
  auto* fit_rate_opt = fit->add_option("--rate", fit_rate, "Loading rate when no sidecar");
  auto* fit_ms_opt = fit->add_option("--max-strain", fit_max_strain,
                                     "Plateau strain when no sidecar");
  auto* fit_hz_opt = fit->add_option("--horizon", fit_horizon, "Horizon when no sidecar");
  fit->add_option("--threads", fit_threads, "Worker threads (0 = all cores)");
  fit->add_option("--out", fit_out, "Fit result JSON path (default: stdout)");

  // ---- cluster ----
  auto* cluster = app.add_subcommand("cluster", "Decade-cluster a fit result");
  std::string cl_fit, cl_data, cl_out, cl_config, cl_post = "merge";
  double cl_drop = 1e-6;
  int cl_min_decade = 0, cl_threads = 0;
  CommonFit cl_fit_opts;
  cluster->add_option("--fit", cl_fit, "Fit result JSON file")->required();
  cluster->add_option("--data", cl_data, "Dataset CSV the fit was computed on")->required();
  cluster->add_option("--config", cl_config, "Cluster configuration JSON file");
  auto* cl_post_opt = cluster->add_option("--post-step", cl_post, "merge|refit");
  auto* cl_drop_opt = cluster->add_option("--drop", cl_drop,
                                          "Discard elements with stiffness <= this");
  auto* cl_min_opt = cluster->add_option("--min-decade", cl_min_decade,
                                         "Pool all decades below this into one bucket");
  cluster->add_option("--threads", cl_threads, "Worker threads for the refit path");
  cl_fit_opts.attach(cluster);
  cluster->add_option("--out", cl_out, "Cluster report JSON path (default: stdout)");

  // ---- decompose ----
  auto* decompose = app.add_subcommand(
      "decompose", "Per-element stress decomposition curves and ramp-end maxima");
  std::string dec_model;
  std::vector<double> dec_rates{10.0};
  double dec_max_strain = 20.0, dec_horizon = 100.0;
  std::size_t dec_m = 1000;
  decompose->add_option("--model", dec_model, "Material model JSON file")->required();
  decompose->add_option("--rate", dec_rates, "Displacement rate(s) [%/s]")->capture_default_str();
  decompose->add_option("--max-strain", dec_max_strain, "Plateau strain [%]")
      ->capture_default_str();
  decompose->add_option("--horizon", dec_horizon, "Experiment duration [s]")
      ->capture_default_str();
  decompose->add_option("-m,--grid-intervals", dec_m, "Grid intervals")->capture_default_str();

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "Noisy-replica sweep with fit+cluster per replica");
  std::string sweep_truth, sweep_config;
  int sweep_replicas = 100, sweep_threads = 0;
  double sweep_rate = 10.0, sweep_max_strain = 20.0, sweep_horizon = 100.0, sweep_delta = 0.01;
  std::size_t sweep_m = 1000;
  std::uint64_t sweep_base_seed = 1;
  CommonFit sweep_fit;
  auto* sweep_truth_opt = sweep->add_option("--truth", sweep_truth, "Truth model JSON file");
  sweep->add_option("--config", sweep_config, "Sweep spec JSON file (flags override it)");
  auto* sweep_rep_opt = sweep->add_option("--replicas", sweep_replicas, "Replica count");
  auto* sweep_rate_opt = sweep->add_option("--rate", sweep_rate, "Displacement rate");
  auto* sweep_ms_opt = sweep->add_option("--max-strain", sweep_max_strain, "Plateau strain");
  auto* sweep_hz_opt = sweep->add_option("--horizon", sweep_horizon, "Duration [s]");
  auto* sweep_m_opt = sweep->add_option("-m,--grid-intervals", sweep_m, "Grid intervals");
  auto* sweep_delta_opt = sweep->add_option("--delta-rel", sweep_delta, "Relative noise level");
  auto* sweep_seed_opt = sweep->add_option("--base-seed", sweep_base_seed,
                                           "Replica k perturbs with seed base+k");
  auto* sweep_threads_opt = sweep->add_option("--threads", sweep_threads, "Worker threads");
  sweep_fit.attach(sweep);

  // ---- compare-reg ----
  auto* compare = app.add_subcommand(
      "compare-reg", "Matched-seed comparison of the three regularizer variants");
  std::string cmp_truth, cmp_config;
  int cmp_replicas = 100, cmp_threads = 0;
  double cmp_rate = 10.0, cmp_max_strain = 20.0, cmp_horizon = 100.0, cmp_delta = 0.01;
  double cmp_lambda = 1e-2;
  std::size_t cmp_m = 1000;
  std::uint64_t cmp_base_seed = 1;
  CommonFit cmp_fit;
  auto* cmp_truth_opt = compare->add_option("--truth", cmp_truth, "Truth model JSON file");
  compare->add_option("--config", cmp_config, "Sweep spec JSON file (flags override it)");
  auto* cmp_rep_opt = compare->add_option("--replicas", cmp_replicas, "Replica count");
  auto* cmp_rate_opt = compare->add_option("--rate", cmp_rate, "Displacement rate");
  auto* cmp_ms_opt = compare->add_option("--max-strain", cmp_max_strain, "Plateau strain");
  auto* cmp_hz_opt = compare->add_option("--horizon", cmp_horizon, "Duration [s]");
  auto* cmp_m_opt = compare->add_option("-m,--grid-intervals", cmp_m, "Grid intervals");
  auto* cmp_delta_opt = compare->add_option("--delta-rel", cmp_delta, "Relative noise level");
  auto* cmp_seed_opt = compare->add_option("--base-seed", cmp_base_seed, "Base noise seed");
  auto* cmp_threads_opt = compare->add_option("--threads", cmp_threads, "Worker threads");
  cmp_fit.attach(compare);  // --lambda sets the weight of both regularized variants

  // ---- truncate-study ----
  auto* trunc = app.add_subcommand("truncate-study",
                                   "Refit repeatedly shortened noisy datasets");
  std::string tr_truth, tr_config;
  std::vector<double> tr_rates{1.0, 10.0};
  double tr_max_strain = 20.0, tr_full = 100.0, tr_delta = 0.01;
  double tr_t_min = 25.0, tr_t_step = 5.0;
  std::size_t tr_m = 1000;
  int tr_threads = 0;
  CommonFit tr_fit;
  auto* tr_truth_opt = trunc->add_option("--truth", tr_truth, "Truth model JSON file");
  trunc->add_option("--config", tr_config, "Truncation spec JSON file (flags override it)");
  auto* tr_rates_opt = trunc->add_option("--rates", tr_rates, "Displacement rates to compare");
  auto* tr_ms_opt = trunc->add_option("--max-strain", tr_max_strain, "Plateau strain");
  auto* tr_full_opt = trunc->add_option("--full-horizon", tr_full, "Full duration [s]");
  auto* tr_tmin_opt = trunc->add_option("--t-min", tr_t_min, "Shortest horizon [s]");
  auto* tr_tstep_opt = trunc->add_option("--t-step", tr_t_step, "Shortening step [s]");
  auto* tr_m_opt = trunc->add_option("-m,--grid-intervals", tr_m, "Grid intervals (full set)");
  auto* tr_delta_opt = trunc->add_option("--delta-rel", tr_delta, "Relative noise level");
  auto* tr_threads_opt = trunc->add_option("--threads", tr_threads, "Worker threads");
  tr_fit.attach(trunc);

  // ---- report ----
  auto* report = app.add_subcommand("report",
                                    "Re-emit CSV tables and SVG plots from a report.json");
  std::string report_in;
  report->add_option("--in", report_in, "Path to report.json")->required();

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    ModelHandle model;
    if (int rc = load_model(sim_model, model)) return rc;
    DatasetHandle ds;
    vf_status st = vf_dataset_simulate(model.ptr, {sim_rate, sim_max_strain, sim_horizon},
                                       sim_m, ds.out());
    if (st != VF_OK) return fail(st);
    st = vf_dataset_write(ds.ptr, sim_out.c_str());
    if (st != VF_OK) return fail(st);
    std::cout << "wrote " << vf_dataset_size(ds.ptr) << " samples to " << sim_out << "\n";
    return 0;
  }

  if (add_noise->parsed()) {
    DatasetHandle in;
    vf_status st = vf_dataset_read(noise_in.c_str(), in.out());
    if (st != VF_OK) return fail(st);
    DatasetHandle out;
    st = vf_dataset_add_noise(in.ptr, noise_rel, seed, out.out());
    if (st != VF_OK) return fail(st);
    st = vf_dataset_write(out.ptr, noise_out.c_str());
    if (st != VF_OK) return fail(st);
    std::printf("wrote %s (achieved relative noise %.6g)\n", noise_out.c_str(),
                vf_dataset_noise_rel(out.ptr));
    return 0;
  }

  if (fit->parsed()) {
    DatasetHandle ds;
    vf_status st = vf_dataset_read(fit_data.c_str(), ds.out());
    if (st != VF_OK) return fail(st);
    if (fit_rate_opt->count() || fit_ms_opt->count() || fit_hz_opt->count()) {
      if (!(fit_rate_opt->count() && fit_ms_opt->count() && fit_hz_opt->count())) {
        return fail_config("--rate, --max-strain and --horizon must be given together");
      }
      st = vf_dataset_set_program(ds.ptr, {fit_rate, fit_max_strain, fit_horizon});
      if (st != VF_OK) return fail(st);
    }
    json cfg = json::object();
    if (!fit_config.empty()) {
      if (int rc = load_json_file(fit_config, cfg)) return rc;
    }
    fit_opts.overlay(cfg);
    if (seed_opt->count()) cfg["seed"] = seed;
    FitHandle result;
    st = vf_fit(ds.ptr, cfg.dump().c_str(), fit_threads, result.out());
    if (st != VF_OK) return fail(st);
    StringOut text;
    st = vf_fit_result_to_json(result.ptr, &text.value);
    if (st != VF_OK) return fail(st);
    if (fit_out.empty()) {
      std::cout << text.value << "\n";
    } else if (!write_file(fit_out, std::string(text.value) + "\n")) {
      return fail_io("cannot write '" + fit_out + "'");
    }
    std::cerr << "best residual R = " << vf_fit_result_residual(result.ptr) << "\n";
    return 0;
  }

  if (cluster->parsed()) {
    std::string fit_text;
    if (!read_file(cl_fit, fit_text)) return fail_io("cannot read '" + cl_fit + "'");
    FitHandle fit_res;
    vf_status st = vf_fit_result_from_json(fit_text.c_str(), fit_res.out());
    if (st != VF_OK) return fail(st);
    DatasetHandle ds;
    st = vf_dataset_read(cl_data.c_str(), ds.out());
    if (st != VF_OK) return fail(st);

    json ccfg = json::object();
    if (!cl_config.empty()) {
      if (int rc = load_json_file(cl_config, ccfg)) return rc;
    }
    if (cl_post_opt->count()) ccfg["post_step"] = cl_post;
    if (cl_drop_opt->count()) ccfg["stiffness_drop"] = cl_drop;
    if (cl_min_opt->count()) ccfg["min_decade"] = cl_min_decade;
    json fcfg = json::object();
    cl_fit_opts.overlay(fcfg);
    if (seed_opt->count()) fcfg["seed"] = seed;

    ClusterHandle rep;
    st = vf_cluster(fit_res.ptr, ds.ptr, ccfg.dump().c_str(), fcfg.dump().c_str(), cl_threads,
                    rep.out());
    if (st != VF_OK) return fail(st);
    StringOut text;
    st = vf_cluster_report_to_json(rep.ptr, &text.value);
    if (st != VF_OK) return fail(st);
    if (cl_out.empty()) {
      std::cout << text.value << "\n";
    } else if (!write_file(cl_out, std::string(text.value) + "\n")) {
      return fail_io("cannot write '" + cl_out + "'");
    }
    std::cerr << "recovered n = " << vf_cluster_report_count(rep.ptr) << " elements\n";
    return 0;
  }

  if (decompose->parsed()) {
    std::string model_text;
    if (!read_file(dec_model, model_text)) return fail_io("cannot read '" + dec_model + "'");
    json spec = {{"truth", json::parse(model_text, nullptr, false)},
                 {"rates", dec_rates},
                 {"max_strain", dec_max_strain},
                 {"horizon", dec_horizon},
                 {"grid_intervals", dec_m},
                 {"replicas", 0},
                 {"noise_rel", 0.0}};
    if (spec["truth"].is_discarded()) return fail_config("'" + dec_model + "' is not valid JSON");
    StringOut rep;
    const vf_status st = vf_run_rate_comparison(spec.dump().c_str(), out_dir.c_str(), &rep.value);
    if (st != VF_OK) return fail(st);
    return emit_report_summary(rep);
  }

  auto build_sweep_spec = [&](const std::string& config_path, const std::string& truth_path,
                              CLI::Option* truth_opt, json& spec) -> int {
    spec = json::object();
    if (!config_path.empty()) {
      if (int rc = load_json_file(config_path, spec)) return rc;
    }
    if (truth_opt->count()) {
      std::string text;
      if (!read_file(truth_path, text)) return fail_io("cannot read '" + truth_path + "'");
      spec["truth"] = json::parse(text, nullptr, false);
      if (spec["truth"].is_discarded()) {
        return fail_config("'" + truth_path + "' is not valid JSON");
      }
    }
    if (!spec.contains("truth")) return fail_config("a truth model is required (--truth)");
    return 0;
  };

  if (sweep->parsed()) {
    json spec;
    if (int rc = build_sweep_spec(sweep_config, sweep_truth, sweep_truth_opt, spec)) return rc;
    if (sweep_rep_opt->count()) spec["replicas"] = sweep_replicas;
    if (sweep_delta_opt->count()) spec["noise_rel"] = sweep_delta;
    if (sweep_seed_opt->count()) spec["base_seed"] = sweep_base_seed;
    else if (seed_opt->count()) spec["base_seed"] = seed;
    if (sweep_m_opt->count()) spec["grid_intervals"] = sweep_m;
    if (sweep_threads_opt->count()) spec["threads"] = sweep_threads;
    merge_program(spec, sweep_rate_opt, sweep_rate, sweep_ms_opt, sweep_max_strain,
                  sweep_hz_opt, sweep_horizon);
    if (!spec.contains("fits") || sweep_fit.any()) {
      json fcfg = spec.contains("fits") && spec["fits"].is_array() && !spec["fits"].empty()
                      ? spec["fits"][0]
                      : json::object();
      sweep_fit.overlay(fcfg);
      spec["fits"] = json::array({fcfg});
    }
    StringOut rep;
    const vf_status st = vf_run_noise_sweep(spec.dump().c_str(), out_dir.c_str(), &rep.value);
    if (st != VF_OK) return fail(st);
    return emit_report_summary(rep);
  }

  if (compare->parsed()) {
    json spec;
    if (int rc = build_sweep_spec(cmp_config, cmp_truth, cmp_truth_opt, spec)) return rc;
    if (cmp_rep_opt->count()) spec["replicas"] = cmp_replicas;
    if (cmp_delta_opt->count()) spec["noise_rel"] = cmp_delta;
    if (cmp_seed_opt->count()) spec["base_seed"] = cmp_base_seed;
    else if (seed_opt->count()) spec["base_seed"] = seed;
    if (cmp_m_opt->count()) spec["grid_intervals"] = cmp_m;
    if (cmp_threads_opt->count()) spec["threads"] = cmp_threads;
    merge_program(spec, cmp_rate_opt, cmp_rate, cmp_ms_opt, cmp_max_strain, cmp_hz_opt,
                  cmp_horizon);
    if (!spec.contains("fits")) {
      const double lambda = cmp_fit.lambda_opt->count() ? cmp_fit.lambda : cmp_lambda;
      json base = json::object();
      cmp_fit.overlay(base);
      base["regularizer"] = {{"kind", "none"}, {"lambda", 0.0}};
      json tik = base;
      tik["regularizer"] = {{"kind", "tikhonov_full"}, {"lambda", lambda}};
      json first = base;
      first["regularizer"] = {{"kind", "first_stiffness"}, {"lambda", lambda}};
      spec["fits"] = json::array({base, tik, first});
    }
    StringOut rep;
    const vf_status st =
        vf_run_regularizer_comparison(spec.dump().c_str(), out_dir.c_str(), &rep.value);
    if (st != VF_OK) return fail(st);
    return emit_report_summary(rep);
  }

  if (trunc->parsed()) {
    json spec;
    if (int rc = build_sweep_spec(tr_config, tr_truth, tr_truth_opt, spec)) return rc;
    if (tr_rates_opt->count()) spec["rates"] = tr_rates;
    if (tr_ms_opt->count()) spec["max_strain"] = tr_max_strain;
    if (tr_full_opt->count()) spec["full_horizon"] = tr_full;
    if (tr_m_opt->count()) spec["grid_intervals"] = tr_m;
    if (tr_delta_opt->count()) spec["noise_rel"] = tr_delta;
    if (seed_opt->count()) spec["seed"] = seed;
    if (tr_threads_opt->count()) spec["threads"] = tr_threads;
    if (!spec.contains("horizons") &&
        (tr_tmin_opt->count() || tr_tstep_opt->count() || tr_full_opt->count())) {
      const double full = spec.value("full_horizon", tr_full);
      std::vector<double> horizons;
      for (double T = full; T >= tr_t_min - 1e-9; T -= tr_t_step) horizons.push_back(T);
      spec["horizons"] = horizons;
    }
    json fcfg = spec.contains("fit") ? spec["fit"] : json::object();
    tr_fit.overlay(fcfg);
    spec["fit"] = fcfg;
    StringOut rep;
    const vf_status st =
        vf_run_truncation_study(spec.dump().c_str(), out_dir.c_str(), &rep.value);
    if (st != VF_OK) return fail(st);
    return emit_report_summary(rep);
  }

  if (report->parsed()) {
    StringOut rep;
    const vf_status st = vf_rerender_report(report_in.c_str(), out_dir.c_str(), &rep.value);
    if (st != VF_OK) return fail(st);
    return emit_report_summary(rep);
  }

  return 0;
}
