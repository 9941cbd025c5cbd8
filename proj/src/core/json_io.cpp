// SPDX-License-Identifier: Apache-2.0
#include "json_io.hpp"

#include <cmath>

namespace vf {

namespace {

[[noreturn]] void bad(const std::string& what, const std::string& why) {
  throw Error(errc::config, what + ": " + why);
}

double get_num(const nlohmann::json& j, const char* key, double fallback,
               const std::string& what) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(what, std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

double require_num(const nlohmann::json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) bad(what, std::string("missing '") + key + "'");
  if (!j.at(key).is_number()) bad(what, std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::uint64_t get_seed(const nlohmann::json& j, const char* key, std::uint64_t fallback,
                       const std::string& what) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer() && !j.at(key).is_number_unsigned()) {
    bad(what, std::string("'") + key + "' must be an integer");
  }
  return j.at(key).get<std::uint64_t>();
}

}  // namespace

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(errc::config, what + ": invalid JSON: " + e.what());
  }
}

nlohmann::json program_to_json(const LoadingProgram& p) {
  return {{"rate", p.rate}, {"max_strain", p.max_strain}, {"horizon", p.horizon}};
}

LoadingProgram program_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("loading program", "expected an object");
  LoadingProgram p;
  p.rate = require_num(j, "rate", "loading program");
  p.max_strain = require_num(j, "max_strain", "loading program");
  p.horizon = require_num(j, "horizon", "loading program");
  try {
    p.validate();
  } catch (const Error& e) {
    bad("loading program", e.what());
  }
  return p;
}

nlohmann::json model_to_json(const MaterialModel& m) {
  nlohmann::json elems = nlohmann::json::array();
  for (const auto& e : m.elements()) {
    elems.push_back({{"stiffness", e.stiffness}, {"relaxation_time", e.relaxation_time}});
  }
  return {{"base_stiffness", m.base_stiffness()}, {"elements", std::move(elems)}};
}

MaterialModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("material model", "expected an object");
  const double mu = require_num(j, "base_stiffness", "material model");
  std::vector<MaxwellElement> elems;
  if (j.contains("elements")) {
    if (!j.at("elements").is_array()) bad("material model", "'elements' must be an array");
    for (const auto& e : j.at("elements")) {
      elems.push_back({require_num(e, "stiffness", "material model element"),
                       require_num(e, "relaxation_time", "material model element")});
    }
  }
  try {
    return MaterialModel(mu, std::move(elems));
  } catch (const Error& e) {
    bad("material model", e.what());
  }
}

nlohmann::json dataset_meta_to_json(const DatasetMeta& m) {
  nlohmann::json j = nlohmann::json::object();
  if (m.program) j["program"] = program_to_json(*m.program);
  if (m.seed) j["seed"] = *m.seed;
  j["target_noise_rel"] = m.target_noise_rel;
  j["achieved_noise_rel"] = m.achieved_noise_rel;
  if (m.truth) j["truth"] = model_to_json(*m.truth);
  return j;
}

DatasetMeta dataset_meta_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("dataset metadata", "expected an object");
  DatasetMeta m;
  if (j.contains("program")) m.program = program_from_json(j.at("program"));
  if (j.contains("seed")) m.seed = get_seed(j, "seed", 0, "dataset metadata");
  m.target_noise_rel = get_num(j, "target_noise_rel", 0.0, "dataset metadata");
  m.achieved_noise_rel = get_num(j, "achieved_noise_rel", 0.0, "dataset metadata");
  if (j.contains("truth")) m.truth = model_from_json(j.at("truth"));
  return m;
}

namespace {

const char* regularizer_name(RegularizerKind k) {
  switch (k) {
    case RegularizerKind::none: return "none";
    case RegularizerKind::tikhonov_full: return "tikhonov_full";
    case RegularizerKind::first_stiffness: return "first_stiffness";
  }
  return "none";
}

RegularizerKind regularizer_kind(const std::string& s) {
  if (s == "none") return RegularizerKind::none;
  if (s == "tikhonov_full") return RegularizerKind::tikhonov_full;
  if (s == "first_stiffness") return RegularizerKind::first_stiffness;
  bad("regularizer", "unknown kind '" + s + "'");
}

}  // namespace

nlohmann::json fit_config_to_json(const FitConfig& c) {
  return {{"max_elements", c.max_elements},
          {"start_count", c.start_count},
          {"seed", c.seed},
          {"regularizer",
           {{"kind", regularizer_name(c.regularizer.kind)}, {"lambda", c.regularizer.lambda}}},
          {"bounds",
           {{"mu_max", c.bounds.mu_max},
            {"tau_min", c.bounds.tau_min},
            {"tau_max", c.bounds.tau_max}}},
          {"stopping",
           {{"gradient_tol", c.stopping.gradient_tol},
            {"step_tol", c.stopping.step_tol},
            {"cost_tol", c.stopping.cost_tol},
            {"max_iterations", c.stopping.max_iterations}}}};
}

FitConfig fit_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("fit config", "expected an object");
  FitConfig c;
  c.max_elements = static_cast<int>(get_num(j, "max_elements", c.max_elements, "fit config"));
  c.start_count = static_cast<int>(get_num(j, "start_count", c.start_count, "fit config"));
  c.seed = get_seed(j, "seed", c.seed, "fit config");
  if (j.contains("regularizer")) {
    const auto& r = j.at("regularizer");
    if (!r.is_object()) bad("fit config", "'regularizer' must be an object");
    if (r.contains("kind")) {
      if (!r.at("kind").is_string()) bad("regularizer", "'kind' must be a string");
      c.regularizer.kind = regularizer_kind(r.at("kind").get<std::string>());
    }
    c.regularizer.lambda = get_num(r, "lambda", c.regularizer.lambda, "regularizer");
  }
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    c.bounds.mu_max = get_num(b, "mu_max", c.bounds.mu_max, "fit bounds");
    c.bounds.tau_min = get_num(b, "tau_min", c.bounds.tau_min, "fit bounds");
    c.bounds.tau_max = get_num(b, "tau_max", c.bounds.tau_max, "fit bounds");
  }
  if (j.contains("stopping")) {
    const auto& s = j.at("stopping");
    c.stopping.gradient_tol = get_num(s, "gradient_tol", c.stopping.gradient_tol, "fit stopping");
    c.stopping.step_tol = get_num(s, "step_tol", c.stopping.step_tol, "fit stopping");
    c.stopping.cost_tol = get_num(s, "cost_tol", c.stopping.cost_tol, "fit stopping");
    c.stopping.max_iterations = static_cast<int>(
        get_num(s, "max_iterations", c.stopping.max_iterations, "fit stopping"));
  }
  try {
    c.validate();
  } catch (const Error& e) {
    bad("fit config", e.what());
  }
  return c;
}

nlohmann::json cluster_config_to_json(const ClusterConfig& c) {
  nlohmann::json j = {{"post_step", c.post_step == PostStep::merge ? "merge" : "refit"},
                      {"stiffness_drop", c.stiffness_drop}};
  j["min_decade"] = c.min_decade ? nlohmann::json(*c.min_decade) : nlohmann::json(nullptr);
  return j;
}

ClusterConfig cluster_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("cluster config", "expected an object");
  ClusterConfig c;
  if (j.contains("post_step")) {
    const auto s = j.at("post_step").get<std::string>();
    if (s == "merge") {
      c.post_step = PostStep::merge;
    } else if (s == "refit") {
      c.post_step = PostStep::refit;
    } else {
      bad("cluster config", "unknown post_step '" + s + "'");
    }
  }
  c.stiffness_drop = get_num(j, "stiffness_drop", c.stiffness_drop, "cluster config");
  if (j.contains("min_decade") && !j.at("min_decade").is_null()) {
    c.min_decade = static_cast<int>(j.at("min_decade").get<double>());
  }
  try {
    c.validate();
  } catch (const Error& e) {
    bad("cluster config", e.what());
  }
  return c;
}

namespace {

nlohmann::json start_record_to_json(const StartRecord& r) {
  return {{"start", model_to_json(r.start)},
          {"converged", model_to_json(r.converged)},
          {"cost", r.cost},
          {"residual", r.residual},
          {"iterations", r.iterations},
          {"termination", to_string(r.termination)},
          {"rejected", r.rejected},
          {"note", r.note}};
}

Termination termination_from_string(const std::string& s) {
  if (s == "gradient") return Termination::gradient;
  if (s == "step") return Termination::step;
  if (s == "cost") return Termination::cost;
  if (s == "iterations") return Termination::iterations;
  return Termination::rejected;
}

StartRecord start_record_from_json(const nlohmann::json& j) {
  StartRecord r;
  r.start = model_from_json(j.at("start"));
  r.converged = model_from_json(j.at("converged"));
  r.cost = require_num(j, "cost", "start record");
  r.residual = require_num(j, "residual", "start record");
  r.iterations = static_cast<int>(require_num(j, "iterations", "start record"));
  r.termination = termination_from_string(j.value("termination", "rejected"));
  r.rejected = j.value("rejected", false);
  r.note = j.value("note", "");
  return r;
}

}  // namespace

nlohmann::json fit_result_to_json(const FitResult& r) {
  nlohmann::json starts = nlohmann::json::array();
  for (const auto& s : r.starts) starts.push_back(start_record_to_json(s));
  return {{"model", model_to_json(r.model)},
          {"residual", r.residual},
          {"cost", r.cost},
          {"best_index", r.best_index},
          {"resolved_bounds",
           {{"mu_max", r.resolved_bounds.mu_max},
            {"tau_min", r.resolved_bounds.tau_min},
            {"tau_max", r.resolved_bounds.tau_max}}},
          {"starts", std::move(starts)}};
}

FitResult fit_result_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("fit result", "expected an object");
  FitResult r;
  try {
    r.model = model_from_json(j.at("model"));
    r.residual = require_num(j, "residual", "fit result");
    r.cost = require_num(j, "cost", "fit result");
    r.best_index = static_cast<std::size_t>(get_num(j, "best_index", 0, "fit result"));
    if (j.contains("resolved_bounds")) {
      const auto& b = j.at("resolved_bounds");
      r.resolved_bounds.mu_max = get_num(b, "mu_max", 0.0, "fit result bounds");
      r.resolved_bounds.tau_min = get_num(b, "tau_min", 1e-2, "fit result bounds");
      r.resolved_bounds.tau_max = get_num(b, "tau_max", 1e3, "fit result bounds");
    }
    if (j.contains("starts")) {
      for (const auto& s : j.at("starts")) r.starts.push_back(start_record_from_json(s));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    bad("fit result", e.what());
  }
  return r;
}

nlohmann::json cluster_report_to_json(const ClusterReport& r) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& b : r.bins) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& e : b.members) {
      members.push_back({{"stiffness", e.stiffness}, {"relaxation_time", e.relaxation_time}});
    }
    bins.push_back({{"decade", b.decade}, {"members", std::move(members)}});
  }
  nlohmann::json j = {{"bins", std::move(bins)},
                      {"merged", model_to_json(r.merged)},
                      {"count", r.count},
                      {"refit_used", r.refit_used},
                      {"residual_before", r.residual_before},
                      {"residual_after", r.residual_after},
                      {"warnings", r.warnings}};
  if (r.refit) j["refit"] = fit_result_to_json(*r.refit);
  return j;
}

nlohmann::json sweep_spec_to_json(const SweepSpec& s) {
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : s.fits) fits.push_back(fit_config_to_json(f));
  return {{"replicas", s.replicas},
          {"base_seed", s.base_seed},
          {"noise_rel", s.noise_rel},
          {"program", program_to_json(s.program)},
          {"truth", model_to_json(s.truth)},
          {"grid_intervals", s.grid_intervals},
          {"fits", std::move(fits)},
          {"cluster", cluster_config_to_json(s.cluster)},
          {"threads", s.threads}};
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("sweep spec", "expected an object");
  SweepSpec s;
  s.replicas = static_cast<int>(get_num(j, "replicas", s.replicas, "sweep spec"));
  s.base_seed = get_seed(j, "base_seed", s.base_seed, "sweep spec");
  s.noise_rel = get_num(j, "noise_rel", s.noise_rel, "sweep spec");
  if (!j.contains("program")) bad("sweep spec", "missing 'program'");
  s.program = program_from_json(j.at("program"));
  if (!j.contains("truth")) bad("sweep spec", "missing 'truth'");
  s.truth = model_from_json(j.at("truth"));
  s.grid_intervals =
      static_cast<std::size_t>(get_num(j, "grid_intervals", s.grid_intervals, "sweep spec"));
  if (j.contains("fits")) {
    if (!j.at("fits").is_array()) bad("sweep spec", "'fits' must be an array");
    s.fits.clear();
    for (const auto& f : j.at("fits")) s.fits.push_back(fit_config_from_json(f));
  } else if (j.contains("fit")) {
    s.fits = {fit_config_from_json(j.at("fit"))};
  } else {
    s.fits = {FitConfig{}};
  }
  if (j.contains("cluster")) s.cluster = cluster_config_from_json(j.at("cluster"));
  s.threads = static_cast<int>(get_num(j, "threads", s.threads, "sweep spec"));
  try {
    s.validate();
  } catch (const Error& e) {
    bad("sweep spec", e.what());
  }
  return s;
}

nlohmann::json rate_spec_to_json(const RateComparisonSpec& s) {
  return {{"truth", model_to_json(s.truth)},
          {"rates", s.rates},
          {"max_strain", s.max_strain},
          {"horizon", s.horizon},
          {"grid_intervals", s.grid_intervals},
          {"noise_rel", s.noise_rel},
          {"replicas", s.replicas},
          {"base_seed", s.base_seed},
          {"fit", fit_config_to_json(s.fit)},
          {"cluster", cluster_config_to_json(s.cluster)},
          {"threads", s.threads}};
}

RateComparisonSpec rate_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("rate comparison spec", "expected an object");
  RateComparisonSpec s;
  if (!j.contains("truth")) bad("rate comparison spec", "missing 'truth'");
  s.truth = model_from_json(j.at("truth"));
  if (j.contains("rates")) s.rates = j.at("rates").get<std::vector<double>>();
  s.max_strain = get_num(j, "max_strain", s.max_strain, "rate comparison spec");
  s.horizon = get_num(j, "horizon", s.horizon, "rate comparison spec");
  s.grid_intervals = static_cast<std::size_t>(
      get_num(j, "grid_intervals", s.grid_intervals, "rate comparison spec"));
  s.noise_rel = get_num(j, "noise_rel", s.noise_rel, "rate comparison spec");
  s.replicas = static_cast<int>(get_num(j, "replicas", s.replicas, "rate comparison spec"));
  s.base_seed = get_seed(j, "base_seed", s.base_seed, "rate comparison spec");
  if (j.contains("fit")) s.fit = fit_config_from_json(j.at("fit"));
  if (j.contains("cluster")) s.cluster = cluster_config_from_json(j.at("cluster"));
  s.threads = static_cast<int>(get_num(j, "threads", s.threads, "rate comparison spec"));
  try {
    s.validate();
  } catch (const Error& e) {
    bad("rate comparison spec", e.what());
  }
  return s;
}

nlohmann::json truncation_spec_to_json(const TruncationSpec& s) {
  return {{"truth", model_to_json(s.truth)},
          {"rates", s.rates},
          {"max_strain", s.max_strain},
          {"full_horizon", s.full_horizon},
          {"grid_intervals", s.grid_intervals},
          {"noise_rel", s.noise_rel},
          {"seed", s.seed},
          {"horizons", s.horizons},
          {"fit", fit_config_to_json(s.fit)},
          {"cluster", cluster_config_to_json(s.cluster)},
          {"threads", s.threads},
          {"stiffness_band", s.stiffness_band},
          {"tau_band", s.tau_band}};
}

TruncationSpec truncation_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("truncation spec", "expected an object");
  TruncationSpec s;
  if (!j.contains("truth")) bad("truncation spec", "missing 'truth'");
  s.truth = model_from_json(j.at("truth"));
  if (j.contains("rates")) s.rates = j.at("rates").get<std::vector<double>>();
  s.max_strain = get_num(j, "max_strain", s.max_strain, "truncation spec");
  s.full_horizon = get_num(j, "full_horizon", s.full_horizon, "truncation spec");
  s.grid_intervals = static_cast<std::size_t>(
      get_num(j, "grid_intervals", s.grid_intervals, "truncation spec"));
  s.noise_rel = get_num(j, "noise_rel", s.noise_rel, "truncation spec");
  s.seed = get_seed(j, "seed", s.seed, "truncation spec");
  if (j.contains("horizons")) s.horizons = j.at("horizons").get<std::vector<double>>();
  if (j.contains("fit")) s.fit = fit_config_from_json(j.at("fit"));
  if (j.contains("cluster")) s.cluster = cluster_config_from_json(j.at("cluster"));
  s.threads = static_cast<int>(get_num(j, "threads", s.threads, "truncation spec"));
  s.stiffness_band = get_num(j, "stiffness_band", s.stiffness_band, "truncation spec");
  s.tau_band = get_num(j, "tau_band", s.tau_band, "truncation spec");
  return s;
}

}  // namespace vf
