// SPDX-License-Identifier: Apache-2.0
#include "viscofit.h"

#include <cstring>
#include <new>
#include <string>

#include "core/cluster.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/experiments.hpp"
#include "core/json_io.hpp"
#include "core/plot.hpp"
#include "core/report.hpp"
#include "core/rheology.hpp"

struct vf_model {
  vf::MaterialModel value;
};
struct vf_dataset {
  vf::StressDataset value;
};
struct vf_fit_result {
  vf::FitResult value;
};
struct vf_cluster_report {
  vf::ClusterReport value;
};

namespace {

thread_local std::string t_last_error;

vf_status set_error(vf_status status, const std::string& message) {
  t_last_error = message;
  return status;
}

vf_status status_of(vf::errc code) {
  switch (code) {
    case vf::errc::argument: return VF_ERROR_ARGUMENT;
    case vf::errc::config: return VF_ERROR_CONFIG;
    case vf::errc::fit: return VF_ERROR_FIT;
    case vf::errc::io: return VF_ERROR_IO;
  }
  return VF_ERROR_ARGUMENT;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
vf_status guarded(Fn&& fn) {
  try {
    fn();
    return VF_OK;
  } catch (const vf::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(VF_ERROR_ARGUMENT, "out of memory");
  } catch (const std::exception& e) {
    return set_error(VF_ERROR_ARGUMENT, e.what());
  }
}

vf_status require(bool cond, const char* message) {
  if (cond) return VF_OK;
  return set_error(VF_ERROR_ARGUMENT, message);
}

vf::LoadingProgram to_program(vf_program p) { return {p.rate, p.max_strain, p.horizon}; }

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_or_default(const char* json, const char* what) {
  if (json == nullptr || json[0] == '\0') return nlohmann::json::object();
  return vf::parse_json(json, what);
}

vf::FitConfig fit_config_of(const char* json) {
  return vf::fit_config_from_json(parse_or_default(json, "fit config"));
}

vf::ClusterConfig cluster_config_of(const char* json) {
  return vf::cluster_config_from_json(parse_or_default(json, "cluster config"));
}

using Runner = vf::Report (*)(const nlohmann::json& spec);

vf_status run_experiment(const char* spec_json, const char* out_dir, char** report_json,
                         Runner runner) {
  vf_status bad = require(out_dir != nullptr, "out_dir must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    const auto spec = parse_or_default(spec_json, "experiment spec");
    const vf::Report report = runner(spec);
    const auto dir = vf::write_report(report, out_dir);
    vf::plot::emit_plots(report, dir);
    if (report_json != nullptr) {
      nlohmann::json j = {{"name", report.name},
                          {"config_hash", report.config_hash},
                          {"summary", report.summary},
                          {"directory", dir.string()}};
      *report_json = copy_string(j.dump(2));
    }
  });
}

}  // namespace

extern "C" {

const char* vf_status_name(vf_status status) {
  switch (status) {
    case VF_OK: return "ok";
    case VF_ERROR_ARGUMENT: return "argument error";
    case VF_ERROR_CONFIG: return "config error";
    case VF_ERROR_FIT: return "fit failure";
    case VF_ERROR_IO: return "i/o error";
  }
  return "unknown";
}

const char* vf_last_error(void) { return t_last_error.c_str(); }

const char* vf_version(void) { return "0.1.0"; }

vf_status vf_model_create(double base_stiffness, const double* stiffness,
                          const double* relaxation_time, size_t count, vf_model** out) {
  vf_status bad = require(out != nullptr, "out must not be NULL");
  if (bad != VF_OK) return bad;
  bad = require(count == 0 || (stiffness != nullptr && relaxation_time != nullptr),
                "parameter arrays must not be NULL when count > 0");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    std::vector<vf::MaxwellElement> elems(count);
    for (size_t j = 0; j < count; ++j) elems[j] = {stiffness[j], relaxation_time[j]};
    *out = new vf_model{vf::MaterialModel(base_stiffness, std::move(elems))};
  });
}

vf_status vf_model_from_json(const char* json, vf_model** out) {
  vf_status bad = require(out != nullptr && json != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded(
      [&] { *out = new vf_model{vf::model_from_json(vf::parse_json(json, "material model"))}; });
}

vf_status vf_model_to_json(const vf_model* model, char** out) {
  vf_status bad = require(model != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = copy_string(vf::model_to_json(model->value).dump(2)); });
}

void vf_model_free(vf_model* model) { delete model; }

size_t vf_model_element_count(const vf_model* model) {
  return model ? model->value.element_count() : 0;
}

double vf_model_base_stiffness(const vf_model* model) {
  return model ? model->value.base_stiffness() : 0.0;
}

vf_status vf_model_element(const vf_model* model, size_t index, double* stiffness,
                           double* relaxation_time) {
  vf_status bad = require(model != nullptr, "model must not be NULL");
  if (bad != VF_OK) return bad;
  bad = require(index < model->value.element_count(), "element index out of range");
  if (bad != VF_OK) return bad;
  const auto& e = model->value.elements()[index];
  if (stiffness != nullptr) *stiffness = e.stiffness;
  if (relaxation_time != nullptr) *relaxation_time = e.relaxation_time;
  return VF_OK;
}

vf_status vf_strain_at(vf_program program, double t, double* out) {
  vf_status bad = require(out != nullptr, "out must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = vf::strain_at(to_program(program), t); });
}

vf_status vf_stress_at(const vf_model* model, vf_program program, double t, double* out) {
  vf_status bad = require(model != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = vf::total_stress_at(model->value, to_program(program), t); });
}

vf_status vf_stress_series(const vf_model* model, vf_program program, const double* times,
                           size_t count, double* out) {
  vf_status bad = require(model != nullptr && times != nullptr && out != nullptr,
                          "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    const auto s = vf::stress_series(model->value, to_program(program), {times, count});
    std::memcpy(out, s.data(), count * sizeof(double));
  });
}

vf_status vf_stress_decomposition(const vf_model* model, vf_program program, const double* times,
                                  size_t count, double* out) {
  vf_status bad = require(model != nullptr && times != nullptr && out != nullptr,
                          "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    const auto parts = vf::stress_decomposition(model->value, to_program(program), {times, count});
    for (size_t j = 0; j < parts.size(); ++j) {
      std::memcpy(out + j * count, parts[j].data(), count * sizeof(double));
    }
  });
}

vf_status vf_stress_jacobian(const vf_model* model, vf_program program, const double* times,
                             size_t count, double* out) {
  vf_status bad = require(model != nullptr && times != nullptr && out != nullptr,
                          "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    const auto jac = vf::stress_jacobian(model->value, to_program(program), {times, count});
    for (Eigen::Index i = 0; i < jac.rows(); ++i) {
      for (Eigen::Index c = 0; c < jac.cols(); ++c) {
        out[static_cast<size_t>(i) * static_cast<size_t>(jac.cols()) + static_cast<size_t>(c)] =
            jac(i, c);
      }
    }
  });
}

vf_status vf_dataset_simulate(const vf_model* model, vf_program program, size_t intervals,
                              vf_dataset** out) {
  vf_status bad = require(model != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    *out = new vf_dataset{vf::simulate_dataset(model->value, to_program(program), intervals)};
  });
}

vf_status vf_dataset_add_noise(const vf_dataset* d, double target_rel, uint64_t seed,
                               vf_dataset** out) {
  vf_status bad = require(d != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = new vf_dataset{vf::add_noise(d->value, {target_rel, seed})}; });
}

vf_status vf_dataset_truncate(const vf_dataset* d, double t_cut, vf_dataset** out) {
  vf_status bad = require(d != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = new vf_dataset{vf::truncate(d->value, t_cut)}; });
}

vf_status vf_dataset_read(const char* path, vf_dataset** out) {
  vf_status bad = require(path != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = new vf_dataset{vf::read_dataset(path)}; });
}

vf_status vf_dataset_write(const vf_dataset* d, const char* path) {
  vf_status bad = require(d != nullptr && path != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { vf::write_dataset(d->value, path); });
}

void vf_dataset_free(vf_dataset* d) { delete d; }

size_t vf_dataset_size(const vf_dataset* d) { return d ? d->value.size() : 0; }

vf_status vf_dataset_samples(const vf_dataset* d, double* times, double* stresses) {
  vf_status bad = require(d != nullptr, "dataset must not be NULL");
  if (bad != VF_OK) return bad;
  if (times != nullptr) {
    std::memcpy(times, d->value.times.data(), d->value.size() * sizeof(double));
  }
  if (stresses != nullptr) {
    std::memcpy(stresses, d->value.stresses.data(), d->value.size() * sizeof(double));
  }
  return VF_OK;
}

vf_status vf_dataset_program(const vf_dataset* d, vf_program* out) {
  vf_status bad = require(d != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  if (!d->value.meta.program) {
    return set_error(VF_ERROR_CONFIG, "dataset carries no loading program");
  }
  const auto& p = *d->value.meta.program;
  *out = {p.rate, p.max_strain, p.horizon};
  return VF_OK;
}

vf_status vf_dataset_set_program(vf_dataset* d, vf_program program) {
  vf_status bad = require(d != nullptr, "dataset must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    auto p = to_program(program);
    p.validate();
    d->value.meta.program = p;
  });
}

double vf_dataset_noise_rel(const vf_dataset* d) {
  return d ? d->value.meta.achieved_noise_rel : 0.0;
}

vf_status vf_fit(const vf_dataset* d, const char* fit_config_json, int threads,
                 vf_fit_result** out) {
  vf_status bad = require(d != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    *out = new vf_fit_result{vf::multistart_fit(d->value, fit_config_of(fit_config_json),
                                                threads)};
  });
}

vf_status vf_fit_result_from_json(const char* json, vf_fit_result** out) {
  vf_status bad = require(json != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    *out = new vf_fit_result{vf::fit_result_from_json(vf::parse_json(json, "fit result"))};
  });
}

vf_status vf_fit_result_to_json(const vf_fit_result* r, char** out) {
  vf_status bad = require(r != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = copy_string(vf::fit_result_to_json(r->value).dump(2)); });
}

vf_status vf_fit_result_model(const vf_fit_result* r, vf_model** out) {
  vf_status bad = require(r != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = new vf_model{r->value.model}; });
}

double vf_fit_result_residual(const vf_fit_result* r) { return r ? r->value.residual : 0.0; }

double vf_fit_result_cost(const vf_fit_result* r) { return r ? r->value.cost : 0.0; }

void vf_fit_result_free(vf_fit_result* r) { delete r; }

vf_status vf_cluster(const vf_fit_result* fit, const vf_dataset* d,
                     const char* cluster_config_json, const char* fit_config_json, int threads,
                     vf_cluster_report** out) {
  vf_status bad =
      require(fit != nullptr && d != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    *out = new vf_cluster_report{vf::cluster(fit->value, d->value,
                                             cluster_config_of(cluster_config_json),
                                             fit_config_of(fit_config_json), threads)};
  });
}

vf_status vf_cluster_report_to_json(const vf_cluster_report* r, char** out) {
  vf_status bad = require(r != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = copy_string(vf::cluster_report_to_json(r->value).dump(2)); });
}

vf_status vf_cluster_report_model(const vf_cluster_report* r, vf_model** out) {
  vf_status bad = require(r != nullptr && out != nullptr, "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] { *out = new vf_model{r->value.merged}; });
}

size_t vf_cluster_report_count(const vf_cluster_report* r) { return r ? r->value.count : 0; }

void vf_cluster_report_free(vf_cluster_report* r) { delete r; }

vf_status vf_run_exact_recovery(const char* spec_json, const char* out_dir, char** report_json) {
  return run_experiment(spec_json, out_dir, report_json, [](const nlohmann::json& spec) {
    const auto truth = vf::model_from_json(spec.at("truth"));
    const auto program = vf::program_from_json(spec.at("program"));
    const auto m = spec.value("grid_intervals", std::size_t{1000});
    const auto fit = spec.contains("fit") ? vf::fit_config_from_json(spec.at("fit"))
                                          : vf::FitConfig{};
    const auto cl = spec.contains("cluster") ? vf::cluster_config_from_json(spec.at("cluster"))
                                             : vf::ClusterConfig{};
    const int threads = spec.value("threads", 0);
    return vf::run_exact_recovery(truth, program, m, fit, cl, threads);
  });
}

vf_status vf_run_noise_sweep(const char* spec_json, const char* out_dir, char** report_json) {
  return run_experiment(spec_json, out_dir, report_json, [](const nlohmann::json& spec) {
    return vf::run_noise_sweep(vf::sweep_spec_from_json(spec));
  });
}

vf_status vf_run_rate_comparison(const char* spec_json, const char* out_dir,
                                 char** report_json) {
  return run_experiment(spec_json, out_dir, report_json, [](const nlohmann::json& spec) {
    return vf::run_rate_comparison(vf::rate_spec_from_json(spec));
  });
}

vf_status vf_run_regularizer_comparison(const char* spec_json, const char* out_dir,
                                        char** report_json) {
  return run_experiment(spec_json, out_dir, report_json, [](const nlohmann::json& spec) {
    return vf::run_regularizer_comparison(vf::sweep_spec_from_json(spec));
  });
}

vf_status vf_run_truncation_study(const char* spec_json, const char* out_dir,
                                  char** report_json) {
  return run_experiment(spec_json, out_dir, report_json, [](const nlohmann::json& spec) {
    return vf::run_truncation_study(vf::truncation_spec_from_json(spec));
  });
}

vf_status vf_rerender_report(const char* report_json_path, const char* out_dir,
                             char** report_json) {
  vf_status bad = require(report_json_path != nullptr && out_dir != nullptr,
                          "arguments must not be NULL");
  if (bad != VF_OK) return bad;
  return guarded([&] {
    const vf::Report report = vf::read_report(report_json_path);
    const auto dir = vf::write_report(report, out_dir);
    vf::plot::emit_plots(report, dir);
    if (report_json != nullptr) {
      nlohmann::json j = {{"name", report.name},
                          {"config_hash", report.config_hash},
                          {"summary", report.summary},
                          {"directory", dir.string()}};
      *report_json = copy_string(j.dump(2));
    }
  });
}

void vf_string_free(char* s) { delete[] s; }

}  // extern "C"
