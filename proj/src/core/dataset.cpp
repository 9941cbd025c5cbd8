// SPDX-License-Identifier: Apache-2.0
#include "dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "rheology.hpp"
#include "rng.hpp"

namespace vf {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::filesystem::path sidecar_path(const std::string& path) {
  std::filesystem::path p(path);
  p.replace_extension(".meta.json");
  return p;
}

}  // namespace

void StressDataset::validate() const {
  if (times.size() != stresses.size()) {
    throw Error(errc::argument, "dataset: times and stresses must have equal length");
  }
  if (times.empty()) throw Error(errc::argument, "dataset: empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(stresses[i])) {
      throw Error(errc::argument, "dataset: non-finite sample");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw Error(errc::argument, "dataset: times must be strictly increasing");
    }
  }
}

StressDataset simulate_dataset(const MaterialModel& mdl, const LoadingProgram& p, std::size_t m) {
  p.validate();
  const TimeGrid grid{m, p.horizon};
  grid.validate();
  StressDataset d;
  d.times = grid.nodes();
  const auto sigma = stress_series(mdl, p, grid);
  d.stresses.assign(sigma.data(), sigma.data() + sigma.size());
  d.meta.program = p;
  d.meta.truth = mdl;
  return d;
}

StressDataset add_noise(const StressDataset& d, const NoiseSpec& spec) {
  d.validate();
  if (spec.target_rel < 0.0 || !std::isfinite(spec.target_rel)) {
    throw Error(errc::argument, "noise: target level must be >= 0");
  }
  if (d.noisy()) {
    throw Error(errc::argument, "noise: dataset already carries noise");
  }
  if (spec.target_rel == 0.0) return d;

  const double clean_norm = norm2(d.stresses);
  if (clean_norm == 0.0) {
    throw Error(errc::argument, "noise: cannot scale noise against zero-norm data");
  }
  GaussianSampler gauss(spec.seed);
  std::vector<double> z(d.size());
  for (auto& x : z) x = gauss.next();
  const double z_norm = norm2(z);
  if (z_norm == 0.0) throw Error(errc::argument, "noise: degenerate noise draw");
  const double scale = spec.target_rel * clean_norm / z_norm;

  StressDataset out = d;
  for (std::size_t i = 0; i < out.size(); ++i) out.stresses[i] += scale * z[i];
  const double noisy_norm = norm2(out.stresses);
  if (noisy_norm == 0.0) {
    throw Error(errc::argument, "noise: perturbed data has zero norm");
  }
  out.meta.seed = spec.seed;
  out.meta.target_noise_rel = spec.target_rel;
  out.meta.achieved_noise_rel = spec.target_rel * clean_norm / noisy_norm;
  return out;
}

StressDataset truncate(const StressDataset& d, double t_cut) {
  d.validate();
  if (!std::isfinite(t_cut)) throw Error(errc::argument, "truncate: cut time must be finite");
  const double slack = 1e-9 * std::max(1.0, std::abs(t_cut));
  if (d.meta.program) {
    const auto& p = *d.meta.program;
    if (!(t_cut > p.ramp_end() + slack)) {
      throw Error(errc::argument, "truncate: cut would remove the loading ramp");
    }
    if (t_cut > p.horizon + slack) {
      throw Error(errc::argument, "truncate: cut time exceeds the dataset horizon");
    }
  }
  StressDataset out;
  out.meta = d.meta;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.times[i] <= t_cut + slack) {
      out.times.push_back(d.times[i]);
      out.stresses.push_back(d.stresses[i]);
    }
  }
  if (out.times.empty()) throw Error(errc::argument, "truncate: no samples left");
  if (out.meta.program) out.meta.program->horizon = t_cut;
  return out;
}

void write_dataset(const StressDataset& d, const std::string& path) {
  d.validate();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(errc::io, "cannot open '" + path + "' for writing");
  f << "t,sigma\n";
  char line[80];
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", d.times[i], d.stresses[i]);
    f << line;
  }
  if (!f) throw Error(errc::io, "write failed for '" + path + "'");
  f.close();

  nlohmann::json meta = dataset_meta_to_json(d.meta);
  std::ofstream mf(sidecar_path(path), std::ios::binary);
  if (!mf) throw Error(errc::io, "cannot open metadata sidecar for '" + path + "'");
  mf << meta.dump(2) << "\n";
  if (!mf) throw Error(errc::io, "write failed for metadata sidecar of '" + path + "'");
}

StressDataset read_dataset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(errc::io, "cannot open '" + path + "'");
  std::string header;
  if (!std::getline(f, header)) throw Error(errc::io, "'" + path + "': empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "t,sigma") {
    throw Error(errc::io, "'" + path + "': expected header 't,sigma', got '" + header + "'");
  }
  StressDataset d;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(errc::io, "'" + path + "' line " + std::to_string(lineno) + ": expected 't,sigma'");
    }
    try {
      std::size_t used = 0;
      const double t = std::stod(line.substr(0, comma), &used);
      const double s = std::stod(line.substr(comma + 1), &used);
      d.times.push_back(t);
      d.stresses.push_back(s);
    } catch (const std::exception&) {
      throw Error(errc::io, "'" + path + "' line " + std::to_string(lineno) + ": malformed number");
    }
  }
  if (d.times.empty()) throw Error(errc::io, "'" + path + "': no samples");
  try {
    d.validate();
  } catch (const Error& e) {
    throw Error(errc::io, "'" + path + "': " + e.what());
  }

  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream mf(side, std::ios::binary);
    if (!mf) throw Error(errc::io, "cannot open metadata sidecar '" + side.string() + "'");
    nlohmann::json meta;
    try {
      mf >> meta;
      d.meta = dataset_meta_from_json(meta);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(errc::io, "'" + side.string() + "': " + e.what());
    }
  }
  return d;
}

}  // namespace vf
