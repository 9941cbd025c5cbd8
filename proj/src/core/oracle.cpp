// SPDX-License-Identifier: Apache-2.0
#include "oracle.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace vf::oracle {

namespace {

double strain_plain(const LoadingProgram& p, double t) {
  return (t <= p.ramp_end()) ? p.rate * t : p.max_strain;
}

}  // namespace

std::vector<double> evolve_inelastic(const MaxwellElement& e, const LoadingProgram& p,
                                     const TimeGrid& grid, const OdeConfig& cfg) {
  p.validate();
  grid.validate();
  if (grid.horizon != p.horizon) {
    throw Error(errc::argument, "oracle: grid horizon does not match the loading program");
  }
  const double tau = e.relaxation_time;
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(errc::argument, "oracle: relaxation time must be strictly positive");
  }
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) {
    throw Error(errc::config, "oracle: step size must be positive");
  }
  if (cfg.step > tau / 10.0) {
    throw Error(errc::config, "oracle: step size too large for tau = " + std::to_string(tau) +
                                  " (need h <= tau/10)");
  }

  const double a = 2.0 / tau;
  const double te = p.ramp_end();
  std::vector<double> out(grid.size(), 0.0);
  double y = 0.0;
  double t_prev = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t_next = grid.node(i);
    const double span = t_next - t_prev;
    const auto nsub = static_cast<std::size_t>(std::max(1.0, std::ceil(span / cfg.step - 1e-12)));
    double seg_start = t_prev;
    double e_start = strain_plain(p, seg_start);
    for (std::size_t k = 1; k <= nsub; ++k) {
      double seg_end = (k == nsub) ? t_next : t_prev + (span * static_cast<double>(k)) /
                                                           static_cast<double>(nsub);
      // never integrate across the ramp-end kink
      if (seg_start < te && te < seg_end) {
        const double h1 = te - seg_start;
        const double e_mid = strain_plain(p, te);
        y = (y * (1.0 - 0.5 * h1 * a) + 0.5 * h1 * a * (e_start + e_mid)) / (1.0 + 0.5 * h1 * a);
        seg_start = te;
        e_start = e_mid;
      }
      const double h = seg_end - seg_start;
      const double e_end = strain_plain(p, seg_end);
      y = (y * (1.0 - 0.5 * h * a) + 0.5 * h * a * (e_start + e_end)) / (1.0 + 0.5 * h * a);
      seg_start = seg_end;
      e_start = e_end;
    }
    out[i] = y;
    t_prev = t_next;
  }
  return out;
}

Eigen::VectorXd stress_series_numeric(const MaterialModel& mdl, const LoadingProgram& p,
                                      const TimeGrid& grid, const OdeConfig& cfg) {
  p.validate();
  grid.validate();
  Eigen::VectorXd sigma(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sigma[static_cast<Eigen::Index>(i)] =
        mdl.base_stiffness() * strain_plain(p, grid.node(i));
  }
  for (const auto& e : mdl.elements()) {
    const auto inelastic = evolve_inelastic(e, p, grid, cfg);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sigma[static_cast<Eigen::Index>(i)] +=
          e.stiffness * (strain_plain(p, grid.node(i)) - inelastic[i]);
    }
  }
  return sigma;
}

}  // namespace vf::oracle
