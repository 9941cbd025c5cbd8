// SPDX-License-Identifier: Apache-2.0
#include "rheology.hpp"

#include <cmath>
#include <string>

namespace vf {

namespace {

void check_time(const LoadingProgram& p, double t) {
  const double slack = 1e-9 * std::max(1.0, p.horizon);
  if (!(t >= -slack) || !(t <= p.horizon + slack) || !std::isfinite(t)) {
    throw Error(errc::argument, "time " + std::to_string(t) + " outside [0, " +
                                    std::to_string(p.horizon) + "]");
  }
}

void check_times(const LoadingProgram& p, std::span<const double> times) {
  p.validate();
  for (double t : times) check_time(p, t);
}

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(errc::argument, "relaxation time must be strictly positive");
  }
}

// 1 - exp(-x) without cancellation for small x.
inline double one_minus_exp(double x) { return -std::expm1(-x); }

// Element stress divided by its stiffness. The hold branch is the shifted,
// overflow-safe form: all exponents are <= 0 for any tau > 0.
inline double element_stress_unit(double tau, const LoadingProgram& p, double t) {
  const double eta = p.rate;
  const double te = p.ramp_end();
  if (t <= te) {
    return 0.5 * tau * eta * one_minus_exp(2.0 * t / tau);
  }
  const double ramp_peak = 0.5 * tau * eta * one_minus_exp(2.0 * p.max_strain / (tau * eta));
  return ramp_peak * std::exp(-2.0 * (t - te) / tau);
}

}  // namespace

double strain_at(const LoadingProgram& p, double t) {
  p.validate();
  check_time(p, t);
  return (t <= p.ramp_end()) ? p.rate * t : p.max_strain;
}

double inelastic_strain_at(const MaxwellElement& e, const LoadingProgram& p, double t) {
  p.validate();
  check_time(p, t);
  check_tau(e.relaxation_time);
  const double tau = e.relaxation_time;
  const double eta = p.rate;
  const double te = p.ramp_end();
  if (t <= te) {
    return eta * t - 0.5 * tau * eta * one_minus_exp(2.0 * t / tau);
  }
  const double ramp_peak = 0.5 * tau * eta * one_minus_exp(2.0 * p.max_strain / (tau * eta));
  return p.max_strain - ramp_peak * std::exp(-2.0 * (t - te) / tau);
}

double element_stress_at(const MaxwellElement& e, const LoadingProgram& p, double t) {
  p.validate();
  check_time(p, t);
  check_tau(e.relaxation_time);
  return e.stiffness * element_stress_unit(e.relaxation_time, p, t);
}

double spring_stress_at(double base_stiffness, const LoadingProgram& p, double t) {
  return base_stiffness * strain_at(p, t);
}

double total_stress_at(const MaterialModel& mdl, const LoadingProgram& p, double t) {
  p.validate();
  check_time(p, t);
  double sigma = mdl.base_stiffness() * ((t <= p.ramp_end()) ? p.rate * t : p.max_strain);
  for (const auto& e : mdl.elements()) {
    sigma += e.stiffness * element_stress_unit(e.relaxation_time, p, t);
  }
  return sigma;
}

namespace detail {

Eigen::VectorXd stress_series_raw(double base_stiffness, std::span<const double> stiffness,
                                  std::span<const double> relaxation_time,
                                  const LoadingProgram& p, std::span<const double> times) {
  check_times(p, times);
  const auto m = static_cast<Eigen::Index>(times.size());
  const double te = p.ramp_end();
  Eigen::VectorXd sigma(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = times[static_cast<std::size_t>(i)];
    sigma[i] = base_stiffness * ((t <= te) ? p.rate * t : p.max_strain);
  }
  for (std::size_t j = 0; j < stiffness.size(); ++j) {
    check_tau(relaxation_time[j]);
    const double mu = stiffness[j];
    const double tau = relaxation_time[j];
    const double ramp_peak = 0.5 * tau * p.rate * one_minus_exp(2.0 * p.max_strain / (tau * p.rate));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double t = times[static_cast<std::size_t>(i)];
      if (t <= te) {
        sigma[i] += mu * 0.5 * tau * p.rate * one_minus_exp(2.0 * t / tau);
      } else {
        sigma[i] += mu * ramp_peak * std::exp(-2.0 * (t - te) / tau);
      }
    }
  }
  return sigma;
}

Eigen::MatrixXd stress_jacobian_raw(double base_stiffness, std::span<const double> stiffness,
                                    std::span<const double> relaxation_time,
                                    const LoadingProgram& p, std::span<const double> times) {
  (void)base_stiffness;  // stress is linear in mu; its column is just the strain
  check_times(p, times);
  const auto m = static_cast<Eigen::Index>(times.size());
  const std::size_t n = stiffness.size();
  const double eta = p.rate;
  const double te = p.ramp_end();
  Eigen::MatrixXd jac(m, static_cast<Eigen::Index>(2 * n + 1));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = times[static_cast<std::size_t>(i)];
    jac(i, 0) = (t <= te) ? eta * t : p.max_strain;
  }
  for (std::size_t j = 0; j < n; ++j) {
    check_tau(relaxation_time[j]);
    const double mu = stiffness[j];
    const double tau = relaxation_time[j];
    const auto mu_col = static_cast<Eigen::Index>(1 + j);
    const auto tau_col = static_cast<Eigen::Index>(1 + n + j);
    const double x = 2.0 * p.max_strain / (tau * eta);
    const double expx = std::exp(-x);
    const double ramp_full = one_minus_exp(x);  // 1 - exp(-2*te/tau) at the ramp end
    const double a = tau * ramp_full;
    const double da = ramp_full - x * expx;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double t = times[static_cast<std::size_t>(i)];
      if (t <= te) {
        const double c = std::exp(-2.0 * t / tau);
        jac(i, mu_col) = 0.5 * tau * eta * (1.0 - c);
        jac(i, tau_col) = 0.5 * mu * eta * (1.0 - c) - mu * eta * t / tau * c;
      } else {
        const double s = t - te;
        const double b = std::exp(-2.0 * s / tau);
        const double db = b * 2.0 * s / (tau * tau);
        jac(i, mu_col) = 0.5 * tau * eta * ramp_full * b;
        jac(i, tau_col) = 0.5 * mu * eta * (da * b + a * db);
      }
    }
  }
  return jac;
}

}  // namespace detail

namespace {

std::vector<double> model_stiffness(const MaterialModel& mdl) {
  std::vector<double> v(mdl.element_count());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = mdl.elements()[j].stiffness;
  return v;
}

std::vector<double> model_tau(const MaterialModel& mdl) {
  std::vector<double> v(mdl.element_count());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = mdl.elements()[j].relaxation_time;
  return v;
}

void check_grid(const LoadingProgram& p, const TimeGrid& grid) {
  grid.validate();
  if (grid.horizon != p.horizon) {
    throw Error(errc::argument, "time grid horizon does not match the loading program");
  }
}

}  // namespace

Eigen::VectorXd stress_series(const MaterialModel& mdl, const LoadingProgram& p,
                              std::span<const double> times) {
  return detail::stress_series_raw(mdl.base_stiffness(), model_stiffness(mdl), model_tau(mdl), p,
                                   times);
}

Eigen::VectorXd stress_series(const MaterialModel& mdl, const LoadingProgram& p,
                              const TimeGrid& grid) {
  check_grid(p, grid);
  return stress_series(mdl, p, grid.nodes());
}

std::vector<Eigen::VectorXd> stress_decomposition(const MaterialModel& mdl,
                                                  const LoadingProgram& p,
                                                  std::span<const double> times) {
  check_times(p, times);
  std::vector<Eigen::VectorXd> parts(mdl.element_count() + 1);
  for (auto& v : parts) v.resize(static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    parts[0][row] = spring_stress_at(mdl.base_stiffness(), p, times[i]);
    for (std::size_t j = 0; j < mdl.element_count(); ++j) {
      parts[j + 1][row] = element_stress_at(mdl.elements()[j], p, times[i]);
    }
  }
  return parts;
}

std::vector<Eigen::VectorXd> stress_decomposition(const MaterialModel& mdl,
                                                  const LoadingProgram& p, const TimeGrid& grid) {
  check_grid(p, grid);
  return stress_decomposition(mdl, p, grid.nodes());
}

Eigen::MatrixXd stress_jacobian(const MaterialModel& mdl, const LoadingProgram& p,
                                std::span<const double> times) {
  return detail::stress_jacobian_raw(mdl.base_stiffness(), model_stiffness(mdl), model_tau(mdl),
                                     p, times);
}

Eigen::MatrixXd stress_jacobian(const MaterialModel& mdl, const LoadingProgram& p,
                                const TimeGrid& grid) {
  check_grid(p, grid);
  return stress_jacobian(mdl, p, grid.nodes());
}

}  // namespace vf
