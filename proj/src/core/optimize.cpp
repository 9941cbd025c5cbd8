// SPDX-License-Identifier: Apache-2.0
#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "parallel.hpp"
#include "rheology.hpp"
#include "rng.hpp"

namespace vf {

void Regularizer::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(errc::config, "regularizer: lambda must be >= 0 and finite");
  }
  if (kind == RegularizerKind::none && lambda != 0.0) {
    throw Error(errc::config, "regularizer: lambda must be 0 for the 'none' variant");
  }
}

void FitConfig::validate() const {
  if (max_elements < 1) throw Error(errc::config, "fit: element budget must be >= 1");
  if (start_count < 1) throw Error(errc::config, "fit: need at least one start");
  regularizer.validate();
  if (!(bounds.tau_min > 0.0)) throw Error(errc::config, "fit: tau lower bound must be > 0");
  if (!(bounds.tau_max > bounds.tau_min)) {
    throw Error(errc::config, "fit: tau upper bound must exceed the lower bound");
  }
  if (!(stopping.gradient_tol > 0.0) || !(stopping.step_tol > 0.0) ||
      !(stopping.cost_tol > 0.0)) {
    throw Error(errc::config, "fit: stopping tolerances must be positive");
  }
  if (stopping.max_iterations < 1) throw Error(errc::config, "fit: iteration cap must be >= 1");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::gradient: return "gradient";
    case Termination::step: return "step";
    case Termination::cost: return "cost";
    case Termination::iterations: return "iterations";
    case Termination::rejected: return "rejected";
  }
  return "unknown";
}

namespace {

const LoadingProgram& dataset_program(const StressDataset& d) {
  if (!d.meta.program) {
    throw Error(errc::config, "dataset carries no loading program; supply one before fitting");
  }
  return *d.meta.program;
}

ParameterBounds resolve_bounds(const ParameterBounds& in, const StressDataset& d) {
  ParameterBounds b = in;
  if (b.mu_max <= 0.0) {
    const double peak = *std::max_element(d.stresses.begin(), d.stresses.end());
    b.mu_max = 20.0 * peak / dataset_program(d).max_strain;
  }
  return b;
}

std::size_t argmin_tau(std::span<const double> tau) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < tau.size(); ++j) {
    if (tau[j] < tau[best]) best = j;
  }
  return best;
}

double penalty_value(const Regularizer& reg, double mu, std::span<const double> mu_j,
                     std::span<const double> tau_j) {
  switch (reg.kind) {
    case RegularizerKind::none: return 0.0;
    case RegularizerKind::tikhonov_full: {
      double s = mu * mu;
      for (double x : mu_j) s += x * x;
      for (double x : tau_j) s += x * x;
      return reg.lambda * s;
    }
    case RegularizerKind::first_stiffness: {
      if (mu_j.empty()) return 0.0;
      const double m1 = mu_j[argmin_tau(tau_j)];
      return reg.lambda * m1 * m1;
    }
  }
  return 0.0;
}

// Internal coordinates keeping iterates feasible: mu = xi^2, tau = tau_min + exp(theta).
struct Transform {
  ParameterBounds bounds;
  std::size_t n;  // element count

  Eigen::Index dim() const { return static_cast<Eigen::Index>(2 * n + 1); }

  Eigen::VectorXd to_internal(double mu, std::span<const double> mu_j,
                              std::span<const double> tau_j) const {
    Eigen::VectorXd z(dim());
    z[0] = std::sqrt(mu);
    for (std::size_t j = 0; j < n; ++j) {
      z[static_cast<Eigen::Index>(1 + j)] = std::sqrt(mu_j[j]);
      const double gap = std::max(tau_j[j] - bounds.tau_min, 1e-300);
      z[static_cast<Eigen::Index>(1 + n + j)] = std::log(gap);
    }
    return z;
  }

  void to_raw(const Eigen::VectorXd& z, double& mu, std::vector<double>& mu_j,
              std::vector<double>& tau_j) const {
    mu = z[0] * z[0];
    mu_j.resize(n);
    tau_j.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double xi = z[static_cast<Eigen::Index>(1 + j)];
      mu_j[j] = xi * xi;
      tau_j[j] = bounds.tau_min + std::exp(z[static_cast<Eigen::Index>(1 + n + j)]);
    }
  }

  // d(raw)/d(internal), a diagonal
  Eigen::VectorXd chain(const Eigen::VectorXd& z) const {
    Eigen::VectorXd d(dim());
    d[0] = 2.0 * z[0];
    for (std::size_t j = 0; j < n; ++j) {
      d[static_cast<Eigen::Index>(1 + j)] = 2.0 * z[static_cast<Eigen::Index>(1 + j)];
      d[static_cast<Eigen::Index>(1 + n + j)] = std::exp(z[static_cast<Eigen::Index>(1 + n + j)]);
    }
    return d;
  }

  void clamp(Eigen::VectorXd& z) const {
    const double xi_max = std::sqrt(bounds.mu_max);
    const double theta_max = std::log(bounds.tau_max - bounds.tau_min);
    z[0] = std::clamp(z[0], -xi_max, xi_max);
    for (std::size_t j = 0; j < n; ++j) {
      auto& xi = z[static_cast<Eigen::Index>(1 + j)];
      xi = std::clamp(xi, -xi_max, xi_max);
      auto& theta = z[static_cast<Eigen::Index>(1 + n + j)];
      theta = std::min(theta, theta_max);
    }
  }
};

// Residual with penalty rows appended as sqrt(lambda)-scaled extra equations,
// so the regularized problem stays a plain least-squares problem.
struct Objective {
  const StressDataset* data;
  const LoadingProgram* program;
  Regularizer reg;
  Transform tf;

  Eigen::Index penalty_rows() const {
    if (reg.kind == RegularizerKind::tikhonov_full) return tf.dim();
    if (reg.kind == RegularizerKind::first_stiffness && tf.n > 0) return 1;
    return 0;
  }

  // residual vector in internal coordinates
  Eigen::VectorXd residuals(const Eigen::VectorXd& z) const {
    double mu;
    std::vector<double> mu_j, tau_j;
    tf.to_raw(z, mu, mu_j, tau_j);
    const auto m = static_cast<Eigen::Index>(data->size());
    Eigen::VectorXd r(m + penalty_rows());
    r.head(m) = detail::stress_series_raw(mu, mu_j, tau_j, *program, data->times);
    for (Eigen::Index i = 0; i < m; ++i) r[i] -= data->stresses[static_cast<std::size_t>(i)];
    const double sl = std::sqrt(reg.lambda);
    if (reg.kind == RegularizerKind::tikhonov_full) {
      r[m] = sl * mu;
      for (std::size_t j = 0; j < tf.n; ++j) {
        r[m + static_cast<Eigen::Index>(1 + j)] = sl * mu_j[j];
        r[m + static_cast<Eigen::Index>(1 + tf.n + j)] = sl * tau_j[j];
      }
    } else if (reg.kind == RegularizerKind::first_stiffness && tf.n > 0) {
      r[m] = sl * mu_j[argmin_tau(tau_j)];
    }
    return r;
  }

  // Jacobian of the residual vector w.r.t. the internal coordinates
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const {
    double mu;
    std::vector<double> mu_j, tau_j;
    tf.to_raw(z, mu, mu_j, tau_j);
    const auto m = static_cast<Eigen::Index>(data->size());
    const auto dim = tf.dim();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m + penalty_rows(), dim);
    jac.topRows(m) = detail::stress_jacobian_raw(mu, mu_j, tau_j, *program, data->times);
    const double sl = std::sqrt(reg.lambda);
    if (reg.kind == RegularizerKind::tikhonov_full) {
      for (Eigen::Index k = 0; k < dim; ++k) jac(m + k, k) = sl;
    } else if (reg.kind == RegularizerKind::first_stiffness && tf.n > 0) {
      jac(m, static_cast<Eigen::Index>(1 + argmin_tau(tau_j))) = sl;
    }
    // chain rule: scale columns by d(raw)/d(internal); the first_stiffness row is
    // handled by the same column scaling since its raw derivative is sqrt(lambda)
    const Eigen::VectorXd d = tf.chain(z);
    for (Eigen::Index k = 0; k < dim; ++k) jac.col(k) *= d[k];
    return jac;
  }
};

MaterialModel model_from_raw(double mu, const std::vector<double>& mu_j,
                             const std::vector<double>& tau_j) {
  std::vector<MaxwellElement> elems(mu_j.size());
  for (std::size_t j = 0; j < mu_j.size(); ++j) elems[j] = {mu_j[j], tau_j[j]};
  return MaterialModel(mu, std::move(elems));
}

}  // namespace

Eigen::VectorXd residual(const MaterialModel& mdl, const StressDataset& d) {
  d.validate();
  const auto& p = dataset_program(d);
  Eigen::VectorXd r = stress_series(mdl, p, d.times);
  for (Eigen::Index i = 0; i < r.size(); ++i) r[i] -= d.stresses[static_cast<std::size_t>(i)];
  return r;
}

double residual_norm2(const MaterialModel& mdl, const StressDataset& d) {
  return residual(mdl, d).squaredNorm();
}

double regularized_cost(const MaterialModel& mdl, const StressDataset& d,
                        const Regularizer& reg) {
  reg.validate();
  std::vector<double> mu_j(mdl.element_count()), tau_j(mdl.element_count());
  for (std::size_t j = 0; j < mdl.element_count(); ++j) {
    mu_j[j] = mdl.elements()[j].stiffness;
    tau_j[j] = mdl.elements()[j].relaxation_time;
  }
  return residual_norm2(mdl, d) + penalty_value(reg, mdl.base_stiffness(), mu_j, tau_j);
}

StartRecord solve_single(const MaterialModel& start, const StressDataset& d,
                         const FitConfig& cfg) {
  cfg.validate();
  d.validate();
  const auto& program = dataset_program(d);
  const auto bounds = resolve_bounds(cfg.bounds, d);

  StartRecord rec;
  rec.start = start;
  rec.converged = start;

  const std::size_t n = start.element_count();
  for (const auto& e : start.elements()) {
    if (e.relaxation_time < bounds.tau_min || e.relaxation_time > bounds.tau_max ||
        e.stiffness > bounds.mu_max) {
      rec.rejected = true;
      rec.note = "start violates parameter bounds";
      return rec;
    }
  }
  if (start.base_stiffness() > bounds.mu_max) {
    rec.rejected = true;
    rec.note = "start violates parameter bounds";
    return rec;
  }

  Objective obj{&d, &program, cfg.regularizer, Transform{bounds, n}};
  std::vector<double> mu_j(n), tau_j(n);
  for (std::size_t j = 0; j < n; ++j) {
    mu_j[j] = start.elements()[j].stiffness;
    tau_j[j] = start.elements()[j].relaxation_time;
  }
  Eigen::VectorXd z = obj.tf.to_internal(start.base_stiffness(), mu_j, tau_j);

  Eigen::VectorXd r = obj.residuals(z);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) {
    rec.rejected = true;
    rec.note = "non-finite cost at start";
    return rec;
  }

  const auto& stop = cfg.stopping;
  double lm_damping = 1e-3;
  int iter = 0;
  Termination why = Termination::iterations;

  if (cost == 0.0) {
    why = Termination::cost;
  } else {
    while (iter < stop.max_iterations) {
      const Eigen::MatrixXd jac = obj.jacobian(z);
      const Eigen::VectorXd grad = jac.transpose() * r;
      if (grad.lpNorm<Eigen::Infinity>() <= stop.gradient_tol) {
        why = Termination::gradient;
        break;
      }
      const Eigen::MatrixXd jtj = jac.transpose() * jac;
      Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12);

      bool accepted = false;
      while (!accepted) {
        Eigen::MatrixXd damped = jtj;
        damped.diagonal() += lm_damping * diag;
        const Eigen::VectorXd step = damped.ldlt().solve(-grad);
        Eigen::VectorXd z_trial = z + step;
        obj.tf.clamp(z_trial);
        const Eigen::VectorXd r_trial = obj.residuals(z_trial);
        const double cost_trial = r_trial.squaredNorm();
        if (std::isfinite(cost_trial) && cost_trial < cost) {
          const double applied = (z_trial - z).norm();
          const double drop = cost - cost_trial;
          z = std::move(z_trial);
          r = r_trial;
          cost = cost_trial;
          lm_damping = std::max(lm_damping / 3.0, 1e-12);
          accepted = true;
          ++iter;
          if (applied <= stop.step_tol * (z.norm() + stop.step_tol)) {
            why = Termination::step;
          } else if (drop <= stop.cost_tol * std::max(cost, 1e-300)) {
            why = Termination::cost;
          } else if (cost == 0.0) {
            why = Termination::cost;
          }
        } else {
          lm_damping *= 4.0;
          if (lm_damping > 1e14) {
            why = Termination::step;  // no acceptable step exists at this scale
            accepted = true;          // leave the outer loop via the flag below
            ++iter;
          }
        }
      }
      if (why != Termination::iterations) break;
    }
  }

  double mu;
  obj.tf.to_raw(z, mu, mu_j, tau_j);
  rec.converged = model_from_raw(mu, mu_j, tau_j);
  rec.iterations = iter;
  rec.termination = why;
  rec.cost = cost;
  Eigen::VectorXd data_res =
      detail::stress_series_raw(mu, mu_j, tau_j, program, d.times);
  for (Eigen::Index i = 0; i < data_res.size(); ++i) {
    data_res[i] -= d.stresses[static_cast<std::size_t>(i)];
  }
  rec.residual = data_res.squaredNorm();
  return rec;
}

std::vector<MaterialModel> generate_starts(const StressDataset& d, const FitConfig& cfg) {
  cfg.validate();
  d.validate();
  const auto& program = dataset_program(d);
  const auto bounds = resolve_bounds(cfg.bounds, d);
  const auto n = static_cast<std::size_t>(cfg.max_elements);

  const double peak = *std::max_element(d.stresses.begin(), d.stresses.end());
  const double mu_start_hi = std::min(2.0 * peak / program.max_strain, bounds.mu_max);
  const double log_lo = std::log(bounds.tau_min);
  const double log_hi = std::log(bounds.tau_max);

  HaltonSequence halton(2 * n + 1, splitmix64(cfg.seed) % 8192);
  std::vector<MaterialModel> starts;
  starts.reserve(static_cast<std::size_t>(cfg.start_count));
  for (int s = 0; s < cfg.start_count; ++s) {
    const auto u = halton.next();
    const double mu = u[0] * mu_start_hi;
    std::vector<MaxwellElement> elems(n);
    for (std::size_t j = 0; j < n; ++j) {
      elems[j].stiffness = u[1 + j] * mu_start_hi;
      elems[j].relaxation_time = std::exp(log_lo + u[1 + n + j] * (log_hi - log_lo));
    }
    starts.emplace_back(mu, std::move(elems));
  }
  return starts;
}

FitResult multistart_fit(const StressDataset& d, const FitConfig& cfg, int threads) {
  return multistart_fit(d, cfg, {}, threads);
}

FitResult multistart_fit(const StressDataset& d, const FitConfig& cfg,
                         std::span<const MaterialModel> extra_starts, int threads) {
  cfg.validate();
  d.validate();
  dataset_program(d);

  std::vector<MaterialModel> starts(extra_starts.begin(), extra_starts.end());
  const auto generated = generate_starts(d, cfg);
  const std::size_t budget = std::max<std::size_t>(static_cast<std::size_t>(cfg.start_count),
                                                   starts.size());
  for (const auto& s : generated) {
    if (starts.size() >= budget) break;
    starts.push_back(s);
  }

  FitResult result;
  result.resolved_bounds = resolve_bounds(cfg.bounds, d);
  result.starts.resize(starts.size());
  parallel_for(starts.size(), threads, [&](std::size_t i) {
    result.starts[i] = solve_single(starts[i], d, cfg);
  });

  bool any = false;
  std::size_t best = 0;
  for (std::size_t i = 0; i < result.starts.size(); ++i) {
    const auto& rec = result.starts[i];
    if (rec.rejected) continue;
    if (!any || rec.cost < result.starts[best].cost) {
      best = i;
      any = true;
    }
  }
  if (!any) {
    std::string detail;
    for (const auto& rec : result.starts) {
      if (!rec.note.empty()) {
        detail = rec.note;
        break;
      }
    }
    throw Error(errc::fit, "all " + std::to_string(result.starts.size()) +
                               " starts were rejected" +
                               (detail.empty() ? "" : (": " + detail)));
  }
  result.best_index = best;
  result.model = result.starts[best].converged;
  result.residual = result.starts[best].residual;
  result.cost = result.starts[best].cost;
  return result;
}

}  // namespace vf
