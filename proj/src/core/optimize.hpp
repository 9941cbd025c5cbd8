// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dataset.hpp"
#include "types.hpp"

namespace vf {

enum class RegularizerKind { none, tikhonov_full, first_stiffness };

/// Penalty added to the data-fitting residual. `tikhonov_full` penalizes the
/// squared norm of the whole parameter vector; `first_stiffness` only the
/// stiffness paired with the smallest current relaxation time.
struct Regularizer {
  RegularizerKind kind = RegularizerKind::none;
  double lambda = 0.0;
  void validate() const;
};

/// Box constraints. mu_max <= 0 requests the data-driven default
/// 20 * max(sigma) / max_strain, resolved when the fit starts.
struct ParameterBounds {
  double mu_max = 0.0;
  double tau_min = 1e-2;
  double tau_max = 1e3;
};

struct StoppingCriteria {
  double gradient_tol = 1e-10;
  double step_tol = 1e-12;
  double cost_tol = 1e-14;
  int max_iterations = 500;
};

struct FitConfig {
  int max_elements = 5;  // N: element budget for the minimization
  Regularizer regularizer;
  int start_count = 40;  // K_s
  ParameterBounds bounds;
  StoppingCriteria stopping;
  std::uint64_t seed = 1;
  void validate() const;
};

enum class Termination { gradient, step, cost, iterations, rejected };
const char* to_string(Termination t);

struct StartRecord {
  MaterialModel start;
  MaterialModel converged;
  double cost = 0.0;      // final regularized cost
  double residual = 0.0;  // final ||r||^2 over the data alone
  int iterations = 0;
  Termination termination = Termination::rejected;
  bool rejected = false;
  std::string note;
};

struct FitResult {
  MaterialModel model;  // best start's converged model, still N elements
  double residual = 0.0;
  double cost = 0.0;
  std::size_t best_index = 0;
  std::vector<StartRecord> starts;
  ParameterBounds resolved_bounds;  // bounds actually used (auto values filled in)
};

/// r_i = sigma_model(t_i) - sigma_data(t_i). The dataset must know its loading program.
Eigen::VectorXd residual(const MaterialModel& mdl, const StressDataset& d);

/// R = ||r||_2^2 over the samples.
double residual_norm2(const MaterialModel& mdl, const StressDataset& d);

/// R plus the configured penalty, evaluated on the raw parameters.
double regularized_cost(const MaterialModel& mdl, const StressDataset& d, const Regularizer& reg);

/// Levenberg-Marquardt descent from one start. Iterates stay inside bounds via
/// an internal change of coordinates (mu = xi^2, tau = tau_min + exp(theta))
/// plus clamping at the upper bounds; penalties always see the raw parameters.
StartRecord solve_single(const MaterialModel& start, const StressDataset& d,
                         const FitConfig& cfg);

/// Deterministic multi-start: K_s Halton-distributed starts (log-uniform in tau,
/// uniform in stiffness), optionally preceded by caller-supplied starts.
FitResult multistart_fit(const StressDataset& d, const FitConfig& cfg, int threads = 1);
FitResult multistart_fit(const StressDataset& d, const FitConfig& cfg,
                         std::span<const MaterialModel> extra_starts, int threads = 1);

/// The K_s generated start models for the given config and dataset.
std::vector<MaterialModel> generate_starts(const StressDataset& d, const FitConfig& cfg);

}  // namespace vf
