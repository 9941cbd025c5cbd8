// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "types.hpp"

namespace vf {

/// Strain at time t under the ramp-and-hold program.
double strain_at(const LoadingProgram& p, double t);

/// Inelastic (damper) strain of one Maxwell element. Hold phase uses the
/// shifted form ebar - (tau*eta/2)*(1 - exp(-2*ebar/(tau*eta)))*exp(-2*(t-te)/tau),
/// which carries only non-positive exponents and is continuous at the ramp end.
double inelastic_strain_at(const MaxwellElement& e, const LoadingProgram& p, double t);

/// Stress carried by one Maxwell element: mu_j*(strain - inelastic strain).
double element_stress_at(const MaxwellElement& e, const LoadingProgram& p, double t);

/// Stress of the equilibrium spring: mu * strain(t).
double spring_stress_at(double base_stiffness, const LoadingProgram& p, double t);

/// Total stress: spring plus the sum over elements.
double total_stress_at(const MaterialModel& mdl, const LoadingProgram& p, double t);

/// Total stress evaluated at each time in `times` (all within [0, horizon]).
Eigen::VectorXd stress_series(const MaterialModel& mdl, const LoadingProgram& p,
                              std::span<const double> times);
Eigen::VectorXd stress_series(const MaterialModel& mdl, const LoadingProgram& p,
                              const TimeGrid& grid);

/// Per-branch stress vectors: index 0 is the spring, then one per element.
/// The pointwise sum equals stress_series.
std::vector<Eigen::VectorXd> stress_decomposition(const MaterialModel& mdl,
                                                  const LoadingProgram& p,
                                                  std::span<const double> times);
std::vector<Eigen::VectorXd> stress_decomposition(const MaterialModel& mdl,
                                                  const LoadingProgram& p, const TimeGrid& grid);

/// Analytic Jacobian of the stress with respect to (mu, mu_1..mu_n, tau_1..tau_n),
/// one row per time. The mu_j columns use the closed form with mu_j factored out,
/// so they stay correct at mu_j = 0.
Eigen::MatrixXd stress_jacobian(const MaterialModel& mdl, const LoadingProgram& p,
                                std::span<const double> times);
Eigen::MatrixXd stress_jacobian(const MaterialModel& mdl, const LoadingProgram& p,
                                const TimeGrid& grid);

namespace detail {

// Order-preserving evaluation on raw parameter arrays. The optimizer iterates on
// unsorted parameter vectors; these keep Jacobian columns aligned with them.
Eigen::VectorXd stress_series_raw(double base_stiffness, std::span<const double> stiffness,
                                  std::span<const double> relaxation_time,
                                  const LoadingProgram& p, std::span<const double> times);
Eigen::MatrixXd stress_jacobian_raw(double base_stiffness, std::span<const double> stiffness,
                                    std::span<const double> relaxation_time,
                                    const LoadingProgram& p, std::span<const double> times);

}  // namespace detail

}  // namespace vf
