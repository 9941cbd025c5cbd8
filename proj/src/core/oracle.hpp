// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Core>

#include "types.hpp"

namespace vf::oracle {

/// Step size for the trapezoidal (Crank-Nicolson) reference integrator.
struct OdeConfig {
  double step = 1e-4;
};

/// Integrates d/dt e_i = (strain(t) - e_i) / (tau/2) from e_i(0) = 0 and samples
/// the result on the grid nodes. Substeps never cross the ramp-end kink.
/// Rejects configurations with step > tau/10 as unstable for reference use.
std::vector<double> evolve_inelastic(const MaxwellElement& e, const LoadingProgram& p,
                                     const TimeGrid& grid, const OdeConfig& cfg);

/// Rebuilds the total stress from numerically integrated inelastic strains:
/// sigma = mu*strain + sum_j mu_j*(strain - e_j). Never touches the closed forms.
Eigen::VectorXd stress_series_numeric(const MaterialModel& mdl, const LoadingProgram& p,
                                      const TimeGrid& grid, const OdeConfig& cfg);

}  // namespace vf::oracle
