// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "error.hpp"

namespace vf {

/// Ramp-and-hold strain protocol: strain grows at `rate` until it reaches
/// `max_strain` (at t = max_strain/rate) and is held constant until `horizon`.
/// Strain is measured in percent, rates in percent per second.
struct LoadingProgram {
  double rate = 1.0;
  double max_strain = 20.0;
  double horizon = 100.0;

  double ramp_end() const { return max_strain / rate; }
  void validate() const;
};

/// One spring-damper pair: spring stiffness in MPa, relaxation time in seconds.
struct MaxwellElement {
  double stiffness = 0.0;
  double relaxation_time = 1.0;
};

/// Equilibrium spring in parallel with n Maxwell elements. Elements are kept
/// sorted ascending by relaxation time; n = 0 is a pure spring.
class MaterialModel {
public:
  MaterialModel() = default;
  MaterialModel(double base_stiffness, std::vector<MaxwellElement> elements);

  double base_stiffness() const { return base_stiffness_; }
  const std::vector<MaxwellElement>& elements() const { return elements_; }
  std::size_t element_count() const { return elements_.size(); }

  /// Flat parameter vector (mu, mu_1..mu_n, tau_1..tau_n) in element order.
  Eigen::VectorXd parameters() const;
  static MaterialModel from_parameters(const Eigen::VectorXd& p);

private:
  double base_stiffness_ = 0.0;
  std::vector<MaxwellElement> elements_;
};

/// Uniform grid with m+1 nodes t_i = i*T/m on [0, T].
struct TimeGrid {
  std::size_t intervals = 1;
  double horizon = 1.0;

  std::size_t size() const { return intervals + 1; }
  double node(std::size_t i) const {
    return (static_cast<double>(i) * horizon) / static_cast<double>(intervals);
  }
  std::vector<double> nodes() const;
  void validate() const;
};

}  // namespace vf
