// SPDX-License-Identifier: Apache-2.0
#include "types.hpp"

#include <algorithm>
#include <cmath>

namespace vf {

void LoadingProgram::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(errc::argument, "loading program: rate must be positive and finite");
  }
  if (!(max_strain > 0.0) || !std::isfinite(max_strain)) {
    throw Error(errc::argument, "loading program: max_strain must be positive and finite");
  }
  if (!(horizon >= ramp_end()) || !std::isfinite(horizon)) {
    throw Error(errc::argument,
                "loading program: horizon must cover the ramp (T >= max_strain/rate)");
  }
}

MaterialModel::MaterialModel(double base_stiffness, std::vector<MaxwellElement> elements)
    : base_stiffness_(base_stiffness), elements_(std::move(elements)) {
  if (!(base_stiffness_ >= 0.0) || !std::isfinite(base_stiffness_)) {
    throw Error(errc::argument, "material model: base stiffness must be >= 0 and finite");
  }
  for (const auto& e : elements_) {
    if (!(e.stiffness >= 0.0) || !std::isfinite(e.stiffness)) {
      throw Error(errc::argument, "material model: element stiffness must be >= 0 and finite");
    }
    if (!(e.relaxation_time > 0.0) || !std::isfinite(e.relaxation_time)) {
      throw Error(errc::argument,
                  "material model: relaxation time must be strictly positive and finite");
    }
  }
  std::stable_sort(elements_.begin(), elements_.end(), [](const auto& a, const auto& b) {
    if (a.relaxation_time != b.relaxation_time) return a.relaxation_time < b.relaxation_time;
    return a.stiffness < b.stiffness;
  });
}

Eigen::VectorXd MaterialModel::parameters() const {
  const auto n = elements_.size();
  Eigen::VectorXd p(2 * n + 1);
  p[0] = base_stiffness_;
  for (std::size_t j = 0; j < n; ++j) {
    p[1 + j] = elements_[j].stiffness;
    p[1 + n + j] = elements_[j].relaxation_time;
  }
  return p;
}

MaterialModel MaterialModel::from_parameters(const Eigen::VectorXd& p) {
  if (p.size() < 1 || p.size() % 2 == 0) {
    throw Error(errc::argument, "parameter vector must have odd length 2n+1");
  }
  const std::size_t n = (static_cast<std::size_t>(p.size()) - 1) / 2;
  std::vector<MaxwellElement> elems(n);
  for (std::size_t j = 0; j < n; ++j) {
    elems[j] = {p[1 + j], p[1 + n + j]};
  }
  return MaterialModel(p[0], std::move(elems));
}

std::vector<double> TimeGrid::nodes() const {
  validate();
  std::vector<double> t(size());
  for (std::size_t i = 0; i < size(); ++i) t[i] = node(i);
  return t;
}

void TimeGrid::validate() const {
  if (intervals < 1) throw Error(errc::argument, "time grid: need at least one interval");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(errc::argument, "time grid: horizon must be positive and finite");
  }
}

}  // namespace vf
