// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <doctest.h>

#include "core/rheology.hpp"

using namespace vf;

namespace {

const MaterialModel kTable1{10.0, {{4.0, 0.2}, {7.0, 3.7}, {1.0, 25.0}}};
const LoadingProgram kFast{10.0, 20.0, 100.0};
const LoadingProgram kSlow{1.0, 20.0, 100.0};

}  // namespace

TEST_CASE("strain follows the ramp and holds the plateau") {
  CHECK(strain_at(kFast, 2.0) == doctest::Approx(20.0));
  CHECK(strain_at(kFast, 0.0) == 0.0);
  CHECK(strain_at(kSlow, 50.0) == doctest::Approx(20.0));
  CHECK(strain_at(kSlow, 10.0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(strain_at(kFast, -1.0), Error);
  CHECK_THROWS_AS(strain_at(kFast, 101.0), Error);
}

TEST_CASE("inelastic strain closed form") {
  const MaxwellElement fast_damper{4.0, 0.2};
  CHECK(inelastic_strain_at(fast_damper, kFast, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // ramp end: 19 + exp(-20), frozen from the Crank-Nicolson reference
  CHECK(inelastic_strain_at(fast_damper, kFast, 2.0) == doctest::Approx(19.0).epsilon(1e-7));

  const MaxwellElement slow_damper{1.0, 25.0};
  const LoadingProgram long_run{10.0, 20.0, 1000.0};
  CHECK(inelastic_strain_at(slow_damper, long_run, 1000.0) ==
        doctest::Approx(20.0).epsilon(1e-13));

  CHECK_THROWS_AS(inelastic_strain_at(MaxwellElement{1.0, 0.0}, kFast, 1.0), Error);
  CHECK_THROWS_AS(inelastic_strain_at(MaxwellElement{1.0, -2.0}, kFast, 1.0), Error);
}

TEST_CASE("element stress reproduces the ramp-end maxima") {
  CHECK(element_stress_at({7.0, 3.7}, kFast, 2.0) == doctest::Approx(85.57).epsilon(2.5e-4));
  CHECK(element_stress_at({1.0, 25.0}, kSlow, 20.0) == doctest::Approx(9.9).epsilon(1e-2));
  CHECK(element_stress_at({0.0, 3.7}, kFast, 50.0) == 0.0);
}

TEST_CASE("spring stress") {
  CHECK(spring_stress_at(10.0, kFast, 2.0) == doctest::Approx(200.0));
  CHECK(spring_stress_at(10.0, kFast, 77.0) == doctest::Approx(200.0));
  CHECK(spring_stress_at(10.0, kSlow, 10.0) == doctest::Approx(100.0));
  CHECK(spring_stress_at(0.0, kSlow, 10.0) == 0.0);
}

TEST_CASE("total stress sums spring and elements") {
  CHECK(total_stress_at(kTable1, kFast, 2.0) == doctest::Approx(308.05).epsilon(2e-4));
  const MaterialModel spring_only{10.0, {}};
  CHECK(total_stress_at(spring_only, kSlow, 5.0) == doctest::Approx(50.0));
  CHECK(total_stress_at(kTable1, kFast, 0.0) == 0.0);
}

TEST_CASE("stress series on the uniform grid") {
  const TimeGrid grid{1000, 100.0};
  const auto sigma = stress_series(kTable1, kSlow, grid);
  REQUIRE(sigma.size() == 1001);
  Eigen::Index argmax = 0;
  sigma.maxCoeff(&argmax);
  CHECK(grid.node(static_cast<std::size_t>(argmax)) == doctest::Approx(20.0));

  const MaterialModel spring_only{10.0, {}};
  const auto sp = stress_series(spring_only, kSlow, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(sp[static_cast<Eigen::Index>(i)] ==
          spring_stress_at(10.0, kSlow, grid.node(i)));
  }

  // two-node grid ending at the ramp end
  const LoadingProgram ramp_only{10.0, 20.0, 2.0};
  const auto tiny = stress_series(kTable1, ramp_only, TimeGrid{1, 2.0});
  REQUIRE(tiny.size() == 2);
  CHECK(tiny[0] == 0.0);
  CHECK(tiny[1] == doctest::Approx(308.0519).epsilon(1e-5));

  CHECK_THROWS_AS(stress_series(kTable1, kSlow, TimeGrid{10, 50.0}), Error);
}

TEST_CASE("decomposition sums to the total") {
  const TimeGrid grid{500, 100.0};
  const auto parts = stress_decomposition(kTable1, kFast, grid);
  REQUIRE(parts.size() == 4);
  const auto total = stress_series(kTable1, kFast, grid);
  for (Eigen::Index i = 0; i < total.size(); ++i) {
    double sum = 0.0;
    for (const auto& p : parts) sum += p[i];
    CHECK(sum == doctest::Approx(total[i]).epsilon(1e-12));
  }
  // element 1 peaks at the ramp end with the Table 5 value
  Eigen::Index argmax = 0;
  parts[1].maxCoeff(&argmax);
  CHECK(grid.node(static_cast<std::size_t>(argmax)) == doctest::Approx(2.0));
  CHECK(parts[1][argmax] == doctest::Approx(4.0).epsilon(5e-3));

  const MaterialModel spring_only{3.0, {}};
  const auto solo = stress_decomposition(spring_only, kFast, grid);
  REQUIRE(solo.size() == 1);
  CHECK(solo[0][100] == spring_stress_at(3.0, kFast, grid.node(100)));
}

TEST_CASE("branches are continuous at the ramp end") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double tau = std::exp(std::log(1e-2) + u(gen) * (std::log(1e3) - std::log(1e-2)));
    const double mu = 30.0 * u(gen);
    const double eta = 0.5 + 20.0 * u(gen);
    const double ebar = 5.0 + 30.0 * u(gen);
    const LoadingProgram p{eta, ebar, 2.0 * ebar / eta + 10.0};
    const double te = p.ramp_end();
    const double after = std::nextafter(te, p.horizon);
    const MaxwellElement e{mu, tau};

    const double s0 = element_stress_at(e, p, te);
    const double s1 = element_stress_at(e, p, after);
    CHECK(std::abs(s1 - s0) <= 1e-12 * std::max(1.0, std::abs(s0)));

    const double i0 = inelastic_strain_at(e, p, te);
    const double i1 = inelastic_strain_at(e, p, after);
    CHECK(std::abs(i1 - i0) <= 1e-12 * std::max(1.0, std::abs(i0)));
  }
}

TEST_CASE("stresses stay non-negative and inelastic strain is bounded by strain") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double tau = std::exp(std::log(1e-3) + u(gen) * (std::log(1e4) - std::log(1e-3)));
    const MaxwellElement e{25.0 * u(gen), tau};
    const LoadingProgram p{0.5 + 15.0 * u(gen), 5.0 + 25.0 * u(gen), 120.0};
    if (p.ramp_end() > p.horizon) continue;
    for (int k = 0; k <= 40; ++k) {
      const double t = p.horizon * static_cast<double>(k) / 40.0;
      CHECK(element_stress_at(e, p, t) >= 0.0);
      const double ie = inelastic_strain_at(e, p, t);
      CHECK(ie >= 0.0);
      CHECK(ie <= strain_at(p, t) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("element stress decays strictly on the hold phase") {
  std::mt19937 gen(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const MaxwellElement e{1.0 + 10.0 * u(gen), 1.0 + 40.0 * u(gen)};
    const LoadingProgram p{10.0, 20.0, 100.0};
    double prev = element_stress_at(e, p, 2.5);
    for (double t = 4.0; t <= 100.0; t += 1.5) {
      const double cur = element_stress_at(e, p, t);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("equal relaxation times superpose exactly") {
  const MaterialModel split{10.0, {{4.3, 3.7}, {2.1, 3.7}}};
  const MaterialModel merged{10.0, {{6.4, 3.7}}};
  const TimeGrid grid{400, 100.0};
  const auto a = stress_series(split, kFast, grid);
  const auto b = stress_series(merged, kFast, grid);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= 1e-12 * std::max(1.0, std::abs(b[i])));
  }
}

TEST_CASE("tiny relaxation times do not overflow") {
  const MaxwellElement e{5.0, 1e-8};
  const LoadingProgram p{10.0, 20.0, 100.0};
  CHECK(std::isfinite(element_stress_at(e, p, 100.0)));
  CHECK(std::isfinite(element_stress_at(e, p, 2.0)));
  CHECK(std::isfinite(inelastic_strain_at(e, p, 100.0)));
  const MaterialModel m{1.0, {e}};
  const auto sigma = stress_series(m, p, TimeGrid{50, 100.0});
  CHECK(sigma.allFinite());
}

namespace {

// central finite differences of the stress series w.r.t. one flat parameter
Eigen::VectorXd fd_column(const MaterialModel& mdl, const LoadingProgram& p,
                          const std::vector<double>& times, Eigen::Index which) {
  Eigen::VectorXd params = mdl.parameters();
  const double h = 1e-6 * std::max(1.0, std::abs(params[which]));
  Eigen::VectorXd hi = params, lo = params;
  hi[which] += h;
  lo[which] -= h;
  const auto n = mdl.element_count();
  auto eval = [&](const Eigen::VectorXd& q) {
    std::vector<double> mu(n), tau(n);
    for (std::size_t j = 0; j < n; ++j) {
      mu[j] = q[static_cast<Eigen::Index>(1 + j)];
      tau[j] = q[static_cast<Eigen::Index>(1 + n + j)];
    }
    return detail::stress_series_raw(q[0], mu, tau, p, times);
  };
  return (eval(hi) - eval(lo)) / (2.0 * h);
}

}  // namespace

TEST_CASE("analytic jacobian matches finite differences") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const TimeGrid grid{200, 100.0};
  const auto times = grid.nodes();
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(u(gen) * 4.0);
    std::vector<MaxwellElement> elems;
    for (std::size_t j = 0; j < n; ++j) {
      const double tau = std::exp(std::log(1e-2) + u(gen) * (std::log(1e3) - std::log(1e-2)));
      elems.push_back({30.0 * u(gen), tau});
    }
    const MaterialModel mdl{10.0 * u(gen), elems};
    const LoadingProgram p{trial % 2 == 0 ? 10.0 : 1.0, 20.0, 100.0};

    const auto jac = stress_jacobian(mdl, p, grid);
    REQUIRE(jac.cols() == static_cast<Eigen::Index>(2 * n + 1));
    double err = 0.0, scale = 0.0;
    for (Eigen::Index c = 0; c < jac.cols(); ++c) {
      const auto fd = fd_column(mdl, p, times, c);
      err += (jac.col(c) - fd).squaredNorm();
      scale += jac.col(c).squaredNorm();
    }
    CHECK(std::sqrt(err) <= 1e-6 * std::sqrt(scale));
  }
}

TEST_CASE("jacobian stiffness columns survive mu = 0") {
  const MaterialModel mdl{2.0, {{0.0, 3.7}}};
  const auto jac = stress_jacobian(mdl, kFast, TimeGrid{100, 100.0});
  // the mu_1 column is the stiffness-free closed form, nonzero away from t=0
  CHECK(jac.col(1).lpNorm<Eigen::Infinity>() > 1.0);
  // the tau_1 column vanishes with the stiffness
  CHECK(jac.col(2).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("jacobian of a pure spring is the strain column") {
  const MaterialModel mdl{4.0, {}};
  const TimeGrid grid{10, 100.0};
  const auto jac = stress_jacobian(mdl, kSlow, grid);
  REQUIRE(jac.cols() == 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(jac(static_cast<Eigen::Index>(i), 0) == strain_at(kSlow, grid.node(i)));
  }
}

TEST_CASE("model construction validates and sorts") {
  const MaterialModel m{1.0, {{2.0, 30.0}, {3.0, 0.5}}};
  CHECK(m.elements()[0].relaxation_time == 0.5);
  CHECK(m.elements()[1].relaxation_time == 30.0);
  CHECK_THROWS_AS(MaterialModel(-1.0, {}), Error);
  CHECK_THROWS_AS(MaterialModel(1.0, {{-0.5, 1.0}}), Error);
  CHECK_THROWS_AS(MaterialModel(1.0, {{0.5, 0.0}}), Error);

  const auto params = kTable1.parameters();
  const auto back = MaterialModel::from_parameters(params);
  CHECK(back.parameters() == params);
}
