// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <doctest.h>

#include "core/optimize.hpp"
#include "core/rheology.hpp"

using namespace vf;

namespace {

const MaterialModel kTable1{10.0, {{4.0, 0.2}, {7.0, 3.7}, {1.0, 25.0}}};
const LoadingProgram kSlow{1.0, 20.0, 100.0};
const LoadingProgram kFast{10.0, 20.0, 100.0};

double norm2sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

TEST_CASE("residual vanishes at the truth and matches the noise energy") {
  const auto exact = simulate_dataset(kTable1, kSlow, 500);
  CHECK(residual_norm2(kTable1, exact) == 0.0);

  const auto noisy = add_noise(exact, {0.01, 3});
  std::vector<double> diff(exact.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    diff[i] = exact.stresses[i] - noisy.stresses[i];
  }
  CHECK(residual_norm2(kTable1, noisy) == doctest::Approx(norm2sq(diff)).epsilon(1e-12));
}

TEST_CASE("a base-stiffness offset contributes the squared strain") {
  const auto exact = simulate_dataset(kTable1, kSlow, 1000);
  const MaterialModel bumped{11.0, {{4.0, 0.2}, {7.0, 3.7}, {1.0, 25.0}}};
  double strain_sq = 0.0;
  for (double t : exact.times) {
    const double e = strain_at(kSlow, t);
    strain_sq += e * e;
  }
  CHECK(residual_norm2(bumped, exact) == doctest::Approx(strain_sq).epsilon(1e-10));
}

TEST_CASE("regularized cost variants") {
  const auto exact = simulate_dataset(kTable1, kSlow, 300);
  const double base = residual_norm2(kTable1, exact);

  CHECK(regularized_cost(kTable1, exact, {RegularizerKind::none, 0.0}) == base);
  CHECK(regularized_cost(kTable1, exact, {RegularizerKind::tikhonov_full, 0.0}) == base);
  CHECK(regularized_cost(kTable1, exact, {RegularizerKind::first_stiffness, 0.0}) == base);

  // hand sum of squares of (10, 4, 7, 1, 0.2, 3.7, 25)
  CHECK(regularized_cost(kTable1, exact, {RegularizerKind::tikhonov_full, 1.0}) ==
        doctest::Approx(804.73).epsilon(1e-12));

  // the penalized stiffness is the one paired with the smallest relaxation time
  CHECK(regularized_cost(kTable1, exact, {RegularizerKind::first_stiffness, 2.0}) ==
        doctest::Approx(base + 2.0 * 16.0).epsilon(1e-12));

  const MaterialModel zero{0.0, {}};
  const auto zero_pen = regularized_cost(zero, exact, {RegularizerKind::tikhonov_full, 1.0});
  CHECK(zero_pen == residual_norm2(zero, exact));

  CHECK_THROWS_AS(regularized_cost(kTable1, exact, {RegularizerKind::none, 0.5}), Error);
  CHECK_THROWS_AS(regularized_cost(kTable1, exact, {RegularizerKind::tikhonov_full, -1.0}),
                  Error);
}

namespace {

double cost_of_params(const Eigen::VectorXd& params, const StressDataset& d,
                      const Regularizer& reg) {
  return regularized_cost(MaterialModel::from_parameters(params), d, reg);
}

}  // namespace

TEST_CASE("analytic cost gradient matches finite differences") {
  const auto noisy = add_noise(simulate_dataset(kTable1, kFast, 150), {0.01, 11});
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const Regularizer regs[] = {{RegularizerKind::none, 0.0},
                              {RegularizerKind::tikhonov_full, 0.3},
                              {RegularizerKind::first_stiffness, 0.7}};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(u(gen) * 3.0);
    std::vector<MaxwellElement> elems;
    for (std::size_t j = 0; j < n; ++j) {
      // keep relaxation times well separated so the penalized index is stable
      elems.push_back({0.5 + 25.0 * u(gen),
                       std::exp(std::log(2e-2) + u(gen) * (std::log(5e2) - std::log(2e-2)))});
    }
    const MaterialModel mdl{15.0 * u(gen), elems};
    const auto& reg = regs[trial % 3];

    // gradient on the raw parameters: 2 J^T r plus the penalty derivative
    const Eigen::VectorXd r = residual(mdl, noisy);
    const Eigen::MatrixXd jac = stress_jacobian(mdl, *noisy.meta.program, noisy.times);
    Eigen::VectorXd grad = 2.0 * jac.transpose() * r;
    const Eigen::VectorXd params = mdl.parameters();
    if (reg.kind == RegularizerKind::tikhonov_full) {
      grad += 2.0 * reg.lambda * params;
    } else if (reg.kind == RegularizerKind::first_stiffness) {
      grad[1] += 2.0 * reg.lambda * params[1];  // elements are sorted by tau
    }

    Eigen::VectorXd fd(params.size());
    for (Eigen::Index k = 0; k < params.size(); ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(params[k]));
      Eigen::VectorXd hi = params, lo = params;
      hi[k] += h;
      lo[k] -= h;
      fd[k] = (cost_of_params(hi, noisy, reg) - cost_of_params(lo, noisy, reg)) / (2.0 * h);
    }
    CHECK((grad - fd).norm() <= 1e-6 * std::max(1.0, grad.norm()));
  }
}

TEST_CASE("solving from the truth terminates immediately") {
  const auto exact = simulate_dataset(kTable1, kSlow, 500);
  FitConfig cfg;
  cfg.max_elements = 3;
  const auto rec = solve_single(kTable1, exact, cfg);
  CHECK_FALSE(rec.rejected);
  CHECK(rec.iterations <= 2);
  CHECK(rec.residual < 1e-20);
  CHECK(rec.cost < 1e-20);
}

TEST_CASE("iterates respect the relaxation-time bounds") {
  const auto exact = simulate_dataset(kTable1, kFast, 200);
  FitConfig cfg;
  cfg.max_elements = 2;
  cfg.stopping.max_iterations = 120;
  const MaterialModel start{8.0, {{2.0, cfg.bounds.tau_min}, {3.0, 5.0}}};
  const auto rec = solve_single(start, exact, cfg);
  CHECK_FALSE(rec.rejected);
  CHECK(rec.cost <= regularized_cost(start, exact, cfg.regularizer));
  for (const auto& e : rec.converged.elements()) {
    CHECK(e.relaxation_time >= cfg.bounds.tau_min);
    CHECK(e.relaxation_time <= cfg.bounds.tau_max);
  }
}

TEST_CASE("a good start fits exact data to machine residual") {
  const auto exact = simulate_dataset(kTable1, kSlow, 1000);
  FitConfig cfg;
  cfg.max_elements = 5;
  const MaterialModel start{9.0,
                            {{3.0, 0.15}, {5.0, 3.0}, {2.0, 5.0}, {1.5, 20.0}, {0.5, 60.0}}};
  const auto rec = solve_single(start, exact, cfg);
  CHECK_FALSE(rec.rejected);
  CHECK(rec.residual < 1e-10);
}

TEST_CASE("multistart bookkeeping") {
  const auto exact = simulate_dataset(kTable1, kFast, 120);
  FitConfig cfg;
  cfg.max_elements = 2;
  cfg.start_count = 6;
  cfg.seed = 99;
  cfg.stopping.max_iterations = 60;

  const auto result = multistart_fit(exact, cfg, 2);
  REQUIRE(result.starts.size() == 6);
  for (const auto& rec : result.starts) {
    CHECK_FALSE(rec.rejected);
    const double start_cost = regularized_cost(rec.start, exact, cfg.regularizer);
    CHECK(rec.cost <= start_cost);
  }
  double best = result.starts[0].cost;
  for (const auto& rec : result.starts) best = std::min(best, rec.cost);
  CHECK(result.cost == best);
  CHECK(result.starts[result.best_index].cost == best);

  // K_s = 1 equals a single solve from the same generated start
  FitConfig single = cfg;
  single.start_count = 1;
  const auto starts = generate_starts(exact, single);
  REQUIRE(starts.size() == 1);
  const auto lone = multistart_fit(exact, single, 1);
  const auto direct = solve_single(starts[0], exact, single);
  CHECK(lone.cost == direct.cost);
  CHECK(lone.model.parameters() == direct.converged.parameters());

  // duplicate starts give duplicate records
  const std::vector<MaterialModel> dup{starts[0], starts[0]};
  FitConfig two = cfg;
  two.start_count = 2;
  const auto both = multistart_fit(exact, two, dup, 2);
  REQUIRE(both.starts.size() == 2);
  CHECK(both.starts[0].cost == both.starts[1].cost);
  CHECK(both.starts[0].converged.parameters() == both.starts[1].converged.parameters());
}

TEST_CASE("element order in a start does not change the outcome") {
  const auto exact = simulate_dataset(kTable1, kFast, 100);
  FitConfig cfg;
  cfg.max_elements = 3;
  cfg.stopping.max_iterations = 40;
  Eigen::VectorXd a(7), b(7);
  a << 9.0, 3.0, 6.0, 1.5, 0.3, 4.0, 20.0;
  b << 9.0, 1.5, 3.0, 6.0, 20.0, 0.3, 4.0;  // same pairs, permuted
  const auto ra = solve_single(MaterialModel::from_parameters(a), exact, cfg);
  const auto rb = solve_single(MaterialModel::from_parameters(b), exact, cfg);
  CHECK(ra.cost == doctest::Approx(rb.cost).epsilon(1e-10));
}

TEST_CASE("hopeless starts are rejected with diagnostics") {
  const auto exact = simulate_dataset(kTable1, kFast, 50);
  FitConfig cfg;
  cfg.max_elements = 1;
  cfg.start_count = 1;
  const MaterialModel outside{5.0, {{1.0, 5e3}}};  // beyond tau_max
  const auto rec = solve_single(outside, exact, cfg);
  CHECK(rec.rejected);
  CHECK_FALSE(rec.note.empty());

  const std::vector<MaterialModel> bad{outside};
  CHECK_THROWS_AS(multistart_fit(exact, cfg, bad, 1), Error);
}

TEST_CASE("fit configuration validation") {
  FitConfig cfg;
  cfg.max_elements = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.start_count = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.bounds.tau_min = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.regularizer = {RegularizerKind::none, 0.1};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  CHECK_NOTHROW(cfg.validate());

  const StressDataset empty;
  CHECK_THROWS_AS(multistart_fit(empty, cfg, 1), Error);
}
