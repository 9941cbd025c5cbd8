// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "core/dataset.hpp"
#include "core/rheology.hpp"

using namespace vf;

namespace {

const MaterialModel kTable1{10.0, {{4.0, 0.2}, {7.0, 3.7}, {1.0, 25.0}}};
const LoadingProgram kSlow{1.0, 20.0, 100.0};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("simulation samples the closed form uniformly") {
  const auto d = simulate_dataset(kTable1, kSlow, 1000);
  REQUIRE(d.size() == 1001);
  CHECK(d.times.front() == 0.0);
  CHECK(d.times.back() == doctest::Approx(100.0));
  CHECK(d.times[1] == doctest::Approx(0.1));
  CHECK(d.meta.program.has_value());
  CHECK(d.meta.truth.has_value());
  CHECK(d.stresses[200] == total_stress_at(kTable1, kSlow, d.times[200]));

  const MaterialModel spring_only{10.0, {}};
  const auto s = simulate_dataset(spring_only, kSlow, 10);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.stresses[i] == spring_stress_at(10.0, kSlow, s.times[i]));
  }

  CHECK(simulate_dataset(kTable1, kSlow, 1).size() == 2);
}

TEST_CASE("noise scaling hits the requested level exactly") {
  const auto clean = simulate_dataset(kTable1, kSlow, 1000);
  const auto noisy = add_noise(clean, {0.01, 42});
  std::vector<double> diff(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) diff[i] = clean.stresses[i] - noisy.stresses[i];
  CHECK(norm2(diff) / norm2(clean.stresses) == doctest::Approx(0.01).epsilon(1e-12));
  // achieved level is measured against the noisy vector
  CHECK(noisy.meta.achieved_noise_rel == doctest::Approx(norm2(diff) / norm2(noisy.stresses)));
  CHECK(noisy.meta.achieved_noise_rel > 0.0095);
  CHECK(noisy.meta.achieved_noise_rel < 0.0105);
  CHECK(noisy.meta.seed == 42);
}

TEST_CASE("noise is deterministic per seed and differs across seeds") {
  const auto clean = simulate_dataset(kTable1, kSlow, 200);
  const auto a = add_noise(clean, {0.01, 7});
  const auto b = add_noise(clean, {0.01, 7});
  CHECK(a.stresses == b.stresses);
  const auto c = add_noise(clean, {0.01, 8});
  CHECK(a.stresses != c.stresses);
  // same perturbation norm by construction
  std::vector<double> da(clean.size()), dc(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    da[i] = a.stresses[i] - clean.stresses[i];
    dc[i] = c.stresses[i] - clean.stresses[i];
  }
  CHECK(norm2(da) == doctest::Approx(norm2(dc)).epsilon(1e-12));
}

TEST_CASE("noise preconditions") {
  const auto clean = simulate_dataset(kTable1, kSlow, 100);
  CHECK(add_noise(clean, {0.0, 9}).stresses == clean.stresses);

  const auto noisy = add_noise(clean, {0.01, 1});
  CHECK_THROWS_AS(add_noise(noisy, {0.01, 2}), Error);

  StressDataset zeros;
  zeros.times = {0.0, 1.0, 2.0};
  zeros.stresses = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(add_noise(zeros, {0.01, 3}), Error);
}

TEST_CASE("truncation keeps the ramp and the requested span") {
  const auto d = simulate_dataset(kTable1, kSlow, 1000);
  const auto cut = truncate(d, 25.0);
  CHECK(cut.size() == 251);
  CHECK(cut.times.back() == doctest::Approx(25.0));
  CHECK(cut.meta.program->horizon == doctest::Approx(25.0));

  const auto same = truncate(d, 100.0);
  CHECK(same.size() == d.size());
  CHECK(same.stresses == d.stresses);

  CHECK_THROWS_AS(truncate(d, 15.0), Error);  // would cut into the ramp

  // composition collapses to the smaller cut
  const auto ab = truncate(truncate(d, 60.0), 40.0);
  const auto ba = truncate(d, 40.0);
  CHECK(ab.times == ba.times);
  CHECK(ab.stresses == ba.stresses);
}

TEST_CASE("dataset files round-trip") {
  const auto path = temp_file("viscofit_roundtrip.csv");
  const auto d = add_noise(simulate_dataset(kTable1, kSlow, 300), {0.01, 5});
  write_dataset(d, path.string());
  const auto back = read_dataset(path.string());
  CHECK(back.times == d.times);
  CHECK(back.stresses == d.stresses);
  REQUIRE(back.meta.program.has_value());
  CHECK(back.meta.program->rate == d.meta.program->rate);
  CHECK(back.meta.program->horizon == d.meta.program->horizon);
  CHECK(back.meta.achieved_noise_rel == d.meta.achieved_noise_rel);
  CHECK(back.meta.seed == d.meta.seed);
  REQUIRE(back.meta.truth.has_value());
  CHECK(back.meta.truth->parameters() == d.meta.truth->parameters());
}

TEST_CASE("malformed dataset files are rejected") {
  const auto path = temp_file("viscofit_bad.csv");

  {
    std::ofstream f(path);
    f << "t,sigma\n1.0,2.0\n0.5,3.0\n";
  }
  CHECK_THROWS_AS(read_dataset(path.string()), Error);

  {
    std::ofstream f(path);
    f << "";
  }
  CHECK_THROWS_AS(read_dataset(path.string()), Error);

  {
    std::ofstream f(path);
    f << "t,sigma\n";
  }
  CHECK_THROWS_AS(read_dataset(path.string()), Error);

  {
    std::ofstream f(path);
    f << "t,sigma\n0.0,abc\n";
  }
  CHECK_THROWS_AS(read_dataset(path.string()), Error);

  {
    std::ofstream f(path);
    f << "time;stress\n0.0;1.0\n";
  }
  CHECK_THROWS_AS(read_dataset(path.string()), Error);

  CHECK_THROWS_AS(read_dataset("/nonexistent/viscofit.csv"), Error);
  std::filesystem::remove(path);
  auto meta = path;
  meta.replace_extension(".meta.json");
  std::filesystem::remove(meta);
}
