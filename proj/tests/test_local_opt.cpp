// Copyright 2026 The qstrength Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qstrength/local.hpp"
#include "qstrength/local_opt.hpp"
#include "qstrength/unitary.hpp"

using namespace qstrength;
using Catch::Matchers::WithinAbs;

namespace {

LocalUnitaryProduct random_local(int n, std::uint64_t seed) {
  Rng rng(seed);
  return LocalUnitaryProduct::haar_random(n, rng);
}

const std::vector<MetricKind> kAllMetrics{MetricKind::frobenius(), MetricKind::frobenius(true),
                                          MetricKind::operator_norm()};

}  // namespace

TEST_CASE("expand") {
  const Factor x = standard_gate(Gate::X).matrix();
  const Factor h = standard_gate(Gate::H).matrix();
  CHECK(expand(LocalUnitaryProduct::identity(2)).matrix() == ComplexMatrix::Identity(4, 4));
  CHECK(expand(LocalUnitaryProduct({x})).matrix() == ComplexMatrix(x));
  const auto hx = expand(LocalUnitaryProduct({h, x}));
  const auto ref = tensor(standard_gate(Gate::H), standard_gate(Gate::X));
  CHECK((hx.matrix().col(0) - ref.matrix().col(0)).norm() == 0.0);
  CHECK((hx.matrix() - ref.matrix()).norm() == 0.0);
}

TEST_CASE("expand agrees with a Kronecker chain on random factors") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto l = random_local(3, s);
    const auto a = UnitaryOperator(l.factor(0));
    const auto b = UnitaryOperator(l.factor(1));
    const auto c = UnitaryOperator(l.factor(2));
    CHECK((expand(l).matrix() - tensor(tensor(a, b), c).matrix()).norm() < 1e-14);
  }
}

TEST_CASE("LocalUnitaryProduct rejects non-unitary factors") {
  Factor bad = Factor::Identity();
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(LocalUnitaryProduct({Factor::Identity(), bad}), NotUnitary);
}

TEST_CASE("local_overlap") {
  const auto u = haar_random_unitary(2, 17);
  const Complex t = local_overlap(LocalUnitaryProduct::identity(2), u);
  CHECK(std::abs(t - u.matrix().trace()) < 1e-14);
  const auto l = random_local(3, 4);
  CHECK(std::abs(local_overlap(l, expand(l)) - Complex{8.0, 0.0}) < 1e-12);
  CHECK_THROWS_AS(local_overlap(l, u), DimensionMismatch);
}

TEST_CASE("environment") {
  SECTION("single qubit returns u") {
    const auto u = haar_random_unitary(1, 2);
    const auto l = random_local(1, 3);
    CHECK((environment(u, l, 0) - Factor(u.matrix())).norm() == 0.0);
  }
  SECTION("u = expand(l) gives factor_j * dim / 2") {
    const auto l = random_local(3, 8);
    const auto u = expand(l);
    for (int j = 0; j < 3; ++j) {
      CHECK((environment(u, l, j) - 4.0 * l.factor(j)).norm() < 1e-12);
    }
  }
  SECTION("matches the matrix-unit definition") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto u = haar_random_unitary(3, s);
      const auto l = random_local(3, s + 50);
      for (int j = 0; j < 3; ++j) {
        const Factor ref = oracle::environment_by_matrix_units(u.matrix(), l.factors(), j);
        CHECK((environment(u, l, j) - ref).norm() < 1e-12);
        // and the defining identity trace(L^dagger u) = trace(A_j^dagger M_j)
        const Complex lhs = local_overlap(l, u);
        const Complex rhs = (l.factor(j).adjoint() * environment(u, l, j)).trace();
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }
  }
  SECTION("linear in u") {
    const ComplexMatrix u1 = haar_random_unitary(2, 1).matrix();
    const ComplexMatrix u2 = haar_random_unitary(2, 2).matrix();
    const auto l = random_local(2, 3);
    const ComplexMatrix sum = u1 + u2;
    for (int j = 0; j < 2; ++j) {
      const Factor lhs = environment(sum, l.factors(), j);
      const Factor rhs = environment(u1, l.factors(), j) + environment(u2, l.factors(), j);
      CHECK((lhs - rhs).norm() < 1e-13);
    }
  }
  SECTION("index out of range") {
    const auto l = LocalUnitaryProduct::identity(2);
    const auto u = UnitaryOperator::identity(2);
    CHECK_THROWS_AS(environment(u, l, 2), std::out_of_range);
    CHECK_THROWS_AS(environment(u, l, -1), std::out_of_range);
  }
}

TEST_CASE("polar_update") {
  const Factor v = haar_random_unitary(1, 21).matrix();
  CHECK((polar_update(v) - v).norm() < 1e-12);
  Factor d = Factor::Zero();
  d(0, 0) = 3.0;
  d(1, 1) = 5.0;
  CHECK((polar_update(d) - Factor::Identity()).norm() < 1e-15);
  CHECK(polar_update(Factor::Zero()) == Factor::Identity());

  // Rank one: still unitary, and still a maximizer of Re trace(A^dagger m).
  Factor r1;
  r1 << Complex{1.0, 2.0}, Complex{0.5, 0.0}, Complex{2.0, 4.0}, Complex{1.0, 0.0};
  const Factor p = polar_update(r1);
  CHECK(is_unitary(ComplexMatrix(p), 1e-12));
  CHECK_THAT((p.adjoint() * r1).trace().real(),
             WithinAbs(Eigen::JacobiSVD<Factor>(r1).singularValues().sum(), 1e-12));
}

TEST_CASE("polar_update maximizes Re trace(A^dagger m) against random unitaries") {
  Rng rng(5);
  for (int s = 0; s < 100; ++s) {
    Factor m;
    for (int k = 0; k < 4; ++k) m(k / 2, k % 2) = rng.complex_normal();
    const double best = (polar_update(m).adjoint() * m).trace().real();
    for (int t = 0; t < 20; ++t) {
      const Factor a = haar_random_matrix(2, rng);
      CHECK((a.adjoint() * m).trace().real() <= best + 1e-12);
    }
  }
}

TEST_CASE("grid oracle: maximal CNOT and SWAP overlaps", "[oracle]") {
  const Eigen::Matrix4cd cnot = standard_gate(Gate::CNOT).matrix();
  const Eigen::Matrix4cd swap = standard_gate(Gate::SWAP).matrix();
  CHECK_THAT(oracle::max_two_qubit_overlap(cnot), WithinAbs(2.0 * std::numbers::sqrt2, 1e-4));
  CHECK_THAT(oracle::max_two_qubit_overlap(swap), WithinAbs(2.0, 1e-4));
}

TEST_CASE("maximize_local_overlap") {
  OptimizerOptions opts;
  SECTION("local input reaches dim") {
    const auto l = random_local(3, 77);
    CHECK_THAT(maximize_local_overlap(expand(l), opts).best_abs_overlap, WithinAbs(8.0, 1e-9));
  }
  SECTION("CNOT") {
    const auto r = maximize_local_overlap(standard_gate(Gate::CNOT), opts);
    CHECK_THAT(r.best_abs_overlap, WithinAbs(2.0 * std::numbers::sqrt2, 1e-6));
    CHECK_THAT(std::abs(local_overlap(r.argmax, standard_gate(Gate::CNOT))),
               WithinAbs(r.best_abs_overlap, 1e-12));
  }
  SECTION("SWAP") {
    const auto r = maximize_local_overlap(standard_gate(Gate::SWAP), opts);
    CHECK_THAT(r.best_abs_overlap, WithinAbs(2.0, 1e-6));
  }
  SECTION("agrees with the grid oracle on Haar gates") {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto u = haar_random_unitary(2, 300 + s);
      const double ref = oracle::max_two_qubit_overlap(u.matrix(), 8, 8);
      CHECK(maximize_local_overlap(u, opts).best_abs_overlap >= ref - 1e-6);
    }
  }
}

TEST_CASE("Frobenius traces ascend monotonically") {
  OptimizerOptions opts;
  opts.restarts = 8;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto u = haar_random_unitary(2 + static_cast<int>(s % 2), s);
    for (const auto& tr : maximize_local_overlap(u, opts).traces) {
      REQUIRE(tr.objective.size() >= 2);
      for (std::size_t k = 1; k < tr.objective.size(); ++k) {
        CHECK(tr.objective[k] >= tr.objective[k - 1] - 1e-12);
      }
    }
  }
}

TEST_CASE("operator-norm traces never increase") {
  OptimizerOptions opts;
  opts.restarts = 4;
  const auto r = minimize_distance(MetricKind::operator_norm(), haar_random_unitary(2, 9), opts);
  for (const auto& tr : r.traces) {
    for (std::size_t k = 1; k < tr.objective.size(); ++k) {
      CHECK(tr.objective[k] <= tr.objective[k - 1]);
    }
  }
}

TEST_CASE("minimize_distance examples") {
  OptimizerOptions opts;
  const auto cnot = standard_gate(Gate::CNOT);
  CHECK_THAT(minimize_distance(MetricKind::frobenius(), cnot, opts).value,
             WithinAbs(std::sqrt(8.0 - 4.0 * std::numbers::sqrt2), 1e-6));
  for (const auto& m : kAllMetrics) {
    const auto l = random_local(2, 1234);
    CHECK(minimize_distance(m, expand(l), opts).value <= 1e-8);
  }
  const auto id3 = minimize_distance(MetricKind::frobenius(), UnitaryOperator::identity(3), opts);
  CHECK(id3.value <= 1e-12);
  // Each factor is a phase times I, and the phases multiply to 1.
  CHECK((expand(id3.argmin).matrix() - ComplexMatrix::Identity(8, 8)).norm() < 1e-6);
  for (int j = 0; j < 3; ++j) {
    const Factor& f = id3.argmin.factor(j);
    CHECK((f - f(0, 0) * Factor::Identity()).norm() < 1e-6);
  }
}

TEST_CASE("witness exactness and upper-bound direction") {
  OptimizerOptions opts;
  opts.restarts = 6;
  for (const auto& m : kAllMetrics) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto u = haar_random_unitary(2, 500 + s);
      const auto r = minimize_distance(m, u, opts);
      CHECK(std::abs(r.value - distance(m, u, expand(r.argmin))) <= 1e-12);
      for (double v : r.per_restart_values) CHECK(r.value <= v);

      const auto feasible = random_local(2, 900 + s);
      OptimizerOptions with = opts;
      with.restarts = 1;
      with.warm_starts.push_back(feasible);
      CHECK(minimize_distance(m, u, with).value <= distance(m, u, expand(feasible)) + 1e-9);
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  OptimizerOptions one;
  one.restarts = 8;
  one.master_seed = 42;
  OptimizerOptions many = one;
  many.threads = 4;
  const auto u = haar_random_unitary(2, 8);
  for (const auto& m : kAllMetrics) {
    const auto a = minimize_distance(m, u, one);
    const auto b = minimize_distance(m, u, many);
    CHECK(a.value == b.value);
    CHECK(a.per_restart_values == b.per_restart_values);
    CHECK(expand(a.argmin).matrix() == expand(b.argmin).matrix());
  }
}

TEST_CASE("global phase is absorbed by the Frobenius engine") {
  OptimizerOptions opts;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto u = haar_random_unitary(2, 60 + s);
    const UnitaryOperator rotated(std::exp(i_ * (0.3 + static_cast<double>(s))) * u.matrix());
    const double a = minimize_distance(MetricKind::frobenius(), u, opts).value;
    const double b = minimize_distance(MetricKind::frobenius(), rotated, opts).value;
    CHECK(std::abs(a - b) <= 1e-9);
  }
}

TEST_CASE("optimizer options are validated") {
  OptimizerOptions opts;
  opts.restarts = 0;
  CHECK_THROWS_AS(minimize_distance(MetricKind::frobenius(), UnitaryOperator::identity(2), opts),
                  std::invalid_argument);
  opts = {};
  opts.convergence_tol = 0.0;
  CHECK_THROWS_AS(maximize_local_overlap(UnitaryOperator::identity(2), opts),
                  std::invalid_argument);
  opts = {};
  opts.warm_starts.push_back(LocalUnitaryProduct::identity(3));
  CHECK_THROWS_AS(minimize_distance(MetricKind::frobenius(), UnitaryOperator::identity(2), opts),
                  DimensionMismatch);
}
