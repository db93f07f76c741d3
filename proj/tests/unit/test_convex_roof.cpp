#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qcorr/convex_roof.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/measures.hpp"

using namespace qcorr;

namespace {

const Bipartition kAB({0}, {1});

OptimizerConfig quick(int restarts = 4) {
  OptimizerConfig c;
  c.restarts = restarts;
  return c;
}

}  // namespace

TEST_SUITE("convex_roof") {

TEST_CASE("unitary helpers") {
  const Eigen::MatrixXcd u = haar_unitary(5, 3);
  CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-12);
  CHECK(u == haar_unitary(5, 3));
  Eigen::MatrixXcd h = oracle::random_density(4, 4, 2);
  const Eigen::MatrixXcd a = Complex(0, 1) * h;
  const Eigen::MatrixXcd e = unitary_exp(a);
  CHECK((e.adjoint() * e - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
  // First terms of the series for a small argument.
  const Eigen::MatrixXcd small = 1e-4 * a;
  const Eigen::MatrixXcd series = Eigen::MatrixXcd::Identity(4, 4) + small + 0.5 * small * small;
  CHECK((unitary_exp(small) - series).norm() < 1e-11);
}

TEST_CASE("analytic gradient matches finite differences") {
  for (int s = 0; s < 6; ++s) {
    const DensityMatrix rho(oracle::random_density(6, 3, derive_seed(12, s)), {2, 3});
    const EnsembleObjective obj(rho, concurrence_functional({2, 3}, kAB), 4);
    CHECK(obj.has_analytic_gradient());
    const Eigen::MatrixXcd w = haar_unitary(4, derive_seed(13, s));
    const Eigen::MatrixXcd g = obj.riemannian_gradient(w);
    const Eigen::MatrixXcd fd = obj.finite_difference_gradient(w);
    CHECK((g + g.adjoint()).norm() < 1e-12);
    CHECK((g - fd).norm() < 1e-6 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("ensemble members reproduce the state") {
  const DensityMatrix rho(oracle::random_density(4, 2, 31), {2, 2});
  const EnsembleObjective obj(rho, concurrence_functional({2, 2}, kAB), 3);
  CHECK(obj.rank() == 2);
  const Eigen::MatrixXcd psi = obj.members(haar_unitary(3, 1));
  CHECK((psi * psi.adjoint() - rho.matrix()).norm() < 1e-12);
  CHECK_THROWS_AS(EnsembleObjective(rho, concurrence_functional({2, 2}, kAB), 1), ConfigError);
}

TEST_CASE("pure input returns the pure value in both directions") {
  const PureState psi = haar_random_pure({2, 3}, 4);
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  const double c = concurrence_pure(psi, kAB).value;
  CHECK(convex_roof(rho, kAB, RoofDirection::Minimize, quick()).value == doctest::Approx(c).epsilon(1e-9));
  CHECK(convex_roof(rho, kAB, RoofDirection::Maximize, quick()).value == doctest::Approx(c).epsilon(1e-9));
}

TEST_CASE("roof brackets the two-qubit closed forms") {
  OptimizerConfig opt = quick();
  opt.ensemble_size = 4;
  for (int s = 0; s < 24; ++s) {
    const DensityMatrix rho(oracle::random_density(4, 1 + s % 4, derive_seed(14, s)), {2, 2});
    const auto lo = convex_roof(rho, kAB, RoofDirection::Minimize, opt);
    const auto hi = convex_roof(rho, kAB, RoofDirection::Maximize, opt);
    const double w = wootters_concurrence(rho).value;
    const double a = assistance_2q(rho).value;
    CHECK(lo.exactness == Exactness::UpperEstimate);
    CHECK(hi.exactness == Exactness::LowerEstimate);
    CHECK(lo.value >= w - 1e-9);
    CHECK(lo.value <= w + 1e-3);
    CHECK(hi.value <= a + 1e-9);
    CHECK(hi.value >= a - 1e-3);
  }
}

TEST_CASE("more restarts never worsen the result") {
  const DensityMatrix rho(oracle::random_density(6, 4, 99), {2, 3});
  double prev_min = 1e9;
  double prev_max = -1e9;
  for (int r = 1; r <= 6; ++r) {
    const double lo = convex_roof(rho, kAB, RoofDirection::Minimize, quick(r)).value;
    const double hi = convex_roof(rho, kAB, RoofDirection::Maximize, quick(r)).value;
    CHECK(lo <= prev_min);
    CHECK(hi >= prev_max);
    prev_min = lo;
    prev_max = hi;
  }
}

TEST_CASE("results are seeded and deterministic") {
  const DensityMatrix rho(oracle::random_density(6, 3, 5), {3, 2});
  const auto a = convex_roof(rho, kAB, RoofDirection::Minimize, quick());
  const auto b = convex_roof(rho, kAB, RoofDirection::Minimize, quick());
  CHECK(a.value == b.value);
  CHECK(a.optimizer->best_trace_length == b.optimizer->best_trace_length);
}

TEST_CASE("local unitaries leave the roof unchanged") {
  const Eigen::MatrixXcd rho = oracle::random_density(6, 3, 55);
  const Eigen::MatrixXcd u = oracle::kron(oracle::random_unitary(2, 7), oracle::random_unitary(3, 8));
  const DensityMatrix a(rho, {2, 3});
  const DensityMatrix b(u * rho * u.adjoint(), {2, 3});
  const auto opt = quick(8);
  CHECK(convex_roof(a, kAB, RoofDirection::Minimize, opt).value ==
        doctest::Approx(convex_roof(b, kAB, RoofDirection::Minimize, opt).value).epsilon(1e-4));
  CHECK(convex_roof(a, kAB, RoofDirection::Maximize, opt).value ==
        doctest::Approx(convex_roof(b, kAB, RoofDirection::Maximize, opt).value).epsilon(1e-4));
}

TEST_CASE("mixed W marginal across the two-party side") {
  // 3/4 |W3><W3| + 1/4 |000><000|, the A B1 B2 marginal of W4.
  const DensityMatrix rho = partial_trace(make_family("w4", {}), {0, 1, 2});
  const auto v = convex_roof(rho, Bipartition({0}, {1, 2}), RoofDirection::Minimize, OptimizerConfig{});
  CHECK(v.value == doctest::Approx(std::sqrt(0.5)).epsilon(5e-3));
  CHECK(v.value >= std::sqrt(0.5) - 1e-9);
}

TEST_CASE("functional without gradient falls back to finite differences") {
  WeightedPureFunctional fn = concurrence_functional({2, 2}, kAB);
  fn.gradient = nullptr;
  const DensityMatrix rho(oracle::random_density(4, 2, 61), {2, 2});
  const auto v = convex_roof(rho, fn, RoofDirection::Minimize, quick());
  CHECK(v.value >= wootters_concurrence(rho).value - 1e-9);
  CHECK(v.value <= wootters_concurrence(rho).value + 1e-3);
}

}
