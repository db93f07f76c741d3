#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/qstate.hpp"
#include "qcorr/state_io.hpp"

using namespace qcorr;

TEST_SUITE("qstate") {

TEST_CASE("pure state validation") {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v[0] = 1.0;
  CHECK_NOTHROW(PureState(v, {2, 2}));
  CHECK_THROWS_AS(PureState(v, {2, 3}), InvalidState);
  v[1] = 1.0;
  CHECK_THROWS_AS(PureState(v, {2, 2}), InvalidState);
  CHECK(PureState::normalized(v, {2, 2}).amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(PureState::normalized(Eigen::VectorXcd::Zero(4), {2, 2}), InvalidState);
  CHECK_THROWS_AS(PureState(Eigen::VectorXcd::Ones(2) / std::sqrt(2.0), {2, 1}), InvalidState);
}

TEST_CASE("density matrix validation") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4) / 4.0;
  CHECK_NOTHROW(DensityMatrix(m, {2, 2}));
  Eigen::MatrixXcd bad = m;
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix(bad, {2, 2}), InvalidState);
  CHECK_THROWS_AS(DensityMatrix(m * 2.0, {2, 2}), InvalidState);
  Eigen::MatrixXcd neg = Eigen::MatrixXcd::Zero(4, 4);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(neg, {2, 2}), InvalidState);
  CHECK(DensityMatrix(m, {2, 2}).purity() == doctest::Approx(0.25));
}

TEST_CASE("partial trace agrees with the brute-force sum") {
  const std::vector<int> dims{2, 3, 2};
  const Eigen::MatrixXcd rho = oracle::random_density(12, 5, 11);
  const DensityMatrix d(rho, dims);
  const std::vector<std::vector<int>> keeps{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}};
  for (const auto& keep : keeps) {
    const Eigen::MatrixXcd expect = oracle::partial_trace(rho, dims, keep);
    const DensityMatrix got = partial_trace(d, keep);
    CHECK((got.matrix() - expect).norm() < 1e-12);
  }
  const PureState psi = haar_random_pure(dims, 5);
  const Eigen::MatrixXcd full = psi.amplitudes() * psi.amplitudes().adjoint();
  CHECK((partial_trace(psi, {0, 2}).matrix() - oracle::partial_trace(full, dims, {0, 2})).norm() < 1e-12);
}

TEST_CASE("partial trace rejects bad keep sets") {
  const PureState psi = haar_random_pure({2, 2, 2}, 3);
  CHECK_THROWS_AS(partial_trace(psi, {}), InvalidPartition);
  CHECK_THROWS_AS(partial_trace(psi, {0, 0}), InvalidPartition);
  CHECK_THROWS_AS(partial_trace(psi, {0, 1, 2}), InvalidPartition);
  CHECK_THROWS_AS(partial_trace(psi, {3}), InvalidPartition);
  CHECK(reduce_to(AnyState(psi), {0, 1, 2}).purity() == doctest::Approx(1.0));
}

TEST_CASE("bipartition validation") {
  CHECK_THROWS_AS(Bipartition({0}, {}), InvalidPartition);
  CHECK_THROWS_AS(Bipartition({0, 1}, {1}), InvalidPartition);
  const Bipartition c({2, 0}, {1});
  CHECK(c.side_a() == PartyList{0, 2});
  CHECK(c.covers(3));
  CHECK_FALSE(c.covers(4));
  CHECK_THROWS_AS(c.validate(2), InvalidPartition);
  CHECK(Bipartition::a_vs_rest(4).side_b() == PartyList{1, 2, 3});
}

TEST_CASE("families are normalized and built as written") {
  const double l = 1.0 / std::sqrt(5.0);
  const std::vector<double> p{l, l, l, l, l};
  const PureState f = make_family("3q", p);
  CHECK(f.amplitudes().norm() == doctest::Approx(1.0));
  CHECK(std::abs(f.amplitudes()[5] - Complex(l, 0)) < 1e-12);  // |101>
  const PureState w4 = make_family("w4", {});
  CHECK(std::abs(w4.amplitudes()[8] - 0.5) < 1e-12);
  CHECK(std::abs(w4.amplitudes()[0]) < 1e-12);
  const std::vector<double> ghz{3};
  CHECK(make_family("ghz", ghz).amplitudes()[7].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  const std::vector<double> th{0.3, 1.1};
  CHECK(make_family("4q-theta", th).amplitudes().norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_family("nope", {}), InvalidParameter);
  const std::vector<double> bad{0.9, 0.9, 0.9, 0.9, 0.9};
  CHECK_THROWS_AS(make_family("3q", bad), InvalidParameter);
  const std::vector<double> two{2};
  CHECK_THROWS_AS(make_family("ghz", two), InvalidParameter);
}

TEST_CASE("purify reduces back to the input") {
  const DensityMatrix rho(oracle::random_density(4, 3, 8), {2, 2});
  const PureState psi = purify(rho);
  CHECK(psi.dims().back() == 3);
  CHECK((partial_trace(psi, {0, 1}).matrix() - rho.matrix()).norm() < 1e-10);
  const DensityMatrix pure = DensityMatrix::from_pure(haar_random_pure({2, 2}, 1));
  CHECK(purify(pure).dims().back() == 2);
}

TEST_CASE("haar sampling is seeded and has the known marginal purity") {
  CHECK(haar_random_pure({2, 2, 2}, 42).amplitudes() == haar_random_pure({2, 2, 2}, 42).amplitudes());
  CHECK(haar_random_pure({2, 2, 2}, 42).amplitudes() != haar_random_pure({2, 2, 2}, 43).amplitudes());
  // E[Tr rho_A^2] = (dA + dB) / (dA dB + 1).
  double two = 0.0;
  double three = 0.0;
  const int n = 4000;
  for (int s = 0; s < n; ++s) {
    two += partial_trace(haar_random_pure({2, 2}, derive_seed(1, s)), {0}).purity();
    three += partial_trace(haar_random_pure({2, 2, 2}, derive_seed(2, s)), {0}).purity();
  }
  CHECK(two / n == doctest::Approx(4.0 / 5.0).epsilon(0.01));
  CHECK(three / n == doctest::Approx(2.0 / 3.0).epsilon(0.01));
}

TEST_CASE("state json round trip") {
  const PureState psi = haar_random_pure({2, 3}, 9);
  const AnyState back = state_from_json(state_to_json(psi));
  REQUIRE(std::holds_alternative<PureState>(back));
  CHECK((std::get<PureState>(back).amplitudes() - psi.amplitudes()).norm() < 1e-14);
  const DensityMatrix rho(oracle::random_density(4, 2, 4), {2, 2});
  const AnyState rb = state_from_json(state_to_json(rho));
  REQUIRE(std::holds_alternative<DensityMatrix>(rb));
  CHECK((std::get<DensityMatrix>(rb).matrix() - rho.matrix()).norm() < 1e-14);
  const auto j = nlohmann::json::parse(R"({"dims":[2,2],"amplitudes":[{"index":[0,0],"re":0.5}]})");
  CHECK_THROWS_AS(state_from_json(j), InvalidState);
}

}
