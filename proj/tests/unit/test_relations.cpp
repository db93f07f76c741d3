#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/relations.hpp"

using namespace qcorr;

namespace {

constexpr PartyMask B1 = 1u << 1;
constexpr PartyMask B2 = 1u << 2;
constexpr PartyMask B3 = 1u << 3;

// Four parties, all seven components.
TableComponents table4(double scale = 1.0) {
  return TableComponents(4, {{B1, 0.61 * scale},
                             {B2, 0.37 * scale},
                             {B3, 0.22 * scale},
                             {B1 | B2, 0.70 * scale},
                             {B1 | B3, 0.66 * scale},
                             {B2 | B3, 0.45 * scale},
                             {B1 | B2 | B3, 0.78 * scale}});
}

CorrelationMeasure named(const std::string& n) { return CorrelationMeasure::from_name(n); }

}  // namespace

TEST_SUITE("relations") {

TEST_CASE("masks") {
  CHECK(mask_of({1, 3}) == (B1 | B3));
  CHECK(parties_of(B2 | B3) == PartyList{2, 3});
}

TEST_CASE("tripartite residual") {
  CHECK(residual_tripartite(0.4, 0.4, 0.8, 1.0) == doctest::Approx(0.0));
  CHECK(residual_tripartite(0.4, 0.4, 2.0 * std::sqrt(3.0) / 5.0, 2.0) == doctest::Approx(-0.16));
  CHECK(residual_tripartite(0.5, 0.5, 0.5, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(residual_tripartite(-0.1, 0.4, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(residual_tripartite(0.0, 0.4, 0.5, 0.0), DomainError);
}

TEST_CASE("weighted pair and ordering weights") {
  CHECK(lemma_weighted_pair(0.5, 0.3, 2.0, 2.0) == doctest::Approx(0.34));
  CHECK(lemma_weighted_pair(0.5, 0.5, 3.0, 2.0) == doctest::Approx(std::pow(0.5, 3) * std::pow(2.0, 1.5)));
  CHECK_THROWS_AS(lemma_weighted_pair(0.3, 0.5, 2.0, 2.0), OrderingError);
  CHECK(ordering_weights(4, 1, 0.5) == std::vector<double>{1.0, 0.25, 0.25, 0.5});
  CHECK(ordering_weights(4, 0, 0.5) == std::vector<double>{0.5, 0.5, 0.5, 1.0});
  CHECK(ordering_weights(3, 2, 0.5) == std::vector<double>{1.0, 0.5, 0.25});
}

TEST_CASE("three-party tree is the tripartite residual") {
  const TableComponents t(3, {{B1, 0.4}, {B2, 0.3}, {B1 | B2, 0.6}});
  const auto tree = residual_general(t, 1.3, ResidualStrategy::Max, RelationSide::Polygamy);
  CHECK(tree.terms.at(B1 | B2) == doctest::Approx(residual_tripartite(0.4, 0.3, 0.6, 1.3)));
  CHECK(tree.level_sum == 0.0);
  CHECK(tree.exact);
  const auto mono = residual_general(t, 2.0, ResidualStrategy::Max, RelationSide::Monogamy);
  CHECK(mono.terms.at(B1 | B2) == doctest::Approx(0.36 - 0.16 - 0.09));
  CHECK_THROWS_AS(t.component(B3), InvalidParameter);
}

TEST_CASE("four-party tree levels") {
  const auto t = table4();
  const double a = 1.4;
  const auto tree = residual_general(t, a, ResidualStrategy::Max, RelationSide::Polygamy);
  auto r2 = [&](PartyMask x, PartyMask y) {
    return std::pow(t.component(x).value, a) + std::pow(t.component(y).value, a) -
           std::pow(t.component(x | y).value, a);
  };
  const double expect = std::max({r2(B1, B2), r2(B1, B3), r2(B2, B3)});
  REQUIRE(tree.levels.size() == 1);
  CHECK(tree.levels[0] == doctest::Approx(expect));
  CHECK(tree.level_sum == doctest::Approx(expect));
  const auto mean = residual_general(t, a, ResidualStrategy::Mean, RelationSide::Polygamy);
  CHECK(mean.level_sum == doctest::Approx((r2(B1, B2) + r2(B1, B3) + r2(B2, B3)) / 3.0));
}

TEST_CASE("thm1 equals thm2 for four parties") {
  for (double a : {0.3, 0.9, 1.5}) {
    const auto t = table4();
    CHECK(thm1_bound(t, a, 2.0).value == doctest::Approx(thm2_bound(t, a, 2.0).value).epsilon(1e-14));
    CHECK(thm2_bound(t, a, 2.0).value <= polygamy_bound_base(t, a, 2.0).value + 1e-12);
  }
  const double t0 = 0.785;
  const std::vector<double> th{t0, t0};
  const StateComponents s(make_family("4q-theta", th), named("concurrence"));
  CHECK(thm1_bound(s, 1.2, 2.0).value == doctest::Approx(thm2_bound(s, 1.2, 2.0).value).epsilon(1e-14));
}

TEST_CASE("bounds scale with the components") {
  const double k = 0.6;
  const auto t = table4();
  const auto u = table4(k);
  for (double a : {0.5, 1.0, 1.7}) {
    const double f = std::pow(k, a);
    CHECK(polygamy_bound_base(u, a, 2.0).value == doctest::Approx(f * polygamy_bound_base(t, a, 2.0).value));
    CHECK(thm2_bound(u, a, 2.0).value == doctest::Approx(f * thm2_bound(t, a, 2.0).value));
    CHECK(cor1_bound(u, a, 2.0).value == doctest::Approx(f * cor1_bound(t, a, 2.0).value));
    CHECK(thm4_bound(u, a, 2.0, 1).value == doctest::Approx(f * thm4_bound(t, a, 2.0, 1).value));
  }
  for (double y : {2.0, 3.5}) {
    const double f = std::pow(k, y);
    CHECK(eq17_bound(u, y, 2.0).value == doctest::Approx(f * eq17_bound(t, y, 2.0).value));
    CHECK(thm5_bound(u, y, 2.0, 1).value == doctest::Approx(f * thm5_bound(t, y, 2.0, 1).value));
  }
}

TEST_CASE("weighted bounds collapse at alpha = beta") {
  const auto t = table4();
  for (int m : {0, 1, 2}) {
    CHECK(thm3_bound(t, 2.0, 2.0, m).value == doctest::Approx(polygamy_bound_base(t, 2.0, 2.0).value));
    CHECK(thm4_bound(t, 2.0, 2.0, m).value == doctest::Approx(thm2_bound(t, 2.0, 2.0).value));
    CHECK(thm5_bound(t, 2.0, 2.0, m).value == doctest::Approx(eq18_bound(t, 2.0, 2.0, m).value));
  }
  // At alpha = 0 only B_1 keeps a non-zero weight.
  CHECK(thm3_bound(t, 0.0, 2.0, 1).value == doctest::Approx(1.0));
}

TEST_CASE("W5 polygamy columns") {
  const StateComponents s(make_family("w5", {}), named("tau_assistance"));
  CHECK(s.joint().value == doctest::Approx(0.8));
  for (double a : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    CHECK(thm2_bound(s, a, 2.0).value == doctest::Approx(oracle::w5_thm2(a)).epsilon(1e-12));
    CHECK(cor1_bound(s, a, 2.0).value == doctest::Approx(thm2_bound(s, a, 2.0).value).epsilon(1e-12));
    CHECK(polygamy_bound_base(s, a, 2.0).value == doctest::Approx(4.0 * std::pow(0.4, a)).epsilon(1e-12));
  }
  const auto ord = ordering_classify(s, 0.0);
  REQUIRE(ord.m.has_value());
  CHECK(*ord.m == 0);
  CHECK_FALSE(ord.in_theorem_range);
  const auto rep = evaluate_bounds(s, named("tau_assistance"), RelationSide::Polygamy, 2.0,
                                   default_bound_ids(RelationSide::Polygamy, 5), 1e-6);
  CHECK(rep.lhs_power == doctest::Approx(0.64));
  for (const auto& [id, v] : rep.satisfied) CHECK_MESSAGE(v == Verdict::Satisfied, id);
  CHECK(rep.checks.at("thm2_le_base") == Verdict::Satisfied);
}

TEST_CASE("W4 monogamy columns") {
  const auto con = named("concurrence");
  const StateComponents s(make_family("w4", {}), con);
  const auto ord = ordering_classify(s, 0.0);
  REQUIRE(ord.m.has_value());
  for (double y : {2.0, 3.0, 4.5, 6.0}) {
    const auto rep = evaluate_bounds(s, con, RelationSide::Monogamy, y,
                                     default_bound_ids(RelationSide::Monogamy, 4), 1e-6);
    CHECK(rep.lhs_power == doctest::Approx(std::pow(std::sqrt(3.0) / 2.0, y)).epsilon(1e-12));
    CHECK(rep.bounds.at("eq18").value == doctest::Approx(oracle::w4_eq18(y)).epsilon(1e-12));
    CHECK(rep.bounds.at("thm5").value == doctest::Approx(oracle::w4_thm5(y)).epsilon(1e-12));
    for (const auto& [id, v] : rep.satisfied) CHECK_MESSAGE(v == Verdict::Satisfied, id);
    CHECK(rep.checks.at("thm5_ge_eq18") == Verdict::Satisfied);
  }
}

TEST_CASE("ordering ties count both ways") {
  // Q_AB1 equals the tail Q_A|B2B3, and Q_AB2 is below Q_AB3.
  const TableComponents t(4, {{B1, 0.5}, {B2, 0.2}, {B3, 0.3}, {B2 | B3, 0.5},
                              {B1 | B2, 0.6}, {B1 | B3, 0.6}, {B1 | B2 | B3, 0.8}});
  const auto ord = ordering_classify(t, 0.0);
  REQUIRE(ord.rows.size() == 2);
  CHECK(ord.rows[0].ge);
  CHECK(ord.rows[0].le);
  REQUIRE(ord.m.has_value());
  CHECK(*ord.m == 0);
}

TEST_CASE("product states have zero components and degenerate reports") {
  const PureState p(basis_ket({2, 2, 2, 2}, {0, 1, 1, 0}), {2, 2, 2, 2});
  const StateComponents s(p, named("concurrence_assistance"));
  CHECK(s.joint().value == 0.0);
  CHECK(polygamy_bound_base(s, 1.0, 2.0).value == 0.0);
  CHECK(thm2_bound(s, 1.0, 2.0).value == 0.0);
  CHECK(polygamy_bound_base(s, 0.0, 2.0).degenerate);
  const auto rep = evaluate_bounds(s, named("concurrence_assistance"), RelationSide::Polygamy, 0.0,
                                   {"base"}, 1e-6);
  CHECK(rep.degenerate());
  CHECK(rep.satisfied.at("base") == Verdict::Degenerate);
}

TEST_CASE("bound ids and sides") {
  CHECK(side_of("thm4") == RelationSide::Polygamy);
  CHECK(side_of("eq16") == RelationSide::Monogamy);
  CHECK_THROWS_AS(side_of("thm9"), InvalidParameter);
  CHECK(default_bound_ids(RelationSide::Polygamy, 3) == std::vector<std::string>{"base", "lemma1"});
  CHECK(default_bound_ids(RelationSide::Monogamy, 3) == std::vector<std::string>{"eq16", "eq17", "lemma2"});
  CHECK(comparison_margin(true, 1e-6) == 1e-9);
  CHECK(comparison_margin(false, 1e-6) == doctest::Approx(1e-5 + 1e-9));
  CHECK_THROWS_AS(StateComponents(haar_random_pure({2, 2}, 1), named("concurrence")), InvalidParameter);
}

TEST_CASE("hierarchy rows follow the grid and repeat exactly") {
  const StateComponents s(make_family("w5", {}), named("tau_assistance"));
  const std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0};
  const auto ids = std::vector<std::string>{"base", "thm2", "thm4"};
  const auto a = verify_hierarchy(s, named("tau_assistance"), RelationSide::Polygamy, grid, ids, 1e-6);
  const auto b = verify_hierarchy(s, named("tau_assistance"), RelationSide::Polygamy, grid, ids, 1e-6);
  REQUIRE(a.size() == grid.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].exponent == grid[i]);
    CHECK(a[i].bounds.at("thm4").value == b[i].bounds.at("thm4").value);
  }
}

TEST_CASE("component cache returns the same value") {
  const StateComponents s(haar_random_pure({2, 2, 2}, 8), named("concurrence"));
  const auto first = s.component(B1 | B2);
  CHECK(s.component(B1 | B2).value == first.value);
  CHECK(s.pair(1).value == s.component(B1).value);
}

}
