#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "qcorr/errors.hpp"

using namespace qcorr;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "qcorr");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(args.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Result& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("measure examples") {
  auto r = call({"measure", "--family", "w5", "--measure", "tau_assistance", "--cut", "A|rest",
                 "--format", "json"});
  REQUIRE(r.code == 0);
  CHECK(json_of(r)["value"].get<double>() == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(json_of(r)["exactness"] == "exact");

  r = call({"measure", "--family", "w4", "--measure", "concurrence", "--cut", "A|B1", "--reduce",
            "--format", "json"});
  REQUIRE(r.code == 0);
  CHECK(json_of(r)["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));

  r = call({"measure", "--family", "ghz:3", "--measure", "concurrence", "--cut", "A|B1", "--reduce"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("value 0\n") != std::string::npos);
  CHECK(r.out.find("exactness exact") != std::string::npos);

  // A cut that leaves a party out must be asked for explicitly.
  r = call({"measure", "--family", "w4", "--measure", "concurrence", "--cut", "A|B1"});
  CHECK(r.code == cli::kExitInvalid);
  CHECK(r.err.find("error:") == 0);
}

TEST_CASE("threshold examples") {
  auto r = call({"threshold", "--family", "3q", "--params", "0.447,0.447,0.447,0.447,0.447", "--kind",
                 "residual-zero", "--format", "json"});
  REQUIRE(r.code == 0);
  CHECK(json_of(r)["result"]["root"].get<double>() == doctest::Approx(1.26185).epsilon(1e-3 / 1.26));

  r = call({"threshold", "--family", "4q-theta", "--params", "0.785,0.785", "--kind", "empirical-beta",
            "--bound", "thm1", "--measure", "concurrence", "--format", "json"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(json_of(r)["result"]["root"].get<double>() - 1.507126) < 1e-4);

  r = call({"threshold", "--family", "ghz:3", "--kind", "residual-zero"});
  CHECK(r.code == cli::kExitNoRoot);
  CHECK(r.err.find("degenerate") != std::string::npos);

  r = call({"threshold", "--family", "3q", "--params", "0.447,0.447,0.447,0.447,0.447"});
  CHECK(r.code == cli::kExitInvalid);
}

TEST_CASE("invalid input exits with 2") {
  CHECK(call({"measure", "--family", "nope", "--cut", "A|rest"}).code == cli::kExitInvalid);
  CHECK(call({"measure", "--family", "w4", "--cut", "A|B9", "--reduce"}).code == cli::kExitInvalid);
  CHECK(call({"measure", "--family", "w4", "--measure", "negativity"}).code == cli::kExitInvalid);
  CHECK(call({"sweep", "--family", "w5", "--measure", "tau_assistance", "--side", "polygamy", "--lo", "0",
              "--hi", "3", "--step", "0.5"})
            .code == cli::kExitInvalid);
  CHECK(call({"sweep", "--family", "w4", "--measure", "concurrence", "--side", "monogamy", "--lo", "1",
              "--hi", "3", "--step", "0.5"})
            .code == cli::kExitInvalid);
  CHECK(call({"fuzz", "--samples", "5", "--optimizer", "{\"bogus\":1}"}).code == cli::kExitInvalid);
  CHECK(call({"frobnicate"}).code == cli::kExitInvalid);
  CHECK(call({"figure", "7"}).code == cli::kExitInvalid);
  CHECK(call({"--help"}).code == cli::kExitOk);
}

TEST_CASE("cut parsing and grids") {
  CHECK(cli::parse_cut("A|rest", 4).side_b() == PartyList{1, 2, 3});
  CHECK(cli::parse_cut("A|B1B2", 4).side_b() == PartyList{1, 2});
  CHECK(cli::parse_cut("B1B2|rest", 4).side_b() == PartyList{0, 3});
  CHECK_THROWS_AS(cli::parse_cut("AB1", 3), InvalidPartition);
  CHECK_THROWS_AS(cli::parse_cut("A|B0", 3), InvalidPartition);
  const auto g = cli::make_grid(0.0, 2.0, 0.01);
  REQUIRE(g.size() == 201);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 2.0);
  CHECK(g[100] == 1.0);
}

TEST_CASE("bounds and sweep output") {
  auto r = call({"bounds", "--family", "w5", "--measure", "tau_assistance", "--side", "polygamy",
                 "--exponent", "1"});
  REQUIRE(r.code == 0);
  const auto j = json_of(r);
  CHECK(j["bounds"]["base"]["value"].get<double>() == doctest::Approx(1.6));
  r = call({"sweep", "--family", "w4", "--measure", "concurrence", "--side", "monogamy", "--lo", "2",
            "--hi", "3", "--step", "0.5", "--bounds", "eq18,thm5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("exponent,lhs,eq18,thm5,", 0) == 0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 4);
}

TEST_CASE("fuzz subcommand") {
  auto r = call({"fuzz", "--samples", "0"});
  REQUIRE(r.code == 0);
  CHECK(json_of(r)["samples"] == 0);
  CHECK(json_of(r)["violations"].empty());
  r = call({"fuzz", "--samples", "10", "--seed", "3"});
  REQUIRE(r.code == 0);
  CHECK(json_of(r)["comparisons"].get<int>() > 0);
  CHECK(call({"fuzz", "--samples", "10", "--qubits", "5"}).code == cli::kExitInvalid);
}

TEST_CASE("seed from the environment is overridden by --seed") {
  ::setenv(cli::kSeedEnv, "11", 1);
  const auto env = call({"fuzz", "--samples", "3"});
  const auto flag = call({"fuzz", "--samples", "3", "--seed", "11"});
  const auto other = call({"fuzz", "--samples", "3", "--seed", "12"});
  ::unsetenv(cli::kSeedEnv);
  const auto dflt = call({"fuzz", "--samples", "3"});
  CHECK(json_of(env)["seed"] == 11);
  CHECK(env.out == flag.out);
  CHECK(json_of(other)["seed"] == 12);
  CHECK(json_of(dflt)["seed"] == cli::kDefaultSeed);
}

TEST_CASE("figures are deterministic") {
  for (const char* n : {"1", "2", "3"}) {
    const auto a = call({"figure", n});
    const auto b = call({"figure", n});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
  }
}

}
