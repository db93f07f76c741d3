#include <cstdio>

#include "cli.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/parallel.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/serialize.hpp"

namespace qcorr::cli {

namespace {

struct SampleResult {
  std::vector<FuzzViolation> violations;
  int comparisons = 0;
  int indeterminate = 0;
  int degenerate = 0;
};

SampleResult audit_sample(const FuzzConfig& config, const std::vector<FuzzCheck>& checks,
                          int index) {
  const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));
  const PureState psi = haar_random_pure(Dims(static_cast<std::size_t>(config.qubits), 2), seed);
  const EvaluationMode mode =
      config.qubits == 3 ? EvaluationMode::ExactPreferred : EvaluationMode::EstimateAllowed;

  SampleResult out;
  std::map<std::string, std::unique_ptr<StateComponents>> sources;
  for (const auto& c : checks) {
    auto& src = sources[c.measure];
    if (!src) {
      CorrelationMeasure m = CorrelationMeasure::from_name(c.measure);
      m.mode = mode;
      src = std::make_unique<StateComponents>(psi, m, config.optimizer);
    }
    const BoundReport r = evaluate_bounds(*src, src->measure(), c.side, c.exponent, {c.bound},
                                          config.optimizer.tol);
    ++out.comparisons;
    const Verdict v = r.satisfied.at(c.bound);
    if (v == Verdict::Indeterminate) ++out.indeterminate;
    if (v == Verdict::Degenerate) ++out.degenerate;
    if (v != Verdict::Violated) continue;
    const double bound = r.bounds.at(c.bound).value;
    FuzzViolation viol;
    viol.sample = index;
    viol.seed = seed;
    viol.digest = state_digest(psi);
    viol.measure = c.measure;
    viol.bound = c.bound;
    viol.exponent = c.exponent;
    viol.gap = c.side == RelationSide::Polygamy ? bound - r.lhs_power : r.lhs_power - bound;
    out.violations.push_back(std::move(viol));
  }
  return out;
}

}  // namespace

std::vector<FuzzCheck> fuzz_checks(int qubits) {
  std::vector<FuzzCheck> checks;
  const auto add = [&](const char* measure, RelationSide side, const char* bound,
                       std::initializer_list<double> exps) {
    for (double e : exps) checks.push_back({measure, side, bound, e});
  };
  if (qubits == 3) {
    add("concurrence", RelationSide::Monogamy, "eq16", {2.0, 2.5, 3.0, 4.0});
    add("concurrence", RelationSide::Monogamy, "lemma2", {2.0, 2.5, 3.0, 4.0});
    add("concurrence_assistance", RelationSide::Polygamy, "base", {0.5, 1.0, 1.5, 2.0});
    add("concurrence_assistance", RelationSide::Polygamy, "lemma1", {0.5, 1.0, 1.5, 2.0});
  } else if (qubits == 4) {
    add("concurrence", RelationSide::Monogamy, "eq17", {2.0, 3.0});
    add("concurrence", RelationSide::Monogamy, "eq18", {2.0, 3.0});
    add("concurrence", RelationSide::Monogamy, "thm5", {2.0, 3.0});
    add("concurrence_assistance", RelationSide::Polygamy, "base", {1.0, 2.0});
  } else {
    throw ConfigError("fuzz: qubits must be 3 or 4");
  }
  return checks;
}

FuzzReport run_fuzz(const FuzzConfig& config) {
  if (config.samples < 0) throw ConfigError("fuzz: samples must be >= 0");
  config.optimizer.validate();
  FuzzReport report;
  report.config = config;
  report.checks = fuzz_checks(config.qubits);
  const auto results = parallel_map(static_cast<std::size_t>(config.samples), [&](std::size_t i) {
    return audit_sample(config, report.checks, static_cast<int>(i));
  });
  for (const auto& r : results) {
    report.comparisons += r.comparisons;
    report.indeterminate += r.indeterminate;
    report.degenerate += r.degenerate;
    report.violations.insert(report.violations.end(), r.violations.begin(), r.violations.end());
  }
  return report;
}

std::string state_digest(const PureState& psi) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& a : psi.amplitudes()) {
    feed(format_number(a.real()));
    feed(",");
    feed(format_number(a.imag()));
    feed(";");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json to_json(const FuzzReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"measure", c.measure},
                      {"side", to_string(c.side)},
                      {"bound", c.bound},
                      {"exponent", c.exponent}});
  }
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"sample", v.sample},
                          {"seed", v.seed},
                          {"state_digest", v.digest},
                          {"measure", v.measure},
                          {"bound", v.bound},
                          {"exponent", v.exponent},
                          {"gap", v.gap}});
  }
  return {{"samples", report.config.samples},
          {"qubits", report.config.qubits},
          {"seed", report.config.seed},
          {"sampler", kSamplerAlgorithm},
          {"mode", report.config.qubits == 3 ? "exact-preferred" : "estimate-allowed"},
          {"optimizer", qcorr::to_json(report.config.optimizer)},
          {"checks", checks},
          {"comparisons", report.comparisons},
          {"violations", violations},
          {"indeterminate", report.indeterminate},
          {"degenerate", report.degenerate}};
}

}  // namespace qcorr::cli
