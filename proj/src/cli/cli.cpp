#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qcorr/errors.hpp"
#include "qcorr/serialize.hpp"
#include "qcorr/state_io.hpp"
#include "qcorr/thresholds.hpp"

namespace qcorr::cli {

namespace {

struct Options {
  std::string family;
  std::string params;
  std::string state_path;
  std::string measure = "concurrence";
  std::string mode = "estimate-allowed";
  std::string cut = "A|rest";
  bool reduce = false;
  std::optional<double> exponent;
  std::string side = "polygamy";
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<double> step;
  std::string bounds;
  std::string kind;
  std::string bound = "thm1";
  double tol = 1e-6;
  int scan_steps = 256;
  double cap = 4.0;
  int samples = 500;
  int qubits = 3;
  std::optional<std::uint64_t> seed;
  std::string format;
  std::string out_path;
  int restarts = 16;
  int max_iters = 500;
  int ensemble_size = 0;
  double opt_tol = 1e-8;
  std::string optimizer_json;
  std::optional<double> beta;
  std::optional<double> x;
  bool timing = false;
  int figure = 0;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidParameter("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidParameter("not a number: '" + s + "'");
  return v;
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidParameter(std::string(kSeedEnv) + " is not an unsigned integer");
  }
  return kDefaultSeed;
}

AnyState load_state(const Options& o) {
  if (o.family.empty() == o.state_path.empty()) {
    throw InvalidParameter("give exactly one of --family or --state");
  }
  if (!o.state_path.empty()) return load_state_file(o.state_path);
  std::string name = o.family;
  std::vector<double> params;
  if (const auto colon = name.find(':'); colon != std::string::npos) {
    if (!o.params.empty()) throw InvalidParameter("family '" + name + "' already carries params");
    params.push_back(parse_double(name.substr(colon + 1)));
    name = name.substr(0, colon);
  }
  for (const auto& p : split(o.params, ',')) params.push_back(parse_double(p));
  return make_family(name, params);
}

OptimizerConfig optimizer_of(const Options& o) {
  OptimizerConfig c;
  if (!o.optimizer_json.empty()) {
    try {
      c = optimizer_config_from_json(nlohmann::json::parse(o.optimizer_json));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("optimizer JSON: ") + e.what());
    }
  } else {
    c.ensemble_size = o.ensemble_size;
    c.restarts = o.restarts;
    c.max_iters = o.max_iters;
    c.tol = o.opt_tol;
  }
  c.seed = resolve_seed(o);
  c.validate();
  return c;
}

CorrelationMeasure measure_of(const Options& o) {
  CorrelationMeasure m = CorrelationMeasure::from_name(o.measure);
  if (o.mode == "exact-preferred") {
    m.mode = EvaluationMode::ExactPreferred;
  } else if (o.mode == "estimate-allowed") {
    m.mode = EvaluationMode::EstimateAllowed;
  } else {
    throw InvalidParameter("unknown mode '" + o.mode + "'");
  }
  if (o.beta) m.beta_max = *o.beta;
  if (o.x) m.x_min = *o.x;
  m.validate();
  return m;
}

RelationSide side_of_option(const std::string& s) {
  if (s == "polygamy") return RelationSide::Polygamy;
  if (s == "monogamy") return RelationSide::Monogamy;
  throw InvalidParameter("unknown side '" + s + "' (polygamy or monogamy)");
}

std::vector<std::string> bound_ids(const Options& o, RelationSide side, int n) {
  if (o.bounds.empty()) return default_bound_ids(side, n);
  return split(o.bounds, ',');
}

std::string format_or(const Options& o, const std::string& fallback) {
  const std::string f = o.format.empty() ? fallback : o.format;
  if (f != "csv" && f != "json" && f != "text") {
    throw InvalidParameter("unknown format '" + f + "'");
  }
  return f;
}

void emit(const Options& o, std::ostream& out, const std::string& content) {
  if (o.out_path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) throw InvalidParameter("cannot write '" + o.out_path + "'");
  file << content;
}

std::string party_name(int p) { return p == 0 ? "A" : "B" + std::to_string(p); }

std::string cut_text(const Bipartition& cut) {
  std::string s;
  for (int p : cut.side_a()) s += party_name(p);
  s += '|';
  for (int p : cut.side_b()) s += party_name(p);
  return s;
}

std::string table_csv(const Table& t) { return to_csv(t.header, t.rows); }

// --- subcommands -----------------------------------------------------------

int cmd_measure(const Options& o, std::ostream& out) {
  const AnyState state = load_state(o);
  const int n = num_parties(state);
  const Bipartition cut = parse_cut(o.cut, n);
  if (!cut.covers(n) && !o.reduce) {
    throw InvalidPartition("cut " + cut_text(cut) +
                           " leaves parties out; pass --reduce to trace them out");
  }
  const CorrelationMeasure m = measure_of(o);
  const MeasureValue v = measure_bipartite(m, state, cut, optimizer_of(o));
  const std::string f = format_or(o, "text");
  if (f == "json") {
    nlohmann::json j = to_json(v);
    j["measure"] = m.name();
    j["cut"] = cut_text(cut);
    emit(o, out, j.dump(2) + "\n");
  } else if (f == "csv") {
    emit(o, out, to_csv({"measure", "cut", "value", "exactness"},
                        {{m.name(), cut_text(cut), format_number(v.value),
                          to_string(v.exactness)}}));
  } else {
    std::string s = "measure " + m.name() + "\ncut " + cut_text(cut) + "\nvalue " +
                    format_number(v.value) + "\nexactness " + to_string(v.exactness) + "\n";
    if (v.optimizer) {
      s += "restarts " + std::to_string(v.optimizer->restarts_used) + "\niterations " +
           std::to_string(v.optimizer->best_trace_length) + "\nconverged " +
           (v.optimizer->converged ? "true" : "false") + "\n";
    }
    emit(o, out, s);
  }
  return kExitOk;
}

int cmd_bounds(const Options& o, std::ostream& out) {
  if (!o.exponent) throw InvalidParameter("bounds needs --exponent");
  const AnyState state = load_state(o);
  const CorrelationMeasure m = measure_of(o);
  const OptimizerConfig opt = optimizer_of(o);
  const RelationSide side = side_of_option(o.side);
  const StateComponents src(state, m, opt);
  const auto ids = bound_ids(o, side, src.num_parties());
  const BoundReport r = evaluate_bounds(src, m, side, *o.exponent, ids, opt.tol);
  const std::string f = format_or(o, "json");
  if (f == "json") {
    emit(o, out, to_json(r).dump(2) + "\n");
  } else if (f == "csv") {
    emit(o, out, table_csv(sweep_table({r}, SweepSpec{ids, {}, {}}, opt.tol)));
  } else {
    std::string s = "exponent " + format_number(r.exponent) + "\nlhs " +
                    format_number(r.lhs_power) + " " + to_string(r.lhs.exactness) + "\n";
    s += "m " + (r.m ? std::to_string(*r.m) : std::string("none")) + "\n";
    for (const auto& [id, e] : r.bounds) {
      s += id + " " + format_number(e.value) + " " + (e.exact ? "exact" : "estimate") + " " +
           to_string(r.satisfied.at(id)) + "\n";
    }
    emit(o, out, s);
  }
  return kExitOk;
}

void check_grid(RelationSide side, const CorrelationMeasure& m, double lo, double hi) {
  if (side == RelationSide::Polygamy && (lo < 0.0 || hi > m.beta_max + 1e-12)) {
    throw InvalidParameter("polygamy grid must lie in [0, beta_max]");
  }
  if (side == RelationSide::Monogamy && lo < m.x_min - 1e-12) {
    throw InvalidParameter("monogamy grid must start at or above x_min");
  }
}

int cmd_sweep(const Options& o, std::ostream& out) {
  if (!o.lo || !o.hi || !o.step) throw InvalidParameter("sweep needs --lo, --hi and --step");
  const AnyState state = load_state(o);
  const CorrelationMeasure m = measure_of(o);
  const OptimizerConfig opt = optimizer_of(o);
  const RelationSide side = side_of_option(o.side);
  const auto grid = make_grid(*o.lo, *o.hi, *o.step);
  check_grid(side, m, *o.lo, *o.hi);
  const StateComponents src(state, m, opt);
  const SweepSpec spec{bound_ids(o, side, src.num_parties()), {}, {}};
  const auto reports = verify_hierarchy(src, m, side, grid, spec.ids, opt.tol);
  const std::string f = format_or(o, "csv");
  if (f == "json") {
    emit(o, out, sweep_json(reports, spec).dump(2) + "\n");
  } else {
    emit(o, out, table_csv(sweep_table(reports, spec, opt.tol)));
  }
  return kExitOk;
}

int cmd_threshold(const Options& o, std::ostream& out, std::ostream& err) {
  const AnyState state = load_state(o);
  const CorrelationMeasure m = measure_of(o);
  const OptimizerConfig opt = optimizer_of(o);
  const ThresholdOptions topts{o.tol, o.scan_steps, o.cap};
  const StateComponents src(state, m, opt);
  ThresholdOutcome r;
  if (o.kind == "residual-zero") {
    r = residual_zero_exponent(src, m, topts);
  } else if (o.kind == "empirical-beta") {
    r = empirical_beta(src, m, o.bound, topts);
  } else {
    throw InvalidParameter("--kind must be residual-zero or empirical-beta");
  }
  const std::string f = format_or(o, "text");
  if (f == "json") {
    emit(o, out, to_json(r).dump(2) + "\n");
  } else if (r.root) {
    emit(o, out,
         "root " + format_number(r.root->root) + "\nbracket " + format_number(r.root->lo) + " " +
             format_number(r.root->hi) + "\niterations " + std::to_string(r.root->iterations) +
             "\nresidual " + format_number(r.root->residual_at_root) + "\n");
  }
  if (!r.root) {
    err << (r.degenerate ? "degenerate: " : "no root: ") << r.message << "\n";
    return kExitNoRoot;
  }
  return kExitOk;
}

int cmd_fuzz(const Options& o, std::ostream& out) {
  FuzzConfig c;
  c.samples = o.samples;
  c.qubits = o.qubits;
  c.seed = resolve_seed(o);
  c.optimizer = optimizer_of(o);
  const auto start = std::chrono::steady_clock::now();
  const FuzzReport report = run_fuzz(c);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string f = format_or(o, "json");
  if (f == "json") {
    nlohmann::json j = to_json(report);
    if (o.timing) {
      j["elapsed_seconds"] = elapsed;
    } else {
      j["wall_clock"] = "omitted (pass --timing)";
    }
    emit(o, out, j.dump(2) + "\n");
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& v : report.violations) {
      rows.push_back({std::to_string(v.sample), std::to_string(v.seed), v.digest, v.measure,
                      v.bound, format_number(v.exponent), format_number(v.gap)});
    }
    if (f == "csv") {
      emit(o, out,
           to_csv({"sample", "seed", "digest", "measure", "bound", "exponent", "gap"}, rows));
    } else {
      std::string s = "samples " + std::to_string(c.samples) + "\ncomparisons " +
                      std::to_string(report.comparisons) + "\nviolations " +
                      std::to_string(report.violations.size()) + "\nindeterminate " +
                      std::to_string(report.indeterminate) + "\n";
      for (const auto& r : rows) {
        s += "violation";
        for (const auto& cell : r) s += " " + cell;
        s += "\n";
      }
      emit(o, out, s);
    }
  }
  return report.violations.empty() ? kExitOk : kExitViolation;
}

int cmd_figure(const Options& o, std::ostream& out) {
  const FigurePreset preset = figure_preset(o.figure);
  std::vector<BoundReport> reports;
  const Table t = run_figure(preset, &reports);
  const std::string f = format_or(o, "csv");
  if (f == "json") {
    emit(o, out, sweep_json(reports, preset.spec).dump(2) + "\n");
  } else {
    emit(o, out, table_csv(t));
  }
  return kExitOk;
}

void add_state_options(CLI::App* app, Options& o) {
  app->add_option("--family", o.family, "Built-in family: 3q, 4q-theta, w4, w5, w:<n>, ghz:<n>");
  app->add_option("--params", o.params, "Comma-separated family parameters");
  app->add_option("--state", o.state_path, "State JSON file");
  app->add_option("--measure", o.measure,
                  "concurrence | concurrence_assistance | tau_assistance");
  app->add_option("--mode", o.mode, "estimate-allowed | exact-preferred");
  app->add_option("--beta", o.beta, "Polygamy power beta_max override");
  app->add_option("--x", o.x, "Monogamy power x_min override");
}

void add_optimizer_options(CLI::App* app, Options& o) {
  app->add_option("--restarts", o.restarts, "Optimizer restarts");
  app->add_option("--max-iters", o.max_iters, "Optimizer iterations per restart");
  app->add_option("--opt-tol", o.opt_tol, "Optimizer tolerance");
  app->add_option("--ensemble-size", o.ensemble_size, "Ensemble size (0 = rank)");
  app->add_option("--optimizer", o.optimizer_json, "Optimizer settings as a JSON object");
  app->add_option("--seed", o.seed, std::string("Seed (default from ") + kSeedEnv + ")");
}

void add_output_options(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "csv | json | text");
  app->add_option("--out", o.out_path, "Write output to this file");
}

}  // namespace

Bipartition parse_cut(const std::string& text, int num_parties) {
  const auto bar = text.find('|');
  if (bar == std::string::npos || text.find('|', bar + 1) != std::string::npos) {
    throw InvalidPartition("cut '" + text + "' must contain exactly one '|'");
  }
  const auto parse_side = [&](const std::string& s) -> std::optional<PartyList> {
    if (s == "rest") return std::nullopt;
    PartyList out;
    std::size_t i = 0;
    while (i < s.size()) {
      if (s[i] == 'A') {
        out.push_back(0);
        ++i;
      } else if (s[i] == 'B') {
        std::size_t j = i + 1;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == i + 1) throw InvalidPartition("cut '" + text + "': B needs an index");
        const int b = std::stoi(s.substr(i + 1, j - i - 1));
        if (b < 1) throw InvalidPartition("cut '" + text + "': B indices start at 1");
        out.push_back(b);
        i = j;
      } else {
        throw InvalidPartition("cut '" + text + "': unexpected '" + s.substr(i, 1) + "'");
      }
    }
    if (out.empty()) throw InvalidPartition("cut '" + text + "' has an empty side");
    return out;
  };
  auto a = parse_side(text.substr(0, bar));
  auto b = parse_side(text.substr(bar + 1));
  if (!a && !b) throw InvalidPartition("cut '" + text + "': both sides are 'rest'");
  const auto rest_of = [num_parties](const PartyList& other) {
    PartyList out;
    for (int p = 0; p < num_parties; ++p) {
      if (std::find(other.begin(), other.end(), p) == other.end()) out.push_back(p);
    }
    return out;
  };
  if (!a) a = rest_of(*b);
  if (!b) b = rest_of(*a);
  Bipartition cut(*a, *b);
  cut.validate(num_parties);
  return cut;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step)) {
    throw InvalidParameter("grid bounds must be finite");
  }
  if (!(step > 0.0)) throw InvalidParameter("grid step must be positive");
  if (!(lo < hi)) throw InvalidParameter("grid needs lo < hi");
  const double span = hi - lo;
  const double ratio = span / step;
  if (ratio > 1e7) throw InvalidParameter("grid has too many points");
  const auto n = static_cast<long long>(std::llround(ratio));
  std::vector<double> grid;
  if (std::abs(ratio - static_cast<double>(n)) <= 1e-9 * std::max(1.0, ratio)) {
    for (long long k = 0; k <= n; ++k) {
      grid.push_back(k == n ? hi : lo + span * static_cast<double>(k) / static_cast<double>(n));
    }
  } else {
    const auto m = static_cast<long long>(std::floor(ratio));
    for (long long k = 0; k <= m; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  }
  return grid;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concurrence, assistance measures and polygamy/monogamy bounds", "qcorr"};
  app.require_subcommand(1);
  Options o;

  auto* measure = app.add_subcommand("measure", "Evaluate a measure across a cut");
  add_state_options(measure, o);
  add_optimizer_options(measure, o);
  add_output_options(measure, o);
  measure->add_option("--cut", o.cut, "Cut such as A|rest, A|B1, A|B1B2");
  measure->add_flag("--reduce", o.reduce, "Trace out parties not named in the cut");

  auto* bounds = app.add_subcommand("bounds", "Evaluate bounds at one exponent");
  add_state_options(bounds, o);
  add_optimizer_options(bounds, o);
  add_output_options(bounds, o);
  bounds->add_option("--exponent", o.exponent, "alpha (polygamy) or y (monogamy)");
  bounds->add_option("--side", o.side, "polygamy | monogamy");
  bounds->add_option("--bounds", o.bounds, "Comma-separated bound ids");

  auto* sweep = app.add_subcommand("sweep", "Evaluate bounds over an exponent grid");
  add_state_options(sweep, o);
  add_optimizer_options(sweep, o);
  add_output_options(sweep, o);
  sweep->add_option("--side", o.side, "polygamy | monogamy");
  sweep->add_option("--lo", o.lo, "First exponent");
  sweep->add_option("--hi", o.hi, "Last exponent");
  sweep->add_option("--step", o.step, "Grid step");
  sweep->add_option("--bounds", o.bounds, "Comma-separated bound ids");

  auto* threshold = app.add_subcommand("threshold", "Solve for an exponent threshold");
  add_state_options(threshold, o);
  add_optimizer_options(threshold, o);
  add_output_options(threshold, o);
  threshold->add_option("--kind", o.kind, "residual-zero | empirical-beta")->required();
  threshold->add_option("--bound", o.bound, "base | thm1 | thm2 (empirical-beta)");
  threshold->add_option("--tol", o.tol, "Root tolerance");
  threshold->add_option("--steps", o.scan_steps, "Scan intervals");
  threshold->add_option("--cap", o.cap, "Search cap for empirical-beta");

  auto* fuzz = app.add_subcommand("fuzz", "Audit inequalities on Haar-random pure states");
  add_optimizer_options(fuzz, o);
  add_output_options(fuzz, o);
  fuzz->add_option("--samples", o.samples, "Number of states");
  fuzz->add_option("--qubits", o.qubits, "3 (exact components) or 4 (estimates)");
  fuzz->add_flag("--timing", o.timing, "Record elapsed time in the report");

  auto* figure = app.add_subcommand("figure", "Reproduce a figure as CSV");
  add_output_options(figure, o);
  figure->add_option("number", o.figure, "1, 2 or 3")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (measure->parsed()) return cmd_measure(o, out);
    if (bounds->parsed()) return cmd_bounds(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (threshold->parsed()) return cmd_threshold(o, out, err);
    if (fuzz->parsed()) return cmd_fuzz(o, out);
    if (figure->parsed()) return cmd_figure(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace qcorr::cli
