#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcorr/relations.hpp"

namespace qcorr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNoRoot = 3;

/// Default seed when neither --seed nor QCORR_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr const char* kSeedEnv = "QCORR_SEED";

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Parses "A|rest", "A|B1", "A|B1B2", "B1B2|B3" ... over `num_parties`.
/// "rest" stands for every party not named on the other side.
Bipartition parse_cut(const std::string& text, int num_parties);

/// Grid lo, lo+step, ..., hi. When (hi - lo) / step is an integer within
/// 1e-9 the points are lo + (hi - lo) k / n, so both ends are hit exactly.
std::vector<double> make_grid(double lo, double hi, double step);

// --- sweeps and figures ----------------------------------------------------

/// A closed-form column evaluated from the exponent alone.
struct ReferenceColumn {
  std::string id;
  std::function<double(double)> value;
};

/// Pairwise column check: `hi` >= `lo` at every row.
struct ColumnCheck {
  std::string name;
  std::string hi;
  std::string lo;
};

struct SweepSpec {
  std::vector<std::string> ids;
  std::vector<ReferenceColumn> references;
  std::vector<ColumnCheck> checks;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Columns: exponent, lhs, bound ids, reference ids, ok_<id> flags for every
/// bound and reference column, then ok_<check> flags.
Table sweep_table(const std::vector<BoundReport>& reports, const SweepSpec& spec,
                  double estimate_tol);

nlohmann::json sweep_json(const std::vector<BoundReport>& reports, const SweepSpec& spec);

struct FigurePreset {
  int number = 0;
  std::string family;
  std::string measure;
  RelationSide side = RelationSide::Polygamy;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  SweepSpec spec;
};

/// Presets 1, 2 and 3; throws InvalidParameter otherwise.
FigurePreset figure_preset(int number);

/// Evaluates a preset; the table is what `figure N` writes as CSV.
Table run_figure(const FigurePreset& preset, std::vector<BoundReport>* reports = nullptr);

// --- fuzz ------------------------------------------------------------------

struct FuzzConfig {
  int samples = 500;
  int qubits = 3;
  std::uint64_t seed = kDefaultSeed;
  OptimizerConfig optimizer;
};

struct FuzzViolation {
  int sample = 0;
  std::uint64_t seed = 0;
  std::string digest;
  std::string measure;
  std::string bound;
  double exponent = 0.0;
  double gap = 0.0;
};

struct FuzzCheck {
  std::string measure;
  RelationSide side = RelationSide::Polygamy;
  std::string bound;
  double exponent = 0.0;
};

struct FuzzReport {
  FuzzConfig config;
  std::vector<FuzzCheck> checks;
  std::vector<FuzzViolation> violations;
  int comparisons = 0;
  int indeterminate = 0;
  int degenerate = 0;
};

/// Checks run per sample for the given qubit count (3 or 4).
std::vector<FuzzCheck> fuzz_checks(int qubits);

FuzzReport run_fuzz(const FuzzConfig& config);

/// FNV-1a over the 17-digit text of every amplitude.
std::string state_digest(const PureState& psi);

nlohmann::json to_json(const FuzzReport& report);

}  // namespace qcorr::cli
