#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qcorr {

enum class Exactness { Exact, UpperEstimate, LowerEstimate };

std::string to_string(Exactness e);

struct OptimizerMeta {
  int restarts_used = 0;
  // Iterations taken by the restart that produced the reported value.
  int best_trace_length = 0;
  bool converged = false;
};

/// A non-negative measure value. Estimates carry optimizer metadata and must
/// never be treated as exact by consumers.
struct MeasureValue {
  double value = 0.0;
  Exactness exactness = Exactness::Exact;
  std::optional<OptimizerMeta> optimizer;

  bool is_exact() const noexcept { return exactness == Exactness::Exact; }

  static MeasureValue exact(double v) { return {v, Exactness::Exact, std::nullopt}; }
};

/// Settings of the convex-roof optimizer. ensemble_size == 0 means "use the
/// rank of the state".
struct OptimizerConfig {
  int ensemble_size = 0;
  int restarts = 16;
  int max_iters = 500;
  double tol = 1e-8;
  std::uint64_t seed = 0x5eedULL;

  /// Throws ConfigError on non-positive restarts/max_iters/tol or a negative
  /// ensemble size.
  void validate() const;
};

}  // namespace qcorr
