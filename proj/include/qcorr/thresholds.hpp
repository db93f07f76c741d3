#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcorr/relations.hpp"

namespace qcorr {

struct ThresholdOptions {
  double tol = 1e-6;
  int scan_steps = 256;
  double search_cap = 4.0;

  /// Throws ConfigError on tol <= 0, scan_steps < 8 or search_cap <= 0.
  void validate() const;
};

struct ThresholdResult {
  double root = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  double residual_at_root = 0.0;
  std::vector<std::pair<double, double>> scan_profile;
};

/// Outcome of a state-level threshold search. `root` is empty when there
/// is no sign change; `degenerate` marks searches that were not attempted
/// because a component vanishes.
struct ThresholdOutcome {
  std::optional<ThresholdResult> root;
  bool degenerate = false;
  std::string message;
  std::vector<std::pair<double, double>> scan_profile;
};

/// Smallest root of f on [lo, hi]: uniform scan with scan_steps intervals,
/// then bisection on the first sign change until the bracket is within tol
/// and |f| <= tol. Returns nullopt without a sign change; a NaN from f
/// raises EvaluationError. The profile of the scan is attached in both
/// cases through `profile` when given.
std::optional<ThresholdResult> find_zero(const std::function<double(double)>& f, double lo,
                                         double hi, double tol = 1e-6, int scan_steps = 256,
                                         std::vector<std::pair<double, double>>* profile = nullptr);

/// Root of alpha -> Q_AB^a + Q_AC^a - Q_A|BC^a on (0, beta_max] for a
/// three-party component source.
ThresholdOutcome residual_zero_exponent(const ComponentSource& src,
                                        const CorrelationMeasure& measure,
                                        const ThresholdOptions& opts = {});

/// Exponent where lhs^a <= bound(a) stops holding, searched on
/// (0, search_cap]. bound_id is one of base, thm1, thm2.
ThresholdOutcome empirical_beta(const ComponentSource& src, const CorrelationMeasure& measure,
                                const std::string& bound_id,
                                const ThresholdOptions& opts = {});

}  // namespace qcorr
