#pragma once

#include <array>
#include <string>

#include "qcorr/measure_value.hpp"
#include "qcorr/qstate.hpp"

namespace qcorr {

enum class MeasureKind { Concurrence, ConcurrenceAssistance, TauAssistance };

enum class EvaluationMode {
  // Never run the optimizer; raise EstimateRequired instead.
  ExactPreferred,
  EstimateAllowed,
};

/// A bipartite correlation measure together with its polygamy power
/// (beta_max) and monogamy power (x_min).
struct CorrelationMeasure {
  MeasureKind kind = MeasureKind::Concurrence;
  double beta_max = 2.0;
  double x_min = 2.0;
  EvaluationMode mode = EvaluationMode::EstimateAllowed;

  std::string name() const;
  bool is_assistance() const noexcept { return kind != MeasureKind::Concurrence; }
  void validate() const;

  /// "concurrence" | "concurrence_assistance" | "tau_assistance".
  static CorrelationMeasure from_name(const std::string& name);
};

/// sqrt(2(1 - Tr rho_A^2)) for a pure state; the cut must cover every party.
MeasureValue concurrence_pure(const PureState& psi, const Bipartition& cut);

/// Decreasing square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
std::array<double, 4> wootters_lambdas(const DensityMatrix& rho);

/// max(0, l1 - l2 - l3 - l4) for a two-qubit state.
MeasureValue wootters_concurrence(const DensityMatrix& rho);

/// l1 + l2 + l3 + l4 for a two-qubit state.
MeasureValue assistance_2q(const DensityMatrix& rho);

/// Evaluates `measure` across `cut`, tracing out parties outside the cut.
///
/// Exact when the reduced state is pure or its two sides have local
/// supports of rank <= 2 (closed two-qubit forms after projecting onto the
/// supports). Otherwise the convex roof is optimized: upper estimate for
/// concurrence, lower estimate for the assistance measures.
MeasureValue measure_bipartite(const CorrelationMeasure& measure, const AnyState& state,
                               const Bipartition& cut, const OptimizerConfig& opt = {});

/// The reduced state projected onto the local supports of both sides.
/// `product` is set when either support is one-dimensional, in which case
/// `state` holds the uncompressed input.
struct SupportCompression {
  DensityMatrix state;
  int rank_a = 0;
  int rank_b = 0;
  bool product = false;
};

/// `rho` must be defined over exactly the parties of `cut`.
SupportCompression compress_to_supports(const DensityMatrix& rho, const Bipartition& cut);

}  // namespace qcorr
