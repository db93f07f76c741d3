#pragma once

#include <functional>

#include <Eigen/Dense>

#include "qcorr/measure_value.hpp"
#include "qcorr/qstate.hpp"

namespace qcorr {

enum class RoofDirection { Minimize, Maximize };

/// A pure-state quantity extended to unnormalized vectors by
/// value(v) = |v|^2 f(v / |v|), so an ensemble {p_i, phi_i} realised as
/// vectors sqrt(p_i) phi_i averages by plain summation.
///
/// `gradient` returns d value / d conj(v). It may be left empty, in which
/// case the optimizer falls back to finite differences.
struct WeightedPureFunctional {
  std::function<double(const Eigen::VectorXcd&)> value;
  std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> gradient;
};

/// Weighted pure-state concurrence across `cut` for vectors over `dims`.
/// Computed from 2x2 minors of the reshaped vector, which stays accurate
/// near zero.
WeightedPureFunctional concurrence_functional(const Dims& dims, const Bipartition& cut);

/// Ensemble average of a weighted functional over decompositions of rho.
///
/// rho = V V^dagger with V the D x r matrix of sqrt(eigenvalue) *
/// eigenvector. Every ensemble of m >= r members arises as the columns of
/// V U^T for an m x r isometry U; U is taken as the first r columns of an
/// m x m unitary W, so the search space is U(m).
class EnsembleObjective {
 public:
  EnsembleObjective(const DensityMatrix& rho, WeightedPureFunctional fn, int ensemble_size);

  int rank() const noexcept { return static_cast<int>(factor_.cols()); }
  int ensemble_size() const noexcept { return ensemble_size_; }
  bool has_analytic_gradient() const noexcept { return static_cast<bool>(fn_.gradient); }

  /// Unnormalized ensemble members (D x m) for the unitary w.
  Eigen::MatrixXcd members(const Eigen::MatrixXcd& w) const;
  double value(const Eigen::MatrixXcd& w) const;

  /// Anti-Hermitian G with d/dt value(exp(tB) w)|_{t=0} = Re tr(G^dagger B)
  /// for every anti-Hermitian B.
  Eigen::MatrixXcd riemannian_gradient(const Eigen::MatrixXcd& w) const;
  Eigen::MatrixXcd finite_difference_gradient(const Eigen::MatrixXcd& w, double h = 1e-6) const;

 private:
  Eigen::MatrixXcd factor_;
  WeightedPureFunctional fn_;
  int ensemble_size_;
};

/// exp(a) for anti-Hermitian a, computed through the Hermitian eigensolver so
/// the result is unitary to rounding.
Eigen::MatrixXcd unitary_exp(const Eigen::MatrixXcd& a);

/// Haar-random n x n unitary (QR of a complex Gaussian matrix, phases fixed).
Eigen::MatrixXcd haar_unitary(int n, std::uint64_t seed);

/// Optimizes the ensemble average of `fn` over decompositions of rho.
///
/// Riemannian steepest descent on U(m) with the exponential map and an
/// adaptive Armijo step. Restart 0 starts from the eigen-ensemble, the rest
/// from Haar-random unitaries seeded by (seed, restart). Restarts run
/// concurrently; the best value wins, ties go to the lowest restart index.
/// Result exactness is UpperEstimate for Minimize and LowerEstimate for
/// Maximize.
MeasureValue convex_roof(const DensityMatrix& rho, const WeightedPureFunctional& fn,
                         RoofDirection direction, const OptimizerConfig& opt);

/// Convex roof of the pure-state concurrence across `cut`, which must cover
/// every party of rho.
MeasureValue convex_roof(const DensityMatrix& rho, const Bipartition& cut,
                         RoofDirection direction, const OptimizerConfig& opt);

}  // namespace qcorr
