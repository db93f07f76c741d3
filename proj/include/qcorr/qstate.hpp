#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qcorr {

using Complex = std::complex<double>;
using Dims = std::vector<int>;
using PartyList = std::vector<int>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kEigenClamp = 1e-10;

/// Product of local dimensions; throws InvalidState on empty or < 2 entries.
std::size_t total_dimension(const Dims& dims);

/// Normalized multipartite pure state. Party 0 is "A"; basis indices are
/// row-major with party 0 most significant.
class PureState {
 public:
  /// Throws InvalidState unless the vector has norm 1 within 1e-12 and its
  /// length matches the product of dims.
  PureState(Eigen::VectorXcd amplitudes, Dims dims);

  /// Same as the constructor but rescales first. Throws on a zero vector.
  static PureState normalized(Eigen::VectorXcd amplitudes, Dims dims);

  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  const Dims& dims() const noexcept { return dims_; }
  int num_parties() const noexcept { return static_cast<int>(dims_.size()); }

 private:
  Eigen::VectorXcd amplitudes_;
  Dims dims_;
};

/// Hermitian, unit-trace, positive semidefinite matrix with subsystem dims.
class DensityMatrix {
 public:
  DensityMatrix(Eigen::MatrixXcd matrix, Dims dims);

  static DensityMatrix from_pure(const PureState& psi);

  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  const Dims& dims() const noexcept { return dims_; }
  int num_parties() const noexcept { return static_cast<int>(dims_.size()); }

  /// Eigenvalues in ascending order with values above -1e-10 clamped to 0.
  Eigen::VectorXd eigenvalues() const;
  double purity() const;

 private:
  Eigen::MatrixXcd matrix_;
  Dims dims_;
};

using AnyState = std::variant<PureState, DensityMatrix>;

const Dims& dims_of(const AnyState& state);
int num_parties(const AnyState& state);

/// Two disjoint, non-empty sets of parties. Stored sorted.
class Bipartition {
 public:
  Bipartition(PartyList side_a, PartyList side_b);

  const PartyList& side_a() const noexcept { return side_a_; }
  const PartyList& side_b() const noexcept { return side_b_; }

  /// Sorted union of both sides.
  PartyList parties() const;
  bool covers(int num_parties) const;
  /// Throws InvalidPartition if any index is outside [0, num_parties).
  void validate(int num_parties) const;

  Bipartition swapped() const { return Bipartition(side_b_, side_a_); }

  /// Cut A | everything else.
  static Bipartition a_vs_rest(int num_parties);

 private:
  PartyList side_a_;
  PartyList side_b_;
};

/// Splits a full basis index into (index over `first`, index over `second`),
/// both groups taken in the order given.
class IndexSplit {
 public:
  IndexSplit(const Dims& dims, const PartyList& first, const PartyList& second);

  std::size_t first_dim() const noexcept { return first_dim_; }
  std::size_t second_dim() const noexcept { return second_dim_; }
  std::size_t size() const noexcept { return first_.size(); }
  std::size_t first(std::size_t full) const { return first_[full]; }
  std::size_t second(std::size_t full) const { return second_[full]; }

  /// Reshapes a vector over the full space into a first_dim x second_dim
  /// matrix. Parties outside both groups must not exist.
  Eigen::MatrixXcd reshape(const Eigen::VectorXcd& v) const;

 private:
  std::vector<std::size_t> first_;
  std::vector<std::size_t> second_;
  std::size_t first_dim_ = 1;
  std::size_t second_dim_ = 1;
};

/// Reduced state on `keep` (party order preserved). `keep` must be a
/// non-empty strict subset of the parties.
DensityMatrix partial_trace(const PureState& psi, const PartyList& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const PartyList& keep);
DensityMatrix partial_trace(const AnyState& state, const PartyList& keep);

/// Like partial_trace but returns the full density matrix when `keep`
/// contains every party.
DensityMatrix reduce_to(const AnyState& state, const PartyList& keep);

/// Pure state on system (x) ancilla whose reduction to the system is rho.
/// The ancilla dimension is max(rank, 2).
PureState purify(const DensityMatrix& rho);

/// Built-in state families.
///   "3q"       params {l0..l4} or {l0..l4, phi}
///   "4q-theta" params {theta0, theta1} or {theta0, theta1, phi}
///   "w4", "w5" no params
///   "ghz"      params {n}, n >= 3
///   "w"        params {n}, n >= 2
PureState make_family(const std::string& name, std::span<const double> params);

/// Haar-distributed pure state (normalized complex Gaussian vector).
PureState haar_random_pure(const Dims& dims, std::uint64_t seed);

/// Basis ket |i0 i1 ...> over `dims`.
Eigen::VectorXcd basis_ket(const Dims& dims, const std::vector<int>& digits);

}  // namespace qcorr
