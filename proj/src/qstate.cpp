#include "qcorr/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qcorr/errors.hpp"
#include "qcorr/rng.hpp"

namespace qcorr {

namespace {

std::vector<std::size_t> strides_of(const Dims& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) {
    strides[k] = strides[k + 1] * static_cast<std::size_t>(dims[k + 1]);
  }
  return strides;
}

PartyList complement(const PartyList& keep, int n) {
  PartyList rest;
  for (int p = 0; p < n; ++p) {
    if (std::find(keep.begin(), keep.end(), p) == keep.end()) rest.push_back(p);
  }
  return rest;
}

void check_keep(const PartyList& keep, int n) {
  if (keep.empty()) throw InvalidPartition("partial_trace: keep set is empty");
  PartyList sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidPartition("partial_trace: duplicate party in keep set");
  }
  if (sorted.front() < 0 || sorted.back() >= n) {
    throw InvalidPartition("partial_trace: party index out of range");
  }
  if (static_cast<int>(sorted.size()) == n) {
    throw InvalidPartition("partial_trace: keep set contains every party");
  }
}

Dims restrict_dims(const Dims& dims, const PartyList& keep) {
  Dims out;
  out.reserve(keep.size());
  for (int p : keep) out.push_back(dims[p]);
  return out;
}

PartyList sorted_copy(PartyList v) {
  std::sort(v.begin(), v.end());
  return v;
}

void require_param_count(const std::string& name, std::span<const double> params,
                         std::initializer_list<std::size_t> allowed) {
  if (std::find(allowed.begin(), allowed.end(), params.size()) == allowed.end()) {
    std::ostringstream msg;
    msg << "family '" << name << "': unexpected parameter count " << params.size();
    throw InvalidParameter(msg.str());
  }
}

int integer_param(const std::string& name, double value, int min_value) {
  int n = static_cast<int>(std::lround(value));
  if (std::abs(value - n) > 1e-9 || n < min_value) {
    std::ostringstream msg;
    msg << "family '" << name << "': size parameter must be an integer >= " << min_value;
    throw InvalidParameter(msg.str());
  }
  return n;
}

PureState w_state(int n) {
  Dims dims(n, 2);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total_dimension(dims)));
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) v[Eigen::Index{1} << (n - 1 - k)] = amp;
  return PureState(std::move(v), std::move(dims));
}

}  // namespace

std::size_t total_dimension(const Dims& dims) {
  if (dims.empty()) throw InvalidState("dims must be non-empty");
  std::size_t total = 1;
  for (int d : dims) {
    if (d < 2) throw InvalidState("every local dimension must be >= 2");
    total *= static_cast<std::size_t>(d);
  }
  return total;
}

// --- PureState -------------------------------------------------------------

PureState::PureState(Eigen::VectorXcd amplitudes, Dims dims)
    : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != total_dimension(dims_)) {
    throw InvalidState("amplitude count does not match product of dims");
  }
  if (!amplitudes_.allFinite()) throw InvalidState("amplitudes must be finite");
  if (std::abs(amplitudes_.norm() - 1.0) > kNormTolerance) {
    throw InvalidState("pure state is not normalized");
  }
}

PureState PureState::normalized(Eigen::VectorXcd amplitudes, Dims dims) {
  double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidState("cannot normalize a zero or non-finite vector");
  }
  amplitudes /= norm;
  return PureState(std::move(amplitudes), std::move(dims));
}

// --- DensityMatrix ---------------------------------------------------------

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix, Dims dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
  const auto n = static_cast<Eigen::Index>(total_dimension(dims_));
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw InvalidState("density matrix side does not match product of dims");
  }
  if (!matrix_.allFinite()) throw InvalidState("density matrix must be finite");
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTolerance) throw InvalidState("density matrix is not Hermitian");
  if (std::abs(matrix_.trace() - Complex(1.0)) > kTraceTolerance) {
    throw InvalidState("density matrix trace is not 1");
  }
  // Symmetrize away the rounding noise the check above tolerated.
  matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigenClamp) {
    throw InvalidState("density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const auto& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint(), psi.dims());
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();
  for (auto& x : ev) x = std::max(x, 0.0);
  return ev;
}

double DensityMatrix::purity() const {
  return (matrix_ * matrix_).trace().real();
}

const Dims& dims_of(const AnyState& state) {
  return std::visit([](const auto& s) -> const Dims& { return s.dims(); }, state);
}

int num_parties(const AnyState& state) {
  return static_cast<int>(dims_of(state).size());
}

// --- Bipartition -----------------------------------------------------------

Bipartition::Bipartition(PartyList side_a, PartyList side_b)
    : side_a_(sorted_copy(std::move(side_a))), side_b_(sorted_copy(std::move(side_b))) {
  if (side_a_.empty() || side_b_.empty()) {
    throw InvalidPartition("both sides of a bipartition must be non-empty");
  }
  PartyList all = parties();
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw InvalidPartition("bipartition sides must be disjoint");
  }
  if (all.front() < 0) throw InvalidPartition("negative party index");
}

PartyList Bipartition::parties() const {
  PartyList all = side_a_;
  all.insert(all.end(), side_b_.begin(), side_b_.end());
  std::sort(all.begin(), all.end());
  return all;
}

bool Bipartition::covers(int num_parties) const {
  return static_cast<int>(side_a_.size() + side_b_.size()) == num_parties &&
         parties().back() < num_parties;
}

void Bipartition::validate(int num_parties) const {
  if (parties().back() >= num_parties) {
    std::ostringstream msg;
    msg << "bipartition references party " << parties().back() << " but the state has "
        << num_parties << " parties";
    throw InvalidPartition(msg.str());
  }
}

Bipartition Bipartition::a_vs_rest(int num_parties) {
  if (num_parties < 2) throw InvalidPartition("A|rest needs at least two parties");
  PartyList rest(num_parties - 1);
  std::iota(rest.begin(), rest.end(), 1);
  return Bipartition({0}, rest);
}

// --- IndexSplit ------------------------------------------------------------

IndexSplit::IndexSplit(const Dims& dims, const PartyList& first, const PartyList& second) {
  const std::size_t total = total_dimension(dims);
  const auto strides = strides_of(dims);
  for (int p : first) first_dim_ *= static_cast<std::size_t>(dims[p]);
  for (int p : second) second_dim_ *= static_cast<std::size_t>(dims[p]);
  first_.resize(total);
  second_.resize(total);
  for (std::size_t full = 0; full < total; ++full) {
    std::size_t f = 0;
    for (int p : first) f = f * dims[p] + (full / strides[p]) % dims[p];
    std::size_t s = 0;
    for (int p : second) s = s * dims[p] + (full / strides[p]) % dims[p];
    first_[full] = f;
    second_[full] = s;
  }
}

Eigen::MatrixXcd IndexSplit::reshape(const Eigen::VectorXcd& v) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(first_dim_),
                                              static_cast<Eigen::Index>(second_dim_));
  for (std::size_t full = 0; full < first_.size(); ++full) {
    m(static_cast<Eigen::Index>(first_[full]), static_cast<Eigen::Index>(second_[full])) =
        v[static_cast<Eigen::Index>(full)];
  }
  return m;
}

// --- partial trace ---------------------------------------------------------

DensityMatrix partial_trace(const PureState& psi, const PartyList& keep) {
  const int n = psi.num_parties();
  check_keep(keep, n);
  IndexSplit split(psi.dims(), keep, complement(keep, n));
  Eigen::MatrixXcd m = split.reshape(psi.amplitudes());
  Eigen::MatrixXcd rho = m * m.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho), restrict_dims(psi.dims(), keep));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const PartyList& keep) {
  const int n = rho.num_parties();
  check_keep(keep, n);
  IndexSplit split(rho.dims(), keep, complement(keep, n));
  const auto kd = static_cast<Eigen::Index>(split.first_dim());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(kd, kd);
  const auto& m = rho.matrix();
  const std::size_t total = split.size();
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < total; ++j) {
      if (split.second(i) != split.second(j)) continue;
      out(static_cast<Eigen::Index>(split.first(i)), static_cast<Eigen::Index>(split.first(j))) +=
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  out /= out.trace().real();
  return DensityMatrix(std::move(out), restrict_dims(rho.dims(), keep));
}

DensityMatrix partial_trace(const AnyState& state, const PartyList& keep) {
  return std::visit([&](const auto& s) { return partial_trace(s, keep); }, state);
}

DensityMatrix reduce_to(const AnyState& state, const PartyList& keep) {
  const int n = num_parties(state);
  PartyList sorted = sorted_copy(keep);
  PartyList all(n);
  std::iota(all.begin(), all.end(), 0);
  if (sorted == all && keep == sorted) {
    if (const auto* psi = std::get_if<PureState>(&state)) return DensityMatrix::from_pure(*psi);
    return std::get<DensityMatrix>(state);
  }
  return partial_trace(state, keep);
}

// --- purification ----------------------------------------------------------

PureState purify(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() < -kEigenClamp) throw InvalidState("purify: input is not PSD");
  std::vector<Eigen::Index> support;
  for (Eigen::Index k = ev.size() - 1; k >= 0; --k) {
    if (ev[k] > kEigenClamp) support.push_back(k);
  }
  const int rank = static_cast<int>(support.size());
  const int ancilla = std::max(rank, 2);
  Dims dims = rho.dims();
  dims.push_back(ancilla);
  const auto sys = rho.matrix().rows();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(sys * ancilla);
  for (int j = 0; j < rank; ++j) {
    const double w = std::sqrt(ev[support[j]]);
    for (Eigen::Index i = 0; i < sys; ++i) psi[i * ancilla + j] = w * es.eigenvectors()(i, support[j]);
  }
  return PureState::normalized(std::move(psi), std::move(dims));
}

// --- families --------------------------------------------------------------

Eigen::VectorXcd basis_ket(const Dims& dims, const std::vector<int>& digits) {
  if (digits.size() != dims.size()) throw InvalidParameter("basis_ket: digit count mismatch");
  const auto strides = strides_of(dims);
  std::size_t index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= dims[k]) throw InvalidParameter("basis_ket: digit out of range");
    index += static_cast<std::size_t>(digits[k]) * strides[k];
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total_dimension(dims)));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return v;
}

PureState make_family(const std::string& name, std::span<const double> params) {
  constexpr double kParamNormTolerance = 1e-2;
  if (name == "3q") {
    require_param_count(name, params, {5, 6});
    double sumsq = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      if (params[k] < 0.0 || !std::isfinite(params[k])) {
        throw InvalidParameter("family '3q': lambda coefficients must be finite and >= 0");
      }
      sumsq += params[k] * params[k];
    }
    if (std::abs(sumsq - 1.0) > kParamNormTolerance) {
      throw InvalidParameter("family '3q': sum of squared lambdas must be 1");
    }
    const double phi = params.size() == 6 ? params[5] : 0.0;
    const Dims dims{2, 2, 2};
    Eigen::VectorXcd v = params[0] * basis_ket(dims, {0, 0, 0}) +
                         params[1] * std::polar(1.0, phi) * basis_ket(dims, {1, 0, 0}) +
                         params[2] * basis_ket(dims, {1, 0, 1}) +
                         params[3] * basis_ket(dims, {1, 1, 0}) +
                         params[4] * basis_ket(dims, {1, 1, 1});
    return PureState::normalized(std::move(v), dims);
  }
  if (name == "4q-theta") {
    require_param_count(name, params, {2, 3});
    const double t0 = params[0];
    const double t1 = params[1];
    const double hi = std::numbers::pi / 2 + 1e-9;
    if (!(t0 >= -1e-9 && t0 <= hi && t1 >= -1e-9 && t1 <= hi)) {
      throw InvalidParameter("family '4q-theta': angles must lie in [0, pi/2]");
    }
    const double phi = params.size() == 3 ? params[2] : 0.0;
    const double ss = std::sin(t0) * std::sin(t1);
    const Dims dims{2, 2, 2, 2};
    Eigen::VectorXcd v = std::cos(t0) * basis_ket(dims, {0, 0, 0, 0}) +
                         std::sin(t0) * std::cos(t1) * std::polar(1.0, phi) *
                             basis_ket(dims, {1, 0, 0, 0}) +
                         0.5 * ss * basis_ket(dims, {1, 0, 1, 0}) +
                         0.75 * ss * basis_ket(dims, {1, 1, 0, 0}) +
                         (std::sqrt(3.0) / 4.0) * ss * basis_ket(dims, {1, 1, 1, 0});
    return PureState::normalized(std::move(v), dims);
  }
  if (name == "w4" || name == "w5") {
    require_param_count(name, params, {0});
    return w_state(name == "w4" ? 4 : 5);
  }
  if (name == "w") {
    require_param_count(name, params, {1});
    return w_state(integer_param(name, params[0], 2));
  }
  if (name == "ghz") {
    require_param_count(name, params, {1});
    const int n = integer_param(name, params[0], 3);
    Dims dims(n, 2);
    Eigen::VectorXcd v = (basis_ket(dims, std::vector<int>(n, 0)) +
                          basis_ket(dims, std::vector<int>(n, 1))) /
                         std::sqrt(2.0);
    return PureState::normalized(std::move(v), dims);
  }
  throw InvalidParameter("unknown state family '" + name + "'");
}

PureState haar_random_pure(const Dims& dims, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(total_dimension(dims));
  NormalSampler normal(seed);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = normal();
    const double im = normal();
    v[i] = Complex(re, im);
  }
  return PureState::normalized(std::move(v), dims);
}

}  // namespace qcorr
