#include "qcorr/measures.hpp"

#include <algorithm>
#include <cmath>

#include "qcorr/convex_roof.hpp"
#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

constexpr double kSupportThreshold = 1e-12;
constexpr double kPurityThreshold = 1e-12;

void require_two_qubits(const DensityMatrix& rho, const char* op) {
  if (rho.dims() != Dims{2, 2}) {
    throw DimensionError(std::string(op) + ": expected a two-qubit state");
  }
}

// Orthonormal basis (columns) of the eigenvectors above the support threshold,
// largest eigenvalue first.
Eigen::MatrixXcd support_basis(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = m.rows() - 1; k >= 0; --k) {
    if (es.eigenvalues()[k] > kSupportThreshold) keep.push_back(k);
  }
  Eigen::MatrixXcd basis(m.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    basis.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
  }
  return basis;
}

// Positions of `parties` inside the sorted party list `all`.
PartyList local_positions(const PartyList& parties, const PartyList& all) {
  PartyList out;
  for (int p : parties) {
    out.push_back(static_cast<int>(std::find(all.begin(), all.end(), p) - all.begin()));
  }
  return out;
}

MeasureValue pure_value(const Eigen::VectorXcd& v, const Dims& dims, const Bipartition& cut) {
  return concurrence_pure(PureState::normalized(v, dims), cut);
}

// Dominant eigenvector when rho is pure within the threshold.
std::optional<Eigen::VectorXcd> pure_vector(const DensityMatrix& rho) {
  if (rho.purity() < 1.0 - kPurityThreshold) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  return Eigen::VectorXcd(es.eigenvectors().col(rho.matrix().rows() - 1));
}

}  // namespace

std::string to_string(Exactness e) {
  switch (e) {
    case Exactness::Exact:
      return "exact";
    case Exactness::UpperEstimate:
      return "upper-estimate";
    case Exactness::LowerEstimate:
      return "lower-estimate";
  }
  return "exact";
}

void OptimizerConfig::validate() const {
  if (ensemble_size < 0) throw ConfigError("optimizer: ensemble_size must be >= 0");
  if (restarts < 1) throw ConfigError("optimizer: restarts must be >= 1");
  if (max_iters < 1) throw ConfigError("optimizer: max_iters must be >= 1");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("optimizer: tol must be positive");
}

// --- CorrelationMeasure ----------------------------------------------------

std::string CorrelationMeasure::name() const {
  switch (kind) {
    case MeasureKind::Concurrence:
      return "concurrence";
    case MeasureKind::ConcurrenceAssistance:
      return "concurrence_assistance";
    case MeasureKind::TauAssistance:
      return "tau_assistance";
  }
  return "concurrence";
}

void CorrelationMeasure::validate() const {
  if (!(beta_max > 0.0) || !std::isfinite(beta_max)) {
    throw InvalidParameter("measure " + name() + ": beta_max must be positive");
  }
  if (!(x_min > 0.0) || !std::isfinite(x_min)) {
    throw InvalidParameter("measure " + name() + ": x_min must be positive");
  }
}

CorrelationMeasure CorrelationMeasure::from_name(const std::string& name) {
  CorrelationMeasure m;
  if (name == "concurrence") {
    m.kind = MeasureKind::Concurrence;
  } else if (name == "concurrence_assistance") {
    m.kind = MeasureKind::ConcurrenceAssistance;
  } else if (name == "tau_assistance") {
    m.kind = MeasureKind::TauAssistance;
  } else {
    throw InvalidParameter("unsupported measure '" + name + "'");
  }
  return m;
}

// --- closed forms ----------------------------------------------------------

MeasureValue concurrence_pure(const PureState& psi, const Bipartition& cut) {
  if (!cut.covers(psi.num_parties())) {
    throw InvalidPartition("concurrence_pure: cut must cover every party");
  }
  const auto fn = concurrence_functional(psi.dims(), cut);
  return MeasureValue::exact(fn.value(psi.amplitudes()));
}

std::array<double, 4> wootters_lambdas(const DensityMatrix& rho) {
  require_two_qubits(rho, "wootters_lambdas");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd x = es.eigenvectors() * roots.asDiagonal();
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  // Singular values of X^dagger (sy x sy) X^* are the square roots of the
  // eigenvalues of rho rho~, without squaring the condition number.
  const Eigen::MatrixXcd tau = x.adjoint() * yy * x.conjugate();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tau);
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) out[static_cast<std::size_t>(k)] = svd.singularValues()[k];
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

MeasureValue wootters_concurrence(const DensityMatrix& rho) {
  const auto l = wootters_lambdas(rho);
  return MeasureValue::exact(std::max(0.0, l[0] - l[1] - l[2] - l[3]));
}

MeasureValue assistance_2q(const DensityMatrix& rho) {
  const auto l = wootters_lambdas(rho);
  return MeasureValue::exact(l[0] + l[1] + l[2] + l[3]);
}

// --- support compression ---------------------------------------------------

SupportCompression compress_to_supports(const DensityMatrix& rho, const Bipartition& cut) {
  const PartyList all = cut.parties();
  if (static_cast<int>(all.size()) != rho.num_parties()) {
    throw InvalidPartition("compress_to_supports: cut must match the state's parties");
  }
  const PartyList first = local_positions(cut.side_a(), all);
  const PartyList second = local_positions(cut.side_b(), all);
  const IndexSplit split(rho.dims(), first, second);
  const auto da = static_cast<Eigen::Index>(split.first_dim());
  const auto db = static_cast<Eigen::Index>(split.second_dim());
  const auto n = static_cast<Eigen::Index>(split.size());

  // Reorder to the (side a, side b) product basis.
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto pr = static_cast<Eigen::Index>(split.first(r)) * db +
                    static_cast<Eigen::Index>(split.second(r));
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto pc = static_cast<Eigen::Index>(split.first(c)) * db +
                      static_cast<Eigen::Index>(split.second(c));
      m(pr, pc) = rho.matrix()(r, c);
    }
  }
  Eigen::MatrixXcd rho_a = Eigen::MatrixXcd::Zero(da, da);
  Eigen::MatrixXcd rho_b = Eigen::MatrixXcd::Zero(db, db);
  for (Eigen::Index a = 0; a < da; ++a) {
    for (Eigen::Index a2 = 0; a2 < da; ++a2) {
      for (Eigen::Index b = 0; b < db; ++b) rho_a(a, a2) += m(a * db + b, a2 * db + b);
    }
  }
  for (Eigen::Index b = 0; b < db; ++b) {
    for (Eigen::Index b2 = 0; b2 < db; ++b2) {
      for (Eigen::Index a = 0; a < da; ++a) rho_b(b, b2) += m(a * db + b, a * db + b2);
    }
  }
  const Eigen::MatrixXcd pa = support_basis(rho_a);
  const Eigen::MatrixXcd pb = support_basis(rho_b);
  const auto ra = static_cast<int>(pa.cols());
  const auto rb = static_cast<int>(pb.cols());
  if (ra <= 1 || rb <= 1) return {rho, ra, rb, true};

  Eigen::MatrixXcd p(da * db, static_cast<Eigen::Index>(ra) * rb);
  for (Eigen::Index a = 0; a < da; ++a) {
    for (Eigen::Index b = 0; b < db; ++b) {
      for (Eigen::Index i = 0; i < ra; ++i) {
        for (Eigen::Index j = 0; j < rb; ++j) p(a * db + b, i * rb + j) = pa(a, i) * pb(b, j);
      }
    }
  }
  Eigen::MatrixXcd small = p.adjoint() * m * p;
  small = 0.5 * (small + small.adjoint()).eval();
  small /= small.trace().real();
  return {DensityMatrix(std::move(small), Dims{ra, rb}), ra, rb, false};
}

// --- dispatcher ------------------------------------------------------------

MeasureValue measure_bipartite(const CorrelationMeasure& measure, const AnyState& state,
                               const Bipartition& cut, const OptimizerConfig& opt) {
  measure.validate();
  const int n = num_parties(state);
  cut.validate(n);

  if (cut.covers(n)) {
    if (const auto* psi = std::get_if<PureState>(&state)) return concurrence_pure(*psi, cut);
  }
  const PartyList parties = cut.parties();
  const DensityMatrix reduced = reduce_to(state, parties);
  const Bipartition local(local_positions(cut.side_a(), parties),
                          local_positions(cut.side_b(), parties));

  if (auto v = pure_vector(reduced)) return pure_value(*v, reduced.dims(), local);

  const SupportCompression comp = compress_to_supports(reduced, local);
  if (comp.product) return MeasureValue::exact(0.0);
  if (comp.rank_a <= 2 && comp.rank_b <= 2) {
    return measure.kind == MeasureKind::Concurrence ? wootters_concurrence(comp.state)
                                                    : assistance_2q(comp.state);
  }
  if (measure.mode == EvaluationMode::ExactPreferred) {
    throw EstimateRequired("measure " + measure.name() +
                           ": no closed form for this cut; optimizer estimate required");
  }
  const RoofDirection dir = measure.kind == MeasureKind::Concurrence ? RoofDirection::Minimize
                                                                     : RoofDirection::Maximize;
  return convex_roof(comp.state, Bipartition({0}, {1}), dir, opt);
}

}  // namespace qcorr
