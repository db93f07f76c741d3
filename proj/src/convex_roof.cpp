#include "qcorr/convex_roof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "qcorr/errors.hpp"
#include "qcorr/parallel.hpp"
#include "qcorr/rng.hpp"

namespace qcorr {

namespace {

struct RestartOutcome {
  double objective = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Reshape helper shared by value and gradient of the concurrence functional.
struct CutLayout {
  IndexSplit split;
  Eigen::Index rows;
  Eigen::Index cols;
};

double minor_sum(const Eigen::MatrixXcd& phi) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < phi.rows(); ++j) {
      for (Eigen::Index k = 0; k < phi.cols(); ++k) {
        for (Eigen::Index l = k + 1; l < phi.cols(); ++l) {
          s += std::norm(phi(i, k) * phi(j, l) - phi(i, l) * phi(j, k));
        }
      }
    }
  }
  return s;
}

Eigen::MatrixXcd minor_sum_gradient(const Eigen::MatrixXcd& phi) {
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(phi.rows(), phi.cols());
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < phi.rows(); ++j) {
      for (Eigen::Index k = 0; k < phi.cols(); ++k) {
        for (Eigen::Index l = k + 1; l < phi.cols(); ++l) {
          const Complex m = phi(i, k) * phi(j, l) - phi(i, l) * phi(j, k);
          g(i, k) += m * std::conj(phi(j, l));
          g(j, l) += m * std::conj(phi(i, k));
          g(i, l) -= m * std::conj(phi(j, k));
          g(j, k) -= m * std::conj(phi(i, l));
        }
      }
    }
  }
  return g;
}

// Orthonormal basis of u(m) under Re tr(X^dagger Y).
std::vector<Eigen::MatrixXcd> lie_algebra_basis(int m) {
  std::vector<Eigen::MatrixXcd> basis;
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  for (int p = 0; p < m; ++p) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(m, m);
    d(p, p) = i;
    basis.push_back(d);
    for (int q = p + 1; q < m; ++q) {
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
      a(p, q) = s;
      a(q, p) = -s;
      basis.push_back(a);
      Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(m, m);
      b(p, q) = i * s;
      b(q, p) = i * s;
      basis.push_back(b);
    }
  }
  return basis;
}

RestartOutcome descend(const EnsembleObjective& objective, Eigen::MatrixXcd w, double sign,
                       const OptimizerConfig& opt) {
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-14;
  constexpr double kMaxStep = 1e3;
  constexpr int kStallLimit = 3;

  RestartOutcome out;
  double f = sign * objective.value(w);
  double step = 1.0;
  int stalls = 0;
  for (int it = 0; it < opt.max_iters; ++it) {
    out.iterations = it + 1;
    Eigen::MatrixXcd g = sign * objective.riemannian_gradient(w);
    const double g2 = g.squaredNorm();
    if (g2 < opt.tol * opt.tol) {
      out.converged = true;
      break;
    }
    double trial_f = f;
    Eigen::MatrixXcd trial_w;
    bool accepted = false;
    while (step > kMinStep) {
      trial_w = unitary_exp(-step * g) * w;
      trial_f = sign * objective.value(trial_w);
      if (trial_f <= f - kArmijo * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double decrease = f - trial_f;
    w = std::move(trial_w);
    f = trial_f;
    step = std::min(step * 2.0, kMaxStep);
    if (decrease < opt.tol * (1.0 + std::abs(f))) {
      if (++stalls >= kStallLimit) {
        out.converged = true;
        break;
      }
    } else {
      stalls = 0;
    }
  }
  out.objective = f;
  return out;
}

}  // namespace

// --- functionals -----------------------------------------------------------

WeightedPureFunctional concurrence_functional(const Dims& dims, const Bipartition& cut) {
  if (!cut.covers(static_cast<int>(dims.size()))) {
    throw InvalidPartition("concurrence functional: cut must cover every party");
  }
  auto layout = std::make_shared<CutLayout>(
      CutLayout{IndexSplit(dims, cut.side_a(), cut.side_b()), 0, 0});
  layout->rows = static_cast<Eigen::Index>(layout->split.first_dim());
  layout->cols = static_cast<Eigen::Index>(layout->split.second_dim());

  WeightedPureFunctional fn;
  fn.value = [layout](const Eigen::VectorXcd& v) {
    return 2.0 * std::sqrt(minor_sum(layout->split.reshape(v)));
  };
  fn.gradient = [layout](const Eigen::VectorXcd& v) {
    const Eigen::MatrixXcd phi = layout->split.reshape(v);
    const double s = minor_sum(phi);
    Eigen::VectorXcd grad = Eigen::VectorXcd::Zero(v.size());
    // Non-differentiable at zero; zero is a valid subgradient there.
    if (s <= 1e-300) return grad;
    const Eigen::MatrixXcd gm = minor_sum_gradient(phi) / std::sqrt(s);
    for (Eigen::Index full = 0; full < v.size(); ++full) {
      grad[full] = gm(static_cast<Eigen::Index>(layout->split.first(full)),
                      static_cast<Eigen::Index>(layout->split.second(full)));
    }
    return grad;
  };
  return fn;
}

// --- EnsembleObjective -----------------------------------------------------

EnsembleObjective::EnsembleObjective(const DensityMatrix& rho, WeightedPureFunctional fn,
                                     int ensemble_size)
    : fn_(std::move(fn)) {
  if (!fn_.value) throw ConfigError("convex roof: pure functional has no value function");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::vector<Eigen::Index> support;
  for (Eigen::Index k = ev.size() - 1; k >= 0; --k) {
    if (ev[k] > kEigenClamp) support.push_back(k);
  }
  const auto r = static_cast<Eigen::Index>(support.size());
  factor_.resize(rho.matrix().rows(), r);
  for (Eigen::Index j = 0; j < r; ++j) {
    factor_.col(j) = std::sqrt(ev[support[j]]) * es.eigenvectors().col(support[j]);
  }
  ensemble_size_ = ensemble_size == 0 ? static_cast<int>(r) : ensemble_size;
  if (ensemble_size_ < r) {
    throw ConfigError("convex roof: ensemble_size " + std::to_string(ensemble_size_) +
                      " is below the rank " + std::to_string(r));
  }
}

Eigen::MatrixXcd EnsembleObjective::members(const Eigen::MatrixXcd& w) const {
  return factor_ * w.leftCols(rank()).transpose();
}

double EnsembleObjective::value(const Eigen::MatrixXcd& w) const {
  const Eigen::MatrixXcd psi = members(w);
  double total = 0.0;
  for (Eigen::Index i = 0; i < psi.cols(); ++i) total += fn_.value(psi.col(i));
  return total;
}

Eigen::MatrixXcd EnsembleObjective::riemannian_gradient(const Eigen::MatrixXcd& w) const {
  if (!fn_.gradient) return finite_difference_gradient(w);
  const Eigen::MatrixXcd psi = members(w);
  Eigen::MatrixXcd d(psi.rows(), psi.cols());
  for (Eigen::Index i = 0; i < psi.cols(); ++i) d.col(i) = fn_.gradient(psi.col(i));
  // Euclidean gradient w.r.t. conj(w); columns beyond the rank do not enter.
  Eigen::MatrixXcd euclid = Eigen::MatrixXcd::Zero(w.rows(), w.cols());
  euclid.leftCols(rank()) = (factor_.adjoint() * d).transpose();
  return euclid * w.adjoint() - w * euclid.adjoint();
}

Eigen::MatrixXcd EnsembleObjective::finite_difference_gradient(const Eigen::MatrixXcd& w,
                                                               double h) const {
  const int m = static_cast<int>(w.rows());
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, m);
  for (const auto& b : lie_algebra_basis(m)) {
    const double up = value(unitary_exp(h * b) * w);
    const double down = value(unitary_exp(-h * b) * w);
    g += ((up - down) / (2.0 * h)) * b;
  }
  return g;
}

// --- unitary helpers -------------------------------------------------------

Eigen::MatrixXcd unitary_exp(const Eigen::MatrixXcd& a) {
  // a = i h with h Hermitian.
  const Eigen::MatrixXcd h = Complex(0.0, -1.0) * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()));
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases[k] = std::polar(1.0, es.eigenvalues()[k]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd haar_unitary(int n, std::uint64_t seed) {
  NormalSampler normal(seed);
  Eigen::MatrixXcd z(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double re = normal();
      const double im = normal();
      z(r, c) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const double mag = std::abs(rmat(k, k));
    if (mag > 0.0) q.col(k) *= rmat(k, k) / mag;
  }
  return q;
}

// --- convex roof -----------------------------------------------------------

MeasureValue convex_roof(const DensityMatrix& rho, const WeightedPureFunctional& fn,
                         RoofDirection direction, const OptimizerConfig& opt) {
  opt.validate();
  const EnsembleObjective objective(rho, fn, opt.ensemble_size);
  const int m = objective.ensemble_size();
  const double sign = direction == RoofDirection::Minimize ? 1.0 : -1.0;

  const auto outcomes = parallel_map(static_cast<std::size_t>(opt.restarts), [&](std::size_t r) {
    Eigen::MatrixXcd start = r == 0 ? Eigen::MatrixXcd::Identity(m, m).eval()
                                    : haar_unitary(m, derive_seed(opt.seed, r));
    return descend(objective, std::move(start), sign, opt);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    if (outcomes[r].objective < outcomes[best].objective) best = r;
  }
  MeasureValue out;
  out.value = std::max(0.0, sign * outcomes[best].objective);
  out.exactness = direction == RoofDirection::Minimize ? Exactness::UpperEstimate
                                                       : Exactness::LowerEstimate;
  out.optimizer = OptimizerMeta{opt.restarts, outcomes[best].iterations, outcomes[best].converged};
  return out;
}

MeasureValue convex_roof(const DensityMatrix& rho, const Bipartition& cut,
                         RoofDirection direction, const OptimizerConfig& opt) {
  return convex_roof(rho, concurrence_functional(rho.dims(), cut), direction, opt);
}

}  // namespace qcorr
