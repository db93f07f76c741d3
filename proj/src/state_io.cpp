#include "qcorr/state_io.hpp"

#include <cmath>
#include <fstream>

#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

constexpr double kLoaderNormTolerance = 1e-6;

Dims read_dims(const nlohmann::json& j) {
  if (!j.contains("dims") || !j["dims"].is_array()) throw InvalidState("state JSON: missing dims");
  Dims dims;
  for (const auto& d : j["dims"]) {
    if (!d.is_number_integer()) throw InvalidState("state JSON: dims must be integers");
    dims.push_back(d.get<int>());
  }
  total_dimension(dims);
  return dims;
}

PureState read_pure(const nlohmann::json& j, const Dims& dims) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total_dimension(dims)));
  for (const auto& entry : j["amplitudes"]) {
    if (!entry.contains("index")) throw InvalidState("state JSON: amplitude without index");
    std::vector<int> digits = entry["index"].get<std::vector<int>>();
    if (digits.size() != dims.size()) throw InvalidState("state JSON: index length mismatch");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (digits[k] < 0 || digits[k] >= dims[k]) throw InvalidState("state JSON: index out of range");
      flat = flat * static_cast<std::size_t>(dims[k]) + static_cast<std::size_t>(digits[k]);
    }
    const double re = entry.value("re", 0.0);
    const double im = entry.value("im", 0.0);
    v[static_cast<Eigen::Index>(flat)] += Complex(re, im);
  }
  const double norm = v.norm();
  if (std::abs(norm - 1.0) >= kLoaderNormTolerance) {
    throw InvalidState("state JSON: amplitudes are not normalized (norm " + std::to_string(norm) + ")");
  }
  return PureState::normalized(std::move(v), dims);
}

DensityMatrix read_density(const nlohmann::json& j, const Dims& dims) {
  const auto n = static_cast<Eigen::Index>(total_dimension(dims));
  const auto& d = j["density"];
  auto re = d.at("re").get<std::vector<std::vector<double>>>();
  std::vector<std::vector<double>> im;
  if (d.contains("im")) im = d["im"].get<std::vector<std::vector<double>>>();
  if (static_cast<Eigen::Index>(re.size()) != n) throw InvalidState("state JSON: density size mismatch");
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(re[r].size()) != n) throw InvalidState("state JSON: density row size mismatch");
    for (Eigen::Index c = 0; c < n; ++c) {
      const double imag = im.empty() ? 0.0 : im.at(r).at(c);
      m(r, c) = Complex(re[r][c], imag);
    }
  }
  return DensityMatrix(std::move(m), dims);
}

}  // namespace

AnyState state_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidState("state JSON: expected an object");
  Dims dims = read_dims(j);
  const bool has_amps = j.contains("amplitudes");
  const bool has_density = j.contains("density");
  if (has_amps == has_density) {
    throw InvalidState("state JSON: exactly one of 'amplitudes' or 'density' is required");
  }
  if (has_amps) return read_pure(j, dims);
  return read_density(j, dims);
}

AnyState load_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidState("cannot open state file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidState("state file '" + path + "' is not valid JSON: " + e.what());
  }
  return state_from_json(j);
}

nlohmann::json state_to_json(const PureState& psi) {
  nlohmann::json out;
  out["dims"] = psi.dims();
  auto amps = nlohmann::json::array();
  const auto& dims = psi.dims();
  const auto& v = psi.amplitudes();
  for (Eigen::Index flat = 0; flat < v.size(); ++flat) {
    if (v[flat] == Complex(0.0)) continue;
    std::vector<int> digits(dims.size());
    auto rem = static_cast<std::size_t>(flat);
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
      digits[k] = static_cast<int>(rem % dims[k]);
      rem /= dims[k];
    }
    amps.push_back({{"index", digits}, {"re", v[flat].real()}, {"im", v[flat].imag()}});
  }
  out["amplitudes"] = std::move(amps);
  return out;
}

nlohmann::json state_to_json(const DensityMatrix& rho) {
  const auto& m = rho.matrix();
  std::vector<std::vector<double>> re(m.rows(), std::vector<double>(m.cols()));
  std::vector<std::vector<double>> im(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re[r][c] = m(r, c).real();
      im[r][c] = m(r, c).imag();
    }
  }
  return {{"dims", rho.dims()}, {"density", {{"re", re}, {"im", im}}}};
}

}  // namespace qcorr
