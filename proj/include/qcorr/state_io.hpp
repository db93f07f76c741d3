#pragma once

#include <string>

#include <json.hpp>

#include "qcorr/qstate.hpp"

namespace qcorr {

/// Parses the state schema
///   {"dims":[d0,...], "amplitudes":[{"index":[i0,...],"re":x,"im":y}, ...]}
/// where omitted indices are zero. A mixed state may instead carry
///   {"dims":[...], "density":{"re":[[...]], "im":[[...]]}}.
/// Pure inputs whose norm deviates from 1 by less than 1e-6 are rescaled;
/// larger deviations throw InvalidState.
AnyState state_from_json(const nlohmann::json& j);
AnyState load_state_file(const std::string& path);

nlohmann::json state_to_json(const PureState& psi);
nlohmann::json state_to_json(const DensityMatrix& rho);

}  // namespace qcorr
