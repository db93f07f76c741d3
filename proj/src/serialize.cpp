#include "qcorr/serialize.hpp"

#include <cstdio>

#include "qcorr/errors.hpp"

namespace qcorr {

using nlohmann::json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string verdict_flag(Verdict v) {
  switch (v) {
    case Verdict::Satisfied:
      return "1";
    case Verdict::Violated:
      return "0";
    case Verdict::Indeterminate:
      return "?";
    case Verdict::Degenerate:
      return "-";
  }
  return "?";
}

json to_json(const MeasureValue& v) {
  json j{{"value", v.value}, {"exactness", to_string(v.exactness)}};
  if (v.optimizer) {
    j["optimizer"] = {{"restarts_used", v.optimizer->restarts_used},
                      {"best_trace_length", v.optimizer->best_trace_length},
                      {"converged", v.optimizer->converged}};
  }
  return j;
}

json to_json(const OptimizerConfig& c) {
  return {{"ensemble_size", c.ensemble_size},
          {"restarts", c.restarts},
          {"max_iters", c.max_iters},
          {"tol", c.tol},
          {"seed", c.seed}};
}

OptimizerConfig optimizer_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("optimizer config must be a JSON object");
  OptimizerConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "ensemble_size") c.ensemble_size = value.get<int>();
      else if (key == "restarts") c.restarts = value.get<int>();
      else if (key == "max_iters") c.max_iters = value.get<int>();
      else if (key == "tol") c.tol = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else throw ConfigError("unknown optimizer key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("optimizer config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const BoundEntry& e) {
  return {{"value", e.value},
          {"exactness", e.exact ? "exact" : "estimate"},
          {"degenerate", e.degenerate},
          {"in_range", e.in_range}};
}

json to_json(const OrderingResult& o) {
  json rows = json::array();
  for (const auto& r : o.rows) {
    rows.push_back({{"index", r.index},
                    {"pair", r.pair},
                    {"tail", r.tail},
                    {"exact", r.exact},
                    {"ge", r.ge},
                    {"le", r.le},
                    {"indeterminate", r.indeterminate}});
  }
  json j{{"rows", rows}, {"in_theorem_range", o.in_theorem_range}};
  j["m"] = o.m ? json(*o.m) : json(nullptr);
  return j;
}

json to_json(const BoundReport& r) {
  json bounds = json::object();
  for (const auto& [id, e] : r.bounds) bounds[id] = to_json(e);
  json satisfied = json::object();
  for (const auto& [id, v] : r.satisfied) satisfied[id] = to_string(v);
  json checks = json::object();
  for (const auto& [id, v] : r.checks) checks[id] = to_string(v);
  json j{{"exponent", r.exponent},
         {"side", to_string(r.side)},
         {"lhs", to_json(r.lhs)},
         {"lhs_power", r.lhs_power},
         {"degenerate", r.degenerate()},
         {"bounds", bounds},
         {"satisfied", satisfied},
         {"checks", checks},
         {"m_in_theorem_range", r.m_in_theorem_range}};
  j["m"] = r.m ? json(*r.m) : json(nullptr);
  return j;
}

json to_json(const ThresholdResult& r) {
  json profile = json::array();
  for (const auto& [x, v] : r.scan_profile) profile.push_back({x, v});
  return {{"root", r.root},
          {"bracket", {r.lo, r.hi}},
          {"iterations", r.iterations},
          {"residual_at_root", r.residual_at_root},
          {"scan_profile", profile}};
}

json to_json(const ThresholdOutcome& o) {
  json j{{"found", o.root.has_value()}, {"degenerate", o.degenerate}};
  if (o.root) {
    j["result"] = to_json(*o.root);
  } else {
    json profile = json::array();
    for (const auto& [x, v] : o.scan_profile) profile.push_back({x, v});
    j["scan_profile"] = profile;
  }
  if (!o.message.empty()) j["message"] = o.message;
  return j;
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

}  // namespace qcorr
