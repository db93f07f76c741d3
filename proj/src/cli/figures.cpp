#include <cmath>

#include "cli.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/serialize.hpp"

namespace qcorr::cli {

namespace {

std::string ok_flag(double gap, bool exact, bool degenerate, double estimate_tol) {
  if (degenerate) return "-";
  const double margin = comparison_margin(exact, estimate_tol);
  if (exact) return gap >= -margin ? "1" : "0";
  if (gap > margin) return "1";
  if (gap < -margin) return "0";
  return "?";
}

struct Column {
  double value = 0.0;
  bool exact = true;
  bool degenerate = false;
};

Column column_of(const BoundReport& r, const SweepSpec& spec, const std::string& id) {
  if (const auto it = r.bounds.find(id); it != r.bounds.end()) {
    return {it->second.value, it->second.exact, it->second.degenerate};
  }
  for (const auto& ref : spec.references) {
    if (ref.id == id) return {ref.value(r.exponent), true, false};
  }
  // Ordering-dependent bounds without a valid m.
  return {std::nan(""), false, true};
}

// Printed reference curves for the five-qubit W state under tau_a.
double w5_thm2_formula(double a) {
  return 4.0 * std::pow(0.4, a) - 3.0 * std::pow(0.5, a) + std::pow(std::sqrt(3.0) / 2.0, a);
}

double w5_thm4_formula(double a) {
  return 3.0 * std::pow(2.0 * std::sqrt(2.0) / 5.0, a) - 2.0 * std::pow(0.4, a) -
         2.0 * std::pow(0.5, a / 2.0) + std::pow(0.5, a) + std::pow(std::sqrt(3.0) / 2.0, a);
}

// W4 under concurrence with x = 2.
double w4_eq18_formula(double y) {
  return std::pow(std::sqrt(0.5), y) + (y / 2.0) * std::pow(0.5, y);
}

double w4_thm5_formula(double y) {
  return std::pow(std::sqrt(0.5), y) + (std::pow(2.0, y / 2.0) - 1.0) * std::pow(0.5, y);
}

}  // namespace

Table sweep_table(const std::vector<BoundReport>& reports, const SweepSpec& spec,
                  double estimate_tol) {
  Table t;
  t.header = {"exponent", "lhs"};
  std::vector<std::string> columns = spec.ids;
  for (const auto& ref : spec.references) columns.push_back(ref.id);
  for (const auto& c : columns) t.header.push_back(c);
  for (const auto& c : columns) t.header.push_back("ok_" + c);
  for (const auto& c : spec.checks) t.header.push_back("ok_" + c.name);

  for (const auto& r : reports) {
    std::vector<std::string> row = {format_number(r.exponent), format_number(r.lhs_power)};
    std::vector<Column> values;
    for (const auto& c : columns) {
      values.push_back(column_of(r, spec, c));
      row.push_back(format_number(values.back().value));
    }
    for (const auto& v : values) {
      const double gap =
          r.side == RelationSide::Polygamy ? v.value - r.lhs_power : r.lhs_power - v.value;
      row.push_back(ok_flag(gap, v.exact && r.lhs.is_exact(), v.degenerate || r.lhs_degenerate,
                            estimate_tol));
    }
    for (const auto& c : spec.checks) {
      const Column hi = column_of(r, spec, c.hi);
      const Column lo = column_of(r, spec, c.lo);
      row.push_back(ok_flag(hi.value - lo.value, hi.exact && lo.exact,
                            hi.degenerate || lo.degenerate, estimate_tol));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

nlohmann::json sweep_json(const std::vector<BoundReport>& reports, const SweepSpec& spec) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j = qcorr::to_json(r);
    nlohmann::json refs = nlohmann::json::object();
    for (const auto& ref : spec.references) refs[ref.id] = ref.value(r.exponent);
    j["references"] = refs;
    rows.push_back(std::move(j));
  }
  return rows;
}

FigurePreset figure_preset(int number) {
  FigurePreset p;
  p.number = number;
  switch (number) {
    case 1:
      p.family = "w5";
      p.measure = "tau_assistance";
      p.side = RelationSide::Polygamy;
      p.lo = 0.0;
      p.hi = 2.0;
      p.step = 0.01;
      p.spec.ids = {"base", "thm2"};
      p.spec.references = {{"thm2_ref", w5_thm2_formula}};
      p.spec.checks = {{"thm2_le_base", "base", "thm2"}};
      break;
    case 2:
      p.family = "w5";
      p.measure = "tau_assistance";
      p.side = RelationSide::Polygamy;
      p.lo = 0.0;
      p.hi = 2.0;
      p.step = 0.01;
      p.spec.ids = {"thm2", "thm4"};
      p.spec.references = {{"thm2_ref", w5_thm2_formula}, {"thm4_ref", w5_thm4_formula}};
      p.spec.checks = {{"thm4_ref_le_thm2", "thm2", "thm4_ref"}};
      break;
    case 3:
      p.family = "w4";
      p.measure = "concurrence";
      p.side = RelationSide::Monogamy;
      p.lo = 2.0;
      p.hi = 6.0;
      p.step = 0.01;
      p.spec.ids = {"eq18", "thm5"};
      p.spec.references = {{"eq18_ref", w4_eq18_formula}, {"thm5_ref", w4_thm5_formula}};
      p.spec.checks = {{"thm5_ge_eq18", "thm5", "eq18"}};
      break;
    default:
      throw InvalidParameter("unknown figure " + std::to_string(number) + " (expected 1, 2 or 3)");
  }
  return p;
}

Table run_figure(const FigurePreset& preset, std::vector<BoundReport>* reports) {
  const CorrelationMeasure measure = CorrelationMeasure::from_name(preset.measure);
  const OptimizerConfig opt;
  const StateComponents src(make_family(preset.family, {}), measure, opt);
  const auto grid = make_grid(preset.lo, preset.hi, preset.step);
  auto rows = verify_hierarchy(src, measure, preset.side, grid, preset.spec.ids, opt.tol);
  Table t = sweep_table(rows, preset.spec, opt.tol);
  if (reports) *reports = std::move(rows);
  return t;
}

}  // namespace qcorr::cli
