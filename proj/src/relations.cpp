#include "qcorr/relations.hpp"

#include <algorithm>
#include <cmath>

#include "qcorr/errors.hpp"
#include "qcorr/parallel.hpp"

namespace qcorr {

namespace {

constexpr double kExactTolerance = 1e-9;
constexpr double kZeroComponent = 1e-12;

// Collects exactness and 0^0 occurrences while powering components.
struct PowerAccumulator {
  bool exact = true;
  bool degenerate = false;

  double pow(const MeasureValue& q, double e) {
    exact = exact && q.is_exact();
    if (e == 0.0 && q.value <= kZeroComponent) {
      degenerate = true;
      return 0.0;
    }
    return std::pow(q.value, e);
  }

  BoundEntry entry(double value, bool in_range) const {
    return BoundEntry{value, exact, degenerate, in_range};
  }
};

PartyMask full_mask(int n) {
  PartyMask m = 0;
  for (int b = 1; b < n; ++b) m |= PartyMask{1} << b;
  return m;
}

PartyList default_order(int n) {
  PartyList order;
  for (int b = 1; b < n; ++b) order.push_back(b);
  return order;
}

void require_parties(const ComponentSource& src, int min_n, const char* what) {
  if (src.num_parties() < min_n) {
    throw InvalidParameter(std::string(what) + ": needs at least " + std::to_string(min_n) +
                           " parties, got " + std::to_string(src.num_parties()));
  }
}

bool polygamy_in_range(double alpha, double beta) {
  return alpha >= 0.0 && alpha <= beta + 1e-12;
}

bool monogamy_in_range(double y, double x) { return y >= x - 1e-12; }

double int_power(double c, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= c;
  return out;
}

class ResidualBuilder {
 public:
  ResidualBuilder(const ComponentSource& src, ResidualTree& tree)
      : src_(src), tree_(tree), sign_(tree.side == RelationSide::Polygamy ? 1.0 : -1.0) {}

  double residual(const PartyList& set) {
    const PartyMask mask = mask_of(set);
    if (auto it = tree_.terms.find(mask); it != tree_.terms.end()) return it->second;
    double parts = 0.0;
    for (int b : set) {
      parts += tree_.weights[static_cast<std::size_t>(b - 1)] * acc_.pow(src_.pair(b), tree_.exponent);
    }
    const double joint = acc_.pow(src_.component(mask), tree_.exponent);
    double r = sign_ * (parts - joint);
    std::vector<int> chosen;
    std::vector<double> levels;
    for (std::size_t k = 2; k + 1 <= set.size(); ++k) {
      const auto [value, omitted] = level(set, k);
      r -= value;
      chosen.push_back(omitted);
      levels.push_back(value);
    }
    tree_.terms.emplace(mask, r);
    tree_.selection.emplace(mask, std::move(chosen));
    levels_.emplace(mask, std::move(levels));
    return r;
  }

  const std::vector<double>& levels_of(PartyMask mask) const { return levels_.at(mask); }
  const PowerAccumulator& accumulator() const { return acc_; }

 private:
  // Max (or mean) of R over the sets omitting one of the first k+1 members.
  std::pair<double, int> level(const PartyList& set, std::size_t k) {
    double best = 0.0;
    double sum = 0.0;
    int omitted = -1;
    for (std::size_t l = 0; l <= k; ++l) {
      PartyList sub;
      for (std::size_t i = 0; i <= k; ++i) {
        if (i != l) sub.push_back(set[i]);
      }
      const double v = residual(sub);
      sum += v;
      if (omitted < 0 || v > best) {
        best = v;
        omitted = set[l];
      }
    }
    if (tree_.strategy == ResidualStrategy::Mean) return {sum / static_cast<double>(k + 1), -1};
    return {best, omitted};
  }

  const ComponentSource& src_;
  ResidualTree& tree_;
  double sign_;
  PowerAccumulator acc_;
  std::map<PartyMask, std::vector<double>> levels_;
};

double weighted_parts(const ComponentSource& src, double e, const std::vector<double>& weights,
                      PowerAccumulator& acc) {
  double s = 0.0;
  for (int b = 1; b < src.num_parties(); ++b) {
    s += weights[static_cast<std::size_t>(b - 1)] * acc.pow(src.pair(b), e);
  }
  return s;
}

BoundEntry merge(BoundEntry e, const ResidualTree& tree, double value) {
  e.value = value;
  e.exact = e.exact && tree.exact;
  e.degenerate = e.degenerate || tree.degenerate;
  return e;
}

// Sum of plain parts minus (or plus) the residual level sum of the full set.
BoundEntry residual_bound(const ComponentSource& src, double e, ResidualStrategy strategy,
                          RelationSide side, const std::vector<double>& weights, bool in_range) {
  PowerAccumulator acc;
  const double parts = weighted_parts(src, e, weights, acc);
  const ResidualTree tree = residual_general(src, e, strategy, side, weights);
  const double value = side == RelationSide::Polygamy ? parts - tree.level_sum
                                                      : parts + tree.level_sum;
  return merge(acc.entry(0.0, in_range), tree, value);
}

// (Q_{AB_1}, Q_{A|B_2...B_{N-1}}), the tripartite grouping used by the
// two-term bounds.
std::pair<MeasureValue, MeasureValue> grouped_pair(const ComponentSource& src) {
  const int n = src.num_parties();
  const PartyMask rest = full_mask(n) & ~(PartyMask{1} << 1);
  return {src.pair(1), src.component(rest)};
}

Verdict judge(double gap, bool exact, bool degenerate, double estimate_tol) {
  if (degenerate) return Verdict::Degenerate;
  const double margin = comparison_margin(exact, estimate_tol);
  if (exact) return gap >= -margin ? Verdict::Satisfied : Verdict::Violated;
  if (gap > margin) return Verdict::Satisfied;
  if (gap < -margin) return Verdict::Violated;
  return Verdict::Indeterminate;
}

bool needs_ordering(const std::string& id) {
  return id == "thm3" || id == "thm4" || id == "eq18" || id == "thm5";
}

}  // namespace

// --- masks and component sources -------------------------------------------

PartyMask mask_of(const PartyList& parties) {
  PartyMask m = 0;
  for (int p : parties) {
    if (p < 1 || p > 31) throw InvalidParameter("party index out of range: " + std::to_string(p));
    m |= PartyMask{1} << p;
  }
  return m;
}

PartyList parties_of(PartyMask mask) {
  PartyList out;
  for (int b = 1; b < 32; ++b) {
    if (mask & (PartyMask{1} << b)) out.push_back(b);
  }
  return out;
}

MeasureValue ComponentSource::joint() const { return component(full_mask(num_parties())); }

StateComponents::StateComponents(AnyState state, CorrelationMeasure measure, OptimizerConfig opt)
    : state_(std::move(state)), measure_(measure), opt_(opt) {
  measure_.validate();
  opt_.validate();
  if (qcorr::num_parties(state_) < 3) {
    throw InvalidParameter("relations need at least 3 parties");
  }
}

int StateComponents::num_parties() const { return qcorr::num_parties(state_); }

MeasureValue StateComponents::component(PartyMask mask) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(mask); it != cache_.end()) return it->second;
  }
  const PartyList side_b = parties_of(mask);
  if (side_b.empty() || side_b.back() >= num_parties()) {
    throw InvalidParameter("component: party set outside the state");
  }
  const MeasureValue v = measure_bipartite(measure_, state_, Bipartition({0}, side_b), opt_);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.try_emplace(mask, v).first->second;
}

TableComponents::TableComponents(int num_parties, std::map<PartyMask, double> values)
    : num_parties_(num_parties), values_(std::move(values)) {
  if (num_parties_ < 3) throw InvalidParameter("relations need at least 3 parties");
  for (const auto& [mask, v] : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidParameter("component values must be finite and non-negative");
    }
  }
}

MeasureValue TableComponents::component(PartyMask mask) const {
  const auto it = values_.find(mask);
  if (it == values_.end()) {
    throw InvalidParameter("component table has no entry for mask " + std::to_string(mask));
  }
  return MeasureValue::exact(it->second);
}

std::string to_string(RelationSide side) {
  return side == RelationSide::Polygamy ? "polygamy" : "monogamy";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied:
      return "satisfied";
    case Verdict::Violated:
      return "violated";
    case Verdict::Indeterminate:
      return "indeterminate";
    case Verdict::Degenerate:
      return "degenerate";
  }
  return "indeterminate";
}

// --- residuals -------------------------------------------------------------

double residual_tripartite(double q_ab, double q_ac, double q_abc, double alpha) {
  if (q_ab < 0.0 || q_ac < 0.0 || q_abc < 0.0) {
    throw DomainError("residual_tripartite: negative component");
  }
  if (alpha < 0.0) throw DomainError("residual_tripartite: negative exponent");
  if (alpha == 0.0 && (q_ab == 0.0 || q_ac == 0.0 || q_abc == 0.0)) {
    throw DomainError("residual_tripartite: 0^0 is undefined");
  }
  return std::pow(q_ab, alpha) + std::pow(q_ac, alpha) - std::pow(q_abc, alpha);
}

ResidualTree residual_general(const ComponentSource& src, double exponent,
                              ResidualStrategy strategy, RelationSide side,
                              std::vector<double> weights, PartyList order) {
  const int n = src.num_parties();
  if (order.empty()) order = default_order(n);
  if (order.size() < 2) throw InvalidParameter("residual_general: needs at least two B parties");
  for (int b : order) {
    if (b < 1 || b >= n) throw InvalidParameter("residual_general: party outside the state");
  }
  if (weights.empty()) weights.assign(static_cast<std::size_t>(n - 1), 1.0);
  if (weights.size() != static_cast<std::size_t>(n - 1)) {
    throw InvalidParameter("residual_general: need one weight per B party");
  }
  ResidualTree tree;
  tree.exponent = exponent;
  tree.strategy = strategy;
  tree.side = side;
  tree.order = order;
  tree.weights = std::move(weights);
  ResidualBuilder builder(src, tree);
  builder.residual(order);
  tree.levels = builder.levels_of(mask_of(order));
  for (double l : tree.levels) tree.level_sum += l;
  tree.exact = builder.accumulator().exact;
  tree.degenerate = builder.accumulator().degenerate;
  return tree;
}

double lemma_weighted_pair(double q_large, double q_small, double exponent, double power_ref) {
  if (q_large < q_small) {
    throw OrderingError("lemma_weighted_pair: q_large < q_small; swap the arguments");
  }
  if (!(power_ref > 0.0)) throw InvalidParameter("lemma_weighted_pair: power_ref must be positive");
  const double weight = std::pow(2.0, exponent / power_ref) - 1.0;
  const double small = q_small == 0.0 ? 0.0 : weight * std::pow(q_small, exponent);
  return std::pow(q_large, exponent) + small;
}

std::vector<double> ordering_weights(int n_b, int m, double c) {
  if (m < 0 || m > n_b - 1) throw InvalidParameter("ordering index m out of range");
  std::vector<double> w(static_cast<std::size_t>(n_b));
  for (int i = 1; i <= n_b; ++i) {
    int k = 0;
    if (i == n_b) {
      k = m;
    } else if (i <= m) {
      k = i - 1;
    } else {
      k = m + 1;
    }
    w[static_cast<std::size_t>(i - 1)] = int_power(c, k);
  }
  return w;
}

OrderingResult ordering_classify(const ComponentSource& src, double estimate_margin) {
  const int n = src.num_parties();
  OrderingResult out;
  for (int i = 1; i <= n - 2; ++i) {
    PartyMask tail = 0;
    for (int b = i + 1; b < n; ++b) tail |= PartyMask{1} << b;
    const MeasureValue q = src.pair(i);
    const MeasureValue t = src.component(tail);
    OrderingRow row;
    row.index = i;
    row.pair = q.value;
    row.tail = t.value;
    row.exact = q.is_exact() && t.is_exact();
    const double margin = row.exact ? kExactTolerance : estimate_margin;
    const double diff = q.value - t.value;
    row.ge = diff >= -margin;
    row.le = diff <= margin;
    row.indeterminate = !row.exact && std::abs(diff) <= margin;
    out.rows.push_back(row);
  }
  for (int m = 0; m <= n - 2 && !out.m; ++m) {
    bool ok = true;
    for (const auto& row : out.rows) {
      ok = ok && (row.index <= m ? row.ge : row.le);
    }
    if (ok) out.m = m;
  }
  out.in_theorem_range = out.m && *out.m >= 1 && *out.m <= n - 3;
  return out;
}

// --- polygamy bounds -------------------------------------------------------

BoundEntry polygamy_bound_base(const ComponentSource& src, double alpha, double beta) {
  PowerAccumulator acc;
  const double v =
      weighted_parts(src, alpha, std::vector<double>(static_cast<std::size_t>(src.num_parties() - 1), 1.0), acc);
  return acc.entry(v, polygamy_in_range(alpha, beta));
}

BoundEntry lemma1_bound(const ComponentSource& src, double alpha, double beta) {
  const auto [a, b] = grouped_pair(src);
  PowerAccumulator acc;
  acc.pow(a, alpha);
  acc.pow(b, alpha);
  const double v = lemma_weighted_pair(std::max(a.value, b.value), std::min(a.value, b.value),
                                       alpha, beta);
  return acc.entry(acc.degenerate ? 0.0 : v, polygamy_in_range(alpha, beta));
}

BoundEntry thm1_bound(const ComponentSource& src, double alpha, double beta) {
  if (src.num_parties() != 4) {
    throw InvalidParameter("thm1: needs exactly 4 parties, got " +
                           std::to_string(src.num_parties()));
  }
  PowerAccumulator acc;
  double parts = 0.0;
  std::array<double, 4> p{};
  for (int b = 1; b <= 3; ++b) {
    p[static_cast<std::size_t>(b)] = acc.pow(src.pair(b), alpha);
    parts += p[static_cast<std::size_t>(b)];
  }
  double worst = 0.0;
  bool first = true;
  for (int i = 1; i <= 3; ++i) {
    for (int j = i + 1; j <= 3; ++j) {
      const double joint = acc.pow(src.component((PartyMask{1} << i) | (PartyMask{1} << j)), alpha);
      const double r = p[static_cast<std::size_t>(i)] + p[static_cast<std::size_t>(j)] - joint;
      if (first || r > worst) worst = r;
      first = false;
    }
  }
  return acc.entry(parts - worst, polygamy_in_range(alpha, beta));
}

BoundEntry thm2_bound(const ComponentSource& src, double alpha, double beta) {
  require_parties(src, 4, "thm2");
  return residual_bound(src, alpha, ResidualStrategy::Max, RelationSide::Polygamy,
                        std::vector<double>(static_cast<std::size_t>(src.num_parties() - 1), 1.0),
                        polygamy_in_range(alpha, beta));
}

BoundEntry cor1_bound(const ComponentSource& src, double alpha, double beta) {
  require_parties(src, 4, "cor1");
  return residual_bound(src, alpha, ResidualStrategy::Mean, RelationSide::Polygamy,
                        std::vector<double>(static_cast<std::size_t>(src.num_parties() - 1), 1.0),
                        polygamy_in_range(alpha, beta));
}

BoundEntry thm3_bound(const ComponentSource& src, double alpha, double beta, int m) {
  require_parties(src, 4, "thm3");
  const double c = std::pow(2.0, alpha / beta) - 1.0;
  PowerAccumulator acc;
  const double v = weighted_parts(src, alpha, ordering_weights(src.num_parties() - 1, m, c), acc);
  return acc.entry(v, polygamy_in_range(alpha, beta));
}

BoundEntry thm4_bound(const ComponentSource& src, double alpha, double beta, int m) {
  require_parties(src, 4, "thm4");
  const double c = std::pow(2.0, alpha / beta) - 1.0;
  return residual_bound(src, alpha, ResidualStrategy::Max, RelationSide::Polygamy,
                        ordering_weights(src.num_parties() - 1, m, c),
                        polygamy_in_range(alpha, beta));
}

// --- monogamy bounds -------------------------------------------------------

BoundEntry eq16_bound(const ComponentSource& src, double y, double x) {
  const auto [a, b] = grouped_pair(src);
  PowerAccumulator acc;
  const double v = acc.pow(a, y) + acc.pow(b, y);
  return acc.entry(v, monogamy_in_range(y, x));
}

BoundEntry eq17_bound(const ComponentSource& src, double y, double x) {
  PowerAccumulator acc;
  const double v =
      weighted_parts(src, y, std::vector<double>(static_cast<std::size_t>(src.num_parties() - 1), 1.0), acc);
  return acc.entry(v, monogamy_in_range(y, x));
}

BoundEntry lemma2_bound(const ComponentSource& src, double y, double x) {
  const auto [a, b] = grouped_pair(src);
  PowerAccumulator acc;
  acc.pow(a, y);
  acc.pow(b, y);
  const double v = lemma_weighted_pair(std::max(a.value, b.value), std::min(a.value, b.value), y, x);
  return acc.entry(acc.degenerate ? 0.0 : v, monogamy_in_range(y, x));
}

BoundEntry eq18_bound(const ComponentSource& src, double y, double x, int m) {
  require_parties(src, 4, "eq18");
  return residual_bound(src, y, ResidualStrategy::Max, RelationSide::Monogamy,
                        ordering_weights(src.num_parties() - 1, m, y / x),
                        monogamy_in_range(y, x));
}

BoundEntry thm5_bound(const ComponentSource& src, double y, double x, int m) {
  require_parties(src, 4, "thm5");
  return residual_bound(src, y, ResidualStrategy::Max, RelationSide::Monogamy,
                        ordering_weights(src.num_parties() - 1, m, std::pow(2.0, y / x) - 1.0),
                        monogamy_in_range(y, x));
}

// --- reports ---------------------------------------------------------------

bool BoundReport::degenerate() const {
  if (lhs_degenerate) return true;
  return std::any_of(bounds.begin(), bounds.end(),
                     [](const auto& kv) { return kv.second.degenerate; });
}

RelationSide side_of(const std::string& id) {
  static const std::vector<std::string> poly = {"base", "lemma1", "thm1", "thm2",
                                                "cor1", "thm3",   "thm4"};
  static const std::vector<std::string> mono = {"eq16", "eq17", "lemma2", "eq18", "thm5"};
  if (std::find(poly.begin(), poly.end(), id) != poly.end()) return RelationSide::Polygamy;
  if (std::find(mono.begin(), mono.end(), id) != mono.end()) return RelationSide::Monogamy;
  throw InvalidParameter("unknown bound id '" + id + "'");
}

std::vector<std::string> default_bound_ids(RelationSide side, int n) {
  std::vector<std::string> ids;
  if (side == RelationSide::Polygamy) {
    ids = {"base", "lemma1"};
    if (n == 4) ids.push_back("thm1");
    if (n >= 4) ids.insert(ids.end(), {"thm2", "cor1", "thm3", "thm4"});
  } else {
    ids = {"eq16", "eq17", "lemma2"};
    if (n >= 4) ids.insert(ids.end(), {"eq18", "thm5"});
  }
  return ids;
}

double comparison_margin(bool exact, double estimate_tol) {
  return exact ? kExactTolerance : 10.0 * estimate_tol + kExactTolerance;
}

BoundReport evaluate_bounds(const ComponentSource& src, const CorrelationMeasure& measure,
                            RelationSide side, double exponent,
                            const std::vector<std::string>& ids, double estimate_tol,
                            const std::optional<OrderingResult>& ordering) {
  measure.validate();
  if (!std::isfinite(exponent) || exponent < 0.0) {
    throw InvalidParameter("exponent must be finite and non-negative");
  }
  BoundReport report;
  report.exponent = exponent;
  report.side = side;
  report.lhs = src.joint();
  PowerAccumulator lhs_acc;
  report.lhs_power = lhs_acc.pow(report.lhs, exponent);
  report.lhs_degenerate = lhs_acc.degenerate;

  std::optional<OrderingResult> order = ordering;
  const bool want_order = std::any_of(ids.begin(), ids.end(), needs_ordering);
  if (want_order && !order) {
    order = ordering_classify(src, comparison_margin(false, estimate_tol));
  }
  if (order) {
    report.m = order->m;
    report.m_in_theorem_range = order->in_theorem_range;
  }
  const double beta = measure.beta_max;
  const double x = measure.x_min;

  for (const auto& id : ids) {
    if (side_of(id) != side) {
      throw InvalidParameter("bound '" + id + "' belongs to the " + to_string(side_of(id)) +
                             " side");
    }
    if (needs_ordering(id) && !(order && order->m)) continue;
    BoundEntry e;
    if (id == "base") e = polygamy_bound_base(src, exponent, beta);
    else if (id == "lemma1") e = lemma1_bound(src, exponent, beta);
    else if (id == "thm1") e = thm1_bound(src, exponent, beta);
    else if (id == "thm2") e = thm2_bound(src, exponent, beta);
    else if (id == "cor1") e = cor1_bound(src, exponent, beta);
    else if (id == "thm3") e = thm3_bound(src, exponent, beta, *order->m);
    else if (id == "thm4") e = thm4_bound(src, exponent, beta, *order->m);
    else if (id == "eq16") e = eq16_bound(src, exponent, x);
    else if (id == "eq17") e = eq17_bound(src, exponent, x);
    else if (id == "lemma2") e = lemma2_bound(src, exponent, x);
    else if (id == "eq18") e = eq18_bound(src, exponent, x, *order->m);
    else if (id == "thm5") e = thm5_bound(src, exponent, x, *order->m);
    report.bounds[id] = e;
    const double gap = side == RelationSide::Polygamy ? e.value - report.lhs_power
                                                      : report.lhs_power - e.value;
    report.satisfied[id] = judge(gap, e.exact && report.lhs.is_exact(),
                                 e.degenerate || report.lhs_degenerate, estimate_tol);
  }

  const auto check = [&](const std::string& name, const std::string& hi, const std::string& lo) {
    const auto h = report.bounds.find(hi);
    const auto l = report.bounds.find(lo);
    if (h == report.bounds.end() || l == report.bounds.end()) return;
    report.checks[name] =
        judge(h->second.value - l->second.value, h->second.exact && l->second.exact,
              h->second.degenerate || l->second.degenerate, estimate_tol);
  };
  check("thm2_le_base", "base", "thm2");
  check("thm5_ge_eq18", "thm5", "eq18");
  return report;
}

std::vector<BoundReport> verify_hierarchy(const ComponentSource& src,
                                          const CorrelationMeasure& measure, RelationSide side,
                                          const std::vector<double>& grid,
                                          const std::vector<std::string>& ids,
                                          double estimate_tol) {
  std::optional<OrderingResult> order;
  if (std::any_of(ids.begin(), ids.end(), needs_ordering)) {
    order = ordering_classify(src, comparison_margin(false, estimate_tol));
  }
  if (grid.empty()) return {};
  // The first point fills the component cache before the grid fans out.
  BoundReport first = evaluate_bounds(src, measure, side, grid.front(), ids, estimate_tol, order);
  auto rest = parallel_map(grid.size() - 1, [&](std::size_t i) {
    return evaluate_bounds(src, measure, side, grid[i + 1], ids, estimate_tol, order);
  });
  std::vector<BoundReport> out;
  out.reserve(grid.size());
  out.push_back(std::move(first));
  for (auto& r : rest) out.push_back(std::move(r));
  return out;
}

}  // namespace qcorr
