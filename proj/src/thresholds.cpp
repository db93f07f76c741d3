#include "qcorr/thresholds.hpp"

#include <cmath>

#include "qcorr/errors.hpp"
#include "qcorr/parallel.hpp"

namespace qcorr {

namespace {

constexpr double kSearchFloor = 1e-6;
constexpr int kMaxBisections = 200;
// Keeps bound == lhs^a (saturated) points on the satisfied side.
constexpr double kSaturationSlack = 1e-12;

double checked(const std::function<double(double)>& f, double x) {
  const double v = f(x);
  if (std::isnan(v)) throw EvaluationError("function returned NaN", x);
  return v;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

void ThresholdOptions::validate() const {
  if (!(tol > 0.0)) throw ConfigError("threshold: tol must be positive");
  if (scan_steps < 8) throw ConfigError("threshold: scan_steps must be >= 8");
  if (!(search_cap > 0.0)) throw ConfigError("threshold: search_cap must be positive");
}

std::optional<ThresholdResult> find_zero(const std::function<double(double)>& f, double lo,
                                         double hi, double tol, int scan_steps,
                                         std::vector<std::pair<double, double>>* profile) {
  if (!(lo < hi)) throw ConfigError("find_zero: need lo < hi");
  ThresholdOptions{tol, scan_steps, 1.0}.validate();

  const auto steps = static_cast<std::size_t>(scan_steps);
  const double width = (hi - lo) / static_cast<double>(scan_steps);
  const auto grid_point = [&](std::size_t k) {
    return k == steps ? hi : lo + static_cast<double>(k) * width;
  };
  const auto values = parallel_map(steps + 1, [&](std::size_t k) {
    const double x = grid_point(k);
    return std::make_pair(x, f(x));
  });
  for (const auto& [x, v] : values) {
    if (std::isnan(v)) throw EvaluationError("function returned NaN", x);
  }
  if (profile) *profile = values;

  ThresholdResult out;
  out.scan_profile = values;
  for (std::size_t k = 0; k <= steps; ++k) {
    if (values[k].second == 0.0) {
      out.root = out.lo = out.hi = values[k].first;
      return out;
    }
    if (k == steps || values[k + 1].second == 0.0 ||
        sign_of(values[k].second) == sign_of(values[k + 1].second)) {
      continue;
    }

    double a = values[k].first;
    double b = values[k + 1].first;
    const int sa = sign_of(values[k].second);
    double mid = 0.5 * (a + b);
    double fm = checked(f, mid);
    int it = 0;
    while (it < kMaxBisections && fm != 0.0 && (b - a > tol || std::abs(fm) > tol)) {
      if (sign_of(fm) == sa) {
        a = mid;
      } else {
        b = mid;
      }
      const double next = 0.5 * (a + b);
      if (next == mid) break;
      mid = next;
      fm = checked(f, mid);
      ++it;
    }
    out.root = mid;
    out.lo = a;
    out.hi = b;
    out.iterations = it;
    out.residual_at_root = fm;
    return out;
  }
  return std::nullopt;
}

ThresholdOutcome residual_zero_exponent(const ComponentSource& src,
                                        const CorrelationMeasure& measure,
                                        const ThresholdOptions& opts) {
  opts.validate();
  if (src.num_parties() != 3) {
    throw InvalidParameter("residual-zero threshold needs a 3-party state");
  }
  const double q_ab = src.pair(1).value;
  const double q_ac = src.pair(2).value;
  const double q_abc = src.joint().value;
  ThresholdOutcome out;
  if (q_ab <= 1e-12 || q_ac <= 1e-12 || q_abc <= 1e-12) {
    out.degenerate = true;
    out.message = "a component vanishes, the residual has no exponent root";
    return out;
  }
  const auto f = [&](double a) { return residual_tripartite(q_ab, q_ac, q_abc, a); };
  out.root = find_zero(f, kSearchFloor, measure.beta_max, opts.tol, opts.scan_steps,
                       &out.scan_profile);
  if (!out.root) out.message = "no sign change of the residual on (0, beta_max]";
  return out;
}

ThresholdOutcome empirical_beta(const ComponentSource& src, const CorrelationMeasure& measure,
                                const std::string& bound_id, const ThresholdOptions& opts) {
  opts.validate();
  if (bound_id != "base" && bound_id != "thm1" && bound_id != "thm2") {
    throw InvalidParameter("empirical_beta: bound must be base, thm1 or thm2");
  }
  const double lhs = src.joint().value;
  const auto f = [&](double a) {
    BoundEntry e;
    if (bound_id == "base") e = polygamy_bound_base(src, a, measure.beta_max);
    else if (bound_id == "thm1") e = thm1_bound(src, a, measure.beta_max);
    else e = thm2_bound(src, a, measure.beta_max);
    const double lhs_power = std::pow(lhs, a);
    return e.value - lhs_power + kSaturationSlack * std::max(1.0, lhs_power);
  };
  ThresholdOutcome out;
  out.root = find_zero(f, kSearchFloor, opts.search_cap, opts.tol, opts.scan_steps,
                       &out.scan_profile);
  if (!out.root) out.message = "the inequality holds on the whole search range";
  return out;
}

}  // namespace qcorr
