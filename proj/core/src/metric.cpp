#include "poros/metric.hpp"

#include "poros/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace poros {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// |2^a - 2^b| / 2^r in doubles, exponents relative to r.
double scaled_abs_difference(double la, double lb, double lr) {
  const double a = exp2_clamped(la - lr);
  const double b = exp2_clamped(lb - lr);
  if (std::isinf(a) || std::isinf(b)) {
    if (la == lb) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return std::fabs(a - b);
}

// Integers j with lo <= j * step <= hi.
std::vector<Integer> grid_steps(const Rational& lo, const Rational& hi, const Rational& step) {
  std::vector<Integer> out;
  const Rational a = lo / step;
  const Rational b = hi / step;
  Integer j = boost::multiprecision::numerator(a) / boost::multiprecision::denominator(a);
  if (Rational(j) < a) ++j;
  while (Rational(j - 1) >= a) --j;
  for (; Rational(j) <= b; ++j) out.push_back(j);
  return out;
}

}  // namespace

double exp2_clamped(double x) {
  if (x > 1020) return std::numeric_limits<double>::infinity();
  if (x < -1070) return 0.0;
  return std::exp2(x);
}

double MetricOracle::scaled_distance(PointId a, PointId b, double log2_r) const {
  const Magnitude d = distance(a, b);
  if (!d) return 0.0;
  return exp2_clamped(d->log2_approx() - log2_r);
}

// ---------------------------------------------------------------------------

HalfLineSpace::HalfLineSpace(std::optional<ScaleSet> set, Rational step)
    : set_(std::move(set)), step_(std::move(step)) {
  if (step_ <= 0) throw PreconditionError("ray grid step must be positive");
  pos_.push_back(std::nullopt);
  log2_.push_back(kNegInf);
}

HalfLineSpace::HalfLineSpace(ScaleSet set) : HalfLineSpace(std::optional(std::move(set)), 1) {}

std::unique_ptr<HalfLineSpace> HalfLineSpace::ray(Rational step) {
  return std::unique_ptr<HalfLineSpace>(new HalfLineSpace(std::nullopt, std::move(step)));
}

PointId HalfLineSpace::intern(const LogValue& x) const {
  auto [it, inserted] = index_.try_emplace(x.log2(), static_cast<PointId>(pos_.size()));
  if (inserted) {
    pos_.push_back(x);
    log2_.push_back(x.log2_approx());
  }
  return it->second;
}

PointId HalfLineSpace::point_at(const Magnitude& x) const {
  if (!x) return 0;
  if (set_ && !set_->contains(*x)) throw PreconditionError("point is not in the set");
  std::lock_guard lock(mutex_);
  return intern(*x);
}

PointId HalfLineSpace::point_of_index(std::size_t k) const {
  std::lock_guard lock(mutex_);
  if (by_index_.empty()) by_index_.assign(set_->depth(), 0);
  if (by_index_[k] == 0) by_index_[k] = intern(set_->point(k));
  return by_index_[k];
}

Magnitude HalfLineSpace::position(PointId id) const {
  std::lock_guard lock(mutex_);
  return pos_.at(id);
}

Magnitude HalfLineSpace::distance(PointId a, PointId b) const {
  return abs_difference(position(a), position(b));
}

double HalfLineSpace::scaled_distance(PointId a, PointId b, double log2_r) const {
  double la, lb;
  {
    std::lock_guard lock(mutex_);
    la = log2_.at(a);
    lb = log2_.at(b);
  }
  return scaled_abs_difference(la, lb, log2_r);
}

std::vector<ScaledPoint> HalfLineSpace::sample_at_scale(const LogValue& r, const Rational& lo,
                                                        const Rational& hi,
                                                        std::size_t budget) const {
  std::vector<ScaledPoint> out;
  if (set_) {
    const LogValue top = LogValue::from_log2(r.log2() + hi);
    const LogValue bottom = LogValue::from_log2(r.log2() + lo);
    auto i = set_->first_at_least(top);
    std::size_t start = i ? (set_->point(*i) == top ? *i : *i + 1) : 0;
    for (std::size_t k = start; k < set_->depth() && out.size() < budget; ++k) {
      const LogValue& x = set_->point(k);
      if (x < bottom) break;
      out.push_back({point_of_index(k), 0, x});
    }
    return out;
  }
  const std::vector<Integer> steps = grid_steps(lo, hi, step_);
  for (auto it = steps.rbegin(); it != steps.rend() && out.size() < budget; ++it) {
    const LogValue x = LogValue::from_log2(r.log2() + Rational(*it) * step_);
    out.push_back({point_at(x), 0, x});
  }
  return out;
}

std::vector<PointId> HalfLineSpace::enumerate(std::size_t budget) const {
  std::vector<PointId> out;
  if (set_) {
    for (std::size_t k = 0; k < set_->depth() && out.size() < budget; ++k) {
      out.push_back(point_of_index(k));
    }
    return out;
  }
  for (std::size_t k = 0; out.size() < budget; ++k) {
    out.push_back(point_at(LogValue::from_log2(-Rational(static_cast<long long>(k)) * step_)));
  }
  return out;
}

std::string HalfLineSpace::name() const {
  if (!set_) return "ray";
  return "half-line subset (depth " + std::to_string(set_->depth()) + ")";
}

// ---------------------------------------------------------------------------

StarSpace::StarSpace(ScaleSet set, std::uint32_t rays) : set_(std::move(set)), rays_(rays) {
  if (rays == 0) throw PreconditionError("star needs at least one ray");
}

PointId StarSpace::point_at(std::uint32_t ray, std::size_t index) const {
  if (ray >= rays_ || index >= set_.depth()) throw PreconditionError("star point out of range");
  return static_cast<PointId>(1 + ray * set_.depth() + index);
}

namespace {

struct StarPoint {
  std::uint32_t ray = 0;
  std::size_t index = 0;
};

StarPoint decode(PointId id, std::size_t depth) {
  const std::size_t k = id - 1;
  return {static_cast<std::uint32_t>(k / depth), k % depth};
}

}  // namespace

Magnitude StarSpace::distance(PointId a, PointId b) const {
  if (a == b) return std::nullopt;
  if (a == 0 || b == 0) return set_.point(decode(a == 0 ? b : a, set_.depth()).index);
  const StarPoint x = decode(a, set_.depth());
  const StarPoint y = decode(b, set_.depth());
  if (x.ray == y.ray) return abs_difference(set_.point(x.index), set_.point(y.index));
  return linear_sum(set_.point(x.index), set_.point(y.index));
}

double StarSpace::scaled_distance(PointId a, PointId b, double log2_r) const {
  if (a == b) return 0.0;
  if (a == 0 || b == 0) {
    return exp2_clamped(set_.point(decode(a == 0 ? b : a, set_.depth()).index).log2_approx() -
                        log2_r);
  }
  const StarPoint x = decode(a, set_.depth());
  const StarPoint y = decode(b, set_.depth());
  const double la = set_.point(x.index).log2_approx();
  const double lb = set_.point(y.index).log2_approx();
  if (x.ray == y.ray) return scaled_abs_difference(la, lb, log2_r);
  return exp2_clamped(la - log2_r) + exp2_clamped(lb - log2_r);
}

std::vector<ScaledPoint> StarSpace::sample_at_scale(const LogValue& r, const Rational& lo,
                                                    const Rational& hi,
                                                    std::size_t budget) const {
  std::vector<ScaledPoint> out;
  const Rational top = r.log2() + hi;
  const Rational bottom = r.log2() + lo;
  for (std::uint32_t ray = 0; ray < rays_; ++ray) {
    for (std::size_t k = 0; k < set_.depth() && out.size() < budget; ++k) {
      const LogValue& x = set_.point(k);
      if (x.log2() > top) continue;
      if (x.log2() < bottom) break;
      out.push_back({point_at(ray, k), ray, x});
    }
  }
  return out;
}

std::vector<PointId> StarSpace::enumerate(std::size_t budget) const {
  std::vector<PointId> out;
  for (std::size_t k = 0; k < set_.depth(); ++k) {
    for (std::uint32_t ray = 0; ray < rays_ && out.size() < budget; ++ray) {
      out.push_back(point_at(ray, k));
    }
  }
  return out;
}

std::string StarSpace::name() const { return "star with " + std::to_string(rays_) + " rays"; }

// ---------------------------------------------------------------------------

CircleSpace::CircleSpace() { pts_.push_back(Pt{0, std::nullopt, kNegInf}); }

PointId CircleSpace::intern(std::uint32_t side, const LogValue& angle) const {
  std::lock_guard lock(mutex_);
  auto [it, inserted] =
      index_.try_emplace({side, angle.log2()}, static_cast<PointId>(pts_.size()));
  if (inserted) pts_.push_back(Pt{side, angle, angle.log2_approx()});
  return it->second;
}

Magnitude CircleSpace::distance(PointId a, PointId b) const {
  Pt x, y;
  {
    std::lock_guard lock(mutex_);
    x = pts_.at(a);
    y = pts_.at(b);
  }
  if (!x.angle || !y.angle || x.side == y.side) return abs_difference(x.angle, y.angle);
  const LogValue around = linear_sum(*x.angle, *y.angle);
  const LogValue two_pi = LogValue::from_double(2 * std::numbers::pi);
  const LogValue pi = LogValue::from_double(std::numbers::pi);
  if (around <= pi) return around;
  return linear_difference(two_pi, around);
}

double CircleSpace::scaled_distance(PointId a, PointId b, double log2_r) const {
  Pt x, y;
  {
    std::lock_guard lock(mutex_);
    x = pts_.at(a);
    y = pts_.at(b);
  }
  if (!x.angle || !y.angle || x.side == y.side) return scaled_abs_difference(x.log2, y.log2, log2_r);
  const double around = std::exp2(x.log2) + std::exp2(y.log2);
  if (around <= std::numbers::pi) {
    return exp2_clamped(x.log2 - log2_r) + exp2_clamped(y.log2 - log2_r);
  }
  return (2 * std::numbers::pi - around) * exp2_clamped(-log2_r);
}

std::vector<ScaledPoint> CircleSpace::sample_at_scale(const LogValue& r, const Rational& lo,
                                                      const Rational& hi,
                                                      std::size_t budget) const {
  std::vector<ScaledPoint> out;
  const LogValue pi = LogValue::from_double(std::numbers::pi);
  const std::vector<Integer> steps = grid_steps(lo, hi, 1);
  for (std::uint32_t side = 0; side < 2; ++side) {
    for (auto it = steps.rbegin(); it != steps.rend() && out.size() < budget; ++it) {
      const LogValue x = LogValue::from_log2(r.log2() + Rational(*it));
      if (pi < x) continue;
      out.push_back({intern(side, x), side, x});
    }
  }
  return out;
}

std::vector<PointId> CircleSpace::enumerate(std::size_t budget) const {
  std::vector<PointId> out;
  const double golden = (3.0 - std::sqrt(5.0)) / 2.0;  // fraction of a turn
  for (std::size_t k = 1; out.size() < budget; ++k) {
    double turn = std::fmod(static_cast<double>(k) * golden, 1.0);
    const double theta = turn * 2 * std::numbers::pi;
    const bool upper = theta <= std::numbers::pi;
    const double angle = upper ? theta : 2 * std::numbers::pi - theta;
    if (angle <= 0) continue;
    out.push_back(intern(upper ? 0 : 1, LogValue::from_double(angle)));
  }
  return out;
}

std::string CircleSpace::name() const { return "circle"; }

// ---------------------------------------------------------------------------

DistortedSpace::DistortedSpace(std::shared_ptr<const MetricOracle> base, Rational factor)
    : base_(std::move(base)), factor_(LogValue::from_rational(factor)) {}

Magnitude DistortedSpace::distance(PointId a, PointId b) const {
  Magnitude d = base_->distance(a, b);
  const PointId p = base_->marked_point();
  if (!d || a == p || b == p) return d;
  return *d * factor_;
}

double DistortedSpace::scaled_distance(PointId a, PointId b, double log2_r) const {
  const PointId p = base_->marked_point();
  if (a == p || b == p) return base_->scaled_distance(a, b, log2_r);
  return base_->scaled_distance(a, b, log2_r - factor_.log2_approx());
}

std::string DistortedSpace::name() const { return "distorted " + base_->name(); }

// ---------------------------------------------------------------------------

void check_metric_triples(const MetricOracle& space, const std::vector<PointId>& points,
                          double log2_r, double relative_slack) {
  const std::size_t m = points.size();
  std::vector<double> d(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (space.scaled_distance(points[i], points[i], log2_r) != 0.0) {
      throw MetricAxiomError("d(x, x) != 0 at point " + std::to_string(points[i]));
    }
    for (std::size_t j = i + 1; j < m; ++j) {
      const double a = space.scaled_distance(points[i], points[j], log2_r);
      const double b = space.scaled_distance(points[j], points[i], log2_r);
      if (a != b) {
        throw MetricAxiomError("asymmetric distance between points " + std::to_string(points[i]) +
                               " and " + std::to_string(points[j]));
      }
      d[i * m + j] = d[j * m + i] = a;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        const double lhs = d[i * m + k];
        const double rhs = d[i * m + j] + d[j * m + k];
        if (std::isinf(rhs)) continue;
        if (lhs > rhs * (1 + relative_slack)) {
          throw MetricAxiomError("triangle inequality fails on points " +
                                 std::to_string(points[i]) + ", " + std::to_string(points[j]) +
                                 ", " + std::to_string(points[k]));
        }
      }
    }
  }
}

ScaleSet distance_set(const MetricOracle& space, std::size_t budget,
                      std::vector<std::string>* warnings) {
  if (budget == 0) throw PreconditionError("empty sample");
  const PointId p = space.marked_point();
  std::set<LogValue> seen;
  for (PointId x : space.enumerate(budget)) {
    if (Magnitude d = space.distance(x, p)) seen.insert(*d);
  }
  if (seen.size() < budget && warnings) {
    warnings->push_back("sampler exhausted after " + std::to_string(seen.size()) +
                        " distinct distances");
  }
  if (seen.empty()) throw PreconditionError("empty sample");
  return ScaleSet::make({seen.begin(), seen.end()}, true);
}

}  // namespace poros
