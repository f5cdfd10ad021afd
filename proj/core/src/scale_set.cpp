#include "poros/scale_set.hpp"

#include "poros/error.hpp"

#include <algorithm>

namespace poros {

ScaleSet ScaleSet::make(std::vector<LogValue> values, bool contains_zero) {
  if (values.empty()) throw PreconditionError("empty set");
  std::sort(values.begin(), values.end(), std::greater<>());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return ScaleSet(std::move(values), contains_zero);
}

std::optional<std::size_t> ScaleSet::index_of(const LogValue& value) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), value, std::greater<>());
  if (it == points_.end() || *it != value) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

std::optional<std::size_t> ScaleSet::first_at_least(const LogValue& threshold) const {
  // points_ is decreasing: the points >= threshold form a prefix.
  auto it = std::partition_point(points_.begin(), points_.end(),
                                 [&](const LogValue& p) { return !(p < threshold); });
  if (it == points_.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin()) - 1;
}

std::optional<std::size_t> ScaleSet::next_above_index(const LogValue& t) const {
  if (window_top() < t) throw OutsideWindowError("outside truncation window");
  return first_at_least(t);
}

std::optional<std::size_t> ScaleSet::next_below_index(const LogValue& t) const {
  auto it = std::partition_point(points_.begin(), points_.end(),
                                 [&](const LogValue& p) { return !(p < t); });
  if (it == points_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

std::optional<std::size_t> ScaleSet::first_at_least_scaled(const LogValue& t,
                                                           const Rational& k) const {
  auto it = std::partition_point(points_.begin(), points_.end(), [&](const LogValue& p) {
    return compare_ratio(p, t, k) >= 0;
  });
  if (it == points_.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin()) - 1;
}

std::optional<LogValue> next_above(const ScaleSet& set, const LogValue& t) {
  auto idx = set.next_above_index(t);
  if (!idx) return std::nullopt;
  return set.point(*idx);
}

GapStructure gaps(const ScaleSet& set) {
  if (set.depth() < 2 && set.contains_zero()) {
    throw PreconditionError("gaps needs depth >= 2 when 0 is in the set");
  }
  GapStructure out{{}, set.contains_zero() ? BelowMinimum::unresolved : BelowMinimum::empty_tail,
                   set.min_point()};
  out.gaps.reserve(set.depth());
  for (std::size_t i = 1; i < set.depth(); ++i) {
    out.gaps.push_back(Gap{set.point(i), set.point(i - 1)});
  }
  return out;
}

TailWindow tail_window(std::size_t length, const Rational& fraction) {
  if (fraction <= 0 || fraction > 1) throw PreconditionError("window fraction must be in (0, 1]");
  const Rational scaled = Rational(static_cast<long long>(length)) * fraction;
  Integer w = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
  if (Rational(w) != scaled) w += 1;
  auto size = static_cast<std::size_t>(w);
  size = std::min(length, std::max<std::size_t>(size, 2));
  TailWindow tw;
  tw.end = length;
  tw.begin = length - size;
  tw.mid = tw.begin + size / 2;
  return tw;
}

}  // namespace poros
