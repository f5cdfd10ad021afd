#pragma once

// Finite-depth subsets of [0, inf) that accumulate at 0, and their gaps.
//
// A ScaleSet is the restriction of a conceptual infinite set E to the window
// [min_point, window_top]. Below min_point the set is either known to be empty
// (0 not in E, so 0 is isolated) or unresolved (0 in E, more points exist
// below the truncation).

#include "poros/log_value.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace poros {

class ScaleSet {
 public:
  /// Deduplicates and sorts `values` strictly decreasing.
  /// Throws PreconditionError("empty set") when `values` is empty.
  static ScaleSet make(std::vector<LogValue> values, bool contains_zero);

  std::span<const LogValue> points() const { return points_; }
  const LogValue& point(std::size_t i) const { return points_[i]; }
  bool contains_zero() const { return contains_zero_; }
  std::size_t depth() const { return points_.size(); }
  const LogValue& window_top() const { return points_.front(); }
  const LogValue& min_point() const { return points_.back(); }

  /// Position in the decreasing order, if `value` is a point of the set.
  std::optional<std::size_t> index_of(const LogValue& value) const;
  bool contains(const LogValue& value) const { return index_of(value).has_value(); }

  /// Position of the smallest point >= t, or nullopt when none is in the window.
  /// Throws OutsideWindowError when t > window_top.
  std::optional<std::size_t> next_above_index(const LogValue& t) const;

  /// Position of the largest point strictly below t, or nullopt.
  std::optional<std::size_t> next_below_index(const LogValue& t) const;

  /// Position of the smallest point e with e >= k * t (exact), or nullopt.
  /// No window check: callers decide what "beyond the window" means.
  std::optional<std::size_t> first_at_least_scaled(const LogValue& t, const Rational& k) const;
  std::optional<std::size_t> first_at_least(const LogValue& threshold) const;

 private:
  ScaleSet(std::vector<LogValue> points, bool contains_zero)
      : points_(std::move(points)), contains_zero_(contains_zero) {}

  std::vector<LogValue> points_;  // strictly decreasing
  bool contains_zero_ = false;
};

/// Smallest point of E that is >= t; nullopt when none lies in the window.
std::optional<LogValue> next_above(const ScaleSet& set, const LogValue& t);

/// Open interval (a, b) containing no point of the owning set.
struct Gap {
  LogValue a;
  LogValue b;

  Rational ratio_log2() const { return b.log2() - a.log2(); }
  friend bool operator==(const Gap&, const Gap&) = default;
};

enum class BelowMinimum {
  empty_tail,  // 0 not in E: (0, min_point) is a genuine component
  unresolved,  // 0 in E: (0, min_point) holds points below the truncation
};

struct GapStructure {
  std::vector<Gap> gaps;  // between consecutive points, decreasing left endpoint
  BelowMinimum below;
  LogValue min_point;
};

/// All maximal empty open intervals between consecutive points.
/// Needs depth >= 2, or depth >= 1 with 0 not in E.
GapStructure gaps(const ScaleSet& set);

/// Positions [begin, end) of the last ceil(length * fraction) entries (at
/// least 2 when length allows), split at `mid` into an early and a late half.
struct TailWindow {
  std::size_t begin = 0;
  std::size_t mid = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool in_late_half(std::size_t i) const { return i >= mid; }
};

TailWindow tail_window(std::size_t length, const Rational& fraction);

}  // namespace poros
