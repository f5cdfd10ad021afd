#pragma once

// Pointed metric spaces queried through opaque point handles.
//
// Oracles create points lazily (a sampled point gets a handle the first time
// it is seen), so every query is const and guarded by a mutex: concurrent
// read-only use is safe.

#include "poros/scale_set.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace poros {

using PointId = std::uint32_t;

struct ScaledPoint {
  PointId id = 0;
  std::uint32_t label = 0;  // component of X \ {p} the point lies on (ray, side)
  LogValue dist;            // d(x, p) > 0
};

class MetricOracle {
 public:
  virtual ~MetricOracle() = default;

  virtual PointId marked_point() const = 0;
  virtual Magnitude distance(PointId a, PointId b) const = 0;

  /// d(a, b) / 2^log2_r as a double; +inf past the double range.
  virtual double scaled_distance(PointId a, PointId b, double log2_r) const;

  /// Points with d(x, p) / r in [2^lo, 2^hi], at most `budget` of them,
  /// in a fixed order.
  virtual std::vector<ScaledPoint> sample_at_scale(const LogValue& r, const Rational& lo,
                                                   const Rational& hi,
                                                   std::size_t budget) const = 0;

  /// First `budget` points of a fixed enumeration of X \ {p}.
  virtual std::vector<PointId> enumerate(std::size_t budget) const = 0;

  virtual std::string name() const = 0;
};

/// 2^x as a double, saturating to 0 and +inf.
double exp2_clamped(double x);

/// A subset of [0, inf) with p = 0: either the closure of a ScaleSet's points
/// (plus 0) or the whole ray. Ray samples sit on the grid r * 2^(j * step).
class HalfLineSpace : public MetricOracle {
 public:
  explicit HalfLineSpace(ScaleSet set);
  static std::unique_ptr<HalfLineSpace> ray(Rational step = 1);

  PointId marked_point() const override { return 0; }
  Magnitude distance(PointId a, PointId b) const override;
  double scaled_distance(PointId a, PointId b, double log2_r) const override;
  std::vector<ScaledPoint> sample_at_scale(const LogValue& r, const Rational& lo,
                                           const Rational& hi, std::size_t budget) const override;
  std::vector<PointId> enumerate(std::size_t budget) const override;
  std::string name() const override;

  /// Handle of the point at position x (0 when x is nullopt). Points outside
  /// the set are rejected with PreconditionError.
  PointId point_at(const Magnitude& x) const;
  Magnitude position(PointId id) const;

 private:
  HalfLineSpace(std::optional<ScaleSet> set, Rational step);
  PointId intern(const LogValue& x) const;  // caller holds the lock
  PointId point_of_index(std::size_t k) const;

  std::optional<ScaleSet> set_;
  Rational step_;
  mutable std::mutex mutex_;
  mutable std::vector<Magnitude> pos_;
  mutable std::vector<double> log2_;  // -inf for 0
  mutable std::map<Rational, PointId> index_;
  mutable std::vector<PointId> by_index_;  // set index -> handle, 0 when not yet created
};

/// k copies of a ScaleSet glued at 0, with the tree metric: |x - y| on one
/// ray and |x| + |y| across rays. Its distance set is the ScaleSet itself.
class StarSpace : public MetricOracle {
 public:
  StarSpace(ScaleSet set, std::uint32_t rays);

  PointId marked_point() const override { return 0; }
  Magnitude distance(PointId a, PointId b) const override;
  double scaled_distance(PointId a, PointId b, double log2_r) const override;
  std::vector<ScaledPoint> sample_at_scale(const LogValue& r, const Rational& lo,
                                           const Rational& hi, std::size_t budget) const override;
  std::vector<PointId> enumerate(std::size_t budget) const override;
  std::string name() const override;

  PointId point_at(std::uint32_t ray, std::size_t index) const;

 private:
  ScaleSet set_;
  std::uint32_t rays_;
};

/// Unit circle with the geodesic metric, p at angle 0. Points are stored as
/// (side, angle in (0, pi]); enumeration follows the golden-angle sequence.
class CircleSpace : public MetricOracle {
 public:
  CircleSpace();

  PointId marked_point() const override { return 0; }
  Magnitude distance(PointId a, PointId b) const override;
  double scaled_distance(PointId a, PointId b, double log2_r) const override;
  std::vector<ScaledPoint> sample_at_scale(const LogValue& r, const Rational& lo,
                                           const Rational& hi, std::size_t budget) const override;
  std::vector<PointId> enumerate(std::size_t budget) const override;
  std::string name() const override;

 private:
  struct Pt {
    std::uint32_t side = 0;
    Magnitude angle;
    double log2 = 0;
  };
  PointId intern(std::uint32_t side, const LogValue& angle) const;

  mutable std::mutex mutex_;
  mutable std::vector<Pt> pts_;
  mutable std::map<std::pair<std::uint32_t, Rational>, PointId> index_;
};

/// X = {p}.
class SinglePointSpace : public MetricOracle {
 public:
  PointId marked_point() const override { return 0; }
  Magnitude distance(PointId, PointId) const override { return std::nullopt; }
  std::vector<ScaledPoint> sample_at_scale(const LogValue&, const Rational&, const Rational&,
                                           std::size_t) const override {
    return {};
  }
  std::vector<PointId> enumerate(std::size_t) const override { return {}; }
  std::string name() const override { return "single-point"; }
};

/// Wraps another oracle and multiplies every distance between two points
/// other than p by `factor`. Used to exercise the metric-axiom checks.
class DistortedSpace : public MetricOracle {
 public:
  DistortedSpace(std::shared_ptr<const MetricOracle> base, Rational factor);

  PointId marked_point() const override { return base_->marked_point(); }
  Magnitude distance(PointId a, PointId b) const override;
  double scaled_distance(PointId a, PointId b, double log2_r) const override;
  std::vector<ScaledPoint> sample_at_scale(const LogValue& r, const Rational& lo,
                                           const Rational& hi, std::size_t budget) const override {
    return base_->sample_at_scale(r, lo, hi, budget);
  }
  std::vector<PointId> enumerate(std::size_t budget) const override {
    return base_->enumerate(budget);
  }
  std::string name() const override;

 private:
  std::shared_ptr<const MetricOracle> base_;
  LogValue factor_;
};

/// Checks d(x,x) = 0, symmetry and the triangle inequality on every triple of
/// `points` at scale 2^log2_r, with relative slack. Throws MetricAxiomError
/// naming the triple.
void check_metric_triples(const MetricOracle& space, const std::vector<PointId>& points,
                          double log2_r, double relative_slack = 1e-9);

/// S_p(X) = {d(x, p)}: up to `budget` distinct distances from the enumeration,
/// returned with 0 included. budget 0 throws PreconditionError("empty sample");
/// running out of points appends a warning.
ScaleSet distance_set(const MetricOracle& space, std::size_t budget,
                      std::vector<std::string>* warnings = nullptr);

}  // namespace poros
