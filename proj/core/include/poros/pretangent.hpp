#pragma once

// Finite-depth pretangent spaces: quotients d(x_n, y_n) / r_n over a tail
// window, self-stable families built greedily from candidate pools, their
// metric identification, and the diagonal extraction that makes a bounded
// family stable along a subsequence of indices.

#include "poros/metric.hpp"
#include "poros/porosity.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace poros {

/// A truncated sequence of points, positions 0..N-1.
struct PointSeq {
  std::vector<PointId> points;
  std::string label;

  std::size_t size() const { return points.size(); }
};

/// Constant sequence at the marked point.
PointSeq marked_seq(const MetricOracle& space, std::size_t length);

/// Strictly positive terms whose tail window decreases toward 0.
class NormalizingSeq {
 public:
  /// Throws PreconditionError unless every term is positive and the last
  /// term lies below the first term of the tail window.
  explicit NormalizingSeq(PosSeq r);

  const PosSeq& seq() const { return r_; }
  std::size_t size() const { return r_.size(); }
  const LogValue& operator[](std::size_t n) const { return r_.terms[n]; }
  double log2_approx(std::size_t n) const { return log2_[n]; }
  NormalizingSeq restrict(const std::vector<std::size_t>& idx) const;

 private:
  PosSeq r_;
  std::vector<double> log2_;
};

struct StabilityParams {
  double tol = 1.0 / (1 << 20);
  Rational window_fraction{1, 2};
};

enum class Stability { converged, diverged, oscillating };
std::string_view to_string(Stability s);

struct StabilityResult {
  Stability status = Stability::oscillating;
  std::optional<double> limit;  // window mean, when converged
  double window_spread = 0;
};

/// Quotients d(x_n, y_n) / r_n, +inf past the double range.
std::vector<double> quotients(const MetricOracle& space, const PointSeq& x, const PointSeq& y,
                              const NormalizingSeq& r);

/// Classifies a quotient series over its tail window: converged when the
/// spread is at most tol; diverged when a value is infinite or the means of
/// the window quarters rise by more than tol each; oscillating otherwise.
StabilityResult classify_quotients(const std::vector<double>& q, const StabilityParams& params);

StabilityResult mutual_stability(const MetricOracle& space, const PointSeq& x, const PointSeq& y,
                                 const NormalizingSeq& r, const StabilityParams& params = {});

struct SelfStableFamily {
  std::vector<PointSeq> members;  // members[0] is the marked sequence
  std::vector<std::vector<double>> dtilde;
  NormalizingSeq r;
};

/// Seeds the family with `seed` (which must contain the marked sequence first
/// and be pairwise stable) and admits each pool member, in order, that is
/// stable against every current member.
SelfStableFamily saturate_family(const MetricOracle& space, const std::vector<PointSeq>& seed,
                                 const std::vector<PointSeq>& pool, const NormalizingSeq& r,
                                 const StabilityParams& params = {});

struct PretangentSpace {
  std::vector<std::vector<std::size_t>> classes;  // member indices, each sorted
  std::vector<std::vector<double>> rho;
  std::size_t marked_class = 0;
  double diameter = 0;

  std::size_t class_count() const { return classes.size(); }
};

/// Classes are the components of {d~ <= tol}; rho uses the smallest member of
/// each class. Throws ConstructionError("tolerance too coarse for quotient")
/// when some cross pair is more than 2 tol from rho.
PretangentSpace metric_identification(const SelfStableFamily& family, double tol);

struct RefineParams {
  std::size_t max_steps = 64;  // bisection budget per pair
  std::size_t min_size = 8;    // smallest acceptable index set
};

struct RefineResult {
  std::vector<std::size_t> indices;  // positions kept, increasing
  SelfStableFamily family;           // restricted family over r restricted to `indices`
};

/// Makes {p} ∪ B stable along a subsequence: for each member in order and
/// each earlier member, keeps the more populated half of the quotient range
/// (ties keep the half holding the latest index) until its width is at most
/// tol; the nested sets are merged by a diagonal pass. Members must stay
/// bounded against p; otherwise ConstructionError("unrefinable pair (p~, b<j>)").
RefineResult diagonal_refine(const MetricOracle& space, const std::vector<PointSeq>& B,
                             const PointSeq& p_seq, const NormalizingSeq& r,
                             const StabilityParams& params = {}, const RefineParams& refine = {});

struct InvarianceReport {
  bool pass = true;
  double max_deviation = 0;
  std::vector<std::vector<double>> restricted;  // pairwise limits on the restriction
};

/// Recomputes every pairwise limit on the positions `idx` inside the tail
/// window. idx must cover at least half of the window.
InvarianceReport subsequence_invariance_check(const MetricOracle& space,
                                              const SelfStableFamily& family,
                                              const std::vector<std::size_t>& idx,
                                              const StabilityParams& params = {});

struct PoolParams {
  // Candidates have d(x, p) / r_n in [2^low, 2^high]. The low edge sits a
  // factor 16 above the default tolerance so distinct levels never chain
  // into one class through it.
  Rational log2_low{-16};
  Rational log2_high{20};
  std::size_t per_scale = 256;  // sampler budget per index
  std::size_t max_levels = 64;  // at most this many level sequences
};

/// One sequence per level (label, log2 ratio) seen on the tail window; at each
/// index it takes the point of that label nearest the level, or p when none.
std::vector<PointSeq> scale_matched_pool(const MetricOracle& space, const NormalizingSeq& r,
                                         const PoolParams& params = {});

/// Self-stable family from {p} and the scale-matched pool.
SelfStableFamily build_family(const MetricOracle& space, const NormalizingSeq& r,
                              const StabilityParams& params = {}, const PoolParams& pool = {});

struct TangencyProbe {
  bool violation = false;
  std::vector<std::size_t> subset;  // positions where the violation was found
  std::optional<PointSeq> witness;  // admitted candidate with no matching class
  std::size_t trials_run = 0;
};

/// One-sided probe: restricts the family to structured and random index
/// subsets, admits scale-matched candidates on each, and reports a candidate
/// whose class is more than tol from every existing class. No violation is
/// evidence, not proof, of tangency.
TangencyProbe tangency_probe(const MetricOracle& space, const SelfStableFamily& family,
                             std::size_t trials, std::uint64_t seed,
                             const StabilityParams& params = {}, const PoolParams& pool = {});

}  // namespace poros
