#pragma once

// Porosity at 0 for finite-depth subsets of [0, inf).
//
// Every asymptotic quantifier ("for every K", "limsup", "for every sequence")
// is decided on a tail window of the data and reported three-valued:
// holds, fails or inconclusive. Scores are log2 ratios; a score series is
// divergent when its late-half minimum exceeds both its early-half minimum
// and the divergence threshold, and recurrent (bounded infinitely often) when
// the late-half minimum does not rise above the early-half minimum.

#include "poros/scale_set.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace poros {

enum class Status { holds, fails, inconclusive };
std::string_view to_string(Status status);

enum class Trend { stable, increasing, decreasing };
std::string_view to_string(Trend trend);

struct PorosityParams {
  Rational window_fraction{1, 2};
  Rational log2_divergence{16};  // R_min = 2^16
  Rational log2_bad_bound{8};    // B = 2^8, bounded-score ceiling of a bad set
  Rational log2_band{20};        // largest k considered by the w-porosity witness
  std::size_t m_fail = 10;       // minimum size of a bad set
  std::size_t m_sub = 8;         // minimum tail hits of a porous subsequence
  Rational strong_tol{1, 65536};
  Rational strong_fail_margin{1, 256};
  std::size_t min_depth = 8;
  unsigned precision_bits = kDefaultPrecisionBits;
};

/// Truncated sequence of strictly positive reals, indexed from 1 in reports.
struct PosSeq {
  std::vector<LogValue> terms;
  std::vector<std::size_t> source_indices;  // positions in a parent sequence, if any
  std::string label;

  std::size_t size() const { return terms.size(); }
};

/// Decreasing enumeration of all points of the set.
PosSeq enumerate_points(const ScaleSet& set);

/// Terms at the given positions, recording them as source indices.
PosSeq subsequence(const PosSeq& seq, const std::vector<std::size_t>& positions,
                   std::string label = {});

struct WitnessGaps {
  std::vector<std::size_t> indices;  // positions in the input sequence
  std::vector<Gap> gaps;             // aligned with `indices`
  Rational c1;                       // c1 * a_n < tau_n < c2 * a_n on the window
  Rational c2;
  std::optional<LogValue> k;  // constant k, when produced by the k-grid route
  bool valid = false;         // the gap sequence passed every membership check
};

/// One scored term: CSV columns n, log2_tau_n, best_k, log2_K_star.
struct ScoreRow {
  std::size_t n = 0;  // 1-based position
  Rational log2_tau;
  std::optional<Rational> log2_best_k;
  std::optional<Rational> log2_k_star;  // nullopt: beyond the window
};

struct PorosityVerdict {
  std::string criterion;
  Status status = Status::inconclusive;
  std::optional<WitnessGaps> witness;
  std::vector<std::size_t> counterexample;  // positions (sequence or set), 0-based
  std::map<std::string, Rational> diagnostics;
  std::vector<std::string> notes;
  std::vector<ScoreRow> scores;
  std::vector<std::size_t> subsequence;  // porous_subsequence_search result positions
};

// ---------------------------------------------------------------------------
// Right porosity

struct LambdaResult {
  bool conclusive = true;
  Magnitude length;  // nullopt: no empty subinterval of positive length
};

/// Length of the largest open subinterval of (0, h) missing the set.
/// Region above window_top counts as empty; (0, min_point) counts as empty
/// only when 0 is not in the set, otherwise it is unresolved and the result
/// is inconclusive unless a resolved interval is at least min_point long.
LambdaResult lambda0h(const ScaleSet& set, const LogValue& h,
                      unsigned bits = kDefaultPrecisionBits);

struct PorositySample {
  LogValue h;
  Rational log2_ratio;  // log2(lambda(h) / h)
  bool late = false;
};

struct RightPorosity {
  bool conclusive = true;
  double estimate = 0;  // window supremum of lambda(h)/h
  Rational log2_estimate;
  double early_sup = 0;
  double late_sup = 0;
  Trend trend = Trend::stable;
  std::vector<PorositySample> samples;
};

/// Window supremum of lambda(h)/h over h in the tail window and the gap
/// right endpoints above it. Needs depth >= params.min_depth unless 0 is
/// isolated (then the ratio is 1 near 0).
RightPorosity right_porosity(const ScaleSet& set, const PorosityParams& params = {},
                             const Rational& trend_eps = Rational(1, 1000000000));

/// holds: supremum >= 1 - tol and not decreasing; fails: supremum below
/// 1 - strong_fail_margin and not increasing.
PorosityVerdict is_strongly_porous(const ScaleSet& set, const Rational& tol,
                                   const PorosityParams& params = {});

// ---------------------------------------------------------------------------
// Sequences, weak equivalence and the K* score

/// Smallest 1-based N with the sequence non-increasing from N on; nullopt
/// when the last two terms already increase.
std::optional<std::size_t> almost_decreasing_tail(const PosSeq& seq);

/// Weak equivalence a ~ g on the tail window. fails when the ratio envelope
/// drifts by more than a factor 2 between window halves.
PorosityVerdict weak_equiv(const PosSeq& a, const PosSeq& g,
                           const Rational& window_fraction = Rational(1, 2));

/// (kt, Kt) ∩ E = ∅ exactly when K <= K_star(E, t, k). Returns the ratio
/// (smallest point of E strictly above k*t) / t, or nullopt when no point of
/// the window lies above k*t. t must be a point of E, k > 1.
std::optional<LogValue> K_star(const ScaleSet& set, const LogValue& t, const LogValue& k);
std::optional<LogValue> K_star(const ScaleSet& set, const LogValue& t, const Rational& k);

/// True iff (k tau_n, K tau_n) misses E for every 1-based n >= N1.
/// Throws PreconditionError unless 1 < k < K, OutsideWindowError when some
/// k tau_n exceeds window_top.
bool kK_empty(const ScaleSet& set, const PosSeq& tau, const Rational& k, const Rational& K,
              std::size_t N1);

// ---------------------------------------------------------------------------
// Sequence porosity

/// k-grid decision (constant k with K_star(E, tau_n, k)/k divergent), plus the
/// gap witness it induces.
PorosityVerdict tau_strong_porosity(const ScaleSet& set, const PosSeq& tau,
                                    const PorosityParams& params = {});

/// Independent gap-sequence decision: some bound c with gaps (a_n, b_n),
/// tau_n <= a_n <= c tau_n and b_n / a_n divergent.
PorosityVerdict tau_strong_porosity_gaps(const ScaleSet& set, const PosSeq& tau,
                                         const PorosityParams& params = {});

PorosityVerdict porous_subsequence_search(const ScaleSet& set, const PosSeq& tau,
                                          const PorosityParams& params = {});

/// Per-point score field: bad-set refutation or all-points-divergent confirmation.
PorosityVerdict w_porosity(const ScaleSet& set, const PorosityParams& params = {});

/// Decreasing enumeration plus every arithmetic-progression subsequence with
/// step 2..4 and every offset.
std::vector<PosSeq> default_pool(const ScaleSet& set);

PorosityVerdict completely_strong_porosity(const ScaleSet& set, const std::vector<PosSeq>& pool,
                                           const PorosityParams& params = {});

}  // namespace poros
