#include "poros/porosity.hpp"

#include "poros/error.hpp"

#include <algorithm>

namespace poros {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::holds: return "holds";
    case Status::fails: return "fails";
    case Status::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(Trend trend) {
  switch (trend) {
    case Trend::stable: return "stable";
    case Trend::increasing: return "increasing";
    case Trend::decreasing: return "decreasing";
  }
  return "stable";
}

PosSeq enumerate_points(const ScaleSet& set) {
  PosSeq seq;
  seq.label = "enumeration";
  seq.terms.assign(set.points().begin(), set.points().end());
  for (std::size_t i = 0; i < seq.terms.size(); ++i) seq.source_indices.push_back(i);
  return seq;
}

PosSeq subsequence(const PosSeq& seq, const std::vector<std::size_t>& positions,
                   std::string label) {
  PosSeq out;
  out.label = std::move(label);
  for (std::size_t p : positions) {
    if (p >= seq.size()) throw PreconditionError("subsequence position out of range");
    out.terms.push_back(seq.terms[p]);
    out.source_indices.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Largest resolved empty interval below point index `j` (the gaps (e_{i+1}, e_i)
// with i >= j), given precomputed gap lengths where lengths[i] is the length of
// (e_{i+1}, e_i).
struct BelowMax {
  std::vector<Magnitude> suffix;  // suffix[j] = max of lengths[i], i >= j
};

BelowMax suffix_max(const ScaleSet& set, unsigned bits) {
  const std::size_t d = set.depth();
  BelowMax out;
  out.suffix.assign(d + 1, std::nullopt);
  for (std::size_t i = d; i-- > 0;) {
    Magnitude here;
    if (i + 1 < d) here = linear_difference(set.point(i), set.point(i + 1), bits);
    const Magnitude& rest = out.suffix[i + 1];
    out.suffix[i] = (!rest || (here && *here > *rest)) ? here : rest;
  }
  return out;
}

Magnitude max_mag(const Magnitude& a, const Magnitude& b) {
  if (!a) return b;
  if (!b) return a;
  return *a < *b ? b : a;
}

// Resolves the bottom region (0, min_point) against the best resolved length.
LambdaResult finish_lambda(const ScaleSet& set, Magnitude best) {
  if (!set.contains_zero()) return {true, max_mag(best, set.min_point())};
  // Points below the truncation may split (0, min_point); only a resolved
  // interval strictly longer than min_point dominates every such split.
  if (best && set.min_point() < *best) return {true, best};
  return {false, best};
}

Trend trend_of(double early, double late, double eps) {
  if (late > early + eps) return Trend::increasing;
  if (late < early - eps) return Trend::decreasing;
  return Trend::stable;
}

}  // namespace

LambdaResult lambda0h(const ScaleSet& set, const LogValue& h, unsigned bits) {
  // Points strictly below h form a suffix of the decreasing point list.
  auto below = set.next_below_index(h);
  if (!below) {
    if (!set.contains_zero()) return {true, h};
    return {false, std::nullopt};
  }
  const std::size_t j = *below;
  Magnitude best;
  if (set.point(j) != h) best = linear_difference(h, set.point(j), bits);
  for (std::size_t i = j; i + 1 < set.depth(); ++i) {
    best = max_mag(best, linear_difference(set.point(i), set.point(i + 1), bits));
  }
  return finish_lambda(set, best);
}

RightPorosity right_porosity(const ScaleSet& set, const PorosityParams& params,
                             const Rational& trend_eps) {
  RightPorosity out;
  if (!set.contains_zero()) {
    // (0, min_point) is empty: lambda(h)/h = 1 for every h <= min_point.
    out.estimate = out.early_sup = out.late_sup = 1.0;
    out.log2_estimate = 0;
    out.trend = Trend::stable;
    out.samples.push_back({set.min_point(), Rational(0), true});
    return out;
  }
  if (set.depth() < params.min_depth) {
    throw PreconditionError("right porosity needs depth >= " + std::to_string(params.min_depth));
  }
  const std::size_t d = set.depth();
  const BelowMax below = suffix_max(set, params.precision_bits);
  const TailWindow tw = tail_window(d, params.window_fraction);

  // h = e_j with a point below it; the gap (e_{j+1}, e_j) has its lower
  // endpoint at index j + 1, which decides the half.
  const std::size_t first = tw.begin > 0 ? tw.begin - 1 : 0;
  std::optional<Rational> early_best, late_best;
  for (std::size_t j = first; j + 1 < d; ++j) {
    const LambdaResult lam = finish_lambda(set, below.suffix[j]);
    if (!lam.conclusive) continue;  // only near the truncation bottom
    if (!lam.length) continue;
    const Rational r = lam.length->log2() - set.point(j).log2();
    const bool late = tw.in_late_half(j + 1);
    out.samples.push_back({set.point(j), r, late});
    auto& slot = late ? late_best : early_best;
    if (!slot || r > *slot) slot = r;
  }
  if (!early_best || !late_best) {
    out.conclusive = false;
    return out;
  }
  const Rational best = std::max(*early_best, *late_best);
  out.log2_estimate = best;
  out.estimate = exp2_approx(best);
  out.early_sup = exp2_approx(*early_best);
  out.late_sup = exp2_approx(*late_best);
  out.trend = trend_of(out.early_sup, out.late_sup, to_double(trend_eps));
  return out;
}

PorosityVerdict is_strongly_porous(const ScaleSet& set, const Rational& tol,
                                   const PorosityParams& params) {
  PorosityVerdict v;
  v.criterion = "strong";
  if (!set.contains_zero()) {
    v.status = Status::holds;
    v.witness = WitnessGaps{};
    v.witness->valid = true;
    v.notes.push_back("0 is isolated: every small interval (0, h) is empty");
    return v;
  }
  if (set.depth() < params.min_depth) {
    v.notes.push_back("depth below " + std::to_string(params.min_depth));
    return v;
  }
  const RightPorosity rp = right_porosity(set, params, tol);
  v.diagnostics["log2_sup"] = rp.log2_estimate;
  if (!rp.conclusive) {
    v.notes.push_back("unresolved region below the truncation dominates");
    return v;
  }
  const double t = to_double(tol);
  const double margin = to_double(params.strong_fail_margin);
  if (rp.estimate >= 1.0 - t && rp.trend != Trend::decreasing) {
    v.status = Status::holds;
    WitnessGaps w;
    for (std::size_t i = 0; i < rp.samples.size(); ++i) {
      if (exp2_approx(rp.samples[i].log2_ratio) < 1.0 - t) continue;
      const LogValue& h = rp.samples[i].h;
      auto below = set.next_below_index(h);
      if (!below) continue;
      w.indices.push_back(*below);
      w.gaps.push_back(Gap{set.point(*below), h});
    }
    w.valid = true;
    v.witness = std::move(w);
  } else if (rp.estimate < 1.0 - margin && rp.trend != Trend::increasing) {
    v.status = Status::fails;
    for (std::size_t i = 0; i < rp.samples.size(); ++i) {
      if (rp.samples[i].late) v.counterexample.push_back(*set.index_of(rp.samples[i].h));
    }
  }
  return v;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> almost_decreasing_tail(const PosSeq& seq) {
  const std::size_t n = seq.size();
  for (std::size_t i = n; i-- > 1;) {
    if (seq.terms[i - 1] < seq.terms[i]) {
      if (i == n - 1) return std::nullopt;
      return i + 1;
    }
  }
  return 1;
}

PorosityVerdict weak_equiv(const PosSeq& a, const PosSeq& g, const Rational& window_fraction) {
  if (a.size() != g.size()) throw PreconditionError("sequences differ in length");
  PorosityVerdict v;
  v.criterion = "weak_equiv";
  if (a.size() < 4) {
    v.notes.push_back("too short for a window");
    return v;
  }
  const TailWindow tw = tail_window(a.size(), window_fraction);
  std::optional<Rational> lo[2], hi[2];
  for (std::size_t n = tw.begin; n < tw.end; ++n) {
    const Rational r = g.terms[n].log2() - a.terms[n].log2();
    const int h = tw.in_late_half(n) ? 1 : 0;
    if (!lo[h] || r < *lo[h]) lo[h] = r;
    if (!hi[h] || r > *hi[h]) hi[h] = r;
  }
  if (!lo[0] || !lo[1]) {
    v.notes.push_back("window half is empty");
    return v;
  }
  const bool drift = *lo[1] < *lo[0] - 1 || *hi[1] > *hi[0] + 1;
  Rational lo_all = std::min(*lo[0], *lo[1]);
  Rational hi_all = std::max(*hi[0], *hi[1]);
  v.diagnostics["log2_ratio_min"] = lo_all;
  v.diagnostics["log2_ratio_max"] = hi_all;
  if (drift) {
    v.status = Status::fails;
    std::size_t worst = tw.mid;
    Rational worst_dev = -1;
    for (std::size_t n = tw.mid; n < tw.end; ++n) {
      const Rational r = g.terms[n].log2() - a.terms[n].log2();
      const Rational dev = std::max(*lo[0] - r, r - *hi[0]);
      if (dev > worst_dev) {
        worst_dev = dev;
        worst = n;
      }
    }
    v.counterexample.push_back(worst);
    return v;
  }
  const Rational eps = Rational(1, Integer(1) << 32);
  WitnessGaps w;
  w.c1 = dyadic_below(LogValue::from_log2(lo_all)) * (1 - eps);
  w.c2 = dyadic_above(LogValue::from_log2(hi_all)) * (1 + eps);
  w.valid = true;
  v.witness = std::move(w);
  v.status = Status::holds;
  return v;
}

// ---------------------------------------------------------------------------

namespace {

// Smallest point strictly above the threshold; points_ is decreasing, so the
// points > threshold are a prefix and the answer is its last element.
template <typename Above>
std::optional<std::size_t> last_of_prefix(const ScaleSet& set, Above above) {
  auto pts = set.points();
  auto it = std::partition_point(pts.begin(), pts.end(), above);
  if (it == pts.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - pts.begin()) - 1;
}

void require_member(const ScaleSet& set, const LogValue& t) {
  if (!set.contains(t)) throw PreconditionError("t must be a point of the set");
}

}  // namespace

std::optional<LogValue> K_star(const ScaleSet& set, const LogValue& t, const LogValue& k) {
  require_member(set, t);
  if (k.log2() <= 0) throw PreconditionError("k must exceed 1");
  const LogValue threshold = k * t;
  auto idx = last_of_prefix(set, [&](const LogValue& p) { return threshold < p; });
  if (!idx) return std::nullopt;
  return set.point(*idx) / t;
}

std::optional<LogValue> K_star(const ScaleSet& set, const LogValue& t, const Rational& k) {
  require_member(set, t);
  if (k <= 1) throw PreconditionError("k must exceed 1");
  auto idx = last_of_prefix(set, [&](const LogValue& p) { return compare_ratio(p, t, k) > 0; });
  if (!idx) return std::nullopt;
  return set.point(*idx) / t;
}

bool kK_empty(const ScaleSet& set, const PosSeq& tau, const Rational& k, const Rational& K,
              std::size_t N1) {
  if (!(k > 1 && k < K)) throw PreconditionError("need 1 < k < K");
  if (N1 == 0) throw PreconditionError("N1 is 1-based");
  for (std::size_t n = N1 - 1; n < tau.size(); ++n) {
    const LogValue& t = tau.terms[n];
    if (compare_ratio(set.window_top(), t, k) < 0) {
      throw OutsideWindowError("outside truncation window");
    }
    auto idx = last_of_prefix(set, [&](const LogValue& p) { return compare_ratio(p, t, k) > 0; });
    if (!idx) continue;  // nothing above k tau_n inside the window
    if (compare_ratio(set.point(*idx), t, K) < 0) return false;
  }
  return true;
}

}  // namespace poros
