#include "poros/error.hpp"
#include "poros/porosity.hpp"

#include <algorithm>
#include <set>

namespace poros {

namespace {

// Tail of tau from its almost-decreasing start, with repeated terms merged.
// `pos` maps each kept term back to its position in tau.
struct Prepared {
  std::vector<LogValue> terms;
  std::vector<std::size_t> pos;
  TailWindow window;
};

std::optional<Prepared> prepare(const ScaleSet& set, const PosSeq& tau,
                                const PorosityParams& params, PorosityVerdict& v) {
  for (const LogValue& t : tau.terms) {
    if (!set.contains(t)) throw PreconditionError("tau term is not a point of the set");
  }
  auto start = almost_decreasing_tail(tau);
  if (!start) {
    v.notes.push_back("sequence is not almost decreasing inside the window");
    return std::nullopt;
  }
  Prepared p;
  for (std::size_t n = *start - 1; n < tau.size(); ++n) {
    if (!p.terms.empty() && p.terms.back() == tau.terms[n]) continue;
    p.terms.push_back(tau.terms[n]);
    p.pos.push_back(n);
  }
  if (p.terms.size() < 4) {
    v.notes.push_back("fewer than 4 distinct tail terms");
    return std::nullopt;
  }
  p.window = tail_window(p.terms.size(), params.window_fraction);
  return p;
}

enum class SeriesClass { divergent, recurrent, undecided };

struct Series {
  SeriesClass cls = SeriesClass::undecided;
  std::vector<std::optional<Rational>> x;  // one per window term; nullopt: beyond window
  std::optional<Rational> early_min, late_min;
  std::vector<std::size_t> hits;  // window-relative offsets with x <= early_min
};

// A late-half floor at or below `bounded` also counts as recurrent: the score
// stays bounded infinitely often.
void classify(Series& s, const TailWindow& tw, const Rational& threshold,
              const Rational& bounded) {
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (!s.x[i]) continue;
    auto& slot = tw.in_late_half(tw.begin + i) ? s.late_min : s.early_min;
    if (!slot || *s.x[i] < *slot) slot = *s.x[i];
  }
  if (!s.early_min || !s.late_min) return;
  if (*s.late_min > *s.early_min && *s.late_min >= threshold) {
    s.cls = SeriesClass::divergent;
  } else if (*s.late_min <= *s.early_min || *s.late_min <= bounded) {
    s.cls = SeriesClass::recurrent;
    const Rational cut = std::max(*s.early_min, std::min(*s.late_min, bounded));
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] && *s.x[i] <= cut) s.hits.push_back(i);
    }
  }
}

// log2 of e/t for every point e >= t with e/t <= 2^cap, ascending.
std::vector<Rational> ratios_above(const ScaleSet& set, const LogValue& t, const Rational& cap) {
  std::vector<Rational> out;
  std::size_t i = *set.index_of(t);
  for (std::size_t j = i + 1; j-- > 0;) {
    const Rational r = set.point(j).log2() - t.log2();
    if (r > cap) break;
    out.push_back(r);
  }
  return out;
}

// Grid of log2 k values: shifted point ratios plus integer powers 1..cap+1.
std::vector<Rational> k_grid(const ScaleSet& set, const std::vector<LogValue>& ts,
                             const Rational& cap) {
  std::set<Rational> grid;
  for (const LogValue& t : ts) {
    for (const Rational& r : ratios_above(set, t, cap)) grid.insert(r + 1);
  }
  for (Integer j = 1; j <= cap + 1; ++j) grid.insert(Rational(j));
  return {grid.begin(), grid.end()};
}

std::optional<std::size_t> first_strictly_above(const ScaleSet& set, const LogValue& threshold) {
  auto pts = set.points();
  auto it = std::partition_point(pts.begin(), pts.end(),
                                 [&](const LogValue& p) { return threshold < p; });
  if (it == pts.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - pts.begin()) - 1;
}

std::vector<LogValue> window_terms(const Prepared& p) {
  return {p.terms.begin() + static_cast<std::ptrdiff_t>(p.window.begin), p.terms.end()};
}

// Checks a candidate gap sequence: a_n in [tau_n, c tau_n], late-half ratios at
// least the divergence threshold, and a ~ tau. Fills c1, c2 on success.
bool validate_witness(const Prepared& p, WitnessGaps& w, const Rational& log2_c,
                      const PorosityParams& params, std::vector<std::string>& notes) {
  PosSeq a, t;
  for (std::size_t i = 0; i < w.gaps.size(); ++i) {
    const std::size_t n = p.window.begin + i;
    const Gap& g = w.gaps[i];
    const Rational lead = g.a.log2() - p.terms[n].log2();
    if (lead < 0 || lead > log2_c) {
      notes.push_back("witness gap not anchored in [tau_n, c tau_n]");
      return false;
    }
    if (p.window.in_late_half(n) && g.ratio_log2() < params.log2_divergence) {
      notes.push_back("witness gap ratio below the divergence threshold");
      return false;
    }
    a.terms.push_back(g.a);
    t.terms.push_back(p.terms[n]);
  }
  const PorosityVerdict eq = weak_equiv(t, a, Rational(1));
  if (eq.status != Status::holds) {
    notes.push_back("witness endpoints not weakly equivalent to tau");
    return false;
  }
  w.c1 = eq.witness->c1;
  w.c2 = eq.witness->c2;
  w.valid = true;
  return true;
}

void fill_scores(PorosityVerdict& v, const Prepared& p, const Series& s,
                 const std::optional<Rational>& log2_k) {
  v.scores.clear();
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const std::size_t n = p.window.begin + i;
    ScoreRow row;
    row.n = p.pos[n] + 1;
    row.log2_tau = p.terms[n].log2();
    row.log2_best_k = log2_k;
    if (s.x[i]) row.log2_k_star = *s.x[i] + (log2_k ? *log2_k : Rational(0));
    v.scores.push_back(std::move(row));
  }
}

void record_counterexample(PorosityVerdict& v, const Prepared& p, const Series& s) {
  for (std::size_t i : s.hits) v.counterexample.push_back(p.pos[p.window.begin + i]);
  v.diagnostics["early_min_log2_score"] = *s.early_min;
  v.diagnostics["late_min_log2_score"] = *s.late_min;
}

}  // namespace

PorosityVerdict tau_strong_porosity(const ScaleSet& set, const PosSeq& tau,
                                    const PorosityParams& params) {
  PorosityVerdict v;
  v.criterion = "tau_strong";
  auto prep = prepare(set, tau, params, v);
  if (!prep) return v;
  const Prepared& p = *prep;
  const std::vector<LogValue> ts = window_terms(p);

  bool all_recurrent = true;
  std::optional<Series> first_recurrent;
  Rational first_recurrent_k;
  for (const Rational& lk : k_grid(set, ts, params.log2_divergence)) {
    const LogValue k = LogValue::from_log2(lk);
    Series s;
    for (const LogValue& t : ts) {
      auto ks = K_star(set, t, k);
      s.x.push_back(ks ? std::optional<Rational>(ks->log2() - lk) : std::nullopt);
    }
    classify(s, p.window, params.log2_divergence, params.log2_bad_bound);
    if (s.cls == SeriesClass::divergent) {
      WitnessGaps w;
      w.k = k;
      bool complete = true;
      for (const LogValue& t : ts) {
        auto b = first_strictly_above(set, k * t);
        if (!b || *b + 1 >= set.depth()) {
          complete = false;
          break;
        }
        w.indices.push_back(*b + 1);
        w.gaps.push_back(Gap{set.point(*b + 1), set.point(*b)});
      }
      if (complete && validate_witness(p, w, lk, params, v.notes)) {
        v.status = Status::holds;
        v.diagnostics["log2_k"] = lk;
        v.diagnostics["late_min_log2_score"] = *s.late_min;
        fill_scores(v, p, s, lk);
        v.witness = std::move(w);
        return v;
      }
      all_recurrent = false;
    } else if (s.cls == SeriesClass::recurrent) {
      if (!first_recurrent) {
        first_recurrent = std::move(s);
        first_recurrent_k = lk;
      }
    } else {
      all_recurrent = false;
    }
  }
  if (all_recurrent && first_recurrent) {
    v.status = Status::fails;
    record_counterexample(v, p, *first_recurrent);
    v.diagnostics["log2_k"] = first_recurrent_k;
    fill_scores(v, p, *first_recurrent, first_recurrent_k);
  } else {
    v.notes.push_back("no k with a divergent score and not every k recurrent");
  }
  return v;
}

PorosityVerdict tau_strong_porosity_gaps(const ScaleSet& set, const PosSeq& tau,
                                         const PorosityParams& params) {
  PorosityVerdict v;
  v.criterion = "tau_strong_gaps";
  auto prep = prepare(set, tau, params, v);
  if (!prep) return v;
  const Prepared& p = *prep;
  const std::vector<LogValue> ts = window_terms(p);

  std::set<Rational> grid;
  for (const LogValue& t : ts) {
    for (const Rational& r : ratios_above(set, t, params.log2_divergence)) grid.insert(r);
  }
  for (Integer j = 0; j <= params.log2_divergence; ++j) grid.insert(Rational(j));

  bool all_recurrent = true;
  std::optional<Series> first_recurrent;
  for (const Rational& lc : grid) {
    Series s;
    std::vector<std::optional<std::size_t>> anchor;
    for (const LogValue& t : ts) {
      // Largest known gap whose lower endpoint lies in [t, c t].
      std::optional<std::size_t> best;
      std::optional<Rational> best_r;
      for (std::size_t i = *set.index_of(t); i >= 1; --i) {
        if (set.point(i).log2() - t.log2() > lc) break;
        const Rational r = set.point(i - 1).log2() - set.point(i).log2();
        if (!best_r || r > *best_r) {
          best_r = r;
          best = i;
        }
      }
      s.x.push_back(best_r);
      anchor.push_back(best);
    }
    classify(s, p.window, params.log2_divergence, params.log2_bad_bound);
    if (s.cls == SeriesClass::divergent) {
      WitnessGaps w;
      bool complete = true;
      for (const auto& i : anchor) {
        if (!i) {
          complete = false;
          break;
        }
        w.indices.push_back(*i);
        w.gaps.push_back(Gap{set.point(*i), set.point(*i - 1)});
      }
      if (complete && validate_witness(p, w, lc, params, v.notes)) {
        v.status = Status::holds;
        v.diagnostics["log2_c"] = lc;
        v.diagnostics["late_min_log2_score"] = *s.late_min;
        fill_scores(v, p, s, std::nullopt);
        v.witness = std::move(w);
        return v;
      }
      all_recurrent = false;
    } else if (s.cls == SeriesClass::recurrent) {
      if (!first_recurrent) first_recurrent = std::move(s);
    } else {
      all_recurrent = false;
    }
  }
  if (all_recurrent && first_recurrent) {
    v.status = Status::fails;
    record_counterexample(v, p, *first_recurrent);
    fill_scores(v, p, *first_recurrent, std::nullopt);
  } else {
    v.notes.push_back("no c with divergent gaps and not every c recurrent");
  }
  return v;
}

PorosityVerdict porous_subsequence_search(const ScaleSet& set, const PosSeq& tau,
                                          const PorosityParams& params) {
  PorosityVerdict v;
  v.criterion = "porous_subsequence";
  const PorosityVerdict direct = tau_strong_porosity(set, tau, params);
  if (direct.status == Status::holds) {
    v = direct;
    v.criterion = "porous_subsequence";
    v.subsequence.clear();
    for (std::size_t i = 0; i < tau.size(); ++i) v.subsequence.push_back(i);
    return v;
  }
  auto prep = prepare(set, tau, params, v);
  if (!prep) return v;
  const Prepared& p = *prep;

  bool any_candidate = false;
  for (const Rational& lk : k_grid(set, window_terms(p), params.log2_divergence)) {
    const LogValue k = LogValue::from_log2(lk);
    // Positions in tau whose score reaches the threshold.
    std::vector<std::size_t> hits;
    std::size_t tail_hits = 0;
    for (std::size_t n = 0; n < p.terms.size(); ++n) {
      auto ks = K_star(set, p.terms[n], k);
      if (!ks || ks->log2() - lk < params.log2_divergence) continue;
      hits.push_back(p.pos[n]);
      if (n >= p.window.begin) ++tail_hits;
    }
    if (tail_hits < params.m_sub) continue;
    any_candidate = true;
    while (hits.size() >= params.m_sub) {
      const PosSeq sub = subsequence(tau, hits, "hits");
      const PorosityVerdict r = tau_strong_porosity(set, sub, params);
      if (r.status == Status::holds) {
        v.status = Status::holds;
        v.witness = r.witness;
        v.scores = r.scores;
        v.subsequence = hits;
        v.diagnostics = r.diagnostics;
        return v;
      }
      if (r.status != Status::fails || r.counterexample.empty()) break;
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < hits.size(); ++i) {
        if (!std::binary_search(r.counterexample.begin(), r.counterexample.end(), i)) {
          keep.push_back(hits[i]);
        }
      }
      if (keep.size() == hits.size()) break;
      hits = std::move(keep);
    }
  }
  if (!any_candidate) {
    v.status = Status::fails;
    v.notes.push_back("no k leaves enough high-score terms in the tail");
  } else {
    v.notes.push_back("high-score terms exist but no pruning reached a porous subsequence");
  }
  return v;
}

namespace {

struct PointScore {
  std::optional<Rational> x;  // best log2(K*/k) over the band
  std::optional<Rational> log2_k;
  std::optional<Rational> log2_k_star;
};

PointScore score_band(const ScaleSet& set, const LogValue& t, const Rational& band) {
  std::set<Rational> grid;
  for (const Rational& r : ratios_above(set, t, band - 1)) grid.insert(r + 1);
  for (Integer j = 1; j <= band; ++j) grid.insert(Rational(j));
  PointScore best;
  for (const Rational& lk : grid) {
    if (t.log2() + lk > set.window_top().log2()) break;
    auto ks = K_star(set, t, LogValue::from_log2(lk));
    if (!ks) continue;
    const Rational x = ks->log2() - lk;
    if (!best.x || x > *best.x) best = {x, lk, ks->log2()};
  }
  return best;
}

struct ScoreField {
  TailWindow window;
  std::vector<PointScore> scores;  // one per window point
  std::vector<std::size_t> bad;    // set indices with score <= log2 B
  bool bad_spans_halves = false;
  bool all_divergent = true;
};

ScoreField score_field(const ScaleSet& set, const Rational& band, const PorosityParams& params) {
  ScoreField f;
  f.window = tail_window(set.depth(), params.window_fraction);
  bool early = false, late = false;
  for (std::size_t i = f.window.begin; i < f.window.end; ++i) {
    PointScore s = score_band(set, set.point(i), band);
    if (s.x && *s.x <= params.log2_bad_bound) {
      f.bad.push_back(i);
      (f.window.in_late_half(i) ? late : early) = true;
    }
    if (!s.x || *s.x < params.log2_divergence) f.all_divergent = false;
    f.scores.push_back(std::move(s));
  }
  f.bad_spans_halves = early && late;
  return f;
}

void fill_field_scores(PorosityVerdict& v, const ScaleSet& set, const ScoreField& f) {
  for (std::size_t i = 0; i < f.scores.size(); ++i) {
    const std::size_t idx = f.window.begin + i;
    v.scores.push_back({idx + 1, set.point(idx).log2(), f.scores[i].log2_k,
                        f.scores[i].log2_k_star});
  }
}

}  // namespace

PorosityVerdict w_porosity(const ScaleSet& set, const PorosityParams& params) {
  PorosityVerdict v;
  v.criterion = "w";
  if (!set.contains_zero()) {
    v.status = Status::holds;
    v.witness = WitnessGaps{};
    v.witness->valid = true;
    v.notes.push_back("0 is isolated: no sequence in the set tends to 0");
    return v;
  }
  if (set.depth() < params.min_depth) {
    v.notes.push_back("depth below " + std::to_string(params.min_depth));
    return v;
  }
  const ScoreField f = score_field(set, params.log2_band, params);
  fill_field_scores(v, set, f);
  v.diagnostics["bad_set_size"] = Rational(static_cast<long long>(f.bad.size()));
  if (f.bad.size() >= params.m_fail && f.bad_spans_halves) {
    v.status = Status::fails;
    v.counterexample = f.bad;
    v.notes.push_back("bad set: every k in the band leaves a bounded ratio K*/k");
    return v;
  }
  if (f.all_divergent) {
    v.status = Status::holds;
    WitnessGaps w;
    for (std::size_t i = 0; i < f.scores.size(); ++i) {
      const std::size_t idx = f.window.begin + i;
      const LogValue t = set.point(idx);
      auto b = first_strictly_above(set, LogValue::from_log2(t.log2() + *f.scores[i].log2_k));
      w.indices.push_back(idx);
      w.gaps.push_back(Gap{set.point(*b + 1), set.point(*b)});
    }
    w.valid = true;
    v.witness = std::move(w);
    return v;
  }
  v.notes.push_back("neither a bad set nor divergence at every point");
  return v;
}

std::vector<PosSeq> default_pool(const ScaleSet& set) {
  std::vector<PosSeq> pool;
  const PosSeq all = enumerate_points(set);
  pool.push_back(all);
  for (std::size_t step = 2; step <= 4; ++step) {
    for (std::size_t offset = 0; offset < step; ++offset) {
      std::vector<std::size_t> pos;
      for (std::size_t i = offset; i < all.size(); i += step) pos.push_back(i);
      pool.push_back(subsequence(all, pos,
                                 "stride:" + std::to_string(step) + ":" + std::to_string(offset)));
    }
  }
  return pool;
}

PorosityVerdict completely_strong_porosity(const ScaleSet& set, const std::vector<PosSeq>& pool,
                                           const PorosityParams& params) {
  PorosityVerdict v;
  v.criterion = "complete";
  if (!set.contains_zero()) {
    v.status = Status::holds;
    v.witness = WitnessGaps{};
    v.witness->valid = true;
    v.notes.push_back("0 is isolated: no sequence in the set tends to 0");
    return v;
  }
  if (set.depth() < params.min_depth) {
    v.notes.push_back("depth below " + std::to_string(params.min_depth));
    return v;
  }
  std::vector<PosSeq> members = default_pool(set);
  members.insert(members.end(), pool.begin(), pool.end());
  bool any_open = false;
  for (const PosSeq& m : members) {
    const PorosityVerdict r = tau_strong_porosity(set, m, params);
    if (r.status == Status::fails) {
      v.status = Status::fails;
      v.counterexample = r.counterexample;
      v.scores = r.scores;
      v.diagnostics = r.diagnostics;
      v.notes.push_back("pool member " + (m.label.empty() ? std::string("user") : m.label) +
                        " is not strongly porous");
      return v;
    }
    if (r.status == Status::inconclusive) any_open = true;
  }
  const ScoreField f = score_field(set, params.log2_divergence + 1, params);
  fill_field_scores(v, set, f);
  if (f.bad.size() >= params.m_fail && f.bad_spans_halves) {
    v.status = Status::fails;
    v.counterexample = f.bad;
    v.notes.push_back("bad set: no subsequence of it is strongly porous");
    return v;
  }
  if (f.all_divergent && !any_open) {
    v.status = Status::holds;
    v.witness = WitnessGaps{};
    v.witness->valid = true;
    return v;
  }
  v.notes.push_back("no failing member, but divergence is not confirmed at every point");
  return v;
}

}  // namespace poros
