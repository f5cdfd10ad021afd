#include "poros/pretangent.hpp"

#include "poros/error.hpp"
#include "poros/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace poros {

PointSeq marked_seq(const MetricOracle& space, std::size_t length) {
  return PointSeq{std::vector<PointId>(length, space.marked_point()), "p"};
}

NormalizingSeq::NormalizingSeq(PosSeq r) : r_(std::move(r)) {
  if (r_.size() < 4) throw PreconditionError("normalizing sequence needs at least 4 terms");
  const TailWindow tw = tail_window(r_.size(), Rational(1, 2));
  if (!(r_.terms.back() < r_.terms[tw.begin])) {
    throw PreconditionError("normalizing sequence does not decrease on its tail window");
  }
  for (const LogValue& t : r_.terms) log2_.push_back(t.log2_approx());
}

NormalizingSeq NormalizingSeq::restrict(const std::vector<std::size_t>& idx) const {
  return NormalizingSeq(subsequence(r_, idx, r_.label));
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::converged: return "converged";
    case Stability::diverged: return "diverged";
    case Stability::oscillating: return "oscillating";
  }
  return "oscillating";
}

namespace {

// Classifies values that already form the tail window.
StabilityResult classify_window(const std::vector<double>& w, double tol) {
  StabilityResult out;
  if (w.empty()) return out;
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  if (std::isinf(*hi)) {
    out.status = Stability::diverged;
    out.window_spread = std::numeric_limits<double>::infinity();
    return out;
  }
  out.window_spread = *hi - *lo;
  if (out.window_spread <= tol) {
    out.status = Stability::converged;
    out.limit = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    return out;
  }
  if (w.size() >= 4) {
    // Monotone growth across quarters, by at least a quarter overall.
    double means[4];
    for (int k = 0; k < 4; ++k) {
      const std::size_t a = w.size() * k / 4, b = w.size() * (k + 1) / 4;
      means[k] = std::accumulate(w.begin() + a, w.begin() + b, 0.0) / static_cast<double>(b - a);
    }
    const bool rising = means[1] > means[0] + tol && means[2] > means[1] + tol &&
                        means[3] > means[2] + tol && means[3] >= 1.25 * means[0];
    if (rising) out.status = Stability::diverged;
  }
  return out;
}

std::vector<double> window_quotients(const MetricOracle& space, const PointSeq& x,
                                     const PointSeq& y, const NormalizingSeq& r,
                                     const TailWindow& tw) {
  std::vector<double> w;
  w.reserve(tw.size());
  for (std::size_t n = tw.begin; n < tw.end; ++n) {
    w.push_back(space.scaled_distance(x.points[n], y.points[n], r.log2_approx(n)));
  }
  return w;
}

void require_lengths(const PointSeq& x, const NormalizingSeq& r) {
  if (x.size() != r.size()) throw PreconditionError("sequence depths differ");
}

PointSeq restrict_points(const PointSeq& x, const std::vector<std::size_t>& idx) {
  PointSeq out{{}, x.label};
  for (std::size_t n : idx) out.points.push_back(x.points.at(n));
  return out;
}

}  // namespace

std::vector<double> quotients(const MetricOracle& space, const PointSeq& x, const PointSeq& y,
                              const NormalizingSeq& r) {
  require_lengths(x, r);
  require_lengths(y, r);
  std::vector<double> q;
  for (std::size_t n = 0; n < r.size(); ++n) {
    q.push_back(space.scaled_distance(x.points[n], y.points[n], r.log2_approx(n)));
  }
  return q;
}

StabilityResult classify_quotients(const std::vector<double>& q, const StabilityParams& params) {
  if (q.empty()) return {};
  const TailWindow tw = tail_window(q.size(), params.window_fraction);
  return classify_window({q.begin() + static_cast<std::ptrdiff_t>(tw.begin), q.end()}, params.tol);
}

StabilityResult mutual_stability(const MetricOracle& space, const PointSeq& x, const PointSeq& y,
                                 const NormalizingSeq& r, const StabilityParams& params) {
  require_lengths(x, r);
  require_lengths(y, r);
  const TailWindow tw = tail_window(r.size(), params.window_fraction);
  return classify_window(window_quotients(space, x, y, r, tw), params.tol);
}

SelfStableFamily saturate_family(const MetricOracle& space, const std::vector<PointSeq>& seed,
                                 const std::vector<PointSeq>& pool, const NormalizingSeq& r,
                                 const StabilityParams& params) {
  if (seed.empty()) throw PreconditionError("seed must contain the marked sequence");
  for (PointId id : seed[0].points) {
    if (id != space.marked_point()) throw PreconditionError("seed[0] must be the marked sequence");
  }
  SelfStableFamily f{{}, {}, r};
  auto admit = [&](const PointSeq& x, std::vector<double>& row) {
    row.clear();
    for (const PointSeq& m : f.members) {
      const StabilityResult s = mutual_stability(space, x, m, r, params);
      if (s.status != Stability::converged) return false;
      row.push_back(*s.limit);
    }
    return true;
  };
  auto push = [&](const PointSeq& x, const std::vector<double>& row) {
    for (std::size_t i = 0; i < f.dtilde.size(); ++i) f.dtilde[i].push_back(row[i]);
    std::vector<double> own = row;
    own.push_back(0.0);
    f.dtilde.push_back(std::move(own));
    f.members.push_back(x);
  };
  std::vector<double> row;
  for (std::size_t j = 0; j < seed.size(); ++j) {
    require_lengths(seed[j], r);
    if (!admit(seed[j], row)) {
      for (std::size_t i = 0; i < f.members.size(); ++i) {
        if (mutual_stability(space, seed[j], f.members[i], r, params).status !=
            Stability::converged) {
          throw ConstructionError("seed pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") is not mutually stable");
        }
      }
    }
    push(seed[j], row);
  }
  for (const PointSeq& x : pool) {
    require_lengths(x, r);
    if (admit(x, row)) push(x, row);
  }
  return f;
}

PretangentSpace metric_identification(const SelfStableFamily& family, double tol) {
  const std::size_t m = family.members.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (family.dtilde[i][j] <= tol) {
        const std::size_t a = find(i), b = find(j);
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  PretangentSpace out;
  std::map<std::size_t, std::size_t> class_of_root;
  for (std::size_t i = 0; i < m; ++i) {
    auto [it, inserted] = class_of_root.try_emplace(find(i), out.classes.size());
    if (inserted) out.classes.emplace_back();
    out.classes[it->second].push_back(i);
  }
  const std::size_t c = out.classes.size();
  out.rho.assign(c, std::vector<double>(c, 0.0));
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = 0; b < c; ++b) {
      const double rho = a == b ? 0.0 : family.dtilde[out.classes[a][0]][out.classes[b][0]];
      out.rho[a][b] = rho;
      for (std::size_t i : out.classes[a]) {
        for (std::size_t j : out.classes[b]) {
          if (std::fabs(family.dtilde[i][j] - rho) > 2 * tol) {
            throw ConstructionError("tolerance too coarse for quotient");
          }
        }
      }
      out.diameter = std::max(out.diameter, rho);
    }
  }
  out.marked_class = class_of_root.at(find(0));
  return out;
}

RefineResult diagonal_refine(const MetricOracle& space, const std::vector<PointSeq>& B,
                             const PointSeq& p_seq, const NormalizingSeq& r,
                             const StabilityParams& params, const RefineParams& refine) {
  std::vector<PointSeq> members{p_seq};
  members.insert(members.end(), B.begin(), B.end());
  for (const PointSeq& x : members) require_lengths(x, r);
  const std::size_t m = members.size();
  auto pair_name = [](std::size_t i, std::size_t j) {
    const std::string a = i == 0 ? "p~" : "b" + std::to_string(i);
    return "(" + a + ", b" + std::to_string(j) + ")";
  };

  std::vector<std::vector<std::vector<double>>> q(m, std::vector<std::vector<double>>(m));
  for (std::size_t j = 1; j < m; ++j) {
    for (std::size_t i = 0; i < j; ++i) q[i][j] = quotients(space, members[i], members[j], r);
    if (classify_quotients(q[0][j], params).status == Stability::diverged) {
      throw ConstructionError("unrefinable pair " + pair_name(0, j));
    }
  }

  std::vector<std::size_t> all(r.size());
  std::iota(all.begin(), all.end(), 0);
  bool stable = true;
  for (std::size_t j = 1; j < m && stable; ++j) {
    for (std::size_t i = 0; i < j && stable; ++i) {
      stable = classify_quotients(q[i][j], params).status == Stability::converged;
    }
  }
  if (stable) {
    return {all, saturate_family(space, members, {}, r, params)};
  }

  // Nested bisection, pair by pair. Each pass keeps every earlier pair's
  // values inside a range of width <= tol, since later passes only drop indices.
  std::vector<std::size_t> I = all;
  for (std::size_t j = 1; j < m; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const std::vector<double>& v = q[i][j];
      for (std::size_t steps = 0;; ++steps) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t n : I) {
          lo = std::min(lo, v[n]);
          hi = std::max(hi, v[n]);
        }
        if (std::isinf(hi) || steps >= refine.max_steps || I.size() < refine.min_size) {
          throw ConstructionError("unrefinable pair " + pair_name(i, j));
        }
        if (hi - lo <= params.tol) break;
        const double mid = lo + (hi - lo) / 2;
        std::vector<std::size_t> lower, upper;
        for (std::size_t n : I) (v[n] <= mid ? lower : upper).push_back(n);
        const bool latest_upper = upper.size() > 0 && upper.back() == I.back();
        if (lower.size() > upper.size() || (lower.size() == upper.size() && !latest_upper)) {
          I = std::move(lower);
        } else {
          I = std::move(upper);
        }
      }
    }
  }
  // With finitely many members the diagonal sequence is the last nested set.
  if (I.size() < refine.min_size) throw ConstructionError("unrefinable pair " + pair_name(0, 1));
  const NormalizingSeq r2 = r.restrict(I);
  std::vector<PointSeq> restricted;
  for (const PointSeq& x : members) restricted.push_back(restrict_points(x, I));
  return {I, saturate_family(space, restricted, {}, r2, params)};
}

InvarianceReport subsequence_invariance_check(const MetricOracle& space,
                                              const SelfStableFamily& family,
                                              const std::vector<std::size_t>& idx,
                                              const StabilityParams& params) {
  const TailWindow tw = tail_window(family.r.size(), params.window_fraction);
  std::vector<std::size_t> kept;
  for (std::size_t n : idx) {
    if (n >= family.r.size()) throw PreconditionError("index outside the family depth");
    if (n >= tw.begin) kept.push_back(n);
  }
  if (2 * kept.size() < tw.size()) {
    throw PreconditionError("index set covers less than half of the tail window");
  }
  const std::size_t m = family.members.size();
  InvarianceReport rep;
  rep.restricted.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double sum = 0;
      for (std::size_t n : kept) {
        sum += space.scaled_distance(family.members[i].points[n], family.members[j].points[n],
                                     family.r.log2_approx(n));
      }
      const double lim = sum / static_cast<double>(kept.size());
      rep.restricted[i][j] = rep.restricted[j][i] = lim;
      rep.max_deviation = std::max(rep.max_deviation, std::fabs(lim - family.dtilde[i][j]));
    }
  }
  rep.pass = rep.max_deviation <= 2 * params.tol;
  return rep;
}

std::vector<PointSeq> scale_matched_pool(const MetricOracle& space, const NormalizingSeq& r,
                                         const PoolParams& params) {
  struct Entry {
    std::uint32_t label;
    double ratio;  // log2(d / r_n)
    PointId id;
  };
  using Level = std::pair<std::uint32_t, Rational>;
  const std::size_t len = r.size();
  const TailWindow tw = tail_window(len, Rational(1, 2));
  std::vector<std::vector<Entry>> at(len);
  std::map<Level, std::size_t> count;
  for (std::size_t n = 0; n < len; ++n) {
    for (const ScaledPoint& s :
         space.sample_at_scale(r[n], params.log2_low, params.log2_high, params.per_scale)) {
      const Rational exact = s.dist.log2() - r[n].log2();
      at[n].push_back({s.label, to_double(exact), s.id});
      if (n >= tw.begin) ++count[{s.label, exact}];
    }
    std::sort(at[n].begin(), at[n].end(), [](const Entry& a, const Entry& b) {
      return a.label != b.label ? a.label < b.label : a.ratio < b.ratio;
    });
  }
  std::vector<std::pair<std::size_t, Level>> ranked;
  for (const auto& [level, c] : count) ranked.push_back({c, level});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (ranked.size() > params.max_levels) ranked.resize(params.max_levels);
  std::vector<Level> levels;
  for (const auto& [c, level] : ranked) levels.push_back(level);
  std::sort(levels.begin(), levels.end());

  std::vector<PointSeq> pool;
  for (const Level& level : levels) {
    const double target = to_double(level.second);
    PointSeq seq;
    seq.label = "level:" + std::to_string(level.first) + ":" + to_string(level.second);
    for (std::size_t n = 0; n < len; ++n) {
      PointId best = space.marked_point();
      double best_gap = std::numeric_limits<double>::infinity();
      for (const Entry& e : at[n]) {
        if (e.label != level.first) continue;
        const double gap = std::fabs(e.ratio - target);
        if (gap < best_gap) {
          best_gap = gap;
          best = e.id;
        }
      }
      seq.points.push_back(best);
    }
    pool.push_back(std::move(seq));
  }
  return pool;
}

SelfStableFamily build_family(const MetricOracle& space, const NormalizingSeq& r,
                              const StabilityParams& params, const PoolParams& pool) {
  return saturate_family(space, {marked_seq(space, r.size())}, scale_matched_pool(space, r, pool),
                         r, params);
}

TangencyProbe tangency_probe(const MetricOracle& space, const SelfStableFamily& family,
                             std::size_t trials, std::uint64_t seed,
                             const StabilityParams& params, const PoolParams& pool) {
  TangencyProbe out;
  const std::size_t len = family.r.size();
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t stride = 2; stride <= 3; ++stride) {
    for (std::size_t offset = 0; offset < stride; ++offset) {
      std::vector<std::size_t> s;
      for (std::size_t n = offset; n < len; n += stride) s.push_back(n);
      subsets.push_back(std::move(s));
    }
  }
  SplitRng rng(seed);
  while (subsets.size() < trials) {
    std::vector<std::size_t> s;
    for (std::size_t n = 0; n < len; ++n) {
      if (rng.coin()) s.push_back(n);
    }
    if (s.size() >= 8) subsets.push_back(std::move(s));
  }
  subsets.resize(std::min(subsets.size(), trials));

  for (const std::vector<std::size_t>& s : subsets) {
    ++out.trials_run;
    std::optional<NormalizingSeq> r2;
    try {
      r2.emplace(family.r.restrict(s));
    } catch (const PreconditionError&) {
      continue;
    }
    std::vector<PointSeq> members;
    for (const PointSeq& x : family.members) members.push_back(restrict_points(x, s));
    for (const PointSeq& c : scale_matched_pool(space, *r2, pool)) {
      bool admissible = true, matched = false;
      for (const PointSeq& m : members) {
        const StabilityResult st = mutual_stability(space, c, m, *r2, params);
        if (st.status != Stability::converged) {
          admissible = false;
          break;
        }
        if (*st.limit <= params.tol) matched = true;
      }
      if (admissible && !matched) {
        out.violation = true;
        out.subset = s;
        out.witness = c;
        return out;
      }
    }
  }
  return out;
}

}  // namespace poros
