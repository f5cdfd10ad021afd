#include "poros/experiment.hpp"

#include "poros/error.hpp"
#include "poros/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace poros {

double ExperimentConfig::tol() const { return std::ldexp(1.0, tol_log2); }

StabilityParams ExperimentConfig::stability() const { return {tol(), window_fraction}; }

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("$.") + key + ": wrong type");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("$: experiment config must be an object");
  ExperimentConfig c;
  c.depth = field<std::size_t>(j, "depth", c.depth);
  c.tol_log2 = field<int>(j, "tol_log2", c.tol_log2);
  c.trials = field<std::size_t>(j, "trials", c.trials);
  c.seed = field<std::uint64_t>(j, "seed", c.seed);
  c.pool_budget = field<std::size_t>(j, "pool_budget", c.pool_budget);
  if (j.contains("window_fraction")) {
    const std::string text = field<std::string>(j, "window_fraction", "1/2");
    try {
      c.window_fraction = parse_rational(text);
    } catch (const std::exception&) {
      throw SchemaError("$.window_fraction: not a rational");
    }
    if (c.window_fraction <= 0 || c.window_fraction > 1) {
      throw SchemaError("$.window_fraction: must lie in (0, 1]");
    }
  }
  if (c.depth < 8) throw SchemaError("$.depth: must be at least 8");
  if (c.tol_log2 >= 0) throw SchemaError("$.tol_log2: must be negative");
  if (j.contains("normalizing")) {
    const auto& list = j.at("normalizing");
    if (!list.is_array()) throw SchemaError("$.normalizing: must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "$.normalizing[" + std::to_string(i) + "]";
      if (!list[i].is_array()) throw SchemaError(path + ": must be an array of log2 strings");
      PosSeq r;
      r.label = "user:" + std::to_string(i);
      for (std::size_t k = 0; k < list[i].size(); ++k) {
        if (!list[i][k].is_string()) {
          throw SchemaError(path + "[" + std::to_string(k) + "]: must be a string");
        }
        try {
          r.terms.push_back(LogValue::from_log2(parse_rational(list[i][k].get<std::string>())));
        } catch (const std::exception&) {
          throw SchemaError(path + "[" + std::to_string(k) + "]: not a rational");
        }
      }
      c.normalizing.push_back(std::move(r));
    }
  }
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"depth", depth},
                   {"tol_log2", tol_log2},
                   {"window_fraction", to_string(window_fraction)},
                   {"trials", trials},
                   {"seed", seed},
                   {"pool_budget", pool_budget}};
  nlohmann::json norm = nlohmann::json::array();
  for (const PosSeq& r : normalizing) {
    nlohmann::json terms = nlohmann::json::array();
    for (const LogValue& t : r.terms) terms.push_back(to_string(t.log2()));
    norm.push_back(std::move(terms));
  }
  j["normalizing"] = std::move(norm);
  return j;
}

// ---------------------------------------------------------------------------

std::vector<PosSeq> normalizing_pool(const ScaleSet& s, const ExperimentConfig& config,
                                     std::size_t count) {
  std::vector<PosSeq> out = config.normalizing;
  const PosSeq all = enumerate_points(s);
  out.push_back(all);
  for (std::size_t step = 2; step <= 4; ++step) {
    for (std::size_t offset = 0; offset < step; ++offset) {
      std::vector<std::size_t> pos;
      for (std::size_t i = offset; i < all.size(); i += step) pos.push_back(i);
      out.push_back(subsequence(all, pos,
                                "stride:" + std::to_string(step) + ":" + std::to_string(offset)));
    }
  }
  SplitRng rng(config.seed);
  for (std::size_t k = 0; out.size() < count; ++k) {
    if (k % 2 == 0) {
      std::vector<std::size_t> pos;
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (rng.coin()) pos.push_back(i);
      }
      if (pos.size() < 8) continue;
      out.push_back(subsequence(all, pos, "random-subsequence:" + std::to_string(k)));
    } else {
      const Rational a(rng.uniform(2, 16), 4);
      const Rational b(rng.uniform(0, 8));
      PosSeq r;
      r.label = "geometric-decay:" + to_string(a) + ":" + to_string(b);
      for (std::size_t n = 1; n <= config.depth; ++n) {
        r.terms.push_back(LogValue::from_log2(-(a * static_cast<long long>(n) + b)));
      }
      out.push_back(std::move(r));
    }
  }
  out.resize(std::min(out.size(), std::max(count, config.normalizing.size())));
  return out;
}

namespace {

struct RunOutcome {
  SelfStableFamily family;
  PretangentSpace space;
};

RunOutcome run_family(const MetricOracle& space, const NormalizingSeq& r,
                      const ExperimentConfig& config, bool check_axioms) {
  PoolParams pool;
  pool.max_levels = config.pool_budget;
  pool.log2_low = config.tol_log2 + 4;
  SelfStableFamily f = build_family(space, r, config.stability(), pool);
  if (check_axioms) {
    std::vector<PointId> pts;
    const std::size_t n = r.size() - 1;
    for (std::size_t i = 0; i < f.members.size() && pts.size() < 12; ++i) {
      pts.push_back(f.members[i].points[n]);
    }
    check_metric_triples(space, pts, r.log2_approx(n));
  }
  PretangentSpace pt = metric_identification(f, config.tol());
  return {std::move(f), std::move(pt)};
}

PosSeq first_half(const PosSeq& r) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < (r.size() + 1) / 2; ++i) pos.push_back(i);
  return subsequence(r, pos, r.label);
}

// Seeks, for j = 1..J, a stable member whose limit against p is at least j.
std::vector<LadderRow> ladder_for(const MetricOracle& space, const NormalizingSeq& r,
                                  const ExperimentConfig& config) {
  std::vector<LadderRow> rows;
  RunOutcome run = run_family(space, r, config, false);
  const SelfStableFamily& f = run.family;
  std::vector<std::size_t> chosen{0};
  std::vector<PointSeq> B;
  for (std::size_t j = 1; j <= config.ladder_levels; ++j) {
    LadderRow row;
    row.j = j;
    std::optional<std::size_t> best;
    for (std::size_t i = 1; i < f.members.size(); ++i) {
      const double q = f.dtilde[0][i];
      if (q >= static_cast<double>(j) && (!best || q < f.dtilde[0][*best])) best = i;
    }
    if (best) {
      row.achieved = true;
      row.quotient = f.dtilde[0][*best];
      row.member = f.members[*best].label;
      if (std::find(chosen.begin(), chosen.end(), *best) == chosen.end()) {
        chosen.push_back(*best);
        B.push_back(f.members[*best]);
      }
      for (std::size_t a : chosen) {
        for (std::size_t b : chosen) row.diameter = std::max(row.diameter, f.dtilde[a][b]);
      }
    }
    rows.push_back(std::move(row));
  }
  if (!B.empty()) {
    // The chosen members are already stable, so the refinement must keep every index.
    RefineResult refined = diagonal_refine(space, B, f.members[0], r, config.stability());
    if (refined.indices.size() != r.size()) {
      throw ConstructionError("ladder members lost stability under refinement");
    }
  }
  return rows;
}

bool all_achieved(const std::vector<LadderRow>& rows) {
  return !rows.empty() &&
         std::all_of(rows.begin(), rows.end(), [](const LadderRow& r) { return r.achieved; });
}

}  // namespace

ExperimentReport boundedness_experiment(const MetricOracle& space, const ExperimentConfig& config) {
  ExperimentReport rep;
  rep.space = space.name();
  const double tol = config.tol();

  if (space.enumerate(1).empty()) {
    // X = {p}: S = {0}, 0 is isolated, every pretangent space is a point.
    rep.w_status = Status::holds;
    rep.diameter_trend = "stable";
    rep.observation = "bounded";
    rep.agreement = "agree";
    rep.max_class_count = 1;
    rep.warnings.push_back("X is a single point");
    return rep;
  }

  // (a) distance set and its w-porosity verdict
  const ScaleSet S = distance_set(space, config.distance_budget, &rep.warnings);
  rep.distance_set_size = S.depth();
  const PorosityVerdict w = w_porosity(S, config.porosity);
  rep.w_status = w.status;
  const HalfLineSpace s_space(S);

  // (b) pretangent spaces over many normalizing sequences
  const std::vector<PosSeq> pool = normalizing_pool(S, config, config.trials);
  for (std::size_t k = 0; k < pool.size(); ++k) {
    ExperimentRow row;
    row.run_id = k;
    row.r_descriptor = pool[k].label;
    row.length = pool[k].size();
    try {
      const NormalizingSeq r(pool[k]);
      const RunOutcome x = run_family(space, r, config, true);
      const RunOutcome s = run_family(s_space, r, config, false);
      row.diameter = x.space.diameter;
      row.class_count = x.space.class_count();
      // d(x_n, p) maps every member into S and keeps mutual stability, so the
      // image family is a family in S too. Its diameter is the largest radius,
      // and it does not depend on how deep the sampled S reaches.
      double image = 0;
      for (std::size_t i = 1; i < x.family.members.size(); ++i) {
        image = std::max(image, x.family.dtilde[0][i]);
      }
      row.diameter_s = std::max(s.space.diameter, image);
      row.class_count_s = s.space.class_count();
      const PosSeq half = first_half(pool[k]);
      if (half.size() >= 8) {
        row.half_diameter = run_family(space, NormalizingSeq(half), config, false).space.diameter;
      }
    } catch (const MetricAxiomError&) {
      throw;
    } catch (const Error& e) {
      row.status = e.what();
    }
    if (row.status == "ok") {
      rep.max_diameter = std::max(rep.max_diameter, row.diameter);
      rep.max_half_diameter = std::max(rep.max_half_diameter, row.half_diameter);
      rep.max_class_count = std::max(rep.max_class_count, row.class_count);
      if (row.diameter > 2 * row.diameter_s + 4 * tol) ++rep.inequality_violations;
    }
    rep.rows.push_back(std::move(row));
  }

  // (c) explicit ladder: bad set when w fails, otherwise the set's own ladders
  std::vector<PosSeq> ladder_rs;
  if (w.status == Status::fails && !w.counterexample.empty()) {
    std::vector<LogValue> bad;
    for (std::size_t i : w.counterexample) bad.push_back(S.point(i));
    ladder_rs.push_back(PosSeq{bad, {}, "bad-set"});
  }
  const std::vector<PosSeq> own = normalizing_pool(S, ExperimentConfig{}, 3);
  ladder_rs.insert(ladder_rs.end(), own.begin(), own.end());
  // In a truncated S the high terms leave no room for j * r below the top
  // of S; retry every candidate with only its terms below top / 2J.
  const Rational ceiling = S.point(0).log2() -
                           static_cast<long long>(std::ceil(std::log2(2.0 * config.ladder_levels)));
  const std::size_t base = ladder_rs.size();
  for (std::size_t k = 0; k < base; ++k) {
    std::vector<std::size_t> low;
    for (std::size_t i = 0; i < ladder_rs[k].size(); ++i) {
      if (ladder_rs[k].terms[i].log2() <= ceiling) low.push_back(i);
    }
    if (low.size() >= 8 && low.size() < ladder_rs[k].size()) {
      ladder_rs.push_back(subsequence(ladder_rs[k], low, ladder_rs[k].label + ":low"));
    }
  }
  for (const PosSeq& lr : ladder_rs) {
    try {
      std::vector<LadderRow> rows = ladder_for(space, NormalizingSeq(lr), config);
      const bool done = all_achieved(rows);
      if (rep.ladder.empty() || done) {
        rep.ladder = std::move(rows);
        rep.ladder_r = lr.label;
      }
      if (done) break;
    } catch (const MetricAxiomError&) {
      throw;
    } catch (const Error& e) {
      rep.warnings.push_back("ladder over " + lr.label + ": " + e.what());
    }
  }

  // (d) verdict table
  const bool unbounded = all_achieved(rep.ladder);
  const bool doubling_stable = rep.max_diameter <= 2 * rep.max_half_diameter + tol;
  // A diameter at the pool ceiling was cut off by the sampler, not by X.
  const bool saturated = rep.max_diameter >= exp2_approx(PoolParams{}.log2_high);
  rep.diameter_trend = doubling_stable && !saturated ? "stable" : "growing";
  if (unbounded) {
    rep.observation = "unbounded";
  } else if (doubling_stable && !saturated) {
    rep.observation = "bounded";
  } else {
    rep.observation = "undetermined";
  }
  if ((w.status == Status::holds && rep.observation == "bounded") ||
      (w.status == Status::fails && rep.observation == "unbounded")) {
    rep.agreement = "agree";
  } else if ((w.status == Status::holds && rep.observation == "unbounded") ||
             (w.status == Status::fails && rep.observation == "bounded")) {
    rep.agreement = "disagree";
  } else {
    rep.agreement = "inconclusive-compatible";
  }
  return rep;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ExperimentRow& r : rows) {
    rows_json.push_back({{"run_id", r.run_id},
                         {"r_descriptor", r.r_descriptor},
                         {"length", r.length},
                         {"status", r.status},
                         {"diameter", r.diameter},
                         {"class_count", r.class_count},
                         {"diameter_distance_set", r.diameter_s},
                         {"class_count_distance_set", r.class_count_s},
                         {"half_depth_diameter", r.half_diameter}});
  }
  nlohmann::json ladder_json = nlohmann::json::array();
  for (const LadderRow& l : ladder) {
    ladder_json.push_back({{"j", l.j},
                           {"achieved", l.achieved},
                           {"quotient", l.quotient},
                           {"diameter", l.diameter},
                           {"member", l.member}});
  }
  return {{"space", space},
          {"distance_set_size", distance_set_size},
          {"w_porosity", std::string(to_string(w_status))},
          {"runs", std::move(rows_json)},
          {"ladder_normalizing", ladder_r},
          {"ladder", std::move(ladder_json)},
          {"summary",
           {{"w_porosity", std::string(to_string(w_status))},
            {"max_diameter", max_diameter},
            {"max_half_depth_diameter", max_half_diameter},
            {"diameter_trend", diameter_trend},
            {"observation", observation},
            {"agreement", agreement},
            {"distance_set_inequality_violations", inequality_violations},
            {"max_class_count", max_class_count}}},
          {"warnings", warnings}};
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << "run_id,r_descriptor,diameter,class_count,status\n";
  for (const ExperimentRow& r : rows) {
    nlohmann::json d = r.diameter;
    out << r.run_id << ',' << r.r_descriptor << ',' << d.dump() << ',' << r.class_count << ','
        << '"' << r.status << '"' << '\n';
  }
  return out.str();
}

}  // namespace poros
