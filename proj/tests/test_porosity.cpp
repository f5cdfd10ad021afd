#include <catch_amalgamated.hpp>

#include <poros/error.hpp>
#include <poros/generators.hpp>
#include <poros/porosity.hpp>
#include <poros/rng.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using namespace poros;

namespace {

LogValue lv(const char* log2) { return LogValue::from_log2(parse_rational(log2)); }

PosSeq seq_of(std::vector<LogValue> terms) {
  PosSeq s;
  s.terms = std::move(terms);
  return s;
}

PosSeq pow2_seq(std::size_t n, auto&& exponent) {
  PosSeq s;
  for (std::size_t i = 1; i <= n; ++i) s.terms.push_back(LogValue::from_log2(exponent(i)));
  return s;
}

// Largest empty open subinterval of (0, h), by scanning consecutive breakpoints.
double lambda_oracle(const ScaleSet& set, double h) {
  std::vector<double> cut{h};
  for (const LogValue& e : set.points()) {
    if (e.to_double() < h) cut.push_back(e.to_double());
  }
  if (!set.contains_zero()) cut.push_back(0.0);
  double best = 0;
  for (std::size_t i = 1; i < cut.size(); ++i) best = std::max(best, cut[i - 1] - cut[i]);
  return best;
}

double lambda_of(const ScaleSet& set, const LogValue& h) {
  const LambdaResult r = lambda0h(set, h);
  REQUIRE(r.conclusive);
  return r.length ? r.length->to_double() : 0.0;
}

}  // namespace

TEST_CASE("lambda0h examples") {
  const ScaleSet a = ScaleSet::make({lv("-1"), lv("-2")}, false);
  CHECK(lambda_of(a, LogValue::from_rational(Rational(3, 4))) == Catch::Approx(0.25));
  const ScaleSet b = ScaleSet::make({lv("0")}, false);
  CHECK(lambda_of(b, lv("-3")) == Catch::Approx(0.125));
  const ScaleSet geo = gen_geometric(Rational(1, 2), 40);
  CHECK(lambda_of(geo, lv("0")) == Catch::Approx(0.5));
}

TEST_CASE("lambda0h against the breakpoint oracle") {
  SplitRng rng(17);
  for (int t = 0; t < 100; ++t) {
    std::vector<LogValue> v;
    for (int i = 0; i < 10; ++i) v.push_back(LogValue::pow2(-rng.uniform(0, 30)));
    const ScaleSet s = ScaleSet::make(v, false);
    double prev = 0;
    for (int e = -30; e <= 0; ++e) {
      const LogValue h = LogValue::from_log2(Rational(2 * e - 1, 2));
      const double got = lambda_of(s, h);
      CHECK(got == Catch::Approx(lambda_oracle(s, h.to_double())).epsilon(1e-12));
      CHECK(got >= 0);
      CHECK(got <= h.to_double() * (1 + 1e-12));
      CHECK(got >= prev * (1 - 1e-12));
      prev = got;
    }
  }
}

TEST_CASE("right porosity") {
  const RightPorosity geo = right_porosity(gen_geometric(Rational(1, 2), 40));
  CHECK(geo.conclusive);
  CHECK(std::fabs(geo.estimate - 0.5) <= 1e-12);
  CHECK(geo.trend == Trend::stable);

  const RightPorosity fact = right_porosity(gen_factorial(20));
  CHECK(fact.conclusive);
  CHECK(fact.estimate >= 1 - 1e-12);
  CHECK(fact.trend != Trend::decreasing);

  PorosityParams p;
  p.min_depth = 1;
  const RightPorosity one = right_porosity(ScaleSet::make({lv("0")}, false), p);
  CHECK(one.estimate == 1.0);

  SplitRng rng(2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RightPorosity r = right_porosity(gen_random_ladder(seed, 40));
    CHECK(r.estimate >= 0);
    CHECK(r.estimate <= 1);
  }
}

TEST_CASE("strong porosity") {
  CHECK(is_strongly_porous(gen_factorial(40), Rational(1, 1000000)).status == Status::holds);
  CHECK(is_strongly_porous(gen_geometric(Rational(1, 2), 40), Rational(1, 1000000)).status ==
        Status::fails);
  CHECK(is_strongly_porous(gen_geometric(Rational(1, 2), 4), Rational(1, 1000000)).status ==
        Status::inconclusive);
}

TEST_CASE("almost decreasing tail") {
  CHECK(almost_decreasing_tail(seq_of({lv("0"), lv("1"), lv("-1"), lv("-2")})) == 2);
  CHECK(almost_decreasing_tail(seq_of({lv("0"), lv("-1"), lv("-2")})) == 1);
  CHECK(almost_decreasing_tail(seq_of({lv("-2"), lv("-1")})) == std::nullopt);
}

TEST_CASE("weak equivalence") {
  const auto n = [](std::size_t i) { return -Rational(static_cast<long long>(i)); };
  const PosSeq a = pow2_seq(40, n);
  PosSeq g = a;
  for (LogValue& t : g.terms) t = t * LogValue::from_rational(3);

  const PorosityVerdict v = weak_equiv(a, g);
  REQUIRE(v.status == Status::holds);
  REQUIRE(v.witness);
  CHECK(v.witness->c1 < 3);
  CHECK(v.witness->c2 > 3);
  CHECK(v.witness->c2 / v.witness->c1 < Rational(1001, 1000));

  const PorosityVerdict back = weak_equiv(g, a);
  REQUIRE(back.status == Status::holds);
  CHECK(back.witness->c1 * v.witness->c2 > Rational(999, 1000));
  CHECK(back.witness->c1 * v.witness->c2 < Rational(1001, 1000));

  const PorosityVerdict self = weak_equiv(a, a);
  REQUIRE(self.status == Status::holds);
  CHECK(self.witness->c1 < 1);
  CHECK(self.witness->c2 > 1);

  const auto sq = [](std::size_t i) {
    const auto k = static_cast<long long>(i);
    return -Rational(k * k);
  };
  CHECK(weak_equiv(a, pow2_seq(40, sq)).status == Status::fails);
}

TEST_CASE("weak equivalence composes") {
  const auto n = [](std::size_t i) { return -Rational(static_cast<long long>(i)); };
  const PosSeq a = pow2_seq(40, n);
  PosSeq b = a, c = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    b.terms[i] = a.terms[i] * LogValue::from_log2(Rational(i % 3, 2));
    c.terms[i] = b.terms[i] * LogValue::from_log2(Rational(-static_cast<long long>(i % 2)));
  }
  const PorosityVerdict ab = weak_equiv(a, b);
  const PorosityVerdict bc = weak_equiv(b, c);
  const PorosityVerdict ac = weak_equiv(a, c);
  REQUIRE(ab.status == Status::holds);
  REQUIRE(bc.status == Status::holds);
  REQUIRE(ac.status == Status::holds);
  CHECK(ac.witness->c1 >= ab.witness->c1 * bc.witness->c1 * Rational(999, 1000));
  CHECK(ac.witness->c2 <= ab.witness->c2 * bc.witness->c2 * Rational(1001, 1000));
}

TEST_CASE("kK_empty") {
  const ScaleSet geo = gen_geometric(Rational(1, 2), 40);
  PosSeq tau;
  for (std::size_t i = 1; i < 40; ++i) tau.terms.push_back(LogValue::pow2(-static_cast<long long>(i)));
  CHECK(kK_empty(geo, tau, Rational(6, 5), Rational(9, 5), 1));
  CHECK_FALSE(kK_empty(geo, tau, Rational(6, 5), Rational(5, 2), 1));
  CHECK_THROWS_AS(kK_empty(geo, tau, Rational(3, 2), Rational(3, 2), 1), PreconditionError);

  // brute force: is some power of two strictly inside (k 2^-n, K 2^-n)?
  SplitRng rng(8);
  for (int t = 0; t < 50; ++t) {
    const Rational k(rng.uniform(11, 40), 10);
    const Rational K = k + Rational(rng.uniform(1, 40), 10);
    bool empty = true;
    for (long long j = 0; j < 8; ++j) {
      const Rational p(Integer(1) << j);
      empty = empty && !(k < p && p < K);
    }
    CHECK(kK_empty(geo, tau, k, K, 4) == empty);
  }
}

TEST_CASE("K_star") {
  const ScaleSet geo = gen_geometric(Rational(1, 2), 40);
  for (long long n = 5; n < 30; ++n) {
    CHECK(K_star(geo, LogValue::pow2(-n), Rational(3, 2)) == LogValue::pow2(1));
  }
  const ScaleSet fact = gen_factorial(8);
  long long f = 1;
  for (long long n = 1; n < 7; ++n) {
    const long long g = f * (n + 1);
    CHECK(K_star(fact, LogValue::pow2(-g), Rational(3, 2)) == LogValue::pow2(g - f));
    f = g;
  }
  CHECK(K_star(geo, geo.window_top(), Rational(2)) == std::nullopt);
  CHECK_THROWS_AS(K_star(geo, geo.point(3), Rational(1)), PreconditionError);
}

TEST_CASE("K_star is monotone in k") {
  SplitRng rng(4);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const ScaleSet s = gen_random_ladder(seed, 40);
    for (int t = 0; t < 30; ++t) {
      const LogValue p = s.point(static_cast<std::size_t>(rng.uniform(10, 39)));
      const Rational k1(rng.uniform(11, 100), 10);
      const Rational k2 = k1 + Rational(rng.uniform(0, 100), 10);
      const auto a = K_star(s, p, k1);
      const auto b = K_star(s, p, k2);
      if (a && b) CHECK(*a <= *b);
      if (!a) CHECK_FALSE(b.has_value());
    }
  }
}

TEST_CASE("tau strong porosity on the factorial set") {
  const ScaleSet fact = gen_factorial(40);
  const PosSeq all = enumerate_points(fact);
  const PorosityVerdict v = tau_strong_porosity(fact, all);
  REQUIRE(v.status == Status::holds);
  REQUIRE(v.witness);
  const WitnessGaps& w = *v.witness;
  CHECK(w.valid);
  for (std::size_t i = 0; i < w.indices.size(); ++i) {
    const std::size_t n = w.indices[i];
    CHECK(w.gaps[i].a == all.terms[n]);
    CHECK(w.gaps[i].b == all.terms[n - 1]);
  }
  CHECK(tau_strong_porosity_gaps(fact, all).status == Status::holds);
}

TEST_CASE("tau strong porosity fails on the geometric set") {
  const ScaleSet geo = gen_geometric(Rational(1, 2), 40);
  const PosSeq all = enumerate_points(geo);
  const PorosityVerdict v = tau_strong_porosity(geo, all);
  CHECK(v.status == Status::fails);
  CHECK_FALSE(v.counterexample.empty());
  CHECK(tau_strong_porosity_gaps(geo, all).status == Status::fails);
  CHECK(porous_subsequence_search(geo, all).status == Status::fails);
}

TEST_CASE("tau strong porosity rejects terms outside the set") {
  const ScaleSet geo = gen_geometric(Rational(1, 2), 40);
  PosSeq bad = enumerate_points(geo);
  bad.terms[30] = LogValue::from_log2(Rational(-61, 2));
  CHECK_THROWS_AS(tau_strong_porosity(geo, bad), PreconditionError);
}

TEST_CASE("two-ladder set: the starred ladder fails along one class") {
  const TwoLadderSet L = gen_example_2_8(40);
  PosSeq star;
  star.terms = L.tau_star();
  const PorosityVerdict v = tau_strong_porosity(L.set, star);
  REQUIRE(v.status == Status::fails);
  REQUIRE_FALSE(v.counterexample.empty());
  std::set<std::size_t> classes;
  for (std::size_t p : v.counterexample) classes.insert(L.trace.at(p).cls);
  CHECK(classes.size() == 1);
  // the forced gap above tau*_n is (tau*_n, tau_n), of ratio 2^nu(m(n))
  const std::size_t cls = *classes.begin();
  for (std::size_t p : v.counterexample) {
    const Rational nu(static_cast<long long>(L.trace[p].nu));
    CHECK(L.trace[p].log2_tau - L.trace[p].log2_tau_star == nu);
    CHECK(L.trace[p].cls == cls);
  }
  CHECK(tau_strong_porosity_gaps(L.set, star).status == Status::fails);
}

TEST_CASE("two-ladder set: porous subsequence of the enumeration") {
  const TwoLadderSet L = gen_example_2_8(40);
  const PosSeq all = enumerate_points(L.set);
  CHECK(tau_strong_porosity(L.set, all).status == Status::fails);
  const PorosityVerdict v = porous_subsequence_search(L.set, all);
  REQUIRE(v.status == Status::holds);
  REQUIRE(v.subsequence.size() >= 8);
  REQUIRE(v.witness);
  CHECK(v.witness->valid);
  // tau*_n in a class with small nu is porous too, so only ask that every
  // pick lies on one of the two ladders and that no tail tau_n is dropped
  const std::vector<LogValue> tau = L.tau();
  const std::vector<LogValue> star = L.tau_star();
  const auto on = [](const std::vector<LogValue>& l, const LogValue& x) {
    return std::find(l.begin(), l.end(), x) != l.end();
  };
  for (std::size_t p : v.subsequence) CHECK((on(tau, all.terms[p]) || on(star, all.terms[p])));
  const TailWindow w = tail_window(all.size(), Rational(1, 2));
  for (std::size_t i = w.begin; i < w.end; ++i) {
    if (!on(tau, all.terms[i])) continue;
    CHECK(std::find(v.subsequence.begin(), v.subsequence.end(), i) != v.subsequence.end());
  }
}

TEST_CASE("porous subsequence of a porous sequence") {
  const ScaleSet fact = gen_factorial(40);
  const PosSeq all = enumerate_points(fact);
  const PorosityVerdict v = porous_subsequence_search(fact, all);
  REQUIRE(v.status == Status::holds);
  const TailWindow w = tail_window(all.size(), Rational(1, 2));
  for (std::size_t i = w.begin; i < w.end; ++i) {
    CHECK(std::find(v.subsequence.begin(), v.subsequence.end(), i) != v.subsequence.end());
  }
}

TEST_CASE("w porosity and complete porosity") {
  const ScaleSet geo = gen_geometric(Rational(1, 2), 40);
  const ScaleSet fact = gen_factorial(40);
  const ScaleSet two = gen_example_2_8(40).set;

  const PorosityVerdict wg = w_porosity(geo);
  CHECK(wg.status == Status::fails);
  CHECK(wg.counterexample.size() >= PorosityParams{}.m_fail);
  CHECK(w_porosity(fact).status == Status::holds);
  CHECK(w_porosity(two).status == Status::holds);

  CHECK(completely_strong_porosity(fact, default_pool(fact)).status == Status::holds);
  CHECK(completely_strong_porosity(two, default_pool(two)).status == Status::fails);
  CHECK(completely_strong_porosity(geo, default_pool(geo)).status == Status::fails);
}

TEST_CASE("isolated zero is w porous") {
  const ScaleSet s = ScaleSet::make({lv("0"), lv("-1")}, false);
  CHECK(w_porosity(s).status == Status::holds);
}

TEST_CASE("default pool") {
  const ScaleSet s = gen_geometric(Rational(1, 2), 12);
  const std::vector<PosSeq> pool = default_pool(s);
  CHECK(pool.size() == 1 + 2 + 3 + 4);
  CHECK(pool[0].size() == 12);
}

TEST_CASE("k-grid and gap routes agree; tau holds implies a porous subsequence") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const ScaleSet s = gen_random_ladder(seed, 40);
    for (const PosSeq& tau : default_pool(s)) {
      const Status k = tau_strong_porosity(s, tau).status;
      const Status g = tau_strong_porosity_gaps(s, tau).status;
      CHECK_FALSE((k == Status::holds && g == Status::fails));
      CHECK_FALSE((k == Status::fails && g == Status::holds));
      if (k == Status::holds) CHECK(porous_subsequence_search(s, tau).status == Status::holds);
    }
  }
}
