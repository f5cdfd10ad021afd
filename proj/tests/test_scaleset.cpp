#include <catch_amalgamated.hpp>

#include <poros/error.hpp>
#include <poros/generators.hpp>
#include <poros/rng.hpp>
#include <poros/scale_set.hpp>

#include <cmath>

using namespace poros;

namespace {

LogValue lv(const char* log2) { return LogValue::from_log2(parse_rational(log2)); }

ScaleSet random_set(SplitRng& rng, bool zero) {
  std::vector<LogValue> v;
  const auto n = rng.uniform(1, 12);
  for (int i = 0; i < n; ++i) v.push_back(LogValue::from_log2(Rational(-rng.uniform(0, 40), rng.uniform(1, 4))));
  return ScaleSet::make(v, zero);
}

}  // namespace

TEST_CASE("LogValue order matches the order of the exponents") {
  SplitRng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Rational p(rng.uniform(-1000, 1000), rng.uniform(1, 50));
    const Rational q(rng.uniform(-1000, 1000), rng.uniform(1, 50));
    CHECK((LogValue::from_log2(p) < LogValue::from_log2(q)) == (p < q));
    CHECK((LogValue::from_log2(p) == LogValue::from_log2(q)) == (p == q));
  }
}

TEST_CASE("parse_rational and to_string round trip") {
  CHECK(to_string(parse_rational("6/4")) == "3/2");
  CHECK(to_string(parse_rational("-7")) == "-7");
  CHECK_THROWS_AS(parse_rational("1/0"), SchemaError);
  CHECK_THROWS_AS(parse_rational("x"), SchemaError);
}

TEST_CASE("linear_difference") {
  CHECK(linear_difference(LogValue::pow2(0), LogValue::pow2(-1)) == LogValue::pow2(-1));
  // 2^-10 - 2^-12 = 3 * 2^-12
  const LogValue d = linear_difference(LogValue::pow2(-10), LogValue::pow2(-12));
  CHECK(d.log2_approx() == Catch::Approx(std::log2(3.0) - 12).epsilon(1e-15));
  CHECK_THROWS_WITH(linear_difference(lv("-3"), lv("-3")), "nonpositive difference");
  CHECK_THROWS_AS(linear_difference(lv("-4"), lv("-3")), PreconditionError);
}

TEST_CASE("linear_difference and linear_sum against exact rational arithmetic") {
  SplitRng rng(5);
  for (int i = 0; i < 300; ++i) {
    const Rational x(rng.uniform(2, std::int64_t{1} << 40), rng.uniform(1, std::int64_t{1} << 20));
    const Rational y(rng.uniform(1, std::int64_t{1} << 40), rng.uniform(1, std::int64_t{1} << 20));
    if (x == y) continue;
    const Rational hi = x > y ? x : y;
    const Rational lo = x > y ? y : x;
    const LogValue d = linear_difference(LogValue::from_rational(hi), LogValue::from_rational(lo));
    const LogValue s = linear_sum(LogValue::from_rational(hi), LogValue::from_rational(lo));
    const double want_d = std::log2(static_cast<double>(hi - lo));
    const double want_s = std::log2(static_cast<double>(hi + lo));
    CHECK(std::fabs(d.log2_approx() - want_d) < 1e-9);
    CHECK(std::fabs(s.log2_approx() - want_s) < 1e-9);
  }
}

TEST_CASE("make_scale_set") {
  const ScaleSet s = ScaleSet::make({lv("0"), lv("-1"), lv("-2"), lv("-1")}, true);
  CHECK(s.depth() == 3);
  CHECK(s.window_top() == lv("0"));
  CHECK(s.min_point() == lv("-2"));
  CHECK(s.contains_zero());
  CHECK(ScaleSet::make({lv("-1")}, false).depth() == 1);
  CHECK_THROWS_WITH(ScaleSet::make({}, true), "empty set");
}

TEST_CASE("gaps of small sets") {
  const GapStructure g = gaps(ScaleSet::make({lv("0"), lv("-1"), lv("-2")}, true));
  REQUIRE(g.gaps.size() == 2);
  CHECK(g.gaps[0] == Gap{lv("-1"), lv("0")});
  CHECK(g.gaps[1] == Gap{lv("-2"), lv("-1")});
  CHECK(g.below == BelowMinimum::unresolved);
  CHECK(gaps(ScaleSet::make({lv("-1")}, false)).below == BelowMinimum::empty_tail);

  const GapStructure geo = gaps(gen_geometric(Rational(1, 2), 10));
  CHECK(geo.gaps.size() == 9);
  for (const Gap& gap : geo.gaps) CHECK(gap.ratio_log2() == 1);

  const TwoLadderSet ex = gen_example_2_8(4);
  bool found = false;
  for (const Gap& gap : gaps(ex.set).gaps) found = found || gap == Gap{lv("-1"), lv("0")};
  CHECK(found);
}

TEST_CASE("gap soundness and completeness on random sets") {
  SplitRng rng(3);
  for (int t = 0; t < 200; ++t) {
    const ScaleSet s = random_set(rng, t % 2 == 0);
    if (s.depth() < 2) continue;
    const GapStructure g = gaps(s);
    CHECK(g.gaps.size() == s.depth() - 1);
    for (const Gap& gap : g.gaps) {
      CHECK(gap.a < gap.b);
      for (const LogValue& e : s.points()) CHECK((e <= gap.a || e >= gap.b));
    }
    for (std::size_t i = 1; i < s.depth(); ++i) {
      std::size_t hits = 0;
      for (const Gap& gap : g.gaps) hits += gap.a == s.point(i) && gap.b == s.point(i - 1);
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("next_above") {
  const ScaleSet s = ScaleSet::make({lv("0"), lv("-2")}, true);
  CHECK(next_above(s, lv("-1")) == lv("0"));
  CHECK(next_above(s, lv("-2")) == lv("-2"));
  CHECK_THROWS_AS(next_above(s, lv("1")), OutsideWindowError);

  // linear scan oracle
  const ScaleSet geo = gen_geometric(Rational(1, 2), 10);
  const LogValue t = LogValue::from_rational(Rational(3, 32));
  std::optional<LogValue> want;
  for (const LogValue& e : geo.points()) {
    if (e >= t && (!want || e < *want)) want = e;
  }
  CHECK(next_above(geo, t) == want);
  CHECK(want == LogValue::pow2(-3));
}

TEST_CASE("tail_window splits into halves") {
  const TailWindow w = tail_window(40, Rational(1, 2));
  CHECK(w.begin == 20);
  CHECK(w.end == 40);
  CHECK(w.mid == 30);
  CHECK_THROWS_AS(tail_window(10, Rational(0)), PreconditionError);
}
