#include <catch_amalgamated.hpp>

#include <poros/error.hpp>
#include <poros/generators.hpp>
#include <poros/pretangent.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using namespace poros;

namespace {

NormalizingSeq pow2_r(std::size_t n) {
  PosSeq r;
  for (std::size_t i = 1; i <= n; ++i) r.terms.push_back(LogValue::pow2(-static_cast<long long>(i)));
  return NormalizingSeq(std::move(r));
}

// x_n = c(n) * 2^-n on the ray, with n 1-based
template <class F>
PointSeq on_ray(const HalfLineSpace& ray, std::size_t len, F&& c) {
  PointSeq s;
  for (std::size_t n = 1; n <= len; ++n) {
    const Rational v = c(n) / Rational(Integer(1) << n);
    s.points.push_back(v == 0 ? ray.marked_point() : ray.point_at(LogValue::from_rational(v)));
  }
  return s;
}

SelfStableFamily hand_family(std::vector<std::vector<double>> d) {
  SelfStableFamily f{{}, std::move(d), pow2_r(8)};
  f.members.resize(f.dtilde.size());
  return f;
}

bool has_message(const std::exception& e, const std::string& prefix) {
  return std::string(e.what()).rfind(prefix, 0) == 0;
}

}  // namespace

TEST_CASE("normalizing sequences") {
  CHECK_THROWS_AS(pow2_r(3), PreconditionError);
  PosSeq up;
  for (int i = 0; i < 8; ++i) up.terms.push_back(LogValue::pow2(i));
  CHECK_THROWS_AS(NormalizingSeq(up), PreconditionError);
  const NormalizingSeq r = pow2_r(10);
  CHECK(r.log2_approx(4) == -5.0);
  CHECK(r.restrict({0, 2, 4, 6, 8}).size() == 5);
}

TEST_CASE("mutual stability on the ray") {
  const auto ray = HalfLineSpace::ray();
  const NormalizingSeq r = pow2_r(40);
  const PointSeq p = marked_seq(*ray, 40);

  const StabilityResult same = mutual_stability(*ray, p, on_ray(*ray, 40, [](auto) { return Rational(1); }), r);
  CHECK(same.status == Stability::converged);
  REQUIRE(same.limit);
  CHECK(*same.limit == Catch::Approx(1.0).epsilon(1e-12));

  // x_n = 2^(n/2) r_n
  PointSeq slow;
  for (std::size_t n = 1; n <= 40; ++n) {
    slow.points.push_back(ray->point_at(LogValue::from_log2(-Rational(static_cast<long long>(n), 2))));
  }
  CHECK(mutual_stability(*ray, p, slow, r).status == Stability::diverged);

  const PointSeq alt = on_ray(*ray, 40, [](std::size_t n) { return Rational(n % 2 ? 1 : 3); });
  CHECK(mutual_stability(*ray, p, alt, r).status == Stability::oscillating);

  // quotients against an independent computation
  const std::vector<double> q = quotients(*ray, p, alt, r);
  for (std::size_t n = 1; n <= 40; ++n) CHECK(q[n - 1] == Catch::Approx(n % 2 ? 1.0 : 3.0));
}

TEST_CASE("classify quotients") {
  StabilityParams prm;
  CHECK(classify_quotients(std::vector<double>(16, 2.5), prm).status == Stability::converged);
  std::vector<double> grow;
  for (int i = 0; i < 16; ++i) grow.push_back(std::exp2(i));
  CHECK(classify_quotients(grow, prm).status == Stability::diverged);
  std::vector<double> inf(16, 1.0);
  inf.back() = std::numeric_limits<double>::infinity();
  CHECK(classify_quotients(inf, prm).status == Stability::diverged);
}

TEST_CASE("saturation depends on pool order") {
  const ScaleSet geo = gen_geometric(Rational(1, 2), 40);
  const StarSpace star(geo, 2);
  PosSeq rt;
  for (std::size_t n = 0; n < 40; ++n) rt.terms.push_back(geo.point(n));
  const NormalizingSeq r(rt);

  PointSeq u, v;
  for (std::size_t n = 0; n < 40; ++n) {
    u.points.push_back(star.point_at(0, n));
    v.points.push_back(star.point_at(n % 2, n));
  }
  const std::vector<PointSeq> seed{marked_seq(star, 40)};

  const SelfStableFamily uv = saturate_family(star, seed, {u, v}, r);
  const SelfStableFamily vu = saturate_family(star, seed, {v, u}, r);
  REQUIRE(uv.members.size() == 2);
  REQUIRE(vu.members.size() == 2);
  CHECK(uv.members[1].points == u.points);
  CHECK(vu.members[1].points == v.points);
  CHECK(uv.dtilde[0][1] == Catch::Approx(1.0));

  const SelfStableFamily bare = saturate_family(star, seed, {}, r);
  CHECK(bare.members.size() == 1);

  try {
    saturate_family(star, {seed[0], u, v}, {}, r);
    FAIL("unstable seed accepted");
  } catch (const ConstructionError& e) {
    CHECK(has_message(e, "seed pair ("));
  }
  CHECK_THROWS_AS(saturate_family(star, {u}, {}, r), PreconditionError);
}

TEST_CASE("metric identification") {
  // members 0,1 glued, member 2 at distance 1
  const double t = 1.0 / (1 << 20);
  const PretangentSpace two = metric_identification(
      hand_family({{0, t / 2, 1}, {t / 2, 0, 1 + t / 4}, {1, 1 + t / 4, 0}}), t);
  CHECK(two.class_count() == 2);
  CHECK(two.classes[0] == std::vector<std::size_t>{0, 1});
  CHECK(two.marked_class == 0);
  CHECK(two.diameter == Catch::Approx(1.0));
  CHECK(two.rho[0][1] == two.rho[1][0]);

  const PretangentSpace one = metric_identification(hand_family({{0, 0}, {0, 0}}), t);
  CHECK(one.class_count() == 1);
  CHECK(one.diameter == 0);

  try {
    metric_identification(hand_family({{0, t / 2, 1}, {t / 2, 0, 1.5}, {1, 1.5, 0}}), t);
    FAIL("inconsistent quotient accepted");
  } catch (const ConstructionError& e) {
    CHECK(std::string(e.what()) == "tolerance too coarse for quotient");
  }
}

TEST_CASE("identification of a built family on the ray") {
  const auto ray = HalfLineSpace::ray();
  const NormalizingSeq r = pow2_r(40);
  const SelfStableFamily f = build_family(*ray, r);
  const PretangentSpace pt = metric_identification(f, StabilityParams{}.tol);
  // every class representative at level c sits at rho = c from the marked class
  std::set<double> levels;
  for (std::size_t c = 0; c < pt.class_count(); ++c) {
    const double rho = pt.rho[pt.marked_class][c];
    const PointSeq& rep = f.members[pt.classes[c][0]];
    const std::vector<double> q = quotients(*ray, marked_seq(*ray, 40), rep, r);
    CHECK(rho == Catch::Approx(q.back()).epsilon(1e-9));
    levels.insert(rho);
  }
  CHECK(levels.size() == pt.class_count());
  CHECK(pt.class_count() > 10);
}

TEST_CASE("diagonal refinement keeps a subsequence") {
  const auto ray = HalfLineSpace::ray();
  const NormalizingSeq r = pow2_r(64);
  const PointSeq p = marked_seq(*ray, 64);
  std::vector<PointSeq> B;
  for (int j = 1; j <= 3; ++j) {
    B.push_back(on_ray(*ray, 64, [j](std::size_t n) { return Rational(j + (n % 2 ? -1 : 1)); }));
  }
  const RefineResult out = diagonal_refine(*ray, B, p, r);
  REQUIRE(out.indices.size() >= 8);
  for (std::size_t i : out.indices) CHECK((i + 1) % 2 == 0);  // even 1-based n
  REQUIRE(out.family.members.size() == 4);
  for (int j = 1; j <= 3; ++j) CHECK(out.family.dtilde[0][j] == Catch::Approx(j + 1));
  CHECK(out.family.dtilde[1][3] == Catch::Approx(2.0));

  // already stable: nothing dropped
  std::vector<PointSeq> flat;
  for (int j = 1; j <= 2; ++j) flat.push_back(on_ray(*ray, 64, [j](auto) { return Rational(j); }));
  const RefineResult same = diagonal_refine(*ray, flat, p, r);
  CHECK(same.indices.size() == 64);
  CHECK(same.family.dtilde[1][2] == Catch::Approx(1.0));

  PointSeq far;
  for (std::size_t n = 1; n <= 64; ++n) {
    far.points.push_back(ray->point_at(LogValue::from_log2(-Rational(static_cast<long long>(n), 2))));
  }
  try {
    diagonal_refine(*ray, {far}, p, r);
    FAIL("unbounded member refined");
  } catch (const ConstructionError& e) {
    CHECK(std::string(e.what()) == "unrefinable pair (p~, b1)");
  }
}

TEST_CASE("limits survive passing to subsequences") {
  const ScaleSet fact = gen_factorial(40);
  const HalfLineSpace space(fact);
  PosSeq rt;
  for (std::size_t n = 0; n < 40; ++n) rt.terms.push_back(fact.point(n));
  const NormalizingSeq r(rt);
  const SelfStableFamily f = build_family(space, r);
  REQUIRE(f.members.size() >= 2);
  const TailWindow w = tail_window(40, Rational(1, 2));
  std::vector<std::size_t> even;
  for (std::size_t n = w.begin; n < w.end; n += 2) even.push_back(n);
  even.push_back(w.end - 1);
  const InvarianceReport rep = subsequence_invariance_check(space, f, even);
  CHECK(rep.pass);
  CHECK(rep.max_deviation <= StabilityParams{}.tol);
  CHECK_THROWS_AS(subsequence_invariance_check(space, f, {w.begin}), PreconditionError);
}

TEST_CASE("tangency probe") {
  const auto ray = HalfLineSpace::ray();
  const NormalizingSeq r = pow2_r(40);
  const SelfStableFamily fam = build_family(*ray, r);
  const TangencyProbe ok = tangency_probe(*ray, fam, 12, 3);
  CHECK_FALSE(ok.violation);
  CHECK(ok.trials_run == 12);

  const SinglePointSpace one;
  const SelfStableFamily single = build_family(one, r);
  CHECK(single.members.size() == 1);
  CHECK_FALSE(tangency_probe(one, single, 8, 1).violation);

  // points 4^-k against r_n = 2^-n: the ratio-1 level only exists on even n
  const HalfLineSpace ladder(gen_geometric(Rational(1, 4), 40));
  const SelfStableFamily lf = build_family(ladder, r);
  const TangencyProbe bad = tangency_probe(ladder, lf, 20, 5);
  CHECK(bad.violation);
  REQUIRE(bad.witness);
  CHECK(bad.subset.size() < 40);
}

TEST_CASE("distance sets") {
  const ScaleSet geo = gen_geometric(Rational(1, 2), 20);
  const ScaleSet s = distance_set(HalfLineSpace(geo), 1000);
  CHECK(s.contains_zero());
  CHECK(s.depth() == geo.depth());
  for (std::size_t i = 0; i < geo.depth(); ++i) CHECK(s.point(i) == geo.point(i));

  std::vector<std::string> warnings;
  const ScaleSet c = distance_set(CircleSpace(), 100, &warnings);
  CHECK(c.depth() == 100);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < c.depth(); ++i) {
    CHECK(c.point(i).to_double() > 0);
    CHECK(c.point(i).to_double() <= pi * (1 + 1e-12));
  }
  try {
    distance_set(CircleSpace(), 0);
    FAIL("empty budget accepted");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()) == "empty sample");
  }
  CHECK_THROWS_AS(distance_set(SinglePointSpace(), 10), PreconditionError);

  warnings.clear();
  distance_set(HalfLineSpace(geo), 1000, &warnings);
  CHECK_FALSE(warnings.empty());
}

TEST_CASE("metric axiom checks") {
  auto base = std::make_shared<const HalfLineSpace>(gen_geometric(Rational(1, 2), 20));
  const std::vector<PointId> pts = {base->marked_point(), base->point_at(LogValue::pow2(-1)),
                                    base->point_at(LogValue::pow2(-2))};
  CHECK_NOTHROW(check_metric_triples(*base, pts, 0));
  // d(x, y) scaled by 4 while d(x, p), d(y, p) stay: 1 > 1/2 + 1/4
  const DistortedSpace bent(base, Rational(4));
  CHECK_THROWS_AS(check_metric_triples(bent, pts, 0), MetricAxiomError);
  const DistortedSpace same(base, Rational(1));
  CHECK_NOTHROW(check_metric_triples(same, pts, 0));
}

TEST_CASE("star space distances") {
  const ScaleSet geo = gen_geometric(Rational(1, 2), 10);
  const StarSpace star(geo, 3);
  const PointId a = star.point_at(0, 2), b = star.point_at(1, 2), c = star.point_at(0, 4);
  CHECK(star.distance(a, b)->to_double() == Catch::Approx(2 * geo.point(2).to_double()));
  CHECK(star.distance(a, c)->to_double() ==
        Catch::Approx(geo.point(2).to_double() - geo.point(4).to_double()));
  CHECK_FALSE(star.distance(a, a).has_value());
  CHECK(star.distance(a, star.marked_point()) == geo.point(2));
  CHECK_THROWS_AS(star.point_at(3, 0), PreconditionError);
}
