#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "relearn/cube.hpp"
#include "relearn/errors.hpp"

using namespace relearn;

namespace {

int count_plus(const CubePoint& x, const std::vector<int>& vars) {
  int s = 0;
  for (int v : vars) s += x[v - 1];
  return s;
}

}  // namespace

TEST_CASE("cube point index round trip") {
  for (int n = 1; n <= 6; ++n) {
    for (std::uint64_t i = 0; i < (1ull << n); ++i) {
      const CubePoint x = CubePoint::from_index(n, i);
      CHECK(x.dimension() == n);
      CHECK(x.index() == i);
      for (int j = 0; j < n; ++j) CHECK((x[j] == 1 || x[j] == -1));
    }
  }
  CHECK(CubePoint::from_index(3, 0) == CubePoint{-1, -1, -1});
  CHECK(CubePoint::from_index(3, 4) == CubePoint{1, -1, -1});
  CHECK(CubePoint{1, -1, 1}.neg_mask() == 0b010u);
  CHECK(CubePoint{1, -1, 1}.negated() == CubePoint{-1, 1, -1});
}

TEST_CASE("bad cube entries are rejected") {
  CHECK_THROWS_AS(CubePoint({1, 0, -1}), InputError);
}

TEST_CASE("concept evaluation") {
  const Concept taut(2, Disjunction{{{1, false}, {1, true}}});
  for (std::uint64_t i = 0; i < 4; ++i) CHECK(taut(CubePoint::from_index(2, i)) == 1);

  const Concept maj = make_majority(3, {1, 2, 3});
  CHECK(maj(CubePoint{1, 1, -1}) == 1);
  CHECK(maj(CubePoint{1, -1, -1}) == -1);

  const Concept h(2, Halfspace{0, {1, -1}});
  CHECK(h(CubePoint{1, 1}) == -1);
  CHECK(h(CubePoint{1, -1}) == 1);

  const Concept empty_or(3, Disjunction{});
  CHECK(empty_or(CubePoint{1, 1, 1}) == -1);
  const Concept empty_and(3, Conjunction{});
  CHECK(empty_and(CubePoint{-1, -1, -1}) == 1);

  CHECK_THROWS_AS(maj(CubePoint{1, 1}), InputError);
}

TEST_CASE("majority and halfspace agree with counting") {
  const std::vector<int> vars{1, 3, 4, 6, 7};
  const Concept maj = make_majority(7, vars);
  const Concept hs(7, Halfspace{0, {1, 0, 1, 1, 0, 1, 1}});
  for (std::uint64_t i = 0; i < 128; ++i) {
    const CubePoint x = CubePoint::from_index(7, i);
    const int want = count_plus(x, vars) > 0 ? 1 : -1;
    CHECK(maj(x) == want);
    CHECK(hs(x) == want);
  }
}

TEST_CASE("dnf and cnf by brute force") {
  const Concept dnf = parse_concept("DNF (+1 +2 +3)(+4 -5 +6)");
  const Concept cnf = parse_concept("CNF (+1 -2)(+3)");
  CHECK(dnf.dimension() == 6);
  for (std::uint64_t i = 0; i < 64; ++i) {
    const CubePoint x = CubePoint::from_index(6, i);
    const bool t1 = x[0] > 0 && x[1] > 0 && x[2] > 0;
    const bool t2 = x[3] > 0 && x[4] < 0 && x[5] > 0;
    CHECK(dnf(x) == ((t1 || t2) ? 1 : -1));
  }
  for (std::uint64_t i = 0; i < 8; ++i) {
    const CubePoint x = CubePoint::from_index(3, i);
    CHECK(cnf(x) == (((x[0] > 0 || x[1] < 0) && x[2] > 0) ? 1 : -1));
  }
}

TEST_CASE("concept text round trip") {
  for (const char* text : {"MAJ 1 3 5", "DISJ +1 -2", "CONJ +1 +3", "HALFSPACE -1 2 0 3",
                           "DNF (+1 -2)(+3 +4)", "CNF (+1)(-2 +3)"}) {
    const Concept c = parse_concept(text);
    const Concept back = parse_concept(to_string(c), c.dimension());
    for (std::uint64_t i = 0; i < (1ull << c.dimension()); ++i) {
      const CubePoint x = CubePoint::from_index(c.dimension(), i);
      CHECK(c(x) == back(x));
    }
  }
  CHECK(parse_concept("MAJ 1 2", 5).dimension() == 5);
  CHECK_THROWS_AS(parse_concept("MAJ 1 9", 5), InputError);
  CHECK_THROWS_AS(parse_concept("DISJ +1 -1 +0"), InputError);
  CHECK_THROWS_AS(parse_concept("WHATEVER 1"), InputError);
  CHECK_THROWS_AS(parse_concept("HALFSPACE 0 0 0"), InputError);
}

TEST_CASE("reflect is x -> -c(-x)") {
  const Concept c = parse_concept("HALFSPACE 1 2 -1 1");
  const Concept r = reflect(c);
  for (std::uint64_t i = 0; i < 8; ++i) {
    const CubePoint x = CubePoint::from_index(3, i);
    CHECK(r(x) == -c(x.negated()));
  }
}

TEST_CASE("error metrics") {
  LabeledSample s(3);
  for (std::uint64_t i = 0; i < 8; ++i) s.add(CubePoint::from_index(3, i), -1);

  auto plus = PartialHypothesis::constant(3, Ternary::Pos);
  auto e = empirical_metrics(plus, s);
  CHECK(e.false_pos == 1.0);
  CHECK(e.false_neg == 0.0);

  auto unk = PartialHypothesis::constant(3, Ternary::Unknown);
  e = empirical_metrics(unk, s);
  CHECK(e.unknown_rate == 1.0);
  CHECK(e.err == 0.0);

  const Concept maj = make_majority(3, {1, 2, 3});
  LabeledSample full(3);
  for (std::uint64_t i = 0; i < 8; ++i) {
    const CubePoint x = CubePoint::from_index(3, i);
    full.add(x, maj(x));
  }
  e = empirical_metrics(PartialHypothesis::from_concept(maj), full);
  CHECK(e.false_pos == 0.0);
  CHECK(e.false_neg == 0.0);
  CHECK(e.err == 0.0);
  CHECK(e.unknown_rate == 0.0);

  // x1 against MAJ3: wrong on (+,-,-) and (-,+,+)
  e = empirical_metrics(PartialHypothesis::from_concept(parse_concept("DISJ +1", 3)), full);
  CHECK(e.false_pos == doctest::Approx(1.0 / 8));
  CHECK(e.false_neg == doctest::Approx(1.0 / 8));
  CHECK(e.err == doctest::Approx(2.0 / 8));
}

TEST_CASE("agreement of two hypotheses") {
  auto pos = PartialHypothesis::constant(2, Ternary::Pos);
  auto neg = PartialHypothesis::constant(2, Ternary::Neg);
  CHECK(PartialHypothesis::agreement(pos, neg)(CubePoint{1, 1}) == Ternary::Unknown);
  CHECK(PartialHypothesis::agreement(pos, pos)(CubePoint{1, 1}) == Ternary::Pos);
}

TEST_CASE("sample csv round trip and aggregation") {
  LabeledSample s(2);
  s.add({1, -1}, 1);
  s.add({-1, -1}, -1);
  s.add({1, -1}, -1);
  std::stringstream io;
  write_sample_csv(io, s);
  CHECK(io.str().rfind("x1,x2,y\n", 0) == 0);
  const LabeledSample back = read_sample_csv(io);
  CHECK(back.n == 2);
  CHECK(back.points == s.points);
  CHECK(back.labels == s.labels);

  const auto agg = aggregate(s);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].x == CubePoint{1, -1});
  CHECK(agg[0].positives == 1);
  CHECK(agg[0].negatives == 1);
  CHECK(agg[1].negatives == 1);

  const LabeledSample r = s.reflected();
  CHECK(r.points[0] == CubePoint{-1, 1});
  CHECK(r.labels[0] == -1);

  std::stringstream bad("x1,y\n1,0\n");
  CHECK_THROWS_AS(read_sample_csv(bad), InputError);
}

TEST_CASE("sign text") {
  CHECK(parse_sign("positive") == Sign::Positive);
  CHECK(parse_sign("neg") == Sign::Negative);
  CHECK(to_string(Sign::Negative) == "negative");
  CHECK_THROWS_AS(parse_sign("up"), InputError);
}
