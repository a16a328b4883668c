#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "boxtopos/states.hpp"

using namespace boxtopos;

namespace {

GlobalAssignment all_zero(const BoxPresentation& b) {
  GlobalAssignment g;
  for (const auto& q : b.questions()) g[q] = 0;
  return g;
}

// All 2^|S| global assignments, in binary-word order over sorted questions.
std::vector<GlobalAssignment> all_assignments(const BoxPresentation& b) {
  const auto& qs = b.questions();
  std::vector<GlobalAssignment> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << qs.size()); ++mask) {
    GlobalAssignment g;
    for (std::size_t i = 0; i < qs.size(); ++i)
      g[qs[i]] = static_cast<int>((mask >> (qs.size() - 1 - i)) & 1);
    out.push_back(std::move(g));
  }
  return out;
}

// The PR table with one party's outcomes flipped; reaches CHSH = -4.
BoxState anti_pr_box() {
  BoxState s = pr_box();
  BoxState flipped = s;
  for (std::size_t mi = 0; mi < s.maximal.size(); ++mi)
    for (std::uint64_t a = 0; a < s.table[mi].size(); ++a)
      flipped.table[mi][a ^ 2] = s.table[mi][a];  // flip the a-side bit
  return flipped;
}

}  // namespace

TEST_CASE("pr_box is a valid state with the expected marginals") {
  auto s = pr_box();
  CHECK(validate_state(s).ok);
  CHECK(s.entry("a1,b1", "00") == Rational(1, 2));
  CHECK(s.entry("a1,b1", "01") == 0);
  CHECK(s.entry("a2,b2", "01") == Rational(1, 2));
  CHECK(s.entry("a2,b2", "00") == 0);

  for (const auto& q : {"a1", "a2", "b1", "b2"}) {
    CHECK(marginal(s, q, "0") == Rational(1, 2));
    CHECK(marginal(s, q, "1") == Rational(1, 2));
  }
  CHECK(marginal(s, "", "") == 1);
}

TEST_CASE("uniform and deterministic states") {
  auto pr = BoxPresentation::pr();
  auto u = uniform_state(pr);
  CHECK(validate_state(u).ok);
  for (const auto& row : u.table)
    for (const auto& p : row) CHECK(p == Rational(1, 4));
  CHECK(chsh(u) == 0);

  auto gb = uniform_state(BoxPresentation::gbit());
  for (const auto& row : gb.table)
    for (const auto& p : row) CHECK(p == Rational(1, 2));

  auto det = deterministic_state(pr, all_zero(pr));
  CHECK(validate_state(det).ok);
  CHECK(chsh(det) == 2);  // all four correlators +1

  GlobalAssignment g{{"q1", 0}, {"q2", 1}};
  auto dg = deterministic_state(BoxPresentation::gbit(), g);
  CHECK(marginal(dg, "q1", "0") == 1);
  CHECK(marginal(dg, "q2", "0") == 0);

  // marginals of a point mass follow the restriction of the assignment
  for (const auto& ga : all_assignments(pr)) {
    auto d = deterministic_state(pr, ga);
    CHECK(validate_state(d).ok);
    CHECK(marginal(d, "a1", ga.at("a1") ? "1" : "0") == 1);
  }

  GlobalAssignment partial{{"q1", 0}};
  CHECK_THROWS_AS(deterministic_state(BoxPresentation::gbit(), partial),
                  InputError);
}

TEST_CASE("signalling tables are rejected with witnesses") {
  // all of {a1,b1}'s mass on one outcome, {a1,b2} uniform: a1's marginal
  // depends on the b-side choice
  auto s = uniform_state(BoxPresentation::pr());
  auto& row = s.table[s.maximal_index("a1,b1")];
  row = {1, 0, 0, 0};
  auto report = validate_state(s);
  CHECK_FALSE(report.ok);
  bool found = false;
  for (const auto& d : report.diagnostics)
    if (d.find("signalling") != std::string::npos &&
        d.find("a1,b1") != std::string::npos &&
        d.find("a1,b2") != std::string::npos)
      found = true;
  CHECK(found);

  CHECK_THROWS_AS(marginal(s, "a1", "0"), InputError);
  // the b-side marginal through the two a-refinements also breaks
  CHECK_THROWS_AS(marginal(s, "b1", "1"), InputError);
}

TEST_CASE("mix") {
  auto pr = BoxPresentation::pr();
  auto s = pr_box();
  CHECK(mix({s}, {Rational(1)}) == s);

  auto d0 = deterministic_state(pr, all_zero(pr));
  auto g1 = all_zero(pr);
  g1["a1"] = 1;
  auto d1 = deterministic_state(pr, g1);
  auto m = mix({d0, d1}, {Rational(1, 2), Rational(1, 2)});
  CHECK(validate_state(m).ok);
  for (const auto& row : m.table)
    for (const auto& p : row)
      CHECK((p == 0 || p == Rational(1, 2) || p == 1));

  CHECK(chsh(mix({pr_box(), anti_pr_box()},
                 {Rational(1, 2), Rational(1, 2)})) == 0);

  CHECK_THROWS_AS(mix({s}, {Rational(1, 2)}), InputError);
  CHECK_THROWS_AS(mix({s, uniform_state(BoxPresentation::gbit())},
                      {Rational(1, 2), Rational(1, 2)}),
                  InputError);
}

TEST_CASE("chsh") {
  CHECK(chsh(pr_box()) == 4);
  CHECK(chsh(anti_pr_box()) == -4);

  // every deterministic state lands on the classical boundary
  auto pr = BoxPresentation::pr();
  for (const auto& g : all_assignments(pr)) {
    const Rational v = chsh(deterministic_state(pr, g));
    CHECK((v == 2 || v == -2));
  }

  CHECK_THROWS_AS(chsh(uniform_state(BoxPresentation::gbit())), InputError);
}

TEST_CASE("bell_value") {
  auto pr = BoxPresentation::pr();
  auto f = chsh_functional(pr);
  CHECK(bell_value(pr_box(), f) == 4);

  BellFunctional zero = f;
  for (auto& row : zero.coefficients)
    for (auto& c : row) c = 0;
  CHECK(bell_value(pr_box(), zero) == 0);

  BellFunctional indicator = zero;
  indicator.coefficients[indicator.presentation == pr
                             ? pr_box().maximal_index("a1,b1")
                             : 0][0] = 1;
  CHECK(bell_value(pr_box(), indicator) == pr_box().entry("a1,b1", "00"));

  CHECK_THROWS_AS(bell_value(uniform_state(BoxPresentation::gbit()), f),
                  InputError);
}

TEST_CASE("bell_value is affine in the state") {
  std::mt19937_64 rng(991);
  auto pr = BoxPresentation::pr();
  auto f = chsh_functional(pr);
  const auto assignments = all_assignments(pr);
  std::uniform_int_distribution<std::size_t> pick(0, assignments.size() - 1);
  std::uniform_int_distribution<int> num(0, 7);
  for (int trial = 0; trial < 25; ++trial) {
    auto s = deterministic_state(pr, assignments[pick(rng)]);
    auto t = trial % 2 ? pr_box() : deterministic_state(pr, assignments[pick(rng)]);
    const Rational lambda(num(rng), 7);
    auto m = mix({s, t}, {lambda, 1 - lambda});
    CHECK(bell_value(m, f) ==
          lambda * bell_value(s, f) + (1 - lambda) * bell_value(t, f));
  }
}

TEST_CASE("chsh sign variants") {
  auto pr = BoxPresentation::pr();
  auto variants = chsh_sign_variants(pr);
  REQUIRE(variants.size() == 8);
  // the PR box maximizes the standard variant and stays within +-4 on all
  for (const auto& v : variants) {
    const Rational value = bell_value(pr_box(), v);
    CHECK(value <= 4);
    CHECK(value >= -4);
  }
}

TEST_CASE("tsirelson constant and bounds") {
  const double c = tsirelson_constant();
  CHECK(c == Catch::Approx(2.8284271247461903));
  auto bounds = tsirelson_bounds();
  // the rational window really encloses 2*sqrt(2): compare squares exactly
  CHECK(bounds.lower * bounds.lower < 8);
  CHECK(bounds.upper * bounds.upper > 8);
  CHECK(chsh(pr_box()) > bounds.upper);                       // PR beats quantum
  auto det = deterministic_state(BoxPresentation::pr(), all_zero(BoxPresentation::pr()));
  CHECK(chsh(det) < bounds.lower);                            // classical below
}
