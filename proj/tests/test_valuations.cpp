#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "boxtopos/polytope.hpp"
#include "boxtopos/valuations.hpp"

using namespace boxtopos;

namespace {

bool has_clause(const ValidationReport& r, const std::string& clause) {
  for (const auto& d : r.diagnostics)
    if (d.find(clause) != std::string::npos) return true;
  return false;
}

std::vector<BoxState> seeded_mixtures(const BoxPresentation& b,
                                      std::size_t count, std::uint64_t seed) {
  const auto vertices = ns_polytope_vertices(b);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coin(0, 9);
  std::vector<BoxState> out;
  while (out.size() < count) {
    std::vector<Rational> weights(vertices.size());
    Rational total = 0;
    for (auto& w : weights) {
      w = coin(rng);
      total += w;
    }
    if (total == 0) continue;
    for (auto& w : weights) w /= total;
    out.push_back(mix(vertices, weights));
  }
  return out;
}

}  // namespace

TEST_CASE("validate_valuation accepts state-induced valuations") {
  for (const auto& s :
       {uniform_state(BoxPresentation::pr()), pr_box(),
        uniform_state(BoxPresentation::gbit())}) {
    auto v = state_to_valuation(s);
    CHECK(validate_valuation(v).ok);
  }
}

TEST_CASE("a top-heavy table on a four-element algebra is not modular") {
  // single context, two atoms; P = 1 everywhere except P(0) = 0
  auto d = LogicDiagram::general_theory(FinitePoset::from_relation({"c"}, {}),
                                        {{"c", {"x", "y"}}}, {});
  InternalValuation v;
  v.diagram = d;
  v.tables = {{Rational(0), Rational(1), Rational(1), Rational(1)}};
  auto report = validate_valuation(v);
  CHECK_FALSE(report.ok);
  CHECK(has_clause(report, "modularity"));  // 1 + 0 != 1 + 1 on the atoms
  CHECK_FALSE(has_clause(report, "normalization"));
}

TEST_CASE("valuations built from signalling tables fail naturality") {
  auto s = uniform_state(BoxPresentation::pr());
  s.table[s.maximal_index("a1,b1")] = {1, 0, 0, 0};
  REQUIRE_FALSE(validate_state(s).ok);
  CHECK_THROWS_AS(state_to_valuation(s), InputError);

  auto v = valuation_from_maximal_rows(s);
  auto report = validate_valuation(v);
  CHECK_FALSE(report.ok);
  CHECK(has_clause(report, "naturality"));
}

TEST_CASE("state_to_valuation values") {
  auto s = pr_box();
  auto v = state_to_valuation(s);
  const auto& alg = v.diagram.algebra("a1,b1");
  const std::uint64_t u =
      alg.element_from_atoms({"00", "11"});  // perfectly correlated pair
  CHECK(v.value("a1,b1", u) == 1);

  for (std::size_t ci = 0; ci < v.diagram.contexts().size(); ++ci)
    CHECK(v.value(ci, v.diagram.algebra(ci).top()) == 1);

  GlobalAssignment g{{"a1", 0}, {"a2", 1}, {"b1", 1}, {"b2", 0}};
  auto dv = state_to_valuation(deterministic_state(BoxPresentation::pr(), g));
  // P_c(u) = 1 exactly when the restricted assignment lies in u
  const auto& ctx = dv.diagram.contexts();
  for (std::size_t ci = 0; ci < ctx.size(); ++ci) {
    const auto qs = context_questions(ctx.id_of(ci));
    std::uint64_t restricted = 0;
    for (const auto& q : qs)
      restricted = (restricted << 1) | static_cast<std::uint64_t>(g.at(q));
    for (std::uint64_t u = 0; u < dv.diagram.algebra(ci).element_count(); ++u)
      CHECK(dv.value(ci, u) == ((u >> restricted) & 1 ? 1 : 0));
  }
}

TEST_CASE("the state-valuation correspondence is an exact bijection") {
  auto b = BoxPresentation::pr();
  auto vertices = ns_polytope_vertices(b);
  REQUIRE(vertices.size() == 24);
  for (const auto& s : vertices) {
    auto v = state_to_valuation(s);
    CHECK(validate_valuation(v).ok);
    CHECK(valuation_to_state(v) == s);
  }
  for (const auto& s : seeded_mixtures(b, 100, 20250810)) {
    auto v = state_to_valuation(s);
    CHECK(valuation_to_state(v) == s);
    // and the other composite is the identity on valuations
    auto v2 = state_to_valuation(valuation_to_state(v));
    CHECK(v2.tables == v.tables);
  }
}

TEST_CASE("valuations are determined by their maximal-context rows") {
  auto s = pr_box();
  auto v = state_to_valuation(s);
  auto rederived = valuation_from_maximal_rows(valuation_to_state(v));
  CHECK(rederived.tables == v.tables);

  auto rho1 = valuation_to_colimit(v);
  auto rho2 = valuation_to_colimit(rederived);
  CHECK(rho1.rho == rho2.rho);
}

TEST_CASE("gbit colimit valuation") {
  auto s = uniform_state(BoxPresentation::gbit());
  auto v = state_to_valuation(s);
  auto cv = valuation_to_colimit(v);
  REQUIRE(cv.colim.n_classes == 6);

  std::multiset<Rational> values(cv.rho.begin(), cv.rho.end());
  std::multiset<Rational> expected{Rational(0), Rational(1, 2), Rational(1, 2),
                                   Rational(1, 2), Rational(1, 2), Rational(1)};
  CHECK(values == expected);

  // bounds always land in the 0 and 1 classes
  const auto& ctx = v.diagram.contexts();
  for (std::size_t ci = 0; ci < ctx.size(); ++ci) {
    CHECK(cv.rho[cv.colim.inject(ci, 0)] == 0);
    CHECK(cv.rho[cv.colim.inject(ci, v.diagram.algebra(ci).top())] == 1);
  }
}

TEST_CASE("descent fails for non-natural families, naming the conflict") {
  auto s = uniform_state(BoxPresentation::pr());
  s.table[s.maximal_index("a1,b1")] = {1, 0, 0, 0};
  auto v = valuation_from_maximal_rows(s);
  CHECK_THROWS_WITH(valuation_to_colimit(v),
                    Catch::Matchers::ContainsSubstring("descent"));
}

TEST_CASE("frame valuation evaluates sections to lower reals") {
  auto d = LogicDiagram::from_box(BoxPresentation::gbit());
  auto v = state_to_valuation(uniform_state(BoxPresentation::gbit()));
  auto fv = lattice_to_frame_valuation(v);

  // principal section of 1 at any stage is constantly 1
  for (const auto& c : d.contexts().elements()) {
    auto one = principal_section(d, c, d.algebra(c).top());
    auto r = fv.value_at(one);
    CHECK(r.is_constant());
    CHECK(r.values.begin()->second == 1);
  }

  // the worked example: 0 at the stage, one atom above q1, 0 above q2
  CompatibleSection u;
  u.base = "";
  u.values[""] = 0;
  u.values["q1"] =
      d.algebra("q1").atom(d.algebra("q1").atom_index("0"));
  u.values["q2"] = 0;
  REQUIRE(check_section(d, u).ok);
  auto r = fv.value_at(u);
  CHECK(r.values.at("") == 0);
  CHECK(r.values.at("q1") == Rational(1, 2));
  CHECK(r.values.at("q2") == 0);
  CHECK(check_lower_real(d, r).ok);
}

TEST_CASE("frame-lattice round trip is the identity, exhaustively on gbit") {
  auto v = state_to_valuation(uniform_state(BoxPresentation::gbit()));
  auto fv = lattice_to_frame_valuation(v);
  CHECK(frame_to_lattice_valuation(fv).tables == v.tables);

  // every global section evaluates to a well-formed lower real, and the
  // round-tripped frame valuation agrees on all 17 of them
  auto d = v.diagram;
  auto sections = sections_at(d, "");
  REQUIRE(sections.size() == 17);
  auto fv2 = lattice_to_frame_valuation(frame_to_lattice_valuation(fv));
  for (const auto& s : sections) {
    CHECK(check_lower_real(d, fv.value_at(s)).ok);
    CHECK(fv.value_at(s) == fv2.value_at(s));
  }

  // Scott continuity in the finite case: a directed family has a greatest
  // element and the value of the join is the value at that maximum
  for (const auto& s : sections)
    for (const auto& t : sections) {
      if (!section_leq(s, t)) continue;
      auto join = t;
      auto vs = fv.value_at(s).values;
      auto vt = fv.value_at(join).values;
      for (const auto& [c, val] : vs) CHECK(val <= vt.at(c));
    }
}

TEST_CASE("frame valuations are modular and normalized section-wise") {
  auto d = LogicDiagram::from_box(BoxPresentation::gbit());
  auto v = state_to_valuation(uniform_state(BoxPresentation::gbit()));
  auto fv = lattice_to_frame_valuation(v);
  auto sections = sections_at(d, "");

  // pointwise meets and joins of sections are sections again
  auto combine = [&](const CompatibleSection& s, const CompatibleSection& t,
                     bool join) {
    CompatibleSection out;
    out.base = s.base;
    for (const auto& [c, mask] : s.values)
      out.values[c] = join ? (mask | t.values.at(c)) : (mask & t.values.at(c));
    return out;
  };

  const auto& bottom = sections.front();
  for (const auto& [c, mask] : bottom.values) REQUIRE(mask == 0);
  CHECK(fv.value_at(bottom).values.at("") == 0);
  const auto& top = sections.back();
  CHECK(fv.value_at(top).values.at("") == 1);

  for (const auto& s : sections)
    for (const auto& t : sections) {
      auto meet = combine(s, t, false);
      auto join = combine(s, t, true);
      REQUIRE(check_section(d, meet).ok);
      REQUIRE(check_section(d, join).ok);
      const auto vs = fv.value_at(s).values;
      const auto vt = fv.value_at(t).values;
      const auto vm = fv.value_at(meet).values;
      const auto vj = fv.value_at(join).values;
      for (const auto& [c, x] : vs)
        CHECK(vj.at(c) + vm.at(c) == x + vt.at(c));
    }
}

TEST_CASE("frame valuation on PR at the bottom stage, sampled sections") {
  auto v = state_to_valuation(pr_box());
  auto fv = lattice_to_frame_valuation(v);
  auto d = v.diagram;
  // principal sections generate a representative family
  for (const auto& c : d.contexts().elements())
    for (std::uint64_t u = 0; u < d.algebra(c).element_count(); ++u) {
      auto s = principal_section(d, "", d.algebra("").bottom());
      (void)s;
      auto ps = principal_section(d, c, u);
      auto r = fv.value_at(ps);
      CHECK(check_lower_real(d, r).ok);
      CHECK(r.values.at(c) == v.value(c, u));
    }
}

TEST_CASE("check_dedekind_constancy") {
  // constant lift of a state valuation: preconditions hold, constant
  auto v = state_to_valuation(uniform_state(BoxPresentation::gbit()));
  auto rep = check_dedekind_constancy(lift_constant(v));
  CHECK(rep.preconditions_ok);
  CHECK(rep.constant);

  // single-context diagram: vacuously constant
  auto single = LogicDiagram::general_theory(
      FinitePoset::from_relation({"c"}, {}), {{"c", {"x", "y"}}}, {});
  InternalValuation sv;
  sv.diagram = single;
  sv.tables = {{Rational(0), Rational(1, 3), Rational(2, 3), Rational(1)}};
  auto srep = check_dedekind_constancy(lift_constant(sv));
  CHECK(srep.preconditions_ok);
  CHECK(srep.constant);
}

TEST_CASE("a strictly increasing value on a complemented element breaks "
          "modularity") {
  // two-atom algebras on a two-context chain, identity transition
  auto chain = FinitePoset::from_relation({"0", "1"}, {{"0", "1"}});
  auto d = LogicDiagram::general_theory(
      chain, {{"0", {"x", "y"}}, {"1", {"x", "y"}}},
      {{"0", "1", {{"x", {"x"}}, {"y", {"y"}}}}});

  InternalValuation base;
  base.diagram = d;
  base.tables = {{Rational(0), Rational(1, 2), Rational(1, 2), Rational(1)},
                 {Rational(0), Rational(1, 2), Rational(1, 2), Rational(1)}};
  auto lv = lift_constant(base);
  // make P(atom x) strictly increase along the chain at stage 0, while its
  // complement keeps the constant value
  lv.values[0][1].values["1"] = Rational(3, 4);
  lv.values[1][1].values["1"] = Rational(3, 4);  // keep naturality intact

  auto rep = check_dedekind_constancy(lv);
  CHECK_FALSE(rep.preconditions_ok);
  bool modularity = false, normalization = false;
  for (const auto& viol : rep.violations) {
    if (viol.find("modularity") != std::string::npos) modularity = true;
    if (viol.find("normalization") != std::string::npos) normalization = true;
  }
  CHECK(modularity);
  CHECK_FALSE(normalization);
  CHECK_FALSE(rep.constant);  // reported independently of the preconditions
}

TEST_CASE("modularity with a zero bottom is exactly atom-additivity") {
  std::mt19937_64 rng(333);
  std::uniform_int_distribution<int> num(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t atoms = 1 + trial % 4;  // up to 16 elements
    const std::uint64_t n = std::uint64_t{1} << atoms;
    std::vector<Rational> t(n);
    if (trial % 2) {
      // additive from random atom weights, then maybe perturbed
      std::vector<Rational> w(atoms);
      for (auto& x : w) x = Rational(num(rng), 4);
      for (std::uint64_t mask = 0; mask < n; ++mask)
        for (std::size_t b = 0; b < atoms; ++b)
          if ((mask >> b) & 1) t[mask] += w[b];
      if (trial % 4 == 1) t[n - 1] += Rational(1, 7);
    } else {
      for (auto& x : t) x = Rational(num(rng), 4);
    }

    bool modular = t[0] == 0;
    for (std::uint64_t u = 0; modular && u < n; ++u)
      for (std::uint64_t w = u; modular && w < n; ++w)
        if (t[u | w] + t[u & w] != t[u] + t[w]) modular = false;

    bool additive = true;
    for (std::uint64_t mask = 0; additive && mask < n; ++mask) {
      Rational sum = 0;
      for (std::size_t b = 0; b < atoms; ++b)
        if ((mask >> b) & 1) sum += t[std::uint64_t{1} << b];
      if (t[mask] != sum) additive = false;
    }
    CHECK(modular == additive);
  }
}

TEST_CASE("naturality of the induced family matches non-signalling exactly") {
  std::mt19937_64 rng(444);
  std::uniform_int_distribution<int> num(0, 6);
  auto b = BoxPresentation::pr();
  for (int trial = 0; trial < 60; ++trial) {
    // random normalized rows; even trials get an extra perturbation that
    // usually introduces signalling
    BoxState s = empty_state_shape(b);
    for (auto& row : s.table) {
      Rational total = 0;
      for (auto& p : row) {
        p = num(rng);
        total += p;
      }
      if (total == 0) {
        row[0] = 1;
        total = 1;
      }
      for (auto& p : row) p /= total;
    }
    auto state_report = validate_state(s);
    auto v = valuation_from_maximal_rows(s);
    auto val_report = validate_valuation(v);
    const bool signalling = has_clause(state_report, "signalling");
    const bool unnatural = has_clause(val_report, "naturality");
    CHECK(signalling == unnatural);
  }
}
