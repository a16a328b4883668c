#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "boxtopos/logic_diagram.hpp"
#include "boxtopos/phase_space.hpp"
#include "boxtopos/rational.hpp"
#include "boxtopos/states.hpp"

namespace boxtopos {

// A lower real at stage c: an isotone [0,1]-valued assignment on the up-set
// of c. Constant assignments are the Dedekind reals.
struct LowerRealAt {
  ContextId stage;
  std::map<ContextId, Rational> values;

  bool is_constant() const {
    for (const auto& [c, v] : values)
      if (v != values.begin()->second) return false;
    return true;
  }

  bool operator==(const LowerRealAt& o) const {
    return stage == o.stage && values == o.values;
  }
};

inline ValidationReport check_lower_real(const LogicDiagram& d,
                                         const LowerRealAt& r) {
  ValidationReport report;
  const auto& ctx = d.contexts();
  const std::size_t base = ctx.index_of(r.stage);
  for (std::size_t i = 0; i < ctx.size(); ++i)
    if (ctx.leq(base, i) && !r.values.count(ctx.id_of(i)))
      report.fail("lower real at '" + r.stage + "' has no value at '" +
                  ctx.id_of(i) + "'");
  if (!report.ok) return report;
  for (const auto& [c, v] : r.values) {
    if (!ctx.leq(base, ctx.index_of(c)))
      report.fail("lower real at '" + r.stage + "' has a value outside ↑stage");
    if (v < 0 || v > 1)
      report.fail("lower real value " + to_string(v) + " at '" + c +
                  "' is outside [0,1]");
  }
  for (const auto& [c1, v1] : r.values)
    for (const auto& [c2, v2] : r.values)
      if (ctx.leq(ctx.index_of(c1), ctx.index_of(c2)) && v1 > v2)
        report.fail("lower real not isotone: " + to_string(v1) + " at '" + c1 +
                    "' exceeds " + to_string(v2) + " at '" + c2 + "'");
  return report;
}

// An internal probability valuation with Dedekind-constant values: one
// rational per algebra element per context. On a Boolean diagram every
// lower-real-valued valuation collapses to this form (the complement forces
// both cut halves constant), which is what keeps the state correspondence
// exact.
struct InternalValuation {
  LogicDiagram diagram;
  std::vector<std::vector<Rational>> tables;  // [context index][element mask]

  const Rational& value(std::size_t ci, std::uint64_t mask) const {
    return tables[ci][mask];
  }
  const Rational& value(const ContextId& c, std::uint64_t mask) const {
    return tables[diagram.contexts().index_of(c)][mask];
  }
};

namespace detail {

inline void require_tables_fit(const LogicDiagram& d, const Config& cfg) {
  for (std::size_t i = 0; i < d.contexts().size(); ++i)
    if (d.algebra(i).n_atoms() > cfg.algebra_atoms_cap)
      throw ResourceError("valuation table at '" + d.contexts().id_of(i) +
                          "' would need 2^" +
                          std::to_string(d.algebra(i).n_atoms()) +
                          " entries, atom cap is " +
                          std::to_string(cfg.algebra_atoms_cap));
}

// Expand atom weights into the full element table by subset sums.
inline std::vector<Rational> additive_table(const std::vector<Rational>& atom_w) {
  std::vector<Rational> t(std::uint64_t{1} << atom_w.size(), Rational(0));
  for (std::uint64_t mask = 1; mask < t.size(); ++mask) {
    const std::uint64_t low = mask & (~mask + 1);
    std::size_t bit = 0;
    while (!((low >> bit) & 1)) ++bit;
    t[mask] = t[mask & (mask - 1)] + atom_w[bit];
  }
  return t;
}

}  // namespace detail

// Build the per-context rows of a candidate valuation from a raw table,
// routing every non-maximal context through its first maximal refinement.
// No validation: a signalling table produces a family whose naturality
// clause fails, which is exactly what the agreement tests need.
inline InternalValuation valuation_from_maximal_rows(const BoxState& s,
                                                     const Config& cfg = {}) {
  InternalValuation v;
  v.diagram = LogicDiagram::from_box(s.presentation);
  detail::require_tables_fit(v.diagram, cfg);
  const auto& ctx = v.diagram.contexts();
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto c_qs = context_questions(ctx.id_of(i));
    std::vector<Rational> atom_w;
    bool routed = false;
    for (const auto& d : s.maximal) {
      if (!ctx.leq(ctx.id_of(i), d)) continue;
      for (std::uint64_t a = 0; a < (std::uint64_t{1} << c_qs.size()); ++a)
        atom_w.push_back(detail::marginal_via(s, c_qs, a, d));
      routed = true;
      break;
    }
    if (!routed)
      throw InputError("context '" + ctx.id_of(i) +
                       "' has no maximal refinement in the table");
    v.tables.push_back(detail::additive_table(atom_w));
  }
  return v;
}

// The forward half of the state correspondence: P_c(u) is the summed common
// marginal over the atoms of u. Refuses invalid states, where the marginals
// would be ill-defined.
inline InternalValuation state_to_valuation(const BoxState& s,
                                            const Config& cfg = {}) {
  auto report = validate_state(s);
  if (!report.ok)
    throw InputError("state_to_valuation needs a valid state: " +
                     report.diagnostics.front());
  return valuation_from_maximal_rows(s, cfg);
}

// All four clauses, each tagged in the diagnostics. Exhaustive whenever the
// algebra has at most 2^8 elements; sampled with the configured seed above
// that.
inline ValidationReport validate_valuation(const InternalValuation& v,
                                           const Config& cfg = {}) {
  ValidationReport report;
  const auto& ctx = v.diagram.contexts();
  if (v.tables.size() != ctx.size()) {
    report.fail("valuation has " + std::to_string(v.tables.size()) +
                " rows for " + std::to_string(ctx.size()) + " contexts");
    return report;
  }
  for (std::size_t i = 0; i < ctx.size(); ++i)
    if (v.tables[i].size() != v.diagram.algebra(i).element_count()) {
      report.fail("valuation row at '" + ctx.id_of(i) + "' has wrong size");
      return report;
    }

  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto& t = v.tables[i];
    const auto& alg = v.diagram.algebra(i);
    const std::uint64_t top = alg.top();

    if (t[0] != 0)
      report.fail("normalization fails at '" + ctx.id_of(i) + "': P(0) = " +
                  to_string(t[0]));
    if (t[top] != 1)
      report.fail("normalization fails at '" + ctx.id_of(i) + "': P(1) = " +
                  to_string(t[top]));

    for (std::uint64_t u = 0; u < t.size(); ++u)
      if (t[u] < 0 || t[u] > 1)
        report.fail("range fails at '" + ctx.id_of(i) + "': P(" +
                    std::to_string(u) + ") = " + to_string(t[u]));

    // isotony along single-atom steps implies isotony for all pairs
    for (std::uint64_t u = 0; u < t.size(); ++u)
      for (std::size_t bit = 0; bit < alg.n_atoms(); ++bit) {
        if ((u >> bit) & 1) continue;
        const std::uint64_t w = u | (std::uint64_t{1} << bit);
        if (t[u] > t[w])
          report.fail("isotony fails at '" + ctx.id_of(i) + "': P of " +
                      std::to_string(u) + " exceeds P of " + std::to_string(w));
      }

    if (t.size() <= 256) {
      for (std::uint64_t u = 0; u < t.size(); ++u)
        for (std::uint64_t w = u; w < t.size(); ++w)
          if (t[u | w] + t[u & w] != t[u] + t[w])
            report.fail("modularity fails at '" + ctx.id_of(i) + "' on (" +
                        std::to_string(u) + ", " + std::to_string(w) + ")");
    } else {
      std::uniform_int_distribution<std::uint64_t> pick(0, t.size() - 1);
      for (int trial = 0; trial < 4096; ++trial) {
        const std::uint64_t u = pick(rng), w = pick(rng);
        if (t[u | w] + t[u & w] != t[u] + t[w])
          report.fail("modularity fails at '" + ctx.id_of(i) + "' on (" +
                      std::to_string(u) + ", " + std::to_string(w) + ")");
      }
    }
  }

  // naturality: transporting an element along a transition keeps its value
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::size_t j = 0; j < ctx.size(); ++j) {
      if (i == j || !ctx.leq(i, j)) continue;
      const auto& t = v.tables[i];
      if (t.size() <= 256) {
        for (std::uint64_t u = 0; u < t.size(); ++u)
          if (v.tables[j][v.diagram.transition(i, j, u)] != t[u])
            report.fail("naturality fails from '" + ctx.id_of(i) + "' to '" +
                        ctx.id_of(j) + "' at element " + std::to_string(u) +
                        ": " + to_string(t[u]) + " vs " +
                        to_string(v.tables[j][v.diagram.transition(i, j, u)]));
      } else {
        std::uniform_int_distribution<std::uint64_t> pick(0, t.size() - 1);
        for (int trial = 0; trial < 4096; ++trial) {
          const std::uint64_t u = pick(rng);
          if (v.tables[j][v.diagram.transition(i, j, u)] != t[u])
            report.fail("naturality fails from '" + ctx.id_of(i) + "' to '" +
                        ctx.id_of(j) + "' at element " + std::to_string(u));
        }
      }
    }
  return report;
}

// The inverse half of the correspondence: read the maximal-context atom
// values back off as a table. Exact inverse of state_to_valuation.
inline BoxState valuation_to_state(const InternalValuation& v,
                                   const Config& cfg = {}) {
  if (!v.diagram.origin_box())
    throw InputError(
        "valuation_to_state: diagram does not come from a box presentation");
  auto report = validate_valuation(v, cfg);
  if (!report.ok)
    throw InputError("valuation_to_state needs a valid valuation: " +
                     report.diagnostics.front());
  BoxState s = empty_state_shape(*v.diagram.origin_box());
  const auto& ctx = v.diagram.contexts();
  for (std::size_t mi = 0; mi < s.maximal.size(); ++mi) {
    const std::size_t ci = ctx.index_of(s.maximal[mi]);
    for (std::uint64_t a = 0; a < s.table[mi].size(); ++a)
      s.table[mi][a] = v.value(ci, std::uint64_t{1} << a);
  }
  return s;
}

// A valuation on the colimit carrier: one value per class, restricting to a
// probability valuation along every injection.
struct ColimitValuation {
  ColimitPresentation colim;
  std::vector<Rational> rho;
};

// Descend a valuation to the colimit. Well-defined exactly when the family
// is natural; a conflict is reported with the two clashing (context,
// element) members.
inline ColimitValuation valuation_to_colimit(const InternalValuation& v,
                                             const Config& cfg = {}) {
  ColimitValuation out;
  out.colim = colimit(v.diagram, cfg);
  out.rho.assign(out.colim.n_classes, Rational(0));
  std::vector<std::optional<std::pair<std::size_t, std::uint64_t>>> witness(
      out.colim.n_classes);
  const auto& ctx = v.diagram.contexts();
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::uint64_t u = 0; u < v.tables[i].size(); ++u) {
      const std::uint32_t cls = out.colim.inject(i, u);
      if (!witness[cls]) {
        witness[cls] = {i, u};
        out.rho[cls] = v.tables[i][u];
      } else if (out.rho[cls] != v.tables[i][u]) {
        const auto [wi, wu] = *witness[cls];
        throw InputError(
            "descent to the colimit fails: ('" + ctx.id_of(wi) + "', " +
            std::to_string(wu) + ") has value " + to_string(out.rho[cls]) +
            " but ('" + ctx.id_of(i) + "', " + std::to_string(u) +
            ") has value " + to_string(v.tables[i][u]));
      }
    }
  return out;
}

// A frame valuation: evaluates a stage-c section of Idl L to a lower real at
// c. Backed by the lattice valuation through the extension formula — in the
// finite case every ideal is principal and the directed supremum collapses
// to evaluation at the generator, stage by stage.
struct FrameValuation {
  InternalValuation base;

  LowerRealAt value_at(const CompatibleSection& s) const {
    auto report = check_section(base.diagram, s);
    if (!report.ok)
      throw InputError("frame valuation applied to a non-section: " +
                       report.diagnostics.front());
    LowerRealAt r;
    r.stage = s.base;
    for (const auto& [c, mask] : s.values)
      r.values[c] = base.value(c, mask);
    return r;
  }
};

inline FrameValuation lattice_to_frame_valuation(const InternalValuation& v) {
  return FrameValuation{v};
}

// The principal section at stage c generated by an element: its transition
// images upward. Restricting a frame valuation along these recovers the
// lattice valuation.
inline CompatibleSection principal_section(const LogicDiagram& d,
                                           const ContextId& c,
                                           std::uint64_t mask) {
  const auto& ctx = d.contexts();
  const std::size_t base = ctx.index_of(c);
  CompatibleSection s;
  s.base = c;
  for (std::size_t i = 0; i < ctx.size(); ++i)
    if (ctx.leq(base, i))
      s.values[ctx.id_of(i)] = d.transition(base, i, mask);
  return s;
}

inline InternalValuation frame_to_lattice_valuation(const FrameValuation& fv) {
  InternalValuation v;
  v.diagram = fv.base.diagram;
  const auto& ctx = v.diagram.contexts();
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    std::vector<Rational> row(fv.base.tables[i].size());
    for (std::uint64_t u = 0; u < row.size(); ++u) {
      const auto r =
          fv.value_at(principal_section(v.diagram, ctx.id_of(i), u));
      row[u] = r.values.at(ctx.id_of(i));
    }
    v.tables.push_back(std::move(row));
  }
  return v;
}

// A candidate valuation with honest lower-real values, one per context and
// element. What a morphism L -> [0,1] with lower-real codomain unpacks to.
struct LowerValuation {
  LogicDiagram diagram;
  std::vector<std::vector<LowerRealAt>> values;  // [context index][mask]
};

inline LowerValuation lift_constant(const InternalValuation& v) {
  LowerValuation lv;
  lv.diagram = v.diagram;
  const auto& ctx = lv.diagram.contexts();
  lv.values.resize(ctx.size());
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    lv.values[i].resize(v.tables[i].size());
    for (std::uint64_t u = 0; u < v.tables[i].size(); ++u) {
      LowerRealAt r;
      r.stage = ctx.id_of(i);
      for (std::size_t j = 0; j < ctx.size(); ++j)
        if (ctx.leq(i, j)) r.values[ctx.id_of(j)] = v.tables[i][u];
      lv.values[i][u] = std::move(r);
    }
  }
  return lv;
}

struct ConstancyReport {
  bool preconditions_ok = true;
  std::vector<std::string> violations;
  bool constant = true;

  void fail(std::string message) {
    preconditions_ok = false;
    violations.push_back(std::move(message));
  }
};

// On a Boolean diagram, a normalized modular isotone family of lower reals
// cannot help being constant: the complement's value is forced to be both
// isotone and antitone. This checks the preconditions and the constancy
// separately, so malformed inputs are diagnosed rather than mislabeled.
inline ConstancyReport check_dedekind_constancy(const LowerValuation& lv) {
  ConstancyReport rep;
  const auto& ctx = lv.diagram.contexts();

  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto& alg = lv.diagram.algebra(i);
    if (lv.values[i].size() != alg.element_count()) {
      rep.fail("row at '" + ctx.id_of(i) + "' has wrong size");
      return rep;
    }
    for (std::uint64_t u = 0; u < lv.values[i].size(); ++u) {
      const auto& r = lv.values[i][u];
      if (r.stage != ctx.id_of(i)) {
        rep.fail("value at '" + ctx.id_of(i) + "' carries stage '" + r.stage +
                 "'");
        continue;
      }
      auto lr = check_lower_real(lv.diagram, r);
      if (!lr.ok)
        rep.fail("lower-real precondition fails at ('" + ctx.id_of(i) + "', " +
                 std::to_string(u) + "): " + lr.diagnostics.front());
    }
  }
  if (!rep.preconditions_ok) return rep;

  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto& alg = lv.diagram.algebra(i);
    const auto& row = lv.values[i];
    for (const auto& [c, v0] : row[0].values)
      if (v0 != 0)
        rep.fail("normalization precondition fails at '" + ctx.id_of(i) +
                 "': P(0) is " + to_string(v0) + " at stage '" + c + "'");
    for (const auto& [c, v1] : row[alg.top()].values)
      if (v1 != 1)
        rep.fail("normalization precondition fails at '" + ctx.id_of(i) +
                 "': P(1) is " + to_string(v1) + " at stage '" + c + "'");

    for (std::uint64_t u = 0; u < row.size(); ++u)
      for (std::uint64_t w = u; w < row.size(); ++w)
        for (const auto& [c, vu] : row[u].values)
          if (row[u | w].values.at(c) + row[u & w].values.at(c) !=
              vu + row[w].values.at(c))
            rep.fail("modularity precondition fails at '" + ctx.id_of(i) +
                     "' on (" + std::to_string(u) + ", " + std::to_string(w) +
                     ") at stage '" + c + "'");

    for (std::uint64_t u = 0; u < row.size(); ++u)
      for (std::size_t bit = 0; bit < alg.n_atoms(); ++bit) {
        if ((u >> bit) & 1) continue;
        const std::uint64_t w = u | (std::uint64_t{1} << bit);
        for (const auto& [c, vu] : row[u].values)
          if (vu > row[w].values.at(c))
            rep.fail("isotony precondition fails at '" + ctx.id_of(i) +
                     "' between " + std::to_string(u) + " and " +
                     std::to_string(w));
      }
  }

  // naturality: the value of a transported element is the restricted value
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::size_t j = 0; j < ctx.size(); ++j) {
      if (i == j || !ctx.leq(i, j)) continue;
      for (std::uint64_t u = 0; u < lv.values[i].size(); ++u) {
        const auto& transported =
            lv.values[j][lv.diagram.transition(i, j, u)];
        for (const auto& [c, v] : transported.values)
          if (v != lv.values[i][u].values.at(c))
            rep.fail("naturality precondition fails from '" + ctx.id_of(i) +
                     "' to '" + ctx.id_of(j) + "' at element " +
                     std::to_string(u));
      }
    }

  for (const auto& row : lv.values)
    for (const auto& r : row)
      if (!r.is_constant()) rep.constant = false;
  return rep;
}

}  // namespace boxtopos
