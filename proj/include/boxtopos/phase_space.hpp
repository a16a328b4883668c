#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "boxtopos/logic_diagram.hpp"
#include "boxtopos/poset.hpp"

namespace boxtopos {

inline std::string point_id(const ContextId& c, const std::string& atom) {
  return c + "|" + atom;
}

// The external phase space of a diagram: one point per (context, atom) pair,
// ordered by refinement — (c',x') <= (c,x) iff c' <= c and the presheaf map
// sends x to x'. Projection onto the context poset is isotone by
// construction.
struct PhaseSpace {
  FinitePoset points;
  FinitePoset contexts;
  // aligned with points.elements(): (context index, atom index)
  std::vector<std::pair<std::size_t, std::size_t>> fiber;

  std::size_t point_index(const ContextId& c, const std::string& atom) const {
    return points.index_of(point_id(c, atom));
  }
  std::size_t context_of(std::size_t point) const {
    return fiber[point].first;
  }

  IsotoneMap projection() const {
    std::vector<std::size_t> idx(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) idx[i] = fiber[i].first;
    return IsotoneMap(points, contexts, std::move(idx));
  }
};

inline PhaseSpace phase_space(const LogicDiagram& d) {
  const auto& ctx = d.contexts();
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (const auto& atom : d.algebra(i).atom_ids())
      ids.push_back(point_id(ctx.id_of(i), atom));

  std::vector<std::pair<std::string, std::string>> rel;
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::size_t j = 0; j < ctx.size(); ++j) {
      if (!ctx.leq(i, j)) continue;
      const auto& dual = d.dual(i, j);
      for (std::size_t a = 0; a < dual.size(); ++a)
        rel.emplace_back(
            point_id(ctx.id_of(i), d.algebra(i).atom_ids()[dual[a]]),
            point_id(ctx.id_of(j), d.algebra(j).atom_ids()[a]));
    }

  PhaseSpace ps;
  ps.points = FinitePoset::from_relation(std::move(ids), rel);
  ps.contexts = ctx;
  ps.fiber.resize(ps.points.size());
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::size_t a = 0; a < d.algebra(i).n_atoms(); ++a)
      ps.fiber[ps.points.index_of(
          point_id(ctx.id_of(i), d.algebra(i).atom_ids()[a]))] = {i, a};
  return ps;
}

// The frame of opens of the phase space. Materializing all opens is capped;
// the frame homomorphism from O(contexts) below needs no cap.
inline AlexandrovFrame external_frame(const PhaseSpace& ps,
                                      const Config& cfg = {}) {
  return all_upper_sets(ps.points, cfg);
}

// The frame homomorphism O(contexts) -> O(points): an upper set of contexts
// goes to its preimage under the projection.
inline UpperSet context_preimage(const PhaseSpace& ps, const UpperSet& u) {
  if (!(u.carrier == ps.contexts))
    throw InputError("context_preimage: upper set is not over the context poset");
  DynBitset m(ps.points.size());
  for (std::size_t p = 0; p < ps.points.size(); ++p)
    if (u.members.test(ps.fiber[p].first)) m.set(p);
  return UpperSet{ps.points, std::move(m)};
}

// A stage-c section of the internal ideal completion: one algebra element
// per context above c, monotone under transitions. With all algebras finite
// every ideal is principal, so this is the whole of Idl L at stage c.
struct CompatibleSection {
  ContextId base;
  std::map<ContextId, std::uint64_t> values;

  bool operator==(const CompatibleSection& o) const {
    return base == o.base && values == o.values;
  }
};

inline ValidationReport check_section(const LogicDiagram& d,
                                      const CompatibleSection& s) {
  ValidationReport report;
  const auto& ctx = d.contexts();
  const std::size_t base = ctx.index_of(s.base);
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (!ctx.leq(base, i)) continue;
    auto it = s.values.find(ctx.id_of(i));
    if (it == s.values.end()) {
      report.fail("section has no value at '" + ctx.id_of(i) + "'");
      continue;
    }
    if (it->second > d.algebra(i).top())
      report.fail("section value at '" + ctx.id_of(i) + "' is out of range");
  }
  if (!report.ok) return report;
  for (const auto& [cid, extra] : s.values)
    if (!ctx.leq(base, ctx.index_of(cid)))
      report.fail("section assigns a value outside the up-set, at '" + cid +
                  "'");
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::size_t j = 0; j < ctx.size(); ++j) {
      if (!ctx.leq(base, i) || i == j || !ctx.leq(i, j)) continue;
      const std::uint64_t lower = d.transition(i, j, s.values.at(ctx.id_of(i)));
      if (!FiniteBooleanAlgebra::leq(lower, s.values.at(ctx.id_of(j))))
        report.fail("compatibility fails from '" + ctx.id_of(i) + "' to '" +
                    ctx.id_of(j) + "'");
    }
  return report;
}

// Pointwise order on sections at a common stage.
inline bool section_leq(const CompatibleSection& a, const CompatibleSection& b) {
  if (a.base != b.base || a.values.size() != b.values.size()) return false;
  for (const auto& [cid, mask] : a.values)
    if (!FiniteBooleanAlgebra::leq(mask, b.values.at(cid))) return false;
  return true;
}

// All sections at stage c, by backtracking over the contexts above c in a
// linear extension: each value must contain the transition images of the
// values already chosen below it.
inline std::vector<CompatibleSection> sections_at(const LogicDiagram& d,
                                                  const ContextId& c,
                                                  const Config& cfg = {}) {
  const auto& ctx = d.contexts();
  const std::size_t base = ctx.index_of(c);

  std::vector<std::size_t> above;  // in topological order
  for (std::size_t i : ctx.topological_order())
    if (ctx.leq(base, i)) above.push_back(i);

  std::size_t restricted_points = 0;
  for (std::size_t i : above) restricted_points += d.algebra(i).n_atoms();
  if (restricted_points > cfg.elements_cap)
    throw ResourceError("sections_at: " + std::to_string(restricted_points) +
                        " points above stage '" + c +
                        "', enumeration cap is " +
                        std::to_string(cfg.elements_cap));

  std::vector<CompatibleSection> out;
  std::vector<std::uint64_t> chosen(above.size());
  auto recurse = [&](auto&& self, std::size_t step) -> void {
    if (step == above.size()) {
      CompatibleSection s;
      s.base = c;
      for (std::size_t k = 0; k < above.size(); ++k)
        s.values[ctx.id_of(above[k])] = chosen[k];
      out.push_back(std::move(s));
      return;
    }
    const std::size_t j = above[step];
    std::uint64_t lower = 0;
    for (std::size_t k = 0; k < step; ++k)
      if (above[k] != j && ctx.leq(above[k], j))
        lower |= d.transition(above[k], j, chosen[k]);
    // supersets of `lower`: lower | t for t running over subsets of the rest
    const std::uint64_t rest = d.algebra(j).top() & ~lower;
    std::uint64_t t = 0;
    while (true) {
      chosen[step] = lower | t;
      self(self, step + 1);
      if (t == rest) break;
      t = (t - rest) & rest;  // next subset of rest
    }
  };
  recurse(recurse, 0);

  std::sort(out.begin(), out.end(),
            [](const CompatibleSection& a, const CompatibleSection& b) {
              return a.values < b.values;
            });
  return out;
}

// The points of the restricted phase space a section selects: its fibers.
// Sections at stage c correspond exactly to upper sets of the part of the
// phase space above c, and at stage bottom to opens of the external frame.
inline UpperSet section_points(const PhaseSpace& ps, const LogicDiagram& d,
                               const CompatibleSection& s) {
  const auto& ctx = d.contexts();
  const std::size_t base = ctx.index_of(s.base);
  DynBitset m(ps.points.size());
  for (std::size_t p = 0; p < ps.points.size(); ++p) {
    const auto [ci, atom] = ps.fiber[p];
    if (!ctx.leq(base, ci)) continue;
    if ((s.values.at(ctx.id_of(ci)) >> atom) & 1) m.set(p);
  }
  return UpperSet{ps.points, std::move(m)};
}

// The lift of the induced context map to phase spaces for a box morphism
// m : S'/I' -> S/I, running X_{S/I} -> X_{S'/I'}: a point (c, x) goes to the
// pulled-back context with the composed outcome.
inline IsotoneMap phase_space_map(const BoxMorphism& m) {
  auto report = validate_box_morphism(m);
  if (!report.ok)
    throw InputError("phase_space_map needs a valid morphism: " +
                     report.diagnostics.front());
  auto from = phase_space(LogicDiagram::from_box(m.target));
  auto to = phase_space(LogicDiagram::from_box(m.source));
  auto phi = induced_context_map(m);

  std::vector<std::size_t> idx(from.points.size());
  for (std::size_t p = 0; p < from.points.size(); ++p) {
    const auto [ci, atom] = from.fiber[p];
    const ContextId target_ctx = from.contexts.id_of(ci);
    const auto target_qs = context_questions(target_ctx);
    const ContextId source_ctx = phi.apply(target_ctx);
    const auto source_qs = context_questions(source_ctx);
    std::uint64_t a = 0;
    for (std::size_t k = 0; k < source_qs.size(); ++k) {
      const auto& image_q = m.question_map.at(source_qs[k]);
      const std::size_t pos = static_cast<std::size_t>(
          std::find(target_qs.begin(), target_qs.end(), image_q) -
          target_qs.begin());
      a |= static_cast<std::uint64_t>(outcome_bit(atom, pos, target_qs.size()))
           << (source_qs.size() - 1 - k);
    }
    idx[p] = to.points.index_of(
        point_id(source_ctx, outcome_word(a, source_qs.size())));
  }
  return IsotoneMap(from.points, to.points, std::move(idx));
}

// Whether the phase space of b1 + b2 is, over the product of the context
// posets, the product of the two phase spaces via the canonical pairing
// (restrict the context and outcome to each side).
inline bool check_product_phase_space(const BoxPresentation& b1,
                                      const BoxPresentation& b2) {
  auto cp = coproduct(b1, b2);
  auto x = phase_space(LogicDiagram::from_box(cp.presentation));
  auto x1 = phase_space(LogicDiagram::from_box(b1));
  auto x2 = phase_space(LogicDiagram::from_box(b2));
  auto prod = poset_product(x1.points, x2.points);
  if (x.points.size() != prod.poset.size()) return false;

  auto f1 = phase_space_map(cp.left_inclusion);
  auto f2 = phase_space_map(cp.right_inclusion);
  std::vector<std::size_t> pairing(x.points.size());
  std::vector<bool> hit(prod.poset.size(), false);
  for (std::size_t p = 0; p < x.points.size(); ++p) {
    pairing[p] = prod.index_of_pair(f1.apply_index(p), f2.apply_index(p));
    if (hit[pairing[p]]) return false;  // not injective
    hit[pairing[p]] = true;
  }
  for (std::size_t p = 0; p < x.points.size(); ++p)
    for (std::size_t q = 0; q < x.points.size(); ++q)
      if (x.points.leq(p, q) != prod.poset.leq(pairing[p], pairing[q]))
        return false;

  // the pairing lives over the product of the context posets: projecting a
  // factor point gives the induced context of the original point's context
  auto phi1 = induced_context_map(cp.left_inclusion);
  auto phi2 = induced_context_map(cp.right_inclusion);
  for (std::size_t p = 0; p < x.points.size(); ++p) {
    const std::size_t c = x.fiber[p].first;
    if (x1.fiber[f1.apply_index(p)].first != phi1.apply_index(c)) return false;
    if (x2.fiber[f2.apply_index(p)].first != phi2.apply_index(c)) return false;
  }
  return true;
}

}  // namespace boxtopos
