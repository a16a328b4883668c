#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "boxtopos/phase_space.hpp"
#include "boxtopos/polytope.hpp"
#include "boxtopos/states.hpp"
#include "boxtopos/valuations.hpp"

namespace boxtopos {

using Json = nlohmann::json;

// Rational rendering. Exact "num/den" strings by default; --approx switches
// to 12-significant-digit decimals for display.
struct Render {
  bool approx = false;
  Json rat(const Rational& r) const {
    return approx ? Json(to_decimal_string(r)) : Json(to_string(r));
  }
};

inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw InputError("expected a rational as \"num/den\" string or integer, got " +
                   j.dump());
}

// ---- posets ----

inline Json poset_to_json(const FinitePoset& p) {
  Json j;
  j["elements"] = p.elements();
  Json rel = Json::array();
  for (const auto& [a, b] : p.relation_pairs()) rel.push_back({a, b});
  j["leq"] = rel;
  return j;
}

inline FinitePoset poset_from_json(const Json& j) {
  if (!j.contains("elements") || !j.contains("leq"))
    throw InputError("poset JSON needs \"elements\" and \"leq\"");
  std::vector<std::string> elements =
      j.at("elements").get<std::vector<std::string>>();
  std::vector<std::pair<std::string, std::string>> rel;
  for (const auto& pair : j.at("leq")) {
    if (!pair.is_array() || pair.size() != 2)
      throw InputError("poset \"leq\" entries must be [a, b] pairs");
    rel.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
  }
  return FinitePoset::from_relation(std::move(elements), rel);
}

// ---- box presentations and morphisms ----

inline Json box_to_json(const BoxPresentation& b) {
  Json j;
  j["parties"] = b.parties();
  Json qs = Json::array();
  for (const auto& q : b.questions())
    qs.push_back({{"id", q}, {"party", b.party_of(q)}});
  j["questions"] = qs;
  return j;
}

inline BoxPresentation box_from_json(const Json& j) {
  if (!j.contains("parties") || !j.contains("questions"))
    throw InputError("presentation JSON needs \"parties\" and \"questions\"");
  std::vector<std::pair<std::string, std::string>> qp;
  for (const auto& q : j.at("questions"))
    qp.emplace_back(q.at("id").get<std::string>(),
                    q.at("party").get<std::string>());
  return BoxPresentation::make(j.at("parties").get<std::vector<std::string>>(),
                               qp);
}

inline Json morphism_to_json(const BoxMorphism& m) {
  Json j;
  j["source"] = box_to_json(m.source);
  j["target"] = box_to_json(m.target);
  j["question_map"] = m.question_map;
  j["party_map"] = m.party_map;
  return j;
}

inline BoxMorphism morphism_from_json(const Json& j) {
  BoxMorphism m;
  m.source = box_from_json(j.at("source"));
  m.target = box_from_json(j.at("target"));
  m.question_map =
      j.at("question_map").get<std::map<std::string, std::string>>();
  m.party_map = j.at("party_map").get<std::map<std::string, std::string>>();
  return m;
}

// ---- states and functionals ----

inline Json table_to_json(const std::vector<ContextId>& maximal,
                          const std::vector<std::vector<Rational>>& rows,
                          const Render& render) {
  Json t = Json::object();
  for (std::size_t mi = 0; mi < maximal.size(); ++mi) {
    const std::size_t width = context_questions(maximal[mi]).size();
    Json row = Json::object();
    for (std::uint64_t a = 0; a < rows[mi].size(); ++a)
      row[outcome_word(a, width)] = render.rat(rows[mi][a]);
    t[maximal[mi]] = row;
  }
  return t;
}

inline std::vector<std::vector<Rational>> table_from_json(
    const BoxState& shape, const Json& t) {
  std::vector<std::vector<Rational>> rows = shape.table;
  for (std::size_t mi = 0; mi < shape.maximal.size(); ++mi) {
    if (!t.contains(shape.maximal[mi]))
      throw InputError("table is missing the maximal context '" +
                       shape.maximal[mi] + "'");
    const Json& row = t.at(shape.maximal[mi]);
    const std::size_t width = context_questions(shape.maximal[mi]).size();
    for (std::uint64_t a = 0; a < rows[mi].size(); ++a) {
      const std::string word = outcome_word(a, width);
      if (!row.contains(word))
        throw InputError("table row '" + shape.maximal[mi] +
                         "' is missing outcome '" + word + "'");
      rows[mi][a] = rational_from_json(row.at(word));
    }
  }
  return rows;
}

inline Json state_to_json(const BoxState& s, const Render& render = {}) {
  Json j;
  j["presentation"] = box_to_json(s.presentation);
  j["table"] = table_to_json(s.maximal, s.table, render);
  return j;
}

inline BoxState state_from_json(const Json& j) {
  if (!j.contains("presentation") || !j.contains("table"))
    throw InputError("state JSON needs \"presentation\" and \"table\"");
  BoxState s = empty_state_shape(box_from_json(j.at("presentation")));
  s.table = table_from_json(s, j.at("table"));
  return s;
}

inline Json functional_to_json(const BellFunctional& f,
                               const Render& render = {}) {
  Json j;
  j["presentation"] = box_to_json(f.presentation);
  j["coefficients"] = table_to_json(f.maximal, f.coefficients, render);
  return j;
}

inline BellFunctional functional_from_json(const Json& j) {
  if (!j.contains("presentation") || !j.contains("coefficients"))
    throw InputError(
        "functional JSON needs \"presentation\" and \"coefficients\"");
  BoxState shape = empty_state_shape(box_from_json(j.at("presentation")));
  BellFunctional f;
  f.presentation = shape.presentation;
  f.maximal = shape.maximal;
  f.coefficients = table_from_json(shape, j.at("coefficients"));
  return f;
}

// ---- valuations ----
// Mirrors the state schema; "rows" carries the per-context atom values for
// the non-maximal contexts and may be omitted, in which case they are
// recomputed from the maximal rows.

inline Json valuation_to_json(const InternalValuation& v,
                              const Render& render = {}) {
  if (!v.diagram.origin_box())
    throw InputError("only valuations over box diagrams serialize to JSON");
  Json j;
  j["presentation"] = box_to_json(*v.diagram.origin_box());
  const auto& ctx = v.diagram.contexts();
  const auto maximal = maximal_contexts(ctx);

  Json table = Json::object();
  Json rows = Json::object();
  for (std::size_t ci = 0; ci < ctx.size(); ++ci) {
    const auto& alg = v.diagram.algebra(ci);
    Json row = Json::object();
    for (std::size_t a = 0; a < alg.n_atoms(); ++a)
      row[alg.atom_ids()[a]] = render.rat(v.value(ci, alg.atom(a)));
    if (std::binary_search(maximal.begin(), maximal.end(), ctx.id_of(ci)))
      table[ctx.id_of(ci)] = row;
    else
      rows[ctx.id_of(ci)] = row;
  }
  j["table"] = table;
  j["rows"] = rows;
  return j;
}

inline InternalValuation valuation_from_json(const Json& j,
                                             const Config& cfg = {}) {
  if (!j.contains("presentation") || !j.contains("table"))
    throw InputError("valuation JSON needs \"presentation\" and \"table\"");
  BoxState s = empty_state_shape(box_from_json(j.at("presentation")));
  s.table = table_from_json(s, j.at("table"));
  InternalValuation v = valuation_from_maximal_rows(s, cfg);
  if (j.contains("rows")) {
    const auto& ctx = v.diagram.contexts();
    for (const auto& [cid, row] : j.at("rows").items()) {
      const std::size_t ci = ctx.index_of(cid);
      const auto& alg = v.diagram.algebra(ci);
      std::vector<Rational> atom_w(alg.n_atoms());
      for (std::size_t a = 0; a < alg.n_atoms(); ++a) {
        if (!row.contains(alg.atom_ids()[a]))
          throw InputError("valuation row '" + cid + "' is missing atom '" +
                           alg.atom_ids()[a] + "'");
        atom_w[a] = rational_from_json(row.at(alg.atom_ids()[a]));
      }
      v.tables[ci] = detail::additive_table(atom_w);
    }
  }
  return v;
}

// ---- general theories ----

inline LogicDiagram theory_from_json(const Json& j) {
  if (!j.contains("contexts") || !j.contains("algebras"))
    throw InputError("theory JSON needs \"contexts\" and \"algebras\"");
  FinitePoset contexts = poset_from_json(j.at("contexts"));
  std::map<ContextId, std::vector<std::string>> algebras;
  for (const auto& [cid, atoms] : j.at("algebras").items())
    algebras[cid] = atoms.get<std::vector<std::string>>();
  std::vector<TransitionSpec> transitions;
  if (j.contains("transitions"))
    for (const auto& t : j.at("transitions")) {
      TransitionSpec spec;
      spec.from = t.at("from").get<std::string>();
      spec.to = t.at("to").get<std::string>();
      for (const auto& [atom, images] : t.at("map").items())
        spec.atom_images[atom] = images.get<std::vector<std::string>>();
      transitions.push_back(std::move(spec));
    }
  return LogicDiagram::general_theory(std::move(contexts), algebras,
                                      transitions);
}

// Either a box presentation or a general theory, by schema sniffing.
inline LogicDiagram diagram_from_json(const Json& j) {
  if (j.contains("questions")) return LogicDiagram::from_box(box_from_json(j));
  if (j.contains("algebras")) return theory_from_json(j);
  throw InputError(
      "input is neither a presentation (\"questions\") nor a theory "
      "(\"algebras\")");
}

// ---- phase spaces ----

inline Json phase_space_to_json(const PhaseSpace& ps) {
  Json points = Json::array();
  for (std::size_t p = 0; p < ps.points.size(); ++p) {
    const ContextId c = ps.contexts.id_of(ps.fiber[p].first);
    const auto qs = context_questions(c);
    const std::string atom_id = ps.points.id_of(p).substr(c.size() + 1);
    Json point{{"id", ps.points.id_of(p)}, {"context", qs}};
    const bool binary_word =
        atom_id.size() == qs.size() &&
        atom_id.find_first_not_of("01") == std::string::npos;
    if (binary_word) {
      Json outcome = Json::object();
      for (std::size_t k = 0; k < qs.size(); ++k)
        outcome[qs[k]] = atom_id[k] - '0';
      point["outcome"] = outcome;
    } else {
      point["atom"] = atom_id;  // general theories: atoms are opaque ids
    }
    points.push_back(std::move(point));
  }
  Json rel = Json::array();
  for (const auto& [a, b] : ps.points.relation_pairs()) rel.push_back({a, b});
  return Json{{"points", points}, {"leq", rel}};
}

}  // namespace boxtopos
