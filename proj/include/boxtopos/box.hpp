#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "boxtopos/errors.hpp"
#include "boxtopos/poset.hpp"

namespace boxtopos {

// A box presentation: finitely many parties, each holding a finite set of
// binary questions. Both id lists are kept sorted; the fibration assigns each
// question to its party. Parties with no questions are legal and contribute
// nothing to the context poset.
class BoxPresentation {
public:
  BoxPresentation() = default;

  static BoxPresentation make(
      std::vector<std::string> parties,
      const std::vector<std::pair<std::string, std::string>>& question_party) {
    BoxPresentation b;
    std::sort(parties.begin(), parties.end());
    for (std::size_t i = 1; i < parties.size(); ++i)
      if (parties[i] == parties[i - 1])
        throw InputError("duplicate party id '" + parties[i] + "'");
    b.parties_ = std::move(parties);

    std::vector<std::pair<std::string, std::string>> qp = question_party;
    std::sort(qp.begin(), qp.end());
    for (std::size_t i = 0; i < qp.size(); ++i) {
      if (i > 0 && qp[i].first == qp[i - 1].first)
        throw InputError("duplicate question id '" + qp[i].first + "'");
      b.questions_.push_back(qp[i].first);
      b.fibration_.push_back(b.party_index(qp[i].second));
    }
    return b;
  }

  const std::vector<std::string>& parties() const { return parties_; }
  const std::vector<std::string>& questions() const { return questions_; }

  std::size_t party_index(const std::string& id) const {
    auto it = std::lower_bound(parties_.begin(), parties_.end(), id);
    if (it == parties_.end() || *it != id)
      throw InputError("unknown party id '" + id + "'");
    return static_cast<std::size_t>(it - parties_.begin());
  }

  std::size_t question_index(const std::string& id) const {
    auto it = std::lower_bound(questions_.begin(), questions_.end(), id);
    if (it == questions_.end() || *it != id)
      throw InputError("unknown question id '" + id + "'");
    return static_cast<std::size_t>(it - questions_.begin());
  }

  const std::string& party_of(const std::string& question) const {
    return parties_[fibration_[question_index(question)]];
  }

  std::vector<std::string> fiber(const std::string& party) const {
    const std::size_t pi = party_index(party);
    std::vector<std::string> out;
    for (std::size_t q = 0; q < questions_.size(); ++q)
      if (fibration_[q] == pi) out.push_back(questions_[q]);
    return out;
  }

  bool operator==(const BoxPresentation& o) const {
    return parties_ == o.parties_ && questions_ == o.questions_ &&
           fibration_ == o.fibration_;
  }

  // One party with two questions: the smallest interesting box world.
  static BoxPresentation gbit() {
    return make({"P"}, {{"q1", "P"}, {"q2", "P"}});
  }

  // Two parties with two questions each, the standard bipartite scenario.
  static BoxPresentation pr() {
    return make({"A", "B"},
                {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}, {"b2", "B"}});
  }

private:
  std::vector<std::string> parties_;
  std::vector<std::string> questions_;
  std::vector<std::size_t> fibration_;
};

// Contexts are identified by the comma-joined sorted list of their question
// ids; the empty context is the empty string.
using ContextId = std::string;

inline ContextId context_id(std::vector<std::string> questions) {
  std::sort(questions.begin(), questions.end());
  std::string out;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    if (i) out += ",";
    out += questions[i];
  }
  return out;
}

inline std::vector<std::string> context_questions(const ContextId& id) {
  std::vector<std::string> out;
  if (id.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = id.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(id.substr(start));
      break;
    }
    out.push_back(id.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

// A partial section: at most one question per party.
inline bool is_partial_section(const BoxPresentation& b,
                               const std::vector<std::string>& questions) {
  std::set<std::string> seen;
  for (const auto& q : questions) {
    if (!seen.insert(b.party_of(q)).second) return false;
  }
  return true;
}

// The poset of contexts of a presentation, ordered by inclusion. Enumerated
// party by party (skip, or pick one question); the empty context is always
// present.
inline FinitePoset contexts_of(const BoxPresentation& b) {
  std::vector<std::vector<std::string>> sections{{}};
  for (const auto& party : b.parties()) {
    const auto qs = b.fiber(party);
    std::vector<std::vector<std::string>> next;
    for (const auto& s : sections) {
      next.push_back(s);
      for (const auto& q : qs) {
        auto extended = s;
        extended.push_back(q);
        next.push_back(std::move(extended));
      }
    }
    sections = std::move(next);
  }

  std::vector<std::string> ids;
  std::vector<std::set<std::string>> as_sets;
  for (auto& s : sections) {
    as_sets.emplace_back(s.begin(), s.end());
    ids.push_back(context_id(std::move(s)));
  }
  std::vector<std::pair<std::string, std::string>> rel;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (i != j && std::includes(as_sets[j].begin(), as_sets[j].end(),
                                  as_sets[i].begin(), as_sets[i].end()))
        rel.emplace_back(ids[i], ids[j]);
  return FinitePoset::from_relation(std::move(ids), rel);
}

// Contexts with no strict refinement; states are tabulated on these.
inline std::vector<ContextId> maximal_contexts(const FinitePoset& contexts) {
  std::vector<ContextId> out;
  for (std::size_t i : contexts.maximal_elements())
    out.push_back(contexts.id_of(i));
  return out;
}

// A candidate morphism of box presentations, source S'/I' to target S/I.
// Validity (commuting square, per-fiber injectivity) is a separate check so
// that broken candidates can be constructed and diagnosed.
struct BoxMorphism {
  BoxPresentation source;
  BoxPresentation target;
  std::map<std::string, std::string> question_map;  // S' -> S
  std::map<std::string, std::string> party_map;     // I' -> I
};

inline ValidationReport validate_box_morphism(const BoxMorphism& m) {
  ValidationReport report;
  for (const auto& q : m.source.questions()) {
    auto it = m.question_map.find(q);
    if (it == m.question_map.end()) {
      report.fail("question_map missing '" + q + "'");
      continue;
    }
    if (!std::binary_search(m.target.questions().begin(),
                            m.target.questions().end(), it->second))
      report.fail("question_map sends '" + q + "' to unknown '" + it->second +
                  "'");
  }
  for (const auto& p : m.source.parties()) {
    auto it = m.party_map.find(p);
    if (it == m.party_map.end()) {
      report.fail("party_map missing '" + p + "'");
      continue;
    }
    if (!std::binary_search(m.target.parties().begin(),
                            m.target.parties().end(), it->second))
      report.fail("party_map sends '" + p + "' to unknown '" + it->second +
                  "'");
  }
  if (!report.ok) return report;

  for (const auto& q : m.source.questions()) {
    const auto& lhs = m.target.party_of(m.question_map.at(q));
    const auto& rhs = m.party_map.at(m.source.party_of(q));
    if (lhs != rhs)
      report.fail("square does not commute at question '" + q + "': " + lhs +
                  " vs " + rhs);
  }
  for (const auto& p : m.source.parties()) {
    std::map<std::string, std::string> images;
    for (const auto& q : m.source.fiber(p)) {
      auto [it, fresh] = images.emplace(m.question_map.at(q), q);
      if (!fresh)
        report.fail("fiber of party '" + p + "' not injective: '" + q +
                    "' and '" + it->second + "' both map to '" + it->first +
                    "'");
    }
  }
  return report;
}

inline BoxMorphism identity_morphism(const BoxPresentation& b) {
  BoxMorphism m{b, b, {}, {}};
  for (const auto& q : b.questions()) m.question_map[q] = q;
  for (const auto& p : b.parties()) m.party_map[p] = p;
  return m;
}

// outer after inner, for inner : A -> B and outer : B -> C.
inline BoxMorphism compose(const BoxMorphism& outer, const BoxMorphism& inner) {
  if (!(inner.target == outer.source))
    throw InputError("compose: inner target differs from outer source");
  BoxMorphism m{inner.source, outer.target, {}, {}};
  for (const auto& [q, mid] : inner.question_map)
    m.question_map[q] = outer.question_map.at(mid);
  for (const auto& [p, mid] : inner.party_map)
    m.party_map[p] = outer.party_map.at(mid);
  return m;
}

// Contravariantly induced map on context posets: a target context is pulled
// back along the question map. Per-fiber injectivity guarantees the preimage
// is again a partial section; the result is isotone by construction.
inline IsotoneMap induced_context_map(const BoxMorphism& m) {
  auto report = validate_box_morphism(m);
  if (!report.ok)
    throw InputError("induced_context_map needs a valid morphism: " +
                     report.diagnostics.front());
  FinitePoset from = contexts_of(m.target);
  FinitePoset to = contexts_of(m.source);
  std::vector<std::size_t> idx(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    const auto target_qs = context_questions(from.id_of(i));
    std::vector<std::string> preimage;
    for (const auto& [q, fq] : m.question_map)
      if (std::find(target_qs.begin(), target_qs.end(), fq) != target_qs.end())
        preimage.push_back(q);
    idx[i] = to.index_of(context_id(std::move(preimage)));
  }
  return IsotoneMap(std::move(from), std::move(to), std::move(idx));
}

struct BoxCoproduct {
  BoxPresentation presentation;
  BoxMorphism left_inclusion;
  BoxMorphism right_inclusion;
};

// Disjoint union of presentations. Ids are kept verbatim when already
// disjoint; on any collision every id is tagged with an "L."/"R." side
// prefix, which keeps the output deterministic.
inline BoxCoproduct coproduct(const BoxPresentation& b1,
                              const BoxPresentation& b2) {
  bool collision = false;
  for (const auto& p : b1.parties())
    if (std::binary_search(b2.parties().begin(), b2.parties().end(), p))
      collision = true;
  for (const auto& q : b1.questions())
    if (std::binary_search(b2.questions().begin(), b2.questions().end(), q))
      collision = true;

  auto tag = [&](const std::string& side, const std::string& id) {
    return collision ? side + "." + id : id;
  };

  std::vector<std::string> parties;
  std::vector<std::pair<std::string, std::string>> qp;
  BoxMorphism left, right;
  for (const auto& p : b1.parties()) {
    parties.push_back(tag("L", p));
    left.party_map[p] = tag("L", p);
  }
  for (const auto& p : b2.parties()) {
    parties.push_back(tag("R", p));
    right.party_map[p] = tag("R", p);
  }
  for (const auto& q : b1.questions()) {
    qp.emplace_back(tag("L", q), tag("L", b1.party_of(q)));
    left.question_map[q] = tag("L", q);
  }
  for (const auto& q : b2.questions()) {
    qp.emplace_back(tag("R", q), tag("R", b2.party_of(q)));
    right.question_map[q] = tag("R", q);
  }

  BoxCoproduct out;
  out.presentation = BoxPresentation::make(std::move(parties), qp);
  left.source = b1;
  left.target = out.presentation;
  right.source = b2;
  right.target = out.presentation;
  out.left_inclusion = std::move(left);
  out.right_inclusion = std::move(right);
  return out;
}

}  // namespace boxtopos
