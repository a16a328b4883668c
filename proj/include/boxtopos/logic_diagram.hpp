#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "boxtopos/boolean_algebra.hpp"
#include "boxtopos/box.hpp"
#include "boxtopos/errors.hpp"
#include "boxtopos/poset.hpp"

namespace boxtopos {

// Transition data in homomorphism form, as supplied by external inputs:
// each source atom is sent to a set of target atoms.
struct TransitionSpec {
  ContextId from;
  ContextId to;
  std::map<std::string, std::vector<std::string>> atom_images;
};

// A functor from a finite context poset to finite Boolean algebras.
//
// A homomorphism between finite Boolean algebras is exactly the preimage map
// of a function on atoms running the other way, so each transition
// L(c) -> L(c') is stored as its dual: an assignment of a c-atom to every
// c'-atom. Preservation of 0, 1, meet, join and complement then holds by
// construction, and the spectral presheaf is this dual data read directly.
class LogicDiagram {
public:
  const FinitePoset& contexts() const { return contexts_; }
  const FiniteBooleanAlgebra& algebra(std::size_t ci) const {
    return algebras_[ci];
  }
  const FiniteBooleanAlgebra& algebra(const ContextId& c) const {
    return algebras_[contexts_.index_of(c)];
  }

  // Dual of the transition L(c_i) -> L(c_j), mapping atoms of c_j to atoms
  // of c_i. Defined whenever c_i <= c_j.
  const std::vector<std::uint32_t>& dual(std::size_t ci, std::size_t cj) const {
    auto it = duals_.find(key(ci, cj));
    if (it == duals_.end())
      throw InputError("no transition for '" + contexts_.id_of(ci) +
                       "' <= '" + contexts_.id_of(cj) + "'");
    return it->second;
  }

  // The transition homomorphism itself: preimage of an element mask under
  // the dual atom map.
  std::uint64_t transition(std::size_t ci, std::size_t cj,
                           std::uint64_t mask) const {
    const auto& d = dual(ci, cj);
    std::uint64_t out = 0;
    for (std::size_t a = 0; a < d.size(); ++a)
      if ((mask >> d[a]) & 1) out |= std::uint64_t{1} << a;
    return out;
  }

  // Set when the diagram was built from a box presentation; valuation/state
  // conversions need it.
  const std::optional<BoxPresentation>& origin_box() const { return origin_; }

  // The free-Boolean-algebra diagram of a box presentation. The transition
  // along c <= c' is the preimage map of outcome restriction 2^{c'} -> 2^c;
  // its dual is the restriction itself.
  static LogicDiagram from_box(const BoxPresentation& b) {
    LogicDiagram d;
    d.origin_ = b;
    d.contexts_ = contexts_of(b);
    const std::size_t n = d.contexts_.size();
    d.algebras_.reserve(n);
    std::vector<std::vector<std::string>> questions(n);
    for (std::size_t i = 0; i < n; ++i) {
      questions[i] = context_questions(d.contexts_.id_of(i));
      d.algebras_.push_back(free_boolean_algebra(questions[i].size()));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (!d.contexts_.leq(i, j)) continue;
        const auto& small = questions[i];
        const auto& large = questions[j];
        // position of each question of c_i inside c_j
        std::vector<std::size_t> pos(small.size());
        for (std::size_t k = 0; k < small.size(); ++k)
          pos[k] = static_cast<std::size_t>(
              std::find(large.begin(), large.end(), small[k]) - large.begin());
        std::vector<std::uint32_t> dual(std::uint64_t{1} << large.size());
        for (std::uint64_t a = 0; a < dual.size(); ++a) {
          std::uint64_t restricted = 0;
          for (std::size_t k = 0; k < small.size(); ++k)
            restricted |= static_cast<std::uint64_t>(
                              outcome_bit(a, pos[k], large.size()))
                          << (small.size() - 1 - k);
          dual[a] = static_cast<std::uint32_t>(restricted);
        }
        d.duals_[key(i, j)] = std::move(dual);
      }
    return d;
  }

  // A hand-specified theory: arbitrary finite context poset, arbitrary
  // finite Boolean algebras, transitions in homomorphism form. Validates
  // that every transition is a homomorphism (each target atom lies under
  // exactly one atom image) and that the family is functorial.
  static LogicDiagram general_theory(
      FinitePoset contexts,
      const std::map<ContextId, std::vector<std::string>>& atom_sets,
      const std::vector<TransitionSpec>& transitions) {
    LogicDiagram d;
    d.contexts_ = std::move(contexts);
    const std::size_t n = d.contexts_.size();
    for (std::size_t i = 0; i < n; ++i) {
      auto it = atom_sets.find(d.contexts_.id_of(i));
      if (it == atom_sets.end())
        throw InputError("no algebra given for context '" +
                         d.contexts_.id_of(i) + "'");
      d.algebras_.emplace_back(it->second);
    }

    for (const auto& t : transitions) {
      const std::size_t i = d.contexts_.index_of(t.from);
      const std::size_t j = d.contexts_.index_of(t.to);
      if (!d.contexts_.leq(i, j))
        throw InputError("transition given for incomparable pair '" + t.from +
                         "' -> '" + t.to + "'");
      const auto& src = d.algebras_[i];
      const auto& tgt = d.algebras_[j];
      // invert the atom-image data into a dual map, rejecting non-homs
      std::vector<std::uint32_t> dual(tgt.n_atoms(), UINT32_MAX);
      for (std::size_t sa = 0; sa < src.n_atoms(); ++sa) {
        auto img = t.atom_images.find(src.atom_ids()[sa]);
        if (img == t.atom_images.end())
          throw InputError("transition '" + t.from + "' -> '" + t.to +
                           "' missing image of atom '" + src.atom_ids()[sa] +
                           "'");
        for (const auto& ta : img->second) {
          const std::size_t tai = tgt.atom_index(ta);
          if (dual[tai] != UINT32_MAX)
            throw InputError(
                "transition '" + t.from + "' -> '" + t.to +
                "' is not a homomorphism: atom images of '" +
                src.atom_ids()[dual[tai]] + "' and '" + src.atom_ids()[sa] +
                "' overlap at '" + ta + "'");
          dual[tai] = static_cast<std::uint32_t>(sa);
        }
      }
      for (std::size_t tai = 0; tai < dual.size(); ++tai)
        if (dual[tai] == UINT32_MAX)
          throw InputError("transition '" + t.from + "' -> '" + t.to +
                           "' is not a homomorphism: target atom '" +
                           tgt.atom_ids()[tai] +
                           "' is not below any atom image (top not preserved)");
      if (!d.duals_.emplace(key(i, j), std::move(dual)).second)
        throw InputError("duplicate transition '" + t.from + "' -> '" + t.to +
                         "'");
    }

    // identities: fill if absent, reject if present and not identity
    for (std::size_t i = 0; i < n; ++i) {
      auto it = d.duals_.find(key(i, i));
      std::vector<std::uint32_t> id(d.algebras_[i].n_atoms());
      std::iota(id.begin(), id.end(), 0);
      if (it == d.duals_.end())
        d.duals_[key(i, i)] = std::move(id);
      else if (it->second != id)
        throw InputError("transition at '" + d.contexts_.id_of(i) +
                         "' <= itself is not the identity");
    }

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (!d.contexts_.leq(i, j)) continue;
        if (!d.duals_.count(key(i, j)))
          throw InputError("missing transition for '" + d.contexts_.id_of(i) +
                           "' <= '" + d.contexts_.id_of(j) + "'");
      }

    // composition law, via the duals: dual(i,k) = dual(i,j) o dual(j,k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !d.contexts_.leq(i, j)) continue;
        for (std::size_t k = 0; k < n; ++k) {
          if (j == k || !d.contexts_.leq(j, k)) continue;
          const auto& dij = d.duals_.at(key(i, j));
          const auto& djk = d.duals_.at(key(j, k));
          const auto& dik = d.duals_.at(key(i, k));
          for (std::size_t a = 0; a < djk.size(); ++a)
            if (dik[a] != dij[djk[a]])
              throw InputError(
                  "functoriality fails: transition '" + d.contexts_.id_of(i) +
                  "' <= '" + d.contexts_.id_of(k) +
                  "' is not the composite through '" + d.contexts_.id_of(j) +
                  "'");
        }
      }
    return d;
  }

private:
  static std::uint64_t key(std::size_t i, std::size_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | j;
  }

  FinitePoset contexts_;
  std::vector<FiniteBooleanAlgebra> algebras_;
  std::map<std::uint64_t, std::vector<std::uint32_t>> duals_;
  std::optional<BoxPresentation> origin_;
};

// The colimit of the diagram in Set: the disjoint union of all algebra
// carriers modulo the identifications (c, u) ~ (c', transition(u)). Class
// numbering follows first appearance in (context, element) order, so the
// class of 0 at the least context comes first.
struct ColimitPresentation {
  std::size_t n_classes = 0;
  // class_of[ci][mask], one vector per context, 2^atoms entries each
  std::vector<std::vector<std::uint32_t>> class_of;

  std::uint32_t inject(std::size_t ci, std::uint64_t mask) const {
    return class_of[ci][mask];
  }
};

inline ColimitPresentation colimit(const LogicDiagram& d,
                                   const Config& cfg = {}) {
  const std::size_t n = d.contexts().size();
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (d.algebra(i).n_atoms() > cfg.algebra_atoms_cap)
      throw ResourceError("colimit: algebra at '" + d.contexts().id_of(i) +
                          "' has " + std::to_string(d.algebra(i).n_atoms()) +
                          " atoms, materialization cap is " +
                          std::to_string(cfg.algebra_atoms_cap));
    offset[i + 1] = offset[i] + d.algebra(i).element_count();
  }

  // union-find over the disjoint union, then freeze
  std::vector<std::size_t> parent(offset[n]);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !d.contexts().leq(i, j)) continue;
      for (std::uint64_t u = 0; u < d.algebra(i).element_count(); ++u) {
        const std::size_t a = find(offset[i] + u);
        const std::size_t b = find(offset[j] + d.transition(i, j, u));
        if (a != b) parent[a] = b;
      }
    }

  ColimitPresentation out;
  std::map<std::size_t, std::uint32_t> renumber;
  out.class_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.class_of[i].resize(d.algebra(i).element_count());
    for (std::uint64_t u = 0; u < d.algebra(i).element_count(); ++u) {
      const std::size_t root = find(offset[i] + u);
      auto [it, fresh] =
          renumber.emplace(root, static_cast<std::uint32_t>(renumber.size()));
      out.class_of[i][u] = it->second;
      (void)fresh;
    }
  }
  out.n_classes = renumber.size();
  return out;
}

// The spectral presheaf: contravariant atom-set data of the diagram. For a
// box diagram the atoms at c are the outcomes c -> 2 and the presheaf map is
// outcome restriction.
struct SpectralPresheaf {
  FinitePoset contexts;
  std::vector<std::vector<std::string>> atoms;  // per context index
  // restriction[(i,j)] for c_i <= c_j maps atoms at c_j to atoms at c_i
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::uint32_t>>
      restriction;

  const std::vector<std::uint32_t>& map_for(std::size_t ci,
                                            std::size_t cj) const {
    return restriction.at({ci, cj});
  }
};

inline SpectralPresheaf spectral_presheaf(const LogicDiagram& d) {
  SpectralPresheaf sp;
  sp.contexts = d.contexts();
  const std::size_t n = sp.contexts.size();
  for (std::size_t i = 0; i < n; ++i) sp.atoms.push_back(d.algebra(i).atom_ids());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!sp.contexts.leq(i, j)) continue;
      const auto& dual = d.dual(i, j);
      // the dual of a Boolean homomorphism out of a finite algebra is total
      // and single-valued by construction; keep the shape assert anyway
      if (dual.size() != d.algebra(j).n_atoms())
        throw InputError("atom lifting broken between '" +
                         sp.contexts.id_of(i) + "' and '" +
                         sp.contexts.id_of(j) + "'");
      sp.restriction[{i, j}] = dual;
    }
  return sp;
}

}  // namespace boxtopos
