#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "boxtopos/bitset.hpp"
#include "boxtopos/errors.hpp"

namespace boxtopos {

// A finite poset over opaque string ids. Elements are kept sorted
// lexicographically so every enumeration and serialization is reproducible.
// The relation is stored fully closed (reflexive + transitive); construction
// closes whatever generating pairs it is given and rejects antisymmetry
// violations. Immutable after construction.
class FinitePoset {
public:
  FinitePoset() = default;

  static FinitePoset from_relation(
      std::vector<std::string> elements,
      const std::vector<std::pair<std::string, std::string>>& leq_pairs) {
    FinitePoset p;
    std::sort(elements.begin(), elements.end());
    for (std::size_t i = 1; i < elements.size(); ++i)
      if (elements[i] == elements[i - 1])
        throw InputError("duplicate element id '" + elements[i] + "'");
    p.ids_ = std::move(elements);

    const std::size_t n = p.ids_.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& [a, b] : leq_pairs)
      succ[p.index_of(a)].push_back(p.index_of(b));

    p.up_.assign(n, DynBitset(n));
    for (std::size_t i = 0; i < n; ++i) {
      // reachability = reflexive-transitive closure
      std::vector<std::size_t> stack{i};
      p.up_[i].set(i);
      while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : succ[v])
          if (!p.up_[i].test(w)) {
            p.up_[i].set(w);
            stack.push_back(w);
          }
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (p.up_[i].test(j) && p.up_[j].test(i))
          throw InputError("antisymmetry violated by '" + p.ids_[i] +
                           "' and '" + p.ids_[j] + "'");
    p.down_.assign(n, DynBitset(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (p.up_[i].test(j)) p.down_[j].set(i);
    p.compute_covers();
    return p;
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& elements() const { return ids_; }
  const std::string& id_of(std::size_t i) const { return ids_[i]; }

  bool contains(const std::string& id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    return it != ids_.end() && *it == id;
  }

  std::size_t index_of(const std::string& id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id)
      throw InputError("unknown element id '" + id + "'");
    return static_cast<std::size_t>(it - ids_.begin());
  }

  bool leq(std::size_t i, std::size_t j) const { return up_[i].test(j); }
  bool leq(const std::string& a, const std::string& b) const {
    return leq(index_of(a), index_of(b));
  }

  const DynBitset& up_set(std::size_t i) const { return up_[i]; }
  const DynBitset& down_set(std::size_t i) const { return down_[i]; }

  // Covering pairs (i, j): i < j with nothing strictly between. Cached for
  // Hasse-diagram export, in deterministic (i, j) order.
  const std::vector<std::pair<std::size_t, std::size_t>>& covers() const {
    return covers_;
  }

  std::vector<std::size_t> maximal_elements() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (up_[i].count() == 1) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> minimal_elements() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (down_[i].count() == 1) out.push_back(i);
    return out;
  }

  // A linear extension: i before j whenever i < j. Deterministic (Kahn with
  // smallest-index tie-break).
  std::vector<std::size_t> topological_order() const {
    const std::size_t n = size();
    std::vector<std::size_t> indeg(n);
    for (std::size_t i = 0; i < n; ++i) indeg[i] = down_[i].count() - 1;
    std::vector<std::size_t> order;
    std::vector<bool> done(n, false);
    while (order.size() < n) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!done[i] && indeg[i] == 0) {
          done[i] = true;
          order.push_back(i);
          for (std::size_t j = 0; j < n; ++j)
            if (j != i && up_[i].test(j)) --indeg[j];
          break;
        }
      }
    }
    return order;
  }

  std::vector<std::pair<std::string, std::string>> relation_pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j)
        if (up_[i].test(j)) out.emplace_back(ids_[i], ids_[j]);
    return out;
  }

  bool operator==(const FinitePoset& o) const {
    return ids_ == o.ids_ && up_ == o.up_;
  }

private:
  void compute_covers() {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !up_[i].test(j)) continue;
        bool cover = true;
        for (std::size_t k = 0; cover && k < n; ++k)
          if (k != i && k != j && up_[i].test(k) && up_[k].test(j))
            cover = false;
        if (cover) covers_.emplace_back(i, j);
      }
  }

  std::vector<std::string> ids_;
  std::vector<DynBitset> up_;    // up_[i] = ↑i, including i
  std::vector<DynBitset> down_;  // down_[i] = ↓i
  std::vector<std::pair<std::size_t, std::size_t>> covers_;
};

// An order-preserving candidate map between finite posets. Construction only
// checks totality and that images exist; use check_isotone for the order
// condition, so that non-isotone candidates can be built and rejected.
class IsotoneMap {
public:
  IsotoneMap(FinitePoset source, FinitePoset target,
             const std::map<std::string, std::string>& assignment)
      : source_(std::move(source)), target_(std::move(target)) {
    assignment_.reserve(source_.size());
    for (const auto& id : source_.elements()) {
      auto it = assignment.find(id);
      if (it == assignment.end())
        throw InputError("isotone map not total: no image for '" + id + "'");
      assignment_.push_back(target_.index_of(it->second));
    }
  }

  IsotoneMap(FinitePoset source, FinitePoset target,
             std::vector<std::size_t> assignment_by_index)
      : source_(std::move(source)),
        target_(std::move(target)),
        assignment_(std::move(assignment_by_index)) {
    if (assignment_.size() != source_.size())
      throw InputError("isotone map not total on source");
    for (std::size_t j : assignment_)
      if (j >= target_.size()) throw InputError("isotone map image out of range");
  }

  static IsotoneMap identity(const FinitePoset& p) {
    std::vector<std::size_t> idx(p.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return IsotoneMap(p, p, std::move(idx));
  }

  const FinitePoset& source() const { return source_; }
  const FinitePoset& target() const { return target_; }

  std::size_t apply_index(std::size_t i) const { return assignment_[i]; }
  const std::string& apply(const std::string& id) const {
    return target_.id_of(assignment_[source_.index_of(id)]);
  }

  bool surjective() const {
    std::vector<bool> hit(target_.size(), false);
    for (std::size_t j : assignment_) hit[j] = true;
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  }

private:
  FinitePoset source_;
  FinitePoset target_;
  std::vector<std::size_t> assignment_;
};

inline bool check_isotone(const IsotoneMap& f) {
  const auto& s = f.source();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s.leq(i, j) && !f.target().leq(f.apply_index(i), f.apply_index(j)))
        return false;
  return true;
}

// g after f, for f : A -> B and g : B -> C.
inline IsotoneMap compose(const IsotoneMap& g, const IsotoneMap& f) {
  if (!(f.target() == g.source()))
    throw InputError("compose: inner target differs from outer source");
  std::vector<std::size_t> idx(f.source().size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    idx[i] = g.apply_index(f.apply_index(i));
  return IsotoneMap(f.source(), g.target(), std::move(idx));
}

// An upward-closed subset together with its carrier.
struct UpperSet {
  FinitePoset carrier;
  DynBitset members;

  bool is_upward_closed() const {
    for (std::size_t i = 0; i < carrier.size(); ++i)
      if (members.test(i) && !carrier.up_set(i).subset_of(members))
        return false;
    return true;
  }

  std::vector<std::string> member_ids() const {
    std::vector<std::string> out;
    for (std::size_t i : members.members()) out.push_back(carrier.id_of(i));
    return out;
  }

  bool operator==(const UpperSet& o) const {
    return carrier == o.carrier && members == o.members;
  }
};

// Smallest upper set containing the given generators.
inline UpperSet upper_closure(const FinitePoset& p,
                              const std::vector<std::string>& generators) {
  DynBitset m(p.size());
  for (const auto& id : generators) m |= p.up_set(p.index_of(id));
  return UpperSet{p, std::move(m)};
}

// The frame of all upper sets, in canonical order (ascending as bit words:
// the empty set first, the full carrier last). Meets and joins are
// intersections and unions of members; the frame is closed under both.
struct AlexandrovFrame {
  FinitePoset carrier;
  std::vector<DynBitset> opens;

  std::size_t index_of(const DynBitset& open) const {
    auto it = std::lower_bound(opens.begin(), opens.end(), open);
    if (it == opens.end() || !(*it == open))
      throw InputError("not an open of this frame");
    return static_cast<std::size_t>(it - opens.begin());
  }

  std::size_t meet(std::size_t i, std::size_t j) const {
    return index_of(opens[i] & opens[j]);
  }
  std::size_t join(std::size_t i, std::size_t j) const {
    return index_of(opens[i] | opens[j]);
  }
  std::size_t bottom() const { return 0; }
  std::size_t top() const { return opens.size() - 1; }
};

// Every upper set of p, by deciding membership along a reverse linear
// extension (an element may enter only once everything above it is in).
// Output size is the antichain count of p, hence the cap.
inline AlexandrovFrame all_upper_sets(const FinitePoset& p,
                                      const Config& cfg = {}) {
  if (p.size() > cfg.elements_cap)
    throw ResourceError("all_upper_sets: poset has " +
                        std::to_string(p.size()) +
                        " elements, enumeration cap is " +
                        std::to_string(cfg.elements_cap));
  const auto topo = p.topological_order();
  std::vector<DynBitset> opens;
  DynBitset current(p.size());
  auto recurse = [&](auto&& self, std::size_t step) -> void {
    if (step == topo.size()) {
      opens.push_back(current);
      return;
    }
    const std::size_t e = topo[topo.size() - 1 - step];
    self(self, step + 1);  // exclude e
    DynBitset strictly_above = p.up_set(e);
    strictly_above.reset(e);
    if (strictly_above.subset_of(current)) {  // include e
      current.set(e);
      self(self, step + 1);
      current.reset(e);
    }
  };
  recurse(recurse, 0);
  std::sort(opens.begin(), opens.end());
  return AlexandrovFrame{p, std::move(opens)};
}

// Product poset. Pair ids are "(a,b)"; the factor indices are kept alongside
// so structural checks never depend on parsing composed ids.
struct ProductPoset {
  FinitePoset poset;
  // aligned with poset.elements(): factors[k] = (index in left, index in right)
  std::vector<std::pair<std::size_t, std::size_t>> factors;

  std::size_t index_of_pair(std::size_t i, std::size_t j) const {
    for (std::size_t k = 0; k < factors.size(); ++k)
      if (factors[k] == std::make_pair(i, j)) return k;
    throw InputError("pair index out of range in product poset");
  }
};

inline std::string pair_id(const std::string& a, const std::string& b) {
  return "(" + a + "," + b + ")";
}

inline ProductPoset poset_product(const FinitePoset& p, const FinitePoset& q) {
  std::vector<std::string> ids;
  ids.reserve(p.size() * q.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      ids.push_back(pair_id(p.id_of(i), q.id_of(j)));

  std::vector<std::pair<std::string, std::string>> rel;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      for (std::size_t i2 = 0; i2 < p.size(); ++i2)
        for (std::size_t j2 = 0; j2 < q.size(); ++j2)
          if (p.leq(i, i2) && q.leq(j, j2))
            rel.emplace_back(pair_id(p.id_of(i), q.id_of(j)),
                             pair_id(p.id_of(i2), q.id_of(j2)));
  ProductPoset prod;
  prod.poset = FinitePoset::from_relation(std::move(ids), rel);
  prod.factors.resize(prod.poset.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      prod.factors[prod.poset.index_of(pair_id(p.id_of(i), q.id_of(j)))] = {i,
                                                                            j};
  return prod;
}

// Preimage of an upper set under an isotone map is again upper.
inline UpperSet preimage(const IsotoneMap& f, const UpperSet& u) {
  if (!(u.carrier == f.target()))
    throw InputError("preimage: upper set lives on a different poset");
  DynBitset m(f.source().size());
  for (std::size_t i = 0; i < f.source().size(); ++i)
    if (u.members.test(f.apply_index(i))) m.set(i);
  return UpperSet{f.source(), std::move(m)};
}

}  // namespace boxtopos
