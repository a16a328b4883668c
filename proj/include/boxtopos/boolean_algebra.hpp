#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "boxtopos/errors.hpp"

namespace boxtopos {

// A finite Boolean algebra presented by its atoms. Elements are atom subsets,
// held as bit masks over the atom order, so meet/join/complement are single
// word operations. Atom count is capped at 64; nothing in this library needs
// contexts wider than a handful of questions.
class FiniteBooleanAlgebra {
public:
  FiniteBooleanAlgebra() = default;

  explicit FiniteBooleanAlgebra(std::vector<std::string> atom_ids)
      : atoms_(std::move(atom_ids)) {
    if (atoms_.size() > 64)
      throw ResourceError("Boolean algebra with " +
                          std::to_string(atoms_.size()) +
                          " atoms exceeds the 64-atom representation");
    auto sorted = atoms_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] == sorted[i - 1])
        throw InputError("duplicate atom id '" + sorted[i] + "'");
  }

  std::size_t n_atoms() const { return atoms_.size(); }
  const std::vector<std::string>& atom_ids() const { return atoms_; }

  std::size_t atom_index(const std::string& id) const {
    auto it = std::find(atoms_.begin(), atoms_.end(), id);
    if (it == atoms_.end()) throw InputError("unknown atom id '" + id + "'");
    return static_cast<std::size_t>(it - atoms_.begin());
  }

  std::uint64_t top() const {
    return n_atoms() == 64 ? ~std::uint64_t{0}
                           : (std::uint64_t{1} << n_atoms()) - 1;
  }
  static constexpr std::uint64_t bottom() { return 0; }
  std::uint64_t atom(std::size_t i) const { return std::uint64_t{1} << i; }

  static std::uint64_t meet(std::uint64_t a, std::uint64_t b) { return a & b; }
  static std::uint64_t join(std::uint64_t a, std::uint64_t b) { return a | b; }
  std::uint64_t complement(std::uint64_t a) const { return ~a & top(); }
  static bool leq(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }

  // Number of elements, 2^atoms; only callable when it fits a word.
  std::uint64_t element_count() const {
    if (n_atoms() >= 64)
      throw ResourceError("element count of a 64-atom algebra overflows");
    return std::uint64_t{1} << n_atoms();
  }

  std::vector<std::string> element_atoms(std::uint64_t mask) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n_atoms(); ++i)
      if ((mask >> i) & 1) out.push_back(atoms_[i]);
    return out;
  }

  std::uint64_t element_from_atoms(const std::vector<std::string>& ids) const {
    std::uint64_t m = 0;
    for (const auto& id : ids) m |= atom(atom_index(id));
    return m;
  }

  bool operator==(const FiniteBooleanAlgebra& o) const {
    return atoms_ == o.atoms_;
  }

private:
  std::vector<std::string> atoms_;
};

// Binary outcome word of length `width` for outcome index `a`; the first
// question holds the most significant bit, so word order is atom order.
inline std::string outcome_word(std::uint64_t a, std::size_t width) {
  std::string w(width, '0');
  for (std::size_t j = 0; j < width; ++j)
    if ((a >> (width - 1 - j)) & 1) w[j] = '1';
  return w;
}

inline int outcome_bit(std::uint64_t a, std::size_t j, std::size_t width) {
  return static_cast<int>((a >> (width - 1 - j)) & 1);
}

// The free Boolean algebra on a context: atoms are the outcome functions
// c -> 2 in binary-word order. The empty context has the single empty
// outcome, giving the two-element algebra.
inline FiniteBooleanAlgebra free_boolean_algebra(std::size_t n_questions) {
  if (n_questions > 6)
    throw ResourceError("free Boolean algebra on " +
                        std::to_string(n_questions) +
                        " questions needs more than 64 atoms");
  const std::uint64_t n = std::uint64_t{1} << n_questions;
  std::vector<std::string> atoms;
  atoms.reserve(n);
  for (std::uint64_t a = 0; a < n; ++a)
    atoms.push_back(outcome_word(a, n_questions));
  return FiniteBooleanAlgebra(std::move(atoms));
}

}  // namespace boxtopos
