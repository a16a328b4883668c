#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "boxtopos/boolean_algebra.hpp"
#include "boxtopos/box.hpp"
#include "boxtopos/errors.hpp"
#include "boxtopos/rational.hpp"

namespace boxtopos {

// A box state: one exact probability row per maximal context, indexed by
// outcome word. Non-maximal probabilities are always derived as marginals.
struct BoxState {
  BoxPresentation presentation;
  std::vector<ContextId> maximal;            // sorted
  std::vector<std::vector<Rational>> table;  // row per maximal context

  std::size_t maximal_index(const ContextId& c) const {
    auto it = std::lower_bound(maximal.begin(), maximal.end(), c);
    if (it == maximal.end() || *it != c)
      throw InputError("'" + c + "' is not a maximal context");
    return static_cast<std::size_t>(it - maximal.begin());
  }

  const Rational& entry(const ContextId& c, const std::string& word) const {
    const std::size_t mi = maximal_index(c);
    const auto qs = context_questions(c);
    if (word.size() != qs.size())
      throw InputError("outcome word '" + word + "' has wrong length for '" +
                       c + "'");
    std::uint64_t a = 0;
    for (char ch : word) {
      if (ch != '0' && ch != '1')
        throw InputError("outcome word '" + word + "' is not binary");
      a = (a << 1) | static_cast<std::uint64_t>(ch - '0');
    }
    return table[mi][a];
  }

  bool operator==(const BoxState& o) const {
    return presentation == o.presentation && maximal == o.maximal &&
           table == o.table;
  }
};

// Empty table with the right shape for a presentation.
inline BoxState empty_state_shape(const BoxPresentation& b) {
  BoxState s;
  s.presentation = b;
  s.maximal = maximal_contexts(contexts_of(b));
  for (const auto& c : s.maximal)
    s.table.emplace_back(std::uint64_t{1} << context_questions(c).size(),
                         Rational(0));
  return s;
}

namespace detail {

// Positions of the (sorted) questions of c inside the (sorted) questions of
// d; requires c to be a subset of d.
inline std::vector<std::size_t> question_positions(
    const std::vector<std::string>& c_qs, const std::vector<std::string>& d_qs) {
  std::vector<std::size_t> pos(c_qs.size());
  for (std::size_t k = 0; k < c_qs.size(); ++k) {
    auto it = std::find(d_qs.begin(), d_qs.end(), c_qs[k]);
    if (it == d_qs.end())
      throw InputError("context is not contained in its refinement");
    pos[k] = static_cast<std::size_t>(it - d_qs.begin());
  }
  return pos;
}

// Marginal of outcome index `a` on context c, computed through the row of
// the maximal context d.
inline Rational marginal_via(const BoxState& s,
                             const std::vector<std::string>& c_qs,
                             std::uint64_t a, const ContextId& d) {
  const auto d_qs = context_questions(d);
  const auto pos = question_positions(c_qs, d_qs);
  const auto& row = s.table[s.maximal_index(d)];
  Rational sum = 0;
  for (std::uint64_t y = 0; y < row.size(); ++y) {
    bool restricts = true;
    for (std::size_t k = 0; restricts && k < c_qs.size(); ++k)
      if (outcome_bit(y, pos[k], d_qs.size()) !=
          outcome_bit(a, k, c_qs.size()))
        restricts = false;
    if (restricts) sum += row[y];
  }
  return sum;
}

}  // namespace detail

// Both state clauses, checked exactly: each maximal row sums to one, and the
// marginal of every (context, outcome) pair is independent of the maximal
// refinement it is computed through.
inline ValidationReport validate_state(const BoxState& s) {
  ValidationReport report;
  const auto contexts = contexts_of(s.presentation);
  const auto maximal = maximal_contexts(contexts);
  if (s.maximal != maximal) {
    report.fail("table rows do not match the maximal contexts");
    return report;
  }
  for (std::size_t mi = 0; mi < maximal.size(); ++mi) {
    const std::size_t width = context_questions(maximal[mi]).size();
    if (s.table[mi].size() != (std::uint64_t{1} << width)) {
      report.fail("row '" + maximal[mi] + "' has wrong size");
      return report;
    }
  }
  for (std::size_t mi = 0; mi < maximal.size(); ++mi) {
    Rational sum = 0;
    for (std::uint64_t a = 0; a < s.table[mi].size(); ++a) {
      const auto& p = s.table[mi][a];
      if (p < 0 || p > 1)
        report.fail("entry (" + maximal[mi] + ", " +
                    outcome_word(a, context_questions(maximal[mi]).size()) +
                    ") = " + to_string(p) + " is outside [0,1]");
      sum += p;
    }
    if (sum != 1)
      report.fail("normalization fails on '" + maximal[mi] +
                  "': row sums to " + to_string(sum));
  }
  for (std::size_t ci = 0; ci < contexts.size(); ++ci) {
    const auto c_qs = context_questions(contexts.id_of(ci));
    std::vector<ContextId> refinements;
    for (const auto& d : maximal)
      if (contexts.leq(contexts.id_of(ci), d)) refinements.push_back(d);
    if (refinements.size() < 2) continue;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << c_qs.size()); ++a) {
      const Rational first = detail::marginal_via(s, c_qs, a, refinements[0]);
      for (std::size_t r = 1; r < refinements.size(); ++r) {
        const Rational other = detail::marginal_via(s, c_qs, a, refinements[r]);
        if (other != first)
          report.fail("signalling at (" + contexts.id_of(ci) + ", " +
                      outcome_word(a, c_qs.size()) + "): marginal via '" +
                      refinements[0] + "' is " + to_string(first) +
                      " but via '" + refinements[r] + "' is " +
                      to_string(other));
      }
    }
  }
  return report;
}

// The common marginal of outcome `word` on context c. Refuses when the
// refinements disagree, i.e. when the state signals at (c, word).
inline Rational marginal(const BoxState& s, const ContextId& c,
                         const std::string& word) {
  const auto contexts = contexts_of(s.presentation);
  const auto c_qs = context_questions(contexts.id_of(contexts.index_of(c)));
  if (word.size() != c_qs.size())
    throw InputError("outcome word '" + word + "' has wrong length for '" + c +
                     "'");
  std::uint64_t a = 0;
  for (char ch : word) {
    if (ch != '0' && ch != '1')
      throw InputError("outcome word '" + word + "' is not binary");
    a = (a << 1) | static_cast<std::uint64_t>(ch - '0');
  }

  bool first = true;
  Rational value = 0;
  for (const auto& d : s.maximal) {
    const auto d_qs = context_questions(d);
    if (!std::includes(d_qs.begin(), d_qs.end(), c_qs.begin(), c_qs.end()))
      continue;
    const Rational via = detail::marginal_via(s, c_qs, a, d);
    if (first) {
      value = via;
      first = false;
    } else if (via != value) {
      throw InputError("marginal of (" + c + ", " + word +
                       ") is ill-defined: the state signals");
    }
  }
  if (first) throw InputError("'" + c + "' is not a context of this state");
  return value;
}

// The standard construction attaining the algebraic CHSH maximum: in the
// context {a_i, b_j} the outcome (alpha, beta) has weight 1/2 when
// alpha xor beta = (i-1)(j-1), and 0 otherwise.
inline BoxState pr_box() {
  BoxState s = empty_state_shape(BoxPresentation::pr());
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      const ContextId c = context_id(
          {"a" + std::to_string(i), "b" + std::to_string(j)});
      auto& row = s.table[s.maximal_index(c)];
      for (std::uint64_t alpha = 0; alpha <= 1; ++alpha)
        for (std::uint64_t beta = 0; beta <= 1; ++beta)
          if ((alpha ^ beta) == static_cast<std::uint64_t>((i - 1) * (j - 1)))
            row[(alpha << 1) | beta] = Rational(1, 2);
    }
  return s;
}

using GlobalAssignment = std::map<std::string, int>;

// Point mass on the outcomes consistent with one global answer sheet.
inline BoxState deterministic_state(const BoxPresentation& b,
                                    const GlobalAssignment& g) {
  for (const auto& q : b.questions()) {
    auto it = g.find(q);
    if (it == g.end())
      throw InputError("assignment missing question '" + q + "'");
    if (it->second != 0 && it->second != 1)
      throw InputError("assignment value for '" + q + "' is not 0/1");
  }
  BoxState s = empty_state_shape(b);
  for (std::size_t mi = 0; mi < s.maximal.size(); ++mi) {
    const auto qs = context_questions(s.maximal[mi]);
    std::uint64_t a = 0;
    for (const auto& q : qs) a = (a << 1) | static_cast<std::uint64_t>(g.at(q));
    s.table[mi][a] = 1;
  }
  return s;
}

inline BoxState uniform_state(const BoxPresentation& b) {
  BoxState s = empty_state_shape(b);
  for (auto& row : s.table) {
    const Rational p(1, static_cast<long>(row.size()));
    for (auto& entry : row) entry = p;
  }
  return s;
}

inline BoxState mix(const std::vector<BoxState>& states,
                    const std::vector<Rational>& weights) {
  if (states.empty() || states.size() != weights.size())
    throw InputError("mix needs matching nonempty state and weight lists");
  Rational total = 0;
  for (const auto& w : weights) {
    if (w < 0) throw InputError("mix weight " + to_string(w) + " is negative");
    total += w;
  }
  if (total != 1)
    throw InputError("mix weights sum to " + to_string(total) + ", not 1");
  BoxState out = empty_state_shape(states[0].presentation);
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (!(states[k].presentation == out.presentation))
      throw InputError("mix: states live on different presentations");
    for (std::size_t mi = 0; mi < out.table.size(); ++mi)
      for (std::size_t a = 0; a < out.table[mi].size(); ++a)
        out.table[mi][a] += weights[k] * states[k].table[mi][a];
  }
  return out;
}

// A linear functional on the maximal-context table, same layout as a state.
struct BellFunctional {
  BoxPresentation presentation;
  std::vector<ContextId> maximal;
  std::vector<std::vector<Rational>> coefficients;
};

inline Rational bell_value(const BoxState& s, const BellFunctional& f) {
  if (!(s.presentation == f.presentation) || s.maximal != f.maximal)
    throw InputError("bell_value: state and functional presentations differ");
  Rational v = 0;
  for (std::size_t mi = 0; mi < s.table.size(); ++mi) {
    if (s.table[mi].size() != f.coefficients[mi].size())
      throw InputError("bell_value: functional row '" + s.maximal[mi] +
                       "' has wrong size");
    for (std::size_t a = 0; a < s.table[mi].size(); ++a)
      v += f.coefficients[mi][a] * s.table[mi][a];
  }
  return v;
}

namespace detail {

// The two parties and their two sorted questions each, for CHSH-shaped
// presentations; rejects anything not isomorphic to 2+2 over 1+1.
inline std::array<std::vector<std::string>, 2> chsh_sides(
    const BoxPresentation& b) {
  if (b.parties().size() != 2)
    throw InputError("CHSH needs exactly two parties, got " +
                     std::to_string(b.parties().size()));
  std::array<std::vector<std::string>, 2> sides{b.fiber(b.parties()[0]),
                                                b.fiber(b.parties()[1])};
  for (const auto& side : sides)
    if (side.size() != 2)
      throw InputError("CHSH needs two questions per party");
  return sides;
}

}  // namespace detail

// The CHSH combination with the chosen signs on the four correlators.
// Outcome signs use the fixed convention 0 -> +1, 1 -> -1.
inline BellFunctional chsh_variant(const BoxPresentation& b,
                                   const std::array<int, 4>& signs) {
  const auto sides = detail::chsh_sides(b);
  BellFunctional f;
  f.presentation = b;
  BoxState shape = empty_state_shape(b);
  f.maximal = shape.maximal;
  f.coefficients = shape.table;
  std::size_t term = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j, ++term) {
      const ContextId c = context_id({sides[0][i], sides[1][j]});
      const auto qs = context_questions(c);
      auto& row = f.coefficients[shape.maximal_index(c)];
      for (std::uint64_t a = 0; a < row.size(); ++a) {
        int sign = signs[term];
        for (std::size_t k = 0; k < qs.size(); ++k)
          if (outcome_bit(a, k, qs.size())) sign = -sign;
        row[a] = sign;
      }
    }
  return f;
}

inline BellFunctional chsh_functional(const BoxPresentation& b) {
  return chsh_variant(b, {1, 1, 1, -1});
}

// The eight sign patterns with an odd number of minus signs; each one is a
// symmetry image of the standard combination.
inline std::vector<BellFunctional> chsh_sign_variants(const BoxPresentation& b) {
  std::vector<BellFunctional> out;
  for (int mask = 0; mask < 16; ++mask) {
    std::array<int, 4> signs;
    int product = 1;
    for (int t = 0; t < 4; ++t) {
      signs[t] = (mask >> t) & 1 ? -1 : 1;
      product *= signs[t];
    }
    if (product == -1) out.push_back(chsh_variant(b, signs));
  }
  return out;
}

inline Rational chsh(const BoxState& s) {
  return bell_value(s, chsh_functional(s.presentation));
}

// The quantum bound 2*sqrt(2), for reporting. Exact comparisons use the
// enclosing rational bounds.
inline double tsirelson_constant() { return 2.0 * std::sqrt(2.0); }

struct TsirelsonBounds {
  Rational lower{2828427, 1000000};
  Rational upper{2828428, 1000000};
};

inline TsirelsonBounds tsirelson_bounds() { return {}; }

}  // namespace boxtopos
