#pragma once

// Independent brute-force oracles. Everything here recomputes results by a
// different route than the library (subset filters, fixed-point closures,
// basic-feasible-solution sweeps) so the two can disagree when one is wrong.

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "boxtopos/bitset.hpp"
#include "boxtopos/linalg.hpp"
#include "boxtopos/polytope.hpp"
#include "boxtopos/poset.hpp"

namespace oracles {

// All upper sets of p by filtering every one of the 2^n subsets.
inline std::vector<boxtopos::DynBitset> brute_force_upper_sets(
    const boxtopos::FinitePoset& p) {
  const std::size_t n = p.size();
  std::vector<boxtopos::DynBitset> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    boxtopos::DynBitset s(n);
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1) s.set(i);
    bool upper = true;
    for (std::size_t i = 0; upper && i < n; ++i)
      if (s.test(i) && !p.up_set(i).subset_of(s)) upper = false;
    if (upper) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Partition of {0..n-1} generated by merging the given pairs, computed by
// naive fixed-point sweeps over explicit block sets (no union-find).
inline std::vector<std::set<std::size_t>> closure_partition(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<std::set<std::size_t>> blocks;
  for (std::size_t i = 0; i < n; ++i) blocks.push_back({i});
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [a, b] : pairs) {
      std::size_t ia = 0, ib = 0;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (blocks[k].count(a)) ia = k;
        if (blocks[k].count(b)) ib = k;
      }
      if (ia != ib) {
        blocks[ia].insert(blocks[ib].begin(), blocks[ib].end());
        blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(ib));
        changed = true;
      }
    }
  }
  return blocks;
}

// Vertices of { x >= 0, Ax = b } as flattened tables, by sweeping every
// basic feasible solution: pick rank-many coordinates, solve with the rest
// pinned to zero, keep the nonnegative solutions with independent columns.
// A different route than the incremental double description.
inline std::vector<boxtopos::Vec> bfs_vertex_tables(
    const boxtopos::BoxPresentation& b) {
  using namespace boxtopos;
  const NsSystem sys = ns_equality_system(b);
  const std::size_t n = sys.dim();

  // reduce to independent rows once
  Mat aug = sys.eq_a;
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(sys.eq_b[i]);
  const auto pivots = rref(aug);
  const std::size_t rank = pivots.size();
  Mat a(rank, Vec(n));
  Vec rhs(rank);
  for (std::size_t r = 0; r < rank; ++r) {
    for (std::size_t j = 0; j < n; ++j) a[r][j] = aug[r][j];
    rhs[r] = aug[r][n];
  }

  std::vector<Vec> found;
  std::vector<std::size_t> subset(rank);
  auto recurse = [&](auto&& self, std::size_t next, std::size_t depth) -> void {
    if (depth == rank) {
      Mat cols(rank, Vec(rank));
      for (std::size_t r = 0; r < rank; ++r)
        for (std::size_t k = 0; k < rank; ++k) cols[r][k] = a[r][subset[k]];
      Mat rank_check = cols;
      if (rref(rank_check).size() != rank) return;  // dependent basis
      auto x_b = solve(cols, rhs);
      if (!x_b) return;
      Vec x(n, Rational(0));
      bool feasible = true;
      for (std::size_t k = 0; k < rank; ++k) {
        if ((*x_b)[k] < 0) {
          feasible = false;
          break;
        }
        x[subset[k]] = (*x_b)[k];
      }
      if (feasible) found.push_back(std::move(x));
      return;
    }
    for (std::size_t j = next; j + (rank - depth) <= n; ++j) {
      subset[depth] = j;
      self(self, j + 1, depth + 1);
    }
  };
  recurse(recurse, 0, 0);

  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

}  // namespace oracles
