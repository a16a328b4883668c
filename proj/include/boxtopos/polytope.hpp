#pragma once

#include <optional>
#include <vector>

#include "boxtopos/bitset.hpp"
#include "boxtopos/linalg.hpp"
#include "boxtopos/states.hpp"

namespace boxtopos {

// Coordinate layout and equality system of the non-signalling polytope: one
// coordinate per (maximal context, outcome) table entry, one normalization
// row per maximal context, and one marginal-agreement row per
// (context, outcome, extra refinement). The polytope is this affine set
// intersected with the nonnegative orthant.
struct NsSystem {
  std::vector<ContextId> maximal;   // sorted
  std::vector<std::size_t> offset;  // offset[mi] = first coordinate of row mi
  Mat eq_a;
  Vec eq_b;

  std::size_t dim() const { return offset.back(); }
  std::size_t coordinate(std::size_t mi, std::uint64_t a) const {
    return offset[mi] + a;
  }
};

inline Vec flatten_table(const BoxState& s) {
  Vec out;
  for (const auto& row : s.table) out.insert(out.end(), row.begin(), row.end());
  return out;
}

inline BoxState unflatten_table(const BoxPresentation& b, const Vec& x) {
  BoxState s = empty_state_shape(b);
  std::size_t k = 0;
  for (auto& row : s.table)
    for (auto& entry : row) entry = x[k++];
  return s;
}

inline NsSystem ns_equality_system(const BoxPresentation& b) {
  NsSystem sys;
  const auto contexts = contexts_of(b);
  sys.maximal = maximal_contexts(contexts);
  sys.offset.assign(1, 0);
  for (const auto& c : sys.maximal)
    sys.offset.push_back(sys.offset.back() +
                         (std::uint64_t{1} << context_questions(c).size()));

  const std::size_t n = sys.dim();
  for (std::size_t mi = 0; mi < sys.maximal.size(); ++mi) {
    Vec row(n, Rational(0));
    for (std::size_t x = sys.offset[mi]; x < sys.offset[mi + 1]; ++x)
      row[x] = 1;
    sys.eq_a.push_back(std::move(row));
    sys.eq_b.push_back(1);
  }

  for (std::size_t ci = 0; ci < contexts.size(); ++ci) {
    const auto c_qs = context_questions(contexts.id_of(ci));
    std::vector<std::size_t> refinements;
    for (std::size_t mi = 0; mi < sys.maximal.size(); ++mi)
      if (contexts.leq(contexts.id_of(ci), sys.maximal[mi]))
        refinements.push_back(mi);
    if (refinements.size() < 2) continue;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << c_qs.size()); ++a) {
      for (std::size_t r = 1; r < refinements.size(); ++r) {
        Vec row(n, Rational(0));
        for (std::size_t side = 0; side < 2; ++side) {
          const std::size_t mi = refinements[side == 0 ? 0 : r];
          const auto d_qs = context_questions(sys.maximal[mi]);
          const auto pos = detail::question_positions(c_qs, d_qs);
          for (std::uint64_t y = 0;
               y < (std::uint64_t{1} << d_qs.size()); ++y) {
            bool restricts = true;
            for (std::size_t k = 0; restricts && k < c_qs.size(); ++k)
              if (outcome_bit(y, pos[k], d_qs.size()) !=
                  outcome_bit(a, k, c_qs.size()))
                restricts = false;
            if (restricts)
              row[sys.coordinate(mi, y)] = side == 0 ? 1 : -1;
          }
        }
        sys.eq_a.push_back(std::move(row));
        sys.eq_b.push_back(0);
      }
    }
  }
  return sys;
}

namespace detail {

inline Vec normalize_ray(Vec r) {
  BigInt lcm_den = 1;
  for (const auto& x : r)
    lcm_den = boost::multiprecision::lcm(lcm_den, denominator(x));
  BigInt gcd_num = 0;
  for (auto& x : r) {
    x *= lcm_den;
    gcd_num = boost::multiprecision::gcd(gcd_num, numerator(x));
  }
  if (gcd_num > 1)
    for (auto& x : r) x /= gcd_num;
  return r;
}

// Extreme rays of the pointed cone { r : rows[i] . r >= 0 for all i } by the
// double description method: start from a simplicial subcone picked by exact
// elimination, then insert the remaining halfspaces one at a time, combining
// adjacent positive/negative rays. Adjacency is the combinatorial test on
// zero sets. Deterministic throughout.
inline std::vector<Vec> dd_extreme_rays(const Mat& rows) {
  const std::size_t m = rows.empty() ? 0 : rows[0].size();
  const std::size_t nrows = rows.size();

  // greedily pick m independent rows
  Mat echelon;
  std::vector<std::size_t> chosen;
  std::vector<bool> processed(nrows, false);
  for (std::size_t i = 0; i < nrows && chosen.size() < m; ++i) {
    Mat trial = echelon;
    trial.push_back(rows[i]);
    if (rref(trial).size() > chosen.size()) {
      echelon = std::move(trial);
      chosen.push_back(i);
      processed[i] = true;
    }
  }
  if (chosen.size() < m)
    throw InputError("double description: cone is not pointed");

  Mat basis_rows;
  for (std::size_t i : chosen) basis_rows.push_back(rows[i]);

  struct Ray {
    Vec v;
    DynBitset zero;  // over processed constraint indices
  };
  std::vector<Ray> rays;
  for (std::size_t j = 0; j < m; ++j) {
    Vec e(m, Rational(0));
    e[j] = 1;
    auto r = solve(basis_rows, e);
    if (!r) throw InputError("double description: singular initial basis");
    Ray ray{normalize_ray(std::move(*r)), DynBitset(nrows)};
    for (std::size_t k = 0; k < m; ++k)
      if (k != j) ray.zero.set(chosen[k]);
    rays.push_back(std::move(ray));
  }

  auto dot = [&](const Vec& a, const Vec& b) {
    Rational s = 0;
    for (std::size_t k = 0; k < m; ++k) s += a[k] * b[k];
    return s;
  };

  for (std::size_t i = 0; i < nrows; ++i) {
    if (processed[i]) continue;
    processed[i] = true;

    std::vector<Rational> value(rays.size());
    bool any_negative = false;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      value[r] = dot(rows[i], rays[r].v);
      if (value[r] < 0) any_negative = true;
      if (value[r] == 0) rays[r].zero.set(i);
    }
    if (!any_negative) continue;

    std::vector<Ray> next;
    for (std::size_t r = 0; r < rays.size(); ++r)
      if (value[r] >= 0) next.push_back(rays[r]);

    for (std::size_t p = 0; p < rays.size(); ++p) {
      if (value[p] <= 0) continue;
      for (std::size_t q = 0; q < rays.size(); ++q) {
        if (value[q] >= 0) continue;
        const DynBitset common = rays[p].zero & rays[q].zero;
        bool adjacent = true;
        for (std::size_t w = 0; adjacent && w < rays.size(); ++w)
          if (w != p && w != q && common.subset_of(rays[w].zero))
            adjacent = false;
        if (!adjacent) continue;
        Vec v(m);
        for (std::size_t k = 0; k < m; ++k)
          v[k] = value[p] * rays[q].v[k] - value[q] * rays[p].v[k];
        Ray fresh{normalize_ray(std::move(v)), common};
        fresh.zero.set(i);
        next.push_back(std::move(fresh));
      }
    }
    rays = std::move(next);
  }

  std::vector<Vec> out;
  out.reserve(rays.size());
  for (auto& r : rays) out.push_back(std::move(r.v));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// All vertices of the non-signalling polytope, exact and in canonical order
// (lexicographic on the flattened table). The polytope is homogenized over
// the affine parameterization by the kernel of the equality system, with the
// uniform state as the interior base point.
inline std::vector<BoxState> ns_polytope_vertices(const BoxPresentation& b,
                                                  const Config& cfg = {}) {
  const NsSystem sys = ns_equality_system(b);
  const std::size_t n = sys.dim();
  const Vec x0 = flatten_table(uniform_state(b));
  const std::vector<Vec> kernel = null_space_basis(sys.eq_a);
  const std::size_t k = kernel.size();
  if (k > cfg.polytope_dim_cap)
    throw ResourceError("ns_polytope_vertices: polytope has " +
                        std::to_string(k) +
                        " free coordinates, cap is " +
                        std::to_string(cfg.polytope_dim_cap));

  // inequalities over (t, z): x0_i t + (K z)_i >= 0, plus t >= 0
  Mat rows;
  rows.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Vec row(k + 1);
    row[0] = x0[i];
    for (std::size_t j = 0; j < k; ++j) row[j + 1] = kernel[j][i];
    rows.push_back(std::move(row));
  }
  Vec t_row(k + 1, Rational(0));
  t_row[0] = 1;
  rows.push_back(std::move(t_row));

  std::vector<BoxState> vertices;
  for (const auto& ray : detail::dd_extreme_rays(rows)) {
    if (ray[0] <= 0)
      throw InputError(
          "ns_polytope_vertices: unbounded direction in a state polytope");
    Vec x = x0;
    for (std::size_t j = 0; j < k; ++j) {
      const Rational zj = ray[j + 1] / ray[0];
      for (std::size_t i = 0; i < n; ++i) x[i] += kernel[j][i] * zj;
    }
    vertices.push_back(unflatten_table(b, x));
  }
  std::sort(vertices.begin(), vertices.end(),
            [](const BoxState& a, const BoxState& s) { return a.table < s.table; });
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  return vertices;
}

namespace detail {

struct PhaseOneResult {
  Rational optimum;  // min sum of artificials; 0 iff feasible
  Vec primal;        // length n
  Vec multipliers;   // y over the original (un-negated) rows, length m
};

// Phase-one simplex with Bland's rule, exact arithmetic, explicit artificial
// columns. Used only for feasibility plus the Farkas certificate.
inline PhaseOneResult phase_one_simplex(Mat a, Vec b) {
  const std::size_t m = a.size();
  const std::size_t n = m == 0 ? 0 : a[0].size();
  std::vector<int> sign(m, 1);
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] < 0) {
      sign[i] = -1;
      b[i] = -b[i];
      for (auto& x : a[i]) x = -x;
    }

  Mat t(m, Vec(n + m + 1, Rational(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1;
    t[i][n + m] = b[i];
    basis[i] = n + i;
  }

  auto reduced_cost = [&](std::size_t j) {
    Rational d = j >= n ? 1 : 0;
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] >= n) d -= t[i][j];
    return d;
  };

  while (true) {
    std::size_t entering = n + m;
    for (std::size_t j = 0; j < n + m; ++j) {
      bool basic = false;
      for (std::size_t i = 0; i < m; ++i)
        if (basis[i] == j) basic = true;
      if (!basic && reduced_cost(j) < 0) {
        entering = j;
        break;  // Bland: smallest index
      }
    }
    if (entering == n + m) break;

    std::size_t leaving = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][entering] <= 0) continue;
      const Rational ratio = t[i][n + m] / t[i][entering];
      if (leaving == m || ratio < best ||
          (ratio == best && basis[i] < basis[leaving]))
        leaving = i, best = ratio;
    }
    if (leaving == m)
      throw InputError("phase-one simplex: unbounded, input is inconsistent");

    const Rational pivot = t[leaving][entering];
    for (auto& x : t[leaving]) x /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leaving || t[i][entering] == 0) continue;
      const Rational factor = t[i][entering];
      for (std::size_t j = 0; j <= n + m; ++j)
        t[i][j] -= factor * t[leaving][j];
    }
    basis[leaving] = entering;
  }

  PhaseOneResult res;
  res.optimum = 0;
  res.primal.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n)
      res.optimum += t[i][n + m];
    else
      res.primal[basis[i]] = t[i][n + m];
  }
  res.multipliers.assign(m, Rational(0));
  for (std::size_t j = 0; j < m; ++j) {
    Rational y = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] >= n) y += t[i][n + j];
    res.multipliers[j] = sign[j] * y;
  }
  return res;
}

}  // namespace detail

struct ClassicalWeight {
  GlobalAssignment assignment;
  Rational weight;
};

struct ClassicalityResult {
  bool classical = false;
  // convex decomposition over deterministic states, when classical
  std::vector<ClassicalWeight> weights;
  // a separating functional otherwise, normalized so that its maximum over
  // deterministic states is exactly 2; the state then scores above 2
  std::optional<BellFunctional> separating;
  Rational classical_bound;
  Rational value;
};

// Exact membership test for the classical (local deterministic) polytope:
// phase-one LP over the deterministic vertices. Infeasibility turns the LP
// multipliers into a Farkas certificate, reported as a Bell functional.
inline ClassicalityResult is_classical(const BoxState& s,
                                       const Config& cfg = {}) {
  auto report = validate_state(s);
  if (!report.ok)
    throw InputError("is_classical needs a valid state: " +
                     report.diagnostics.front());

  const auto& qs = s.presentation.questions();
  if (qs.size() >= 64 || (std::uint64_t{1} << qs.size()) > cfg.deterministic_cap)
    throw ResourceError("is_classical: 2^" + std::to_string(qs.size()) +
                        " deterministic vertices exceed the cap of " +
                        std::to_string(cfg.deterministic_cap));

  std::vector<GlobalAssignment> assignments;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << qs.size()); ++mask) {
    GlobalAssignment g;
    for (std::size_t i = 0; i < qs.size(); ++i)
      g[qs[i]] = static_cast<int>((mask >> (qs.size() - 1 - i)) & 1);
    assignments.push_back(std::move(g));
  }

  const Vec target = flatten_table(s);
  const std::size_t n_coords = target.size();
  Mat a(n_coords + 1, Vec(assignments.size(), Rational(0)));
  for (std::size_t g = 0; g < assignments.size(); ++g) {
    const Vec col = flatten_table(deterministic_state(s.presentation, assignments[g]));
    for (std::size_t i = 0; i < n_coords; ++i) a[i][g] = col[i];
    a[n_coords][g] = 1;
  }
  Vec b = target;
  b.push_back(1);

  auto lp = detail::phase_one_simplex(std::move(a), std::move(b));
  ClassicalityResult out;
  if (lp.optimum == 0) {
    out.classical = true;
    for (std::size_t g = 0; g < assignments.size(); ++g)
      if (lp.primal[g] != 0)
        out.weights.push_back({assignments[g], lp.primal[g]});
    return out;
  }

  // Farkas: y . column(g) <= 0 for every deterministic g, y . target > 0.
  BellFunctional f;
  f.presentation = s.presentation;
  f.maximal = s.maximal;
  f.coefficients = s.table;
  std::size_t k = 0;
  for (auto& row : f.coefficients)
    for (auto& c : row) c = lp.multipliers[k++];

  Rational max_det;
  bool first = true;
  for (const auto& g : assignments) {
    const Rational v = bell_value(deterministic_state(s.presentation, g), f);
    if (first || v > max_det) max_det = v, first = false;
  }
  // shift by a constant (uniform bump on one maximal-context row) so the
  // classical maximum sits exactly at 2
  const Rational delta = 2 - max_det;
  for (auto& c : f.coefficients[0]) c += delta;
  out.classical = false;
  out.classical_bound = 2;
  out.value = bell_value(s, f);
  out.separating = std::move(f);
  return out;
}

}  // namespace boxtopos
