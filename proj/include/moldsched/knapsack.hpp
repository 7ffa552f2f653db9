#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "moldsched/rational.hpp"

namespace moldsched {

struct KpItem {
  std::string id;
  long long size = 1;        // processor count, >= 1
  Rat profit;                // work units; exact rational
  bool compressible = false;
};

struct KpSolution {
  Rat profit;
  std::vector<size_t> chosen;  // indices into the item vector handed to the solver
};

namespace detail {

// Lawler pair list node with backtracking links into an append-only arena.
template <typename Size>
struct PairNode {
  Rat profit;
  Size size;
  int prev = -1;
  int item = -1;
};

// Merges `base` with `base + item` keeping only non-dominated pairs:
// after the sweep both profit and size are strictly increasing.
template <typename Size>
std::vector<int> merge_dominated(std::vector<PairNode<Size>>& arena, const std::vector<int>& base,
                                 const std::vector<int>& added) {
  std::vector<int> out;
  out.reserve(base.size() + added.size());
  size_t i = 0, k = 0;
  auto push = [&](int idx) {
    const auto& node = arena[static_cast<size_t>(idx)];
    if (!out.empty()) {
      const auto& last = arena[static_cast<size_t>(out.back())];
      if (node.profit <= last.profit) return;  // dominated (size is non-decreasing here)
      if (node.size == last.size) out.pop_back();
    }
    out.push_back(idx);
  };
  while (i < base.size() || k < added.size()) {
    if (k == added.size() ||
        (i < base.size() && arena[static_cast<size_t>(base[i])].size <=
                                arena[static_cast<size_t>(added[k])].size)) {
      push(base[i++]);
    } else {
      push(added[k++]);
    }
  }
  return out;
}

template <typename Size>
std::vector<size_t> backtrack(const std::vector<PairNode<Size>>& arena, int idx) {
  std::vector<size_t> items;
  while (idx >= 0) {
    const auto& node = arena[static_cast<size_t>(idx)];
    if (node.item >= 0) items.push_back(static_cast<size_t>(node.item));
    idx = node.prev;
  }
  std::sort(items.begin(), items.end());
  return items;
}

// Best pair with size <= cap, or -1 (the (0,0) root always qualifies for cap >= 0).
template <typename Size>
int best_at(const std::vector<PairNode<Size>>& arena, const std::vector<int>& list,
            const Size& cap) {
  int best = -1;
  // list is sorted by size with increasing profit: binary search the boundary
  size_t lo = 0, hi = list.size();
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (arena[static_cast<size_t>(list[mid])].size <= cap)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo > 0) best = list[lo - 1];
  return best;
}

}  // namespace detail

/// Exact 0/1 knapsack over all capacities up to max(B) in one pass; the
/// answer for each capacity is the largest stored pair not exceeding it.
inline std::map<long long, KpSolution> kp_multi_capacity(const std::vector<KpItem>& items,
                                                         const std::set<long long>& B) {
  std::map<long long, KpSolution> out;
  if (B.empty()) return out;
  long long max_b = *B.rbegin();
  std::vector<detail::PairNode<long long>> arena;
  arena.push_back({Rat(0), 0, -1, -1});
  std::vector<int> list{0};
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].size < 1) throw std::invalid_argument("knapsack: item size must be >= 1");
    std::vector<int> added;
    added.reserve(list.size());
    for (int idx : list) {
      const auto node = arena[static_cast<size_t>(idx)];
      if (node.size > max_b - items[i].size) break;  // sorted by size
      arena.push_back({node.profit + items[i].profit, node.size + items[i].size, idx,
                       static_cast<int>(i)});
      added.push_back(static_cast<int>(arena.size()) - 1);
    }
    list = detail::merge_dominated(arena, list, added);
  }
  for (long long b : B) {
    int idx = b >= 0 ? detail::best_at(arena, list, b) : -1;
    if (idx < 0)
      out[b] = {Rat(0), {}};
    else
      out[b] = {arena[static_cast<size_t>(idx)].profit, detail::backtrack(arena, idx)};
  }
  return out;
}

/// Exact 0/1 knapsack via the pair-list dynamic program.
inline KpSolution kp_exact(const std::vector<KpItem>& items, long long C) {
  if (C < 0) throw std::invalid_argument("kp_exact: negative capacity");
  return kp_multi_capacity(items, {C}).at(C);
}

/// geom(L, U, x) = { L * x^i : i = 0 .. ceil(log_x(U/L)) }.
inline std::vector<Rat> geom(const Rat& L, const Rat& U, const Rat& x) {
  if (!(0 < L && L <= U && x > 1)) throw std::invalid_argument("geom: need 0 < L <= U, x > 1");
  std::vector<Rat> out{L};
  Rat v = L;
  while (v < U) {
    v *= x;
    out.push_back(v);
  }
  return out;
}

/// Largest element of a geom set that is <= a (nullopt if a < front).
inline std::optional<Rat> geom_floor(const Rat& a, const std::vector<Rat>& g) {
  auto it = std::upper_bound(g.begin(), g.end(), a);
  if (it == g.begin()) return std::nullopt;
  return *(it - 1);
}

/// Smallest element of a geom set that is >= a (nullopt if a > back).
inline std::optional<Rat> geom_ceil(const Rat& a, const std::vector<Rat>& g) {
  auto it = std::lower_bound(g.begin(), g.end(), a);
  if (it == g.end()) return std::nullopt;
  return *it;
}

/// Capacity grid for the adaptive-normalization DP. Interval i is
/// [alpha_{i-1}, alpha_i) with subinterval width U_i = rho/((1-rho)*nbar) * alpha_i;
/// pair sizes are normalized down to subinterval lower bounds, so a solution
/// read off at alpha_i understates its true size by at most nbar * U_i, which
/// compressing by rho absorbs exactly.
struct CapacityGrid {
  std::vector<Rat> alphas;  // alpha_1 < ... < alpha_k
  Rat alpha0;               // alpha_min
  Rat rho;
  long long nbar = 1;

  /// The running-time analysis assumes alpha_i - alpha_{i-1} <= rho * alpha_i;
  /// correctness of the per-query answers does not depend on it.
  bool satisfies_gap_condition() const {
    Rat prev = alpha0;
    for (const Rat& a : alphas) {
      if (a - prev > rho * a) return false;
      prev = a;
    }
    return true;
  }
};

/// Solves (I^c, I^c, alpha, rho) for every alpha in the grid with one DP.
/// Per grid point the profit is at least the exact uncompressed optimum at
/// that capacity; the chosen set, compressed by rho, fits the capacity
/// provided no solution holds more than nbar items.
inline std::vector<KpSolution> kpc_adaptive(const std::vector<KpItem>& items,
                                            const CapacityGrid& grid) {
  for (const auto& it : items)
    if (!it.compressible) throw std::invalid_argument("kpc_adaptive: all items must be compressible");
  if (grid.nbar < 1 || grid.rho <= 0 || grid.rho >= 1 || grid.alpha0 <= 0)
    throw std::invalid_argument("kpc_adaptive: bad grid parameters");
  const auto& A = grid.alphas;
  std::vector<KpSolution> out(A.size());
  if (A.empty()) return out;

  std::vector<Rat> U(A.size());
  Rat u_coef = grid.rho / ((1 - grid.rho) * rat_of(grid.nbar));
  for (size_t i = 0; i < A.size(); ++i) U[i] = u_coef * A[i];

  // Normalize a raw pair size down to its subinterval lower bound; sizes at
  // or below alpha0 are kept exact, sizes whose normalized value would exceed
  // alpha_k can serve no query and are discarded.
  auto normalize = [&](const Rat& s) -> std::optional<Rat> {
    if (s <= grid.alpha0) return s;
    size_t i = std::lower_bound(A.begin(), A.end(), s) - A.begin();
    if (i == A.size()) i = A.size() - 1;  // beyond alpha_k: widest grid
    Rat lower = i == 0 ? grid.alpha0 : A[i - 1];
    Rat norm = rat_floor(s / U[i]) * U[i];
    if (norm < lower) norm = lower;
    if (norm > A.back()) return std::nullopt;
    return norm;
  };

  std::vector<detail::PairNode<Rat>> arena;
  arena.push_back({Rat(0), Rat(0), -1, -1});
  std::vector<int> list{0};
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].size < 1) throw std::invalid_argument("knapsack: item size must be >= 1");
    std::vector<int> added;
    added.reserve(list.size());
    for (int idx : list) {
      const auto node = arena[static_cast<size_t>(idx)];
      auto norm = normalize(node.size + rat_of(items[i].size));
      if (!norm) continue;
      arena.push_back({node.profit + items[i].profit, *norm, idx, static_cast<int>(i)});
      added.push_back(static_cast<int>(arena.size()) - 1);
    }
    std::sort(added.begin(), added.end(), [&](int a, int b) {
      return arena[static_cast<size_t>(a)].size < arena[static_cast<size_t>(b)].size;
    });
    list = detail::merge_dominated(arena, list, added);
  }
  for (size_t i = 0; i < A.size(); ++i) {
    int idx = detail::best_at(arena, list, A[i]);
    MOLD_CHECK(idx >= 0, "kpc_adaptive: root pair missing");
    out[i] = {arena[static_cast<size_t>(idx)].profit, detail::backtrack(arena, idx)};
  }
  return out;
}

struct KpcResult {
  Rat profit;
  std::vector<size_t> chosen;
  Rat alpha_used;  // grid point of the winning combination (0 for the all-incompressible branch)
};

/// Knapsack with compressible items: returns a set whose profit is at least
/// the exact uncompressed optimum at capacity C and which is feasible for
/// compression factor rho' = 2*rho - rho^2. Capacities for the compressible
/// side come from a geometric grid; the incompressible side is solved for
/// all matching residual capacities in one pass.
inline KpcResult kpc_solve(const std::vector<KpItem>& items, long long C, const Rat& rho,
                           const Rat& alpha_min, const Rat& beta_max, long long nbar) {
  if (rho <= 0 || rho > make_rat(1, 4))
    throw std::invalid_argument("kpc_solve: rho must be in (0, 1/4]");
  if (alpha_min <= 0) throw std::invalid_argument("kpc_solve: alpha_min must be positive");
  if (beta_max < 0 || nbar < 1) throw std::invalid_argument("kpc_solve: bad parameters");
  KpcResult best{Rat(0), {}, Rat(0)};
  if (C <= 0 || items.empty()) return best;

  std::vector<KpItem> comp, incomp;
  std::vector<size_t> comp_ix, incomp_ix;
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].compressible) {
      comp.push_back(items[i]);
      comp_ix.push_back(i);
    } else {
      incomp.push_back(items[i]);
      incomp_ix.push_back(i);
    }
  }

  Rat amin = alpha_min;
  if (rat_of(C) - beta_max > amin) amin = rat_of(C) - beta_max;  // compressible space guaranteed free
  Rat x = 1 / (1 - rho);
  std::vector<Rat> A;
  if (!comp.empty()) {
    Rat L = amin * x;
    if (L > rat_of(C)) L = rat_of(C);
    A = geom(L, rat_of(C), x);
  }
  CapacityGrid grid{A, amin, rho, nbar};
  MOLD_CHECK(grid.satisfies_gap_condition(), "kpc_solve: geometric grid violates gap condition");

  auto beta_of = [&](const Rat& alpha) { return rat_of(C) - (1 - rho) * alpha; };
  std::set<long long> B;
  Int beta0_i = rat_floor(beta_max);
  if (beta0_i > int_of(C)) beta0_i = int_of(C);
  long long beta0 = to_ll(beta0_i);
  if (beta0 < 0) beta0 = 0;
  B.insert(beta0);
  for (const Rat& a : A) {
    Rat b = beta_of(a);
    if (b < 0) b = 0;
    B.insert(to_ll(rat_floor(b)));
  }
  auto incomp_sol = kp_multi_capacity(incomp, B);
  auto comp_sol = kpc_adaptive(comp, grid);

  auto true_size = [&](const std::vector<size_t>& ix) {
    Int s = 0;
    for (size_t i : ix) s += int_of(items[i].size);
    return s;
  };
  auto ids_of = [&](std::vector<size_t> ix) {
    std::vector<std::string> ids;
    ids.reserve(ix.size());
    for (size_t i : ix) ids.push_back(items[i].id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  bool have = false;
  Int best_size;
  std::vector<std::string> best_ids;
  auto consider = [&](const Rat& alpha, const KpSolution* cs, const KpSolution& is) {
    Rat profit = is.profit + (cs ? cs->profit : Rat(0));
    std::vector<size_t> chosen;
    if (cs)
      for (size_t c : cs->chosen) chosen.push_back(comp_ix[c]);
    for (size_t c : is.chosen) chosen.push_back(incomp_ix[c]);
    std::sort(chosen.begin(), chosen.end());
    Int sz = true_size(chosen);
    // deterministic tie-break: highest profit, then smallest true size,
    // then lexicographically smallest id set
    bool better = false;
    if (!have || profit > best.profit)
      better = true;
    else if (profit == best.profit) {
      if (sz < best_size)
        better = true;
      else if (sz == best_size && ids_of(chosen) < best_ids)
        better = true;
    }
    if (better) {
      best = {profit, std::move(chosen), alpha};
      best_size = sz;
      best_ids = ids_of(best.chosen);
      have = true;
    }
  };

  {
    long long b0 = beta0;
    consider(Rat(0), nullptr, incomp_sol.at(b0));
  }
  for (size_t i = 0; i < A.size(); ++i) {
    Rat b = beta_of(A[i]);
    if (b < 0) b = 0;
    long long bi = to_ll(rat_floor(b));
    consider(A[i], &comp_sol[i], incomp_sol.at(bi));
  }
  return best;
}

struct KpType {
  long long size = 1;
  Rat profit;
  long long count = 1;
  bool compressible = false;
  std::string name;
};

struct BoundedExpansion {
  std::vector<KpItem> items;                        // container items
  std::vector<std::pair<size_t, long long>> origin;  // (type index, multiplicity) per container
};

/// Binary-splits each item type into container items with multiplicities
/// 1, 2, 4, ..., remainder, so every count 0..count is representable and no
/// selection exceeds the type's count.
inline BoundedExpansion bounded_kp_expand(const std::vector<KpType>& types) {
  BoundedExpansion out;
  for (size_t t = 0; t < types.size(); ++t) {
    const auto& ty = types[t];
    if (ty.count < 1) throw std::invalid_argument("bounded_kp_expand: count must be >= 1");
    if (ty.size < 1) throw std::invalid_argument("bounded_kp_expand: size must be >= 1");
    long long rest = ty.count;
    long long mult = 1;
    int piece = 0;
    while (rest > 0) {
      long long take = std::min(mult, rest);
      rest -= take;
      Int big = int_of(ty.size) * int_of(take);
      MOLD_CHECK(big <= int_of(kMaxMachines), "bounded_kp_expand: container size overflow");
      out.items.push_back({ty.name + "#" + std::to_string(piece++),
                           to_ll(big), ty.profit * rat_of(take),
                           ty.compressible});
      out.origin.emplace_back(t, take);
      mult *= 2;
    }
  }
  return out;
}

}  // namespace moldsched
