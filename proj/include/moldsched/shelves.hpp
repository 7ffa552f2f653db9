#pragma once

#include <deque>
#include <map>

#include "moldsched/fptas.hpp"
#include "moldsched/knapsack.hpp"

namespace moldsched {

enum class MrtVariant { simple, bounded, linear };

struct BigSmallSplit {
  std::vector<size_t> small, big;
  Rat small_work;  // W_S(d): sequential work of the small jobs
};

/// Small jobs complete within d/2 on one machine; they are re-added greedily
/// at the end of the shelf construction.
inline BigSmallSplit split_small_big(const Instance& inst, const Rat& d) {
  BigSmallSplit out;
  out.small_work = 0;
  for (size_t j = 0; j < inst.n(); ++j) {
    Rat t1 = ptime(inst, j, 1);
    if (t1 * 2 <= d) {
      out.small.push_back(j);
      out.small_work += t1;
    } else {
      out.big.push_back(j);
    }
  }
  return out;
}

/// v_j(d): work saved by scheduling j in the tall shelf instead of the flat
/// one. Non-negative for monotone jobs.
inline Rat profit(const Instance& inst, size_t j, const Rat& d) {
  auto gd = gamma(inst, j, d);
  auto gd2 = gamma(inst, j, d / 2);
  if (!gd || !gd2)
    throw std::invalid_argument("profit: gamma undefined at d or d/2 (forced-S1 job)");
  return work(inst, j, *gd2) - work(inst, j, *gd);
}

/// Work of the two-shelf schedule that places `selected` at threshold d and
/// the remaining big jobs at threshold d/2. When gamma(., d/2) is defined on
/// all big jobs the sum is also computed via the profit identity and the two
/// forms must agree; selected jobs with undefined gamma(., d/2) (forced tall
/// jobs) only contribute their direct term.
inline Rat two_shelf_work(const Instance& inst, const std::vector<size_t>& big,
                          const std::vector<bool>& selected, const Rat& d) {
  Rat direct(0), base(0), saved(0);
  bool identity = true;
  for (size_t j : big) {
    auto gd = gamma(inst, j, d);
    MOLD_CHECK(gd.has_value(), "two_shelf_work: gamma undefined at d on a big job");
    auto gd2 = gamma(inst, j, d / 2);
    if (!gd2) {
      MOLD_CHECK(selected[j], "two_shelf_work: flat-shelf job cannot meet d/2");
      identity = false;
      direct += work(inst, j, *gd);
      continue;
    }
    base += work(inst, j, *gd2);
    if (selected[j]) {
      direct += work(inst, j, *gd);
      saved += profit(inst, j, d);
    } else {
      direct += work(inst, j, *gd2);
    }
  }
  if (identity) MOLD_CHECK(direct == base - saved, "two_shelf_work: profit identity violated");
  return direct;
}

struct ShelfJob {
  size_t job;
  long long procs;
};

/// Two jobs sharing one processor column: `upper` starts when `lower`
/// finishes. In the special case of rule 2 the lower job keeps its full
/// allotment; one of its columns carries the upper job.
struct ShelfStack {
  size_t lower;
  long long lower_procs;
  size_t upper;  // always on 1 processor
};

struct ShelfAssignment {
  std::vector<ShelfJob> s0, s1, s2;
  std::vector<ShelfStack> stacks;

  long long low_region_procs() const {  // p0 + p1
    long long total = 0;
    for (const auto& e : s0) total += e.procs;
    for (const auto& st : stacks) total += st.lower_procs;
    for (const auto& e : s1) total += e.procs;
    return total;
  }
  long long s0_columns() const {  // columns unavailable to the flat shelf
    long long total = 0;
    for (const auto& e : s0) total += e.procs;
    total += static_cast<long long>(stacks.size());
    return total;
  }
  long long s2_procs() const {
    long long total = 0;
    for (const auto& e : s2) total += e.procs;
    return total;
  }
};

struct TransformMode {
  bool bucketed = false;  // key rule decisions on geometrically rounded times
  Rat rho;                // bucket ratio parameter (bucketed only)
};

/// Applies the three shelf transformation rules exhaustively to a two-shelf
/// assignment of the big jobs at threshold d_prime. Processor counts only
/// shrink, so the work never increases; each job moves at most twice
/// (flat -> tall by rule 3, then tall -> side by rules 1/2).
inline ShelfAssignment apply_transformation_rules(const Instance& inst,
                                                  const std::vector<size_t>& s1_jobs,
                                                  const std::vector<size_t>& s2_jobs, long long m,
                                                  const Rat& d_prime, const TransformMode& mode) {
  ShelfAssignment out;
  Rat three_quarter = Rat(3) * d_prime / 4;
  Rat three_half = Rat(3) * d_prime / 2;

  std::vector<Rat> bucket;
  if (mode.bucketed) bucket = geom(d_prime / 2, d_prime, 1 + 4 * mode.rho);
  auto key_of = [&](const Rat& pt) -> Rat {
    if (!mode.bucketed || pt < d_prime / 2) return pt;
    auto f = geom_floor(pt, bucket);
    MOLD_CHECK(f.has_value(), "transformation rules: bucket floor missing");
    return *f;
  };

  long long used_low = 0;                     // p0 + p1
  std::multimap<Rat, ShelfJob> tall;          // category 3, keyed for the special case of rule 2
  std::optional<ShelfJob> unpaired;           // waiting 1-processor category-2 job

  auto try_special_pair = [&]() {
    // one unpaired short 1-processor job: ride on top of the shortest tall job
    while (unpaired && !tall.empty()) {
      auto it = tall.begin();
      Rat sum = key_of(ptime(inst, unpaired->job, 1)) + it->first;
      if (sum > three_half) return;
      out.stacks.push_back({it->second.job, it->second.procs, unpaired->job});
      used_low -= 1;  // the rider's old column is freed
      tall.erase(it);
      unpaired.reset();
    }
  };

  auto classify_tall_shelf_job = [&](size_t j, long long procs) {
    Rat pt = ptime(inst, j, procs);
    Rat key = key_of(pt);
    if (key <= three_quarter && procs > 1) {
      out.s0.push_back({j, procs - 1});  // rule 1
      used_low -= 1;
      return;
    }
    if (key <= three_quarter && procs == 1) {  // rule 2
      if (unpaired) {
        out.stacks.push_back({unpaired->job, 1, j});
        used_low -= 1;
        unpaired.reset();
      } else {
        unpaired = ShelfJob{j, 1};
        try_special_pair();
      }
      return;
    }
    tall.insert({key, ShelfJob{j, procs}});
    try_special_pair();
  };

  for (size_t j : s1_jobs) {
    auto g = gamma(inst, j, d_prime);
    MOLD_CHECK(g.has_value(), "transformation rules: job cannot meet d'");
    used_low += *g;
  }
  for (size_t j : s1_jobs) classify_tall_shelf_job(j, *gamma(inst, j, d_prime));

  for (size_t j : s2_jobs) {
    long long q = m - used_low;  // rule 3
    bool moved = false;
    if (q >= 1) {
      auto g = gamma(inst, j, three_half);
      if (g && *g <= q) {
        long long p = *g;
        used_low += p;
        if (ptime(inst, j, p) > d_prime) {
          out.s0.push_back({j, p});
        } else {
          classify_tall_shelf_job(j, p);
        }
        moved = true;
      }
    }
    if (!moved) {
      auto g2 = gamma(inst, j, d_prime / 2);
      MOLD_CHECK(g2.has_value(), "transformation rules: flat-shelf job cannot meet d'/2");
      out.s2.push_back({j, *g2});
    }
  }

  for (const auto& [key, e] : tall) out.s1.push_back(e);
  if (unpaired) out.s1.push_back(*unpaired);
  std::sort(out.s1.begin(), out.s1.end(),
            [](const ShelfJob& a, const ShelfJob& b) { return a.job < b.job; });
  return out;
}

/// A maximal run of processors with identical free intervals: each is busy
/// [0, low] and [cap - top, cap].
struct ColumnGroup {
  long long count;
  Rat low;
  Rat top;
};

/// Run-length column layout of a shelf assignment: side/stack columns first,
/// tall-shelf columns next, and the flat shelf aligned to the right end so
/// it may share columns with the tall shelf but never with the side shelf.
/// Returns nullopt when the assignment does not fit m processors.
inline std::optional<std::vector<ColumnGroup>> shelf_columns(const Instance& inst,
                                                             const ShelfAssignment& a, long long m,
                                                             const Rat& cap) {
  if (a.low_region_procs() > m) return std::nullopt;
  if (a.s0_columns() + a.s2_procs() > m) return std::nullopt;

  // Side-shelf and stack columns must precede every flat-shelf column, so
  // they come first; tall-shelf columns may share with the flat shelf.
  std::vector<std::pair<long long, Rat>> lows;  // (count, busy-from-zero)
  for (const auto& e : a.s0) lows.emplace_back(e.procs, ptime(inst, e.job, e.procs));
  for (const auto& st : a.stacks) {
    Rat lower_pt = ptime(inst, st.lower, st.lower_procs);
    lows.emplace_back(1, lower_pt + ptime(inst, st.upper, 1));
  }
  for (const auto& st : a.stacks) {
    if (st.lower_procs > 1)
      lows.emplace_back(st.lower_procs - 1, ptime(inst, st.lower, st.lower_procs));
  }
  for (const auto& e : a.s1) lows.emplace_back(e.procs, ptime(inst, e.job, e.procs));
  long long used = 0;
  for (const auto& [c, t] : lows) used += c;
  if (used < m) lows.emplace_back(m - used, Rat(0));

  std::vector<std::pair<long long, Rat>> tops;  // (count, busy-before-cap), from the right
  for (const auto& e : a.s2) tops.emplace_back(e.procs, ptime(inst, e.job, e.procs));
  long long top_used = 0;
  for (const auto& [c, t] : tops) top_used += c;
  if (top_used < m) tops.emplace_back(m - top_used, Rat(0));
  std::reverse(tops.begin(), tops.end());  // now left-to-right

  // merge the two run-length sequences
  std::vector<ColumnGroup> out;
  size_t li = 0, ti = 0;
  long long lrem = lows[0].first, trem = tops[0].first;
  while (li < lows.size() && ti < tops.size()) {
    long long take = std::min(lrem, trem);
    Rat low = lows[li].second, top = tops[ti].second;
    if (low + top > cap) return std::nullopt;
    if (!out.empty() && out.back().low == low && out.back().top == top)
      out.back().count += take;
    else
      out.push_back({take, low, top});
    lrem -= take;
    trem -= take;
    if (lrem == 0 && ++li < lows.size()) lrem = lows[li].first;
    if (trem == 0 && ++ti < tops.size()) trem = tops[ti].first;
  }
  return out;
}

struct SmallPlacement {
  size_t job;
  Rat start;
};

/// Next-fit insertion of the small jobs into the contiguous free intervals
/// of the column groups, never loading a processor beyond `cap`. Succeeds
/// whenever the total work fits; a nullopt signals the caller to reject.
inline std::optional<std::vector<SmallPlacement>> insert_small_jobs(
    const Instance& inst, std::vector<ColumnGroup> groups, const std::vector<size_t>& smalls,
    const Rat& cap) {
  std::deque<ColumnGroup> todo(groups.begin(), groups.end());
  std::optional<ColumnGroup> open;  // current single column
  std::vector<SmallPlacement> out;
  for (size_t j : smalls) {
    Rat pt = ptime(inst, j, 1);
    for (;;) {
      if (open && open->low + pt + open->top <= cap) {
        out.push_back({j, open->low});
        open->low += pt;
        break;
      }
      // discard the open column, split the next one off the groups
      open.reset();
      while (!todo.empty() && todo.front().count == 0) todo.pop_front();
      if (todo.empty()) {
        // fast check against the remaining groups would always fail too
        return std::nullopt;
      }
      open = ColumnGroup{1, todo.front().low, todo.front().top};
      todo.front().count -= 1;
    }
  }
  return out;
}

struct MrtParams {
  Rat rho;       // compression parameter of the variant
  Rat rho_kp;    // compression factor handed to the knapsack solver
  Rat delta;     // accuracy parameter (bounded/linear)
  long long b = 0;  // wide-job threshold (bounded/linear)
  Rat dprime_factor;  // d' = factor * d
  Rat cap_factor;     // schedule height = cap_factor * d
  Rat comp_threshold;  // jobs with gamma(d) >= comp_threshold are compressible
};

/// Parameter derivation per variant. All factors are exact rationals; the
/// irrational square roots are replaced by directed rational bounds that
/// keep every inequality of the analysis valid.
inline MrtParams mrt_params(Rat eps, MrtVariant variant) {
  eps = clamp_eps(eps);
  MrtParams p;
  if (variant == MrtVariant::simple) {
    // rho = eps/12 makes (3/2)(1 + 4(2rho - rho^2)) <= 3/2 + eps; the knapsack
    // solution is feasible under compression 2rho - rho^2, so d' must absorb
    // that full factor.
    p.rho = eps / 12;
    p.rho_kp = p.rho;
    Rat rho2 = 2 * p.rho - p.rho * p.rho;
    p.dprime_factor = 1 + 4 * rho2;
    p.cap_factor = make_rat(3, 2) * p.dprime_factor;
    p.comp_threshold = 1 / p.rho;
    return p;
  }
  p.delta = eps / 5;
  // rho = (sqrt(1+delta) - 1)/4 rounded down: compressing by 2rho - rho^2
  // shrinks counts by (1-rho)^2 and stretches times by < (1+4rho)^2 <= 1+delta
  p.rho = (sqrt_lower(1 + p.delta, 40) - 1) / 4;
  MOLD_CHECK(p.rho > 0, "mrt_params: eps too small for the sqrt approximation");
  Rat rho2 = 2 * p.rho - p.rho * p.rho;
  p.b = to_ll(rat_ceil(1 / rho2));
  // the knapsack must return a plain rho-feasible set, so it runs with the
  // smaller factor rho_kp solving (1 - rho_kp)^2 >= 1 - rho
  p.rho_kp = 1 - sqrt_upper(1 - p.rho, 40);
  MOLD_CHECK(p.rho_kp > 0 && (1 - p.rho_kp) * (1 - p.rho_kp) >= 1 - p.rho,
             "mrt_params: bad knapsack compression bound");
  p.dprime_factor = (1 + p.delta) * (1 + p.delta);
  p.cap_factor = make_rat(3, 2) * p.dprime_factor;
  if (variant == MrtVariant::linear)
    p.cap_factor += make_rat(3, 2) * p.delta;  // budget for bucketed rule keys
  p.comp_threshold = rat_of(p.b);
  return p;
}

struct ItemTypeTable {
  std::vector<KpType> types;
  std::vector<std::vector<size_t>> jobs_of_type;  // concrete jobs, ascending index
  size_t compressible_types = 0;     // k_C
  size_t incompressible_types = 0;   // k_I
};

/// Rounds the big jobs of the bounded/linear variants into item types:
/// processor counts above b round down geometrically (then up to the next
/// integer, which stays below the true count), profits of jobs that are
/// narrow in the flat shelf round to 0 or up into a geometric set, and jobs
/// wide in the flat shelf take profits built from rounded times.
inline ItemTypeTable build_item_table(const Instance& inst, const std::vector<size_t>& jobs,
                                      const Rat& d, const MrtParams& p) {
  ItemTypeTable out;
  std::vector<Rat> size_grid;
  if (p.b < inst.m) size_grid = geom(rat_of(p.b), rat_of(inst.m), 1 + p.rho);
  std::vector<Rat> tall_times = geom(d / 2, d, 1 + 4 * p.rho);
  std::vector<Rat> flat_times = geom(d / 4, d / 2, 1 + 4 * p.rho);
  std::vector<Rat> profit_grid =
      geom(p.delta / 2 * d, rat_of(p.b) / 2 * d, 1 + p.delta / rat_of(p.b));

  auto round_count = [&](long long g) -> long long {
    if (g <= p.b) return g;
    auto f = geom_floor(rat_of(g), size_grid);
    MOLD_CHECK(f.has_value(), "item table: count below size grid");
    return to_ll(rat_ceil(*f));
  };

  std::map<std::tuple<long long, std::string, bool>, size_t> index;
  for (size_t j : jobs) {
    auto gd = gamma(inst, j, d);
    auto gd2 = gamma(inst, j, d / 2);
    MOLD_CHECK(gd && gd2, "item table: gamma undefined (forced job leaked in)");
    long long size = round_count(*gd);
    bool comp = *gd > p.b;
    Rat pr;
    if (*gd2 < p.b) {
      Rat v = work(inst, j, *gd2) - work(inst, j, *gd);
      if (2 * v < p.delta * d) {
        pr = 0;
      } else {
        auto c = geom_ceil(v, profit_grid);
        MOLD_CHECK(c.has_value(), "item table: profit above grid");
        pr = *c;
      }
    } else {
      Rat pt_tall = ptime(inst, j, *gd);
      Rat pt_flat = ptime(inst, j, *gd2);
      MOLD_CHECK(2 * pt_tall > d && 4 * pt_flat > d, "item table: height bound violated");
      auto t1 = geom_floor(pt_tall, tall_times);
      auto t2 = geom_floor(pt_flat, flat_times);
      MOLD_CHECK(t1 && t2, "item table: time below grid");
      pr = *t2 * rat_of(round_count(*gd2)) - *t1 * rat_of(size);
    }
    auto key = std::make_tuple(size, rat_str(pr), comp);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.types.size());
      out.types.push_back({size, pr, 1, comp, "t" + std::to_string(out.types.size())});
      out.jobs_of_type.push_back({j});
    } else {
      out.types[it->second].count += 1;
      out.jobs_of_type[it->second].push_back(j);
    }
  }
  for (const auto& t : out.types)
    (t.compressible ? out.compressible_types : out.incompressible_types) += 1;
  return out;
}

namespace detail {

// nbar: no feasible (even size-understated) solution can hold more
// compressible items than C / ((1 - rho) * smallest size) + 1.
inline long long compressible_cap(const std::vector<KpItem>& items, long long C, const Rat& rho) {
  long long count = 0;
  long long smallest = 0;
  for (const auto& it : items)
    if (it.compressible) {
      ++count;
      if (smallest == 0 || it.size < smallest) smallest = it.size;
    }
  if (count == 0) return 1;
  Int cap = rat_ceil(rat_of(C) / ((1 - rho) * rat_of(smallest))) + 1;
  if (cap < int_of(count)) count = to_ll(cap);
  return std::max<long long>(count, 1);
}

inline std::optional<Schedule> make_feasible(const Instance& inst,
                                             const std::vector<bool>& tall_selected,
                                             const Rat& d_prime, const Rat& cap, long long m,
                                             const TransformMode& mode) {
  BigSmallSplit split = split_small_big(inst, d_prime);
  std::vector<size_t> s1, s2;
  for (size_t j : split.big)
    (tall_selected[j] ? s1 : s2).push_back(j);
  ShelfAssignment a = apply_transformation_rules(inst, s1, s2, m, d_prime, mode);

  auto groups = shelf_columns(inst, a, m, cap);
  if (!groups) return std::nullopt;
  auto placed = insert_small_jobs(inst, *groups, split.small, cap);
  if (!placed) return std::nullopt;

  Schedule s;
  s.entries.resize(inst.n());
  for (const auto& e : a.s0) s.entries[e.job] = {Rat(0), e.procs};
  for (const auto& e : a.s1) s.entries[e.job] = {Rat(0), e.procs};
  for (const auto& st : a.stacks) {
    s.entries[st.lower] = {Rat(0), st.lower_procs};
    s.entries[st.upper] = {ptime(inst, st.lower, st.lower_procs), 1};
  }
  for (const auto& e : a.s2) s.entries[e.job] = {cap - ptime(inst, e.job, e.procs), e.procs};
  for (const auto& pl : *placed) s.entries[pl.job] = {pl.start, 1};
  return s;
}

}  // namespace detail

/// The (3/2 + eps)-dual shelf algorithm. Accepts whenever a schedule of
/// makespan d exists and then returns a schedule of makespan at most
/// (3/2 + eps) * d; may reject any larger-than-optimal d.
/// The bounded and linear variants route machine counts m >= 16n through the
/// large-m dual with eps = 1/2, whose (3/2)d schedules satisfy the same
/// contract; the simple variant requires m < 16n.
inline DualResult mrt_dual(const Instance& inst, const Rat& d, Rat eps, MrtVariant variant) {
  eps = clamp_eps(eps);
  if (d <= 0) return DualResult::rejected();
  long long n = static_cast<long long>(inst.n());
  if (inst.m >= 16 * n) {
    if (variant == MrtVariant::simple)
      throw std::invalid_argument("mrt_dual(simple): requires m < 16n; use solve_auto");
    return fptas_dual(inst, d, make_rat(1, 2));
  }
  MrtParams p = mrt_params(eps, variant);
  Rat d_prime = p.dprime_factor * d;
  Rat cap = p.cap_factor * d;

  BigSmallSplit split = split_small_big(inst, d);
  std::vector<bool> selected(inst.n(), false);
  std::vector<size_t> forced, knapsack_jobs;
  long long m_kp = inst.m;
  for (size_t j : split.big) {
    auto gd = gamma(inst, j, d);
    if (!gd) return DualResult::rejected();  // even m processors cannot meet d
    auto gd2 = gamma(inst, j, d / 2);
    if (!gd2) {
      // must run in the tall shelf; remove from the knapsack, reduce capacity
      forced.push_back(j);
      selected[j] = true;
      m_kp -= *gd;
      if (m_kp < 0) return DualResult::rejected();  // tall jobs overlap pairwise
    } else {
      knapsack_jobs.push_back(j);
    }
  }

  if (!knapsack_jobs.empty() && m_kp > 0) {
    std::vector<KpItem> items;
    std::vector<size_t> item_job;        // per item, the represented jobs (simple variant)
    ItemTypeTable table;                 // bounded/linear
    BoundedExpansion expansion;
    if (variant == MrtVariant::simple) {
      for (size_t j : knapsack_jobs) {
        auto gd = gamma(inst, j, d);
        items.push_back({inst.jobs[j].id, *gd, profit(inst, j, d),
                         rat_of(*gd) >= p.comp_threshold});
        item_job.push_back(j);
      }
    } else {
      table = build_item_table(inst, knapsack_jobs, d, p);
      expansion = bounded_kp_expand(table.types);
      items = expansion.items;
    }

    Rat alpha_min;
    if (variant == MrtVariant::simple) {
      alpha_min = rat_ceil(p.comp_threshold);
    } else {
      long long smallest = 0;
      for (const auto& it : items)
        if (it.compressible && (smallest == 0 || it.size < smallest)) smallest = it.size;
      alpha_min = smallest > 0 ? rat_of(smallest) : Rat(1);
    }
    long long nbar = detail::compressible_cap(items, m_kp, p.rho_kp);
    KpcResult kp = kpc_solve(items, m_kp, p.rho_kp, alpha_min, rat_of(m_kp), nbar);

    if (variant == MrtVariant::simple) {
      for (size_t ix : kp.chosen) selected[item_job[ix]] = true;
    } else {
      std::vector<long long> per_type(table.types.size(), 0);
      for (size_t ix : kp.chosen) {
        auto [type, mult] = expansion.origin[ix];
        per_type[type] += mult;
      }
      for (size_t t = 0; t < per_type.size(); ++t) {
        MOLD_CHECK(per_type[t] <= table.types[t].count, "container expansion exceeded type count");
        for (long long c = 0; c < per_type[t]; ++c)
          selected[table.jobs_of_type[t][static_cast<size_t>(c)]] = true;
      }
    }
  }

  Rat w = two_shelf_work(inst, split.big, selected, d);
  if (w > rat_of(inst.m) * d_prime - split.small_work) return DualResult::rejected();

  TransformMode mode;
  if (variant == MrtVariant::linear) mode = {true, p.rho};
  auto sched = detail::make_feasible(inst, selected, d_prime, cap, inst.m, mode);
  if (!sched) return DualResult::rejected();
  return DualResult::accept(std::move(*sched));
}

}  // namespace moldsched
