#pragma once

#include <limits>
#include <unordered_map>

#include "moldsched/knapsack.hpp"
#include "moldsched/schedule.hpp"

namespace moldsched {

struct OracleResult {
  Rat makespan;
  Schedule schedule;
};

namespace detail {

// Exact makespan for a fixed allotment (rigid jobs), by exhaustive search
// over left-shifted schedules: at every event time we branch on the subset
// of pending jobs started there, then advance to the next finish. Delayed
// starts are explored; greedy non-delay schedules are not assumed optimal.
class RigidPacker {
 public:
  RigidPacker(std::vector<Rat> pt, std::vector<long long> procs, long long m)
      : pt_(std::move(pt)), procs_(std::move(procs)), m_(m), n_(pt_.size()) {}

  OracleResult solve() {
    std::vector<std::pair<Rat, int>> running;  // (residual, job)
    Rat value = visit(full_mask(), running);
    // replay the memoized decisions to materialize starts
    Schedule s;
    s.entries.resize(n_);
    unsigned mask = full_mask();
    running.clear();
    Rat now(0);
    while (mask != 0 || !running.empty()) {
      auto it = memo_.find(key(mask, running));
      MOLD_CHECK(it != memo_.end(), "oracle replay: missing memo state");
      unsigned sub = it->second.start_set;
      for (size_t j = 0; j < n_; ++j)
        if (sub & (1u << j)) {
          s.entries[j] = {now, procs_[j]};
          running.emplace_back(pt_[j], static_cast<int>(j));
          mask &= ~(1u << j);
        }
      MOLD_CHECK(!running.empty(), "oracle replay: stalled");
      Rat step = running[0].first;
      for (const auto& r : running) step = std::min(step, r.first);
      now += step;
      std::vector<std::pair<Rat, int>> next;
      for (auto& r : running) {
        r.first -= step;
        if (r.first > 0) next.push_back(r);
      }
      running.swap(next);
    }
    return {value, std::move(s)};
  }

 private:
  struct Entry {
    Rat value;
    unsigned start_set = 0;
  };

  unsigned full_mask() const { return (1u << n_) - 1; }

  std::string key(unsigned mask, const std::vector<std::pair<Rat, int>>& running) const {
    std::vector<std::string> parts;
    for (const auto& [res, j] : running)
      parts.push_back(rat_str(res) + "x" + std::to_string(procs_[static_cast<size_t>(j)]));
    std::sort(parts.begin(), parts.end());
    std::string k = std::to_string(mask);
    for (auto& p : parts) k += "|" + p;
    return k;
  }

  Rat visit(unsigned mask, const std::vector<std::pair<Rat, int>>& running) {
    if (mask == 0 && running.empty()) return Rat(0);
    auto it = memo_.find(key(mask, running));
    if (it != memo_.end()) return it->second.value;

    long long busy = 0;
    for (const auto& [res, j] : running) busy += procs_[static_cast<size_t>(j)];
    std::vector<int> pending;
    for (size_t j = 0; j < n_; ++j)
      if (mask & (1u << j)) pending.push_back(static_cast<int>(j));

    Rat best;
    bool have = false;
    unsigned best_set = 0;
    unsigned options = 1u << pending.size();
    for (unsigned pick = 0; pick < options; ++pick) {
      if (running.empty() && pick == 0) continue;  // idle machine set cannot be left-shifted
      long long extra = 0;
      bool ok = true;
      for (size_t i = 0; i < pending.size(); ++i)
        if (pick & (1u << i)) {
          extra += procs_[static_cast<size_t>(pending[i])];
          if (busy + extra > m_) { ok = false; break; }
        }
      if (!ok) continue;
      auto next = running;
      unsigned next_mask = mask;
      unsigned set = 0;
      for (size_t i = 0; i < pending.size(); ++i)
        if (pick & (1u << i)) {
          int j = pending[i];
          next.emplace_back(pt_[static_cast<size_t>(j)], j);
          next_mask &= ~(1u << j);
          set |= 1u << j;
        }
      Rat step = next[0].first;
      for (const auto& r : next) step = std::min(step, r.first);
      std::vector<std::pair<Rat, int>> advanced;
      for (auto& r : next) {
        Rat res = r.first - step;
        if (res > 0) advanced.emplace_back(res, r.second);
      }
      Rat total = step + visit(next_mask, advanced);
      if (!have || total < best) {
        best = total;
        best_set = set;
        have = true;
      }
    }
    MOLD_CHECK(have, "oracle: dead end in packing search");
    memo_[key(mask, running)] = {best, best_set};
    return best;
  }

  std::vector<Rat> pt_;
  std::vector<long long> procs_;
  long long m_;
  size_t n_;
  std::unordered_map<std::string, Entry> memo_;
};

}  // namespace detail

/// Exact optimal makespan for desk-sized instances: enumerates all m^n
/// allotments (with work/height pruning) and packs each exactly.
/// Guard: n <= 8 and m^n <= 2^25.
inline OracleResult opt_makespan(const Instance& inst) {
  size_t n = inst.n();
  if (n > 8) throw std::invalid_argument("opt_makespan: too many jobs (max 8)");
  double combos = std::pow(static_cast<double>(inst.m), static_cast<double>(n));
  if (combos > 34e6) throw std::invalid_argument("opt_makespan: m^n too large");

  std::vector<std::vector<Rat>> pt(n), w(n);
  for (size_t j = 0; j < n; ++j) {
    pt[j].resize(static_cast<size_t>(inst.m));
    w[j].resize(static_cast<size_t>(inst.m));
    for (long long k = 1; k <= inst.m; ++k) {
      pt[j][static_cast<size_t>(k - 1)] = ptime(inst, j, k);
      w[j][static_cast<size_t>(k - 1)] = rat_of(k) * pt[j][static_cast<size_t>(k - 1)];
    }
  }
  // suffix bounds for pruning the allotment enumeration
  std::vector<double> suf_min_work(n + 1, 0.0), suf_min_pt(n + 1, 0.0);
  std::vector<double> min_work(n), min_pt(n);
  for (size_t j = 0; j < n; ++j) {
    min_work[j] = std::numeric_limits<double>::infinity();
    min_pt[j] = std::numeric_limits<double>::infinity();
    for (long long k = 1; k <= inst.m; ++k) {
      min_work[j] = std::min(min_work[j], rat_double(w[j][static_cast<size_t>(k - 1)]));
      min_pt[j] = std::min(min_pt[j], rat_double(pt[j][static_cast<size_t>(k - 1)]));
    }
  }
  for (size_t j = n; j-- > 0;) {
    suf_min_work[j] = suf_min_work[j + 1] + min_work[j];
    suf_min_pt[j] = std::max(suf_min_pt[j + 1], min_pt[j]);
  }

  // seed with a greedy schedule so pruning bites early
  OracleResult best;
  {
    Allotment seed(n);
    for (size_t j = 0; j < n; ++j) {
      long long arg = 1;
      for (long long k = 2; k <= inst.m; ++k)
        if (pt[j][static_cast<size_t>(k - 1)] < pt[j][static_cast<size_t>(arg - 1)]) arg = k;
      seed[j] = arg;
    }
    auto order = identity_order(n);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return pt[a][static_cast<size_t>(seed[a] - 1)] > pt[b][static_cast<size_t>(seed[b] - 1)];
    });
    best.schedule = list_schedule(inst, seed, order);
    best.makespan = best.schedule.makespan(inst);
  }

  std::vector<long long> alloc(n);
  double best_d = rat_double(best.makespan);
  auto recurse = [&](auto&& self, size_t j, double work_prefix, double maxpt_prefix) -> void {
    double lb = std::max({(work_prefix + suf_min_work[j]) / static_cast<double>(inst.m),
                          maxpt_prefix, suf_min_pt[j]});
    if (lb > best_d * (1.0 + 1e-9)) return;
    if (j == n) {
      // exact recheck of the leaf bound before the expensive packing
      Rat wsum(0), mp(0);
      for (size_t i = 0; i < n; ++i) {
        wsum += w[i][static_cast<size_t>(alloc[i] - 1)];
        mp = std::max(mp, pt[i][static_cast<size_t>(alloc[i] - 1)]);
      }
      Rat leaf_lb = std::max(Rat(wsum / rat_of(inst.m)), mp);
      if (leaf_lb >= best.makespan) return;
      std::vector<Rat> pts(n);
      for (size_t i = 0; i < n; ++i) pts[i] = pt[i][static_cast<size_t>(alloc[i] - 1)];
      detail::RigidPacker packer(pts, alloc, inst.m);
      auto res = packer.solve();
      if (res.makespan < best.makespan) {
        best = std::move(res);
        best_d = rat_double(best.makespan);
      }
      return;
    }
    for (long long k = 1; k <= inst.m; ++k) {
      alloc[j] = k;
      self(self, j + 1, work_prefix + rat_double(w[j][static_cast<size_t>(k - 1)]),
           std::max(maxpt_prefix, rat_double(pt[j][static_cast<size_t>(k - 1)])));
    }
  };
  recurse(recurse, 0, 0.0, 0.0);
  MOLD_CHECK(validate_schedule(best.schedule, inst).ok, "oracle produced invalid schedule");
  return best;
}

/// Exhaustive 0/1 knapsack (<= 20 items).
inline Rat kp_bruteforce(const std::vector<KpItem>& items, long long C) {
  if (items.size() > 20) throw std::invalid_argument("kp_bruteforce: too many items");
  Rat best(0);
  for (unsigned long long pick = 0; pick < (1ull << items.size()); ++pick) {
    Int size = 0;
    Rat profit(0);
    for (size_t i = 0; i < items.size(); ++i)
      if (pick & (1ull << i)) {
        size += int_of(items[i].size);
        profit += items[i].profit;
      }
    if (size <= int_of(C) && profit > best) best = profit;
  }
  return best;
}

/// Exhaustive knapsack with compressible items: a set is feasible when
/// (1-rho) * (compressible size) + (incompressible size) <= C.
inline Rat kpc_bruteforce(const std::vector<KpItem>& items, long long C, const Rat& rho) {
  if (items.size() > 20) throw std::invalid_argument("kpc_bruteforce: too many items");
  Rat best(0);
  for (unsigned long long pick = 0; pick < (1ull << items.size()); ++pick) {
    Int comp = 0, rest = 0;
    Rat profit(0);
    for (size_t i = 0; i < items.size(); ++i)
      if (pick & (1ull << i)) {
        (items[i].compressible ? comp : rest) += int_of(items[i].size);
        profit += items[i].profit;
      }
    if ((1 - rho) * Rat(comp) + Rat(rest) <= rat_of(C) && profit > best) best = profit;
  }
  return best;
}

}  // namespace moldsched
