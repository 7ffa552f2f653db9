#pragma once

#include <functional>

#include "moldsched/schedule.hpp"

namespace moldsched {

struct Estimate {
  Rat omega;
  Allotment allotment;  // gamma(., t_star)
  Rat t_star;
};

struct DualResult {
  std::optional<Schedule> schedule;
  bool accepted() const { return schedule.has_value(); }
  static DualResult rejected() { return {}; }
  static DualResult accept(Schedule s) { return {std::move(s)}; }
};

using DualAlgorithm = std::function<DualResult(const Rat& d)>;

namespace detail {

// Sum of work at the canonical allotment gamma(., t); t must be >= every
// job's ptime(m) so that gamma is defined everywhere.
inline Rat work_at(const Instance& inst, const Rat& t) {
  Rat sum(0);
  for (size_t j = 0; j < inst.n(); ++j) {
    auto g = gamma(inst, j, t);
    MOLD_CHECK(g.has_value(), "estimator: gamma undefined above t_min");
    sum += work(inst, j, *g);
  }
  return sum;
}

// Largest processing-time breakpoint <= t over all jobs.
inline Rat snap_breakpoint(const Instance& inst, const Rat& t) {
  Rat best(0);
  for (size_t j = 0; j < inst.n(); ++j) {
    auto g = gamma(inst, j, t);
    MOLD_CHECK(g.has_value(), "estimator: gamma undefined above t_min");
    Rat bp = ptime(inst, j, *g);
    if (bp > best) best = bp;
  }
  return best;
}

}  // namespace detail

/// Makespan estimate omega with omega <= OPT <= 2*omega: the minimum over
/// thresholds t of max(W(t)/m, t), where W(t) is the total work of the
/// allotment gamma(., t). W is non-increasing and piecewise constant with
/// breakpoints at processing-time values, so the minimizer is found by
/// value-space bisection that snaps to breakpoints; every step either
/// halves the search interval or resolves exactly.
inline Estimate estimate(const Instance& inst) {
  const Rat m = rat_of(inst.m);
  auto finish = [&](const Rat& t_star, const Rat& omega) {
    Allotment a(inst.n());
    for (size_t j = 0; j < inst.n(); ++j) a[j] = *gamma(inst, j, t_star);
    return Estimate{omega, std::move(a), t_star};
  };

  Rat t_min(0);
  for (size_t j = 0; j < inst.n(); ++j) t_min = std::max(t_min, ptime(inst, j, inst.m));
  Rat w_lo = detail::work_at(inst, t_min);
  if (w_lo / m <= t_min) return finish(t_min, t_min);

  Rat lo = t_min;          // invariant: W(lo)/m > lo
  Rat hi = w_lo / m;       // invariant: W(hi)/m <= hi  (W non-increasing)
  for (;;) {
    Rat mid = (lo + hi) / 2;
    Rat s = detail::snap_breakpoint(inst, mid);
    if (s <= lo) {
      // no breakpoint in (lo, mid]: W is w_lo on [lo, mid]
      Rat c = w_lo / m;
      if (c <= mid) return finish(c, c);   // crossing point, f(c) = c
      if (c >= hi) return finish(hi, hi);  // piece stays above hi everywhere
      lo = mid;
    } else {
      Rat w_s = detail::work_at(inst, s);
      if (w_s / m <= s) {
        hi = s;
      } else if (w_s / m > mid) {
        lo = mid;  // W(mid) = w_s: still work-dominated at mid
        w_lo = w_s;
      } else {
        return finish(w_s / m, w_s / m);  // crossing inside the piece [s, mid]
      }
    }
  }
}

struct ApproxResult {
  Schedule schedule;
  Rat omega;
  Rat accepted_d;
  int dual_calls = 0;
};

/// Turns a c-dual algorithm into a (c + eps)-approximation: binary search
/// of the target d over [omega, 2*omega], keeping lo rejected-or-below and
/// hi accepted, until hi/lo <= 1 + eps/c. Uses at most ceil(log2(c/eps)) + 2
/// dual invocations.
inline ApproxResult dual_to_approx(const Instance& inst, const Rat& eps, const DualAlgorithm& dual,
                                   const Rat& c) {
  if (eps <= 0 || eps > 1) throw std::invalid_argument("dual_to_approx: eps must be in (0,1]");
  MOLD_CHECK(c >= 1, "dual_to_approx: c must be >= 1");
  Estimate est = estimate(inst);
  ApproxResult out;
  out.omega = est.omega;

  Rat lo = est.omega, hi = 2 * est.omega;
  DualResult r = dual(hi);
  ++out.dual_calls;
  if (!r.accepted())
    throw contract_violation("dual algorithm rejected d = 2*omega, which always admits a schedule");
  Schedule best = std::move(*r.schedule);
  Rat best_d = hi;

  Rat stop = 1 + eps / c;
  while (hi > lo * stop) {
    Rat mid = (lo + hi) / 2;
    DualResult probe = dual(mid);
    ++out.dual_calls;
    if (probe.accepted()) {
      hi = mid;
      best = std::move(*probe.schedule);
      best_d = mid;
    } else {
      lo = mid;  // rejection certifies OPT > mid
    }
  }
  out.schedule = std::move(best);
  out.accepted_d = best_d;
  return out;
}

}  // namespace moldsched
