#pragma once

#include "moldsched/estimator.hpp"

namespace moldsched {

inline Rat clamp_eps(Rat eps) {
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  if (eps > 1) eps = 1;  // the compression analysis needs rho <= 1/4
  return eps;
}

/// (1+eps)-dual algorithm for m >= 8n/eps: allot gamma(j, (1+eps)d) to every
/// job and run them all at time 0. Rejects when some job cannot meet the
/// threshold on m processors or the total allotment exceeds m; accepts
/// whenever a schedule of makespan d exists.
inline DualResult fptas_dual(const Instance& inst, const Rat& d, Rat eps) {
  eps = clamp_eps(eps);
  if (rat_of(inst.m) * eps < Rat(8) * static_cast<long>(inst.n()))
    throw std::invalid_argument("fptas_dual: requires m >= 8n/eps");
  if (d <= 0) return DualResult::rejected();

  Rat threshold = (1 + eps) * d;
  Schedule s;
  s.entries.resize(inst.n());
  long long used = 0;
  for (size_t j = 0; j < inst.n(); ++j) {
    auto g = gamma(inst, j, threshold);
    if (!g) return DualResult::rejected();
    used += *g;
    if (used > inst.m) return DualResult::rejected();
    s.entries[j] = {Rat(0), *g};
  }
  return DualResult::accept(std::move(s));
}

}  // namespace moldsched
