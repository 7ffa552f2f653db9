#pragma once

#include "moldsched/shelves.hpp"

namespace moldsched {

enum class Algo { automatic, fptas, mrt_simple, mrt_bounded, mrt_linear };

struct SolveResult {
  Schedule schedule;
  Rat omega;       // estimator lower bound
  Rat accepted_d;  // dual target the returned schedule was accepted at
  int dual_calls = 0;
};

/// Runs the requested dual algorithm through the binary-search driver with
/// the accuracy split eps/2 for the dual and eps/2 for the search.
inline SolveResult solve_with(const Instance& inst, Algo algo, Rat eps) {
  eps = clamp_eps(eps);
  Rat half = eps / 2;
  Rat c;
  DualAlgorithm dual;
  switch (algo) {
    case Algo::automatic: {
      // prefer the large-m dual whenever its precondition m >= 8n/(eps/2)
      // holds; otherwise the linear shelf variant
      bool large_m = rat_of(inst.m) * half >= Rat(8) * static_cast<long>(inst.n());
      return solve_with(inst, large_m ? Algo::fptas : Algo::mrt_linear, eps);
    }
    case Algo::fptas:
      if (rat_of(inst.m) * half < Rat(8) * static_cast<long>(inst.n()))
        throw std::invalid_argument("fptas: requires m >= 16n/eps; use --algo auto");
      c = 1 + half;
      dual = [&inst, half](const Rat& d) { return fptas_dual(inst, d, half); };
      break;
    case Algo::mrt_simple:
      c = make_rat(3, 2) + half;
      dual = [&inst, half](const Rat& d) { return mrt_dual(inst, d, half, MrtVariant::simple); };
      break;
    case Algo::mrt_bounded:
      c = make_rat(3, 2) + half;
      dual = [&inst, half](const Rat& d) { return mrt_dual(inst, d, half, MrtVariant::bounded); };
      break;
    case Algo::mrt_linear:
      c = make_rat(3, 2) + half;
      dual = [&inst, half](const Rat& d) { return mrt_dual(inst, d, half, MrtVariant::linear); };
      break;
  }
  ApproxResult r = dual_to_approx(inst, half, dual, c);
  MOLD_CHECK(validate_schedule(r.schedule, inst).ok, "solver produced an invalid schedule");
  return {std::move(r.schedule), r.omega, r.accepted_d, r.dual_calls};
}

/// (1+eps)-approximation when m >= 16n/eps, (3/2+eps)-approximation
/// otherwise.
inline SolveResult solve_auto(const Instance& inst, const Rat& eps) {
  return solve_with(inst, Algo::automatic, eps);
}

}  // namespace moldsched
