#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "moldsched/job.hpp"

namespace moldsched {

/// Processor count per job, aligned with Instance::jobs.
using Allotment = std::vector<long long>;

struct ScheduleEntry {
  Rat start;
  long long procs = 1;
};

/// One entry per job (aligned with the instance). Durations are derived
/// from the oracle, so a schedule is fully determined by starts and counts.
struct Schedule {
  std::vector<ScheduleEntry> entries;

  Rat makespan(const Instance& inst) const {
    Rat out(0);
    for (size_t j = 0; j < entries.size(); ++j) {
      Rat fin = entries[j].start + ptime(inst, j, entries[j].procs);
      if (fin > out) out = fin;
    }
    return out;
  }
};

struct ScheduleReport {
  bool ok = true;
  std::string what;
};

/// Feasibility sweep: every job present once, processor counts in range,
/// and total demand <= m at every start boundary (demand is piecewise
/// constant between events). Machine identities are not modelled; a count
/// profile is sufficient for moldable schedules.
inline ScheduleReport validate_schedule(const Schedule& s, const Instance& inst) {
  if (s.entries.size() != inst.n()) return {false, "schedule does not cover all jobs exactly once"};
  // delta of processor demand at each time point; finishes are applied
  // before starts at equal times, which the map ordering gives us for free
  // by accumulating finish as negative deltas at the same key.
  std::map<Rat, long long> delta;
  for (size_t j = 0; j < s.entries.size(); ++j) {
    const auto& e = s.entries[j];
    if (e.procs < 1 || e.procs > inst.m)
      return {false, "job \"" + inst.jobs[j].id + "\": processor count out of range"};
    if (e.start < 0) return {false, "job \"" + inst.jobs[j].id + "\": negative start"};
    delta[e.start] += e.procs;
    delta[e.start + ptime(inst, j, e.procs)] -= e.procs;
  }
  long long demand = 0;
  for (const auto& [t, d] : delta) {
    demand += d;
    if (demand > inst.m)
      return {false, "demand " + std::to_string(demand) + " exceeds m at t=" + rat_str(t)};
  }
  return {};
}

/// Places jobs in the given order, each at the earliest time at which its
/// allotted processors are simultaneously free for its whole duration.
inline Schedule list_schedule(const Instance& inst, const Allotment& a,
                              const std::vector<size_t>& order) {
  MOLD_CHECK(a.size() == inst.n() && order.size() == inst.n(), "list_schedule: size mismatch");
  for (long long aj : a)
    if (aj < 1 || aj > inst.m) throw std::invalid_argument("list_schedule: allotment out of range");

  Schedule s;
  s.entries.resize(inst.n());
  std::map<Rat, long long> delta;  // demand deltas of placed jobs
  auto fits_at = [&](const Rat& st, const Rat& end, long long need) {
    long long usage = 0;
    auto it = delta.begin();
    for (; it != delta.end() && it->first <= st; ++it) usage += it->second;
    if (usage + need > inst.m) return false;  // level at st
    for (; it != delta.end() && it->first < end; ++it) {
      usage += it->second;
      if (usage + need > inst.m) return false;  // level at each event in (st, end)
    }
    return true;
  };
  for (size_t j : order) {
    Rat dur = ptime(inst, j, a[j]);
    long long need = a[j];
    // candidate starts: 0 and every event time; usage is piecewise constant
    std::vector<Rat> cand{Rat(0)};
    for (const auto& [t, d] : delta) cand.push_back(t);
    std::sort(cand.begin(), cand.end());
    Rat chosen;
    bool found = false;
    for (const Rat& st : cand) {
      if (fits_at(st, st + dur, need)) {
        chosen = st;
        found = true;
        break;
      }
    }
    MOLD_CHECK(found, "list_schedule: no feasible start found");
    s.entries[j] = {chosen, need};
    delta[chosen] += need;
    delta[chosen + dur] -= need;
  }
  return s;
}

inline std::vector<size_t> identity_order(size_t n) {
  std::vector<size_t> o(n);
  for (size_t i = 0; i < n; ++i) o[i] = i;
  return o;
}

}  // namespace moldsched
