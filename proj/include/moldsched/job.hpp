#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "moldsched/rational.hpp"

namespace moldsched {

// Largest supported machine count; oracle arithmetic assumes counts fit in
// 62 bits (sums of two counts stay within int64).
inline constexpr long long kMaxMachines = 1LL << 62;

/// Processing times listed explicitly for k = 1..times.size().
struct ExplicitTable {
  std::vector<Rat> times;
};

/// time(k) = t1 * k^(-theta), theta in [0,1].
///
/// For 0 < theta < 1 the exact value is irrational, so the oracle evaluates
/// time(k) = t1 * floor(2^P * k^(-p/q)) / 2^P with theta = p/q canonical and
/// P = 128 + bits(q). The floor keeps times non-increasing, and P is large
/// enough that k*time(k) stays non-decreasing for all k <= 2^62: the true
/// work gap (k+1)^(1-theta) - k^(1-theta) is at least 1/(q*(k+1)), which
/// dominates the rounding error (k+1)/2^P.
struct PowerLaw {
  Rat t1;
  Rat theta;
  unsigned long p = 0, q = 1;
  unsigned long prec_bits = 0;

  PowerLaw(Rat t1_, Rat theta_) : t1(std::move(t1_)), theta(std::move(theta_)) {
    if (t1 <= 0) throw std::invalid_argument("PowerLaw: t1 must be positive");
    if (theta < 0 || theta > 1) throw std::invalid_argument("PowerLaw: theta must be in [0,1]");
    if (!theta.get_num().fits_ulong_p() || !theta.get_den().fits_ulong_p() ||
        theta.get_den() > 65536)
      throw std::invalid_argument("PowerLaw: theta denominator too large (max 65536)");
    p = theta.get_num().get_ui();
    q = theta.get_den().get_ui();
    prec_bits = 128 + mpz_sizeinbase(theta.get_den().get_mpz_t(), 2);
  }

  Rat time(long long k) const {
    if (p == 0) return t1;
    if (p == q) return t1 / rat_of(k);
    Int num = (Int(1) << (prec_bits * q)) / int_pow(int_of(k), p);
    return t1 * make_rat(iroot(num, q), Int(1) << prec_bits);
  }

  // Float estimate of gamma(t); exact code verifies and corrects.
  double gamma_hint(const Rat& t) const {
    double r = rat_double(t1) / rat_double(t);
    if (!(r > 1.0)) return 1.0;
    double th = static_cast<double>(p) / static_cast<double>(q);
    double lg = std::log2(r) / th;
    if (lg >= 63.0) return 9.3e18;
    return std::exp2(lg);
  }
};

/// time(k) = t1 / min(k, cap): linear speedup up to cap processors.
struct CappedSpeedup {
  Rat t1;
  long long cap;
  CappedSpeedup(Rat t1_, long long cap_) : t1(std::move(t1_)), cap(cap_) {
    if (t1 <= 0) throw std::invalid_argument("CappedSpeedup: t1 must be positive");
    if (cap < 1) throw std::invalid_argument("CappedSpeedup: cap must be >= 1");
  }
  Rat time(long long k) const { return t1 / rat_of(std::min(k, cap)); }
};

/// time(k) = machines * a - k + 1, the hardness-reduction family.
/// Strictly work-monotone: work(k+1) - work(k) = machines*a - 2k > 0 for k < machines.
struct Reduction {
  long long a;
  long long machines;
  Reduction(long long a_, long long machines_) : a(a_), machines(machines_) {
    if (a < 2) throw std::invalid_argument("Reduction: a must be >= 2");
    if (machines < 1) throw std::invalid_argument("Reduction: machines must be >= 1");
  }
  Rat time(long long k) const { return Rat(int_of(machines) * int_of(a) - int_of(k) + 1); }
};

using Oracle = std::variant<ExplicitTable, PowerLaw, CappedSpeedup, Reduction>;

struct Job {
  std::string id;
  Oracle oracle;
};

/// Oracle value without range checking against an instance; k must be valid
/// for the oracle itself.
inline Rat job_ptime(const Job& j, long long k) {
  return std::visit(
      [&](const auto& o) -> Rat {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, ExplicitTable>) {
          if (k < 1 || k > static_cast<long long>(o.times.size()))
            throw std::out_of_range("ptime: k outside table range");
          return o.times[static_cast<size_t>(k - 1)];
        } else {
          if (k < 1) throw std::out_of_range("ptime: k must be >= 1");
          return o.time(k);
        }
      },
      j.oracle);
}

struct Instance {
  std::vector<Job> jobs;
  long long m = 1;

  Instance() = default;
  Instance(std::vector<Job> jobs_, long long m_) : jobs(std::move(jobs_)), m(m_) {
    if (m < 1 || m > kMaxMachines) throw std::invalid_argument("instance: bad machine count");
    if (jobs.empty()) throw std::invalid_argument("instance: needs at least one job");
    for (const auto& j : jobs) {
      if (const auto* t = std::get_if<ExplicitTable>(&j.oracle)) {
        if (static_cast<long long>(t->times.size()) < m)
          throw std::invalid_argument("instance: table for job \"" + j.id +
                                      "\" shorter than machine count");
      } else if (const auto* r = std::get_if<Reduction>(&j.oracle)) {
        if (int_of(r->machines) * int_of(r->a) < int_of(m))
          throw std::invalid_argument("instance: reduction job \"" + j.id +
                                      "\" has non-positive time at k = m");
      }
    }
  }

  size_t n() const { return jobs.size(); }
};

/// Processing time of job j on k processors; k must lie in 1..m.
inline Rat ptime(const Instance& inst, size_t j, long long k) {
  if (k < 1 || k > inst.m) throw std::out_of_range("ptime: k outside 1..m");
  return job_ptime(inst.jobs[j], k);
}

/// work(k) = k * ptime(k).
inline Rat work(const Instance& inst, size_t j, long long k) {
  return rat_of(k) * ptime(inst, j, k);
}

/// gamma(j, t): least processor count whose processing time is <= t, or
/// nullopt when even m processors are too slow. Binary search over the
/// non-increasing oracle, O(log m) evaluations.
inline std::optional<long long> gamma(const Instance& inst, size_t j, const Rat& t) {
  if (t <= 0) throw std::invalid_argument("gamma: threshold must be positive");
  const Job& job = inst.jobs[j];
  long long lo = 1, hi = inst.m;
  if (job_ptime(job, 1) <= t) return 1;
  if (job_ptime(job, hi) > t) return std::nullopt;
  if (const auto* pl = std::get_if<PowerLaw>(&job.oracle)) {
    // narrow the bracket from the float estimate before the exact search
    double h = pl->gamma_hint(t);
    long long lo2 = h < 2 ? 1 : static_cast<long long>(h * 0.95);
    long long hi2 = h > 9e18 ? inst.m : static_cast<long long>(h * 1.05) + 2;
    lo2 = std::clamp(lo2, lo, hi);
    hi2 = std::clamp(hi2, lo, hi);
    if (lo2 <= hi2) {
      if (job_ptime(job, lo2) <= t)
        hi = lo2;  // answer in (lo, lo2]
      else
        lo = lo2;
      if (job_ptime(job, hi2) <= t)
        hi = std::min(hi, hi2);
      else
        lo = std::max(lo, hi2);
    }
  }
  // invariant: ptime(lo) > t >= ptime(hi)
  while (hi - lo > 1) {
    long long mid = lo + (hi - lo) / 2;
    if (job_ptime(job, mid) <= t)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// Largest k in 1..m with ptime(k) >= t... strictly: least k with ptime(k) < t,
/// used to enumerate processing-time breakpoints below a threshold.
inline std::optional<long long> gamma_strict(const Instance& inst, size_t j, const Rat& t) {
  if (t <= 0) throw std::invalid_argument("gamma_strict: threshold must be positive");
  const Job& job = inst.jobs[j];
  long long lo = 1, hi = inst.m;
  if (job_ptime(job, 1) < t) return 1;
  if (job_ptime(job, hi) >= t) return std::nullopt;
  while (hi - lo > 1) {
    long long mid = lo + (hi - lo) / 2;
    if (job_ptime(job, mid) < t)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// Processor count after compressing b processors by factor rho: floor(b(1-rho)).
/// For every monotone job, ptime(result) <= (1+4*rho) * ptime(b).
inline long long compress_count(long long b, const Rat& rho) {
  if (rho <= 0 || rho > make_rat(1, 4))
    throw std::invalid_argument("compress_count: rho must be in (0, 1/4]");
  if (rat_of(b) * rho < 1)
    throw std::invalid_argument("compress_count: b below 1/rho");
  Int res = rat_floor(rat_of(b) * (1 - rho));
  return static_cast<long long>(res.get_si());
}

struct MonotoneReport {
  bool ok = true;
  long long k = 0;         // offending processor count when !ok
  std::string what;        // human-readable reason
};

/// Checks both monotony invariants. Explicit tables are scanned in O(m);
/// parametric oracles are monotone by construction and report ok directly.
inline MonotoneReport validate_monotone(const Job& job, long long m) {
  const auto* tab = std::get_if<ExplicitTable>(&job.oracle);
  if (!tab) return {};
  if (static_cast<long long>(tab->times.size()) < m)
    return {false, m, "table shorter than machine count"};
  if (tab->times[0] <= 0) return {false, 1, "time must be positive at k=1"};
  for (long long k = 2; k <= m; ++k) {
    const Rat& prev = tab->times[static_cast<size_t>(k - 2)];
    const Rat& cur = tab->times[static_cast<size_t>(k - 1)];
    if (cur <= 0) return {false, k, "time must be positive at k=" + std::to_string(k)};
    if (cur > prev) return {false, k, "time increases at k=" + std::to_string(k)};
    if (rat_of(k) * cur < rat_of(k - 1) * prev)
      return {false, k, "work decreases at k=" + std::to_string(k)};
  }
  return {};
}

inline MonotoneReport validate_monotone(const Instance& inst) {
  for (const auto& j : inst.jobs) {
    auto r = validate_monotone(j, inst.m);
    if (!r.ok) {
      r.what = "job \"" + j.id + "\": " + r.what;
      return r;
    }
  }
  return {};
}

}  // namespace moldsched
