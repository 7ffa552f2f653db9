#pragma once

#include <random>

#include "moldsched/job.hpp"

namespace moldsched {

struct FourPartitionInstance {
  Instance instance;
  Rat target;  // d = n*B; a schedule of this makespan exists iff the numbers partition
};

/// Builds the hardness-reduction instance for 4n numbers summing to n*B:
/// m = n machines and one job per number with time(k) = m*a_i - k + 1.
/// Returns nullopt (the trivial no-instance) when the sum is off; other
/// constraint violations are hard errors.
inline std::optional<FourPartitionInstance> gen_four_partition(
    const std::vector<long long>& numbers, long long B) {
  if (numbers.empty() || numbers.size() % 4 != 0)
    throw std::invalid_argument("four-partition: need 4n numbers");
  long long n = static_cast<long long>(numbers.size()) / 4;
  for (long long a : numbers) {
    if (a < 2) throw std::invalid_argument("four-partition: numbers must be pre-scaled to >= 2");
    if (!(rat_of(B) < rat_of(a) * 5 && rat_of(a) * 3 < rat_of(B)))
      throw std::invalid_argument("four-partition: numbers must lie strictly between B/5 and B/3");
  }
  Int sum = 0;
  for (long long a : numbers) sum += int_of(a);
  if (sum != int_of(n) * int_of(B)) return std::nullopt;

  std::vector<Job> jobs;
  for (size_t i = 0; i < numbers.size(); ++i)
    jobs.push_back({"j" + std::to_string(i), Reduction(numbers[i], n)});
  return FourPartitionInstance{Instance(std::move(jobs), n), Rat(int_of(n) * int_of(B))};
}

enum class RandomFamily { power, capped, table, mixed };

namespace detail {

// Deterministic across platforms: raw engine output only, no distributions.
inline unsigned long long rng_range(std::mt19937_64& g, unsigned long long lo,
                                    unsigned long long hi) {
  return lo + g() % (hi - lo + 1);
}

inline Job random_job(std::mt19937_64& g, const std::string& id, long long m, RandomFamily fam) {
  if (fam == RandomFamily::mixed)
    fam = static_cast<RandomFamily>(rng_range(g, 0, 2));
  switch (fam) {
    case RandomFamily::power: {
      Rat t1(static_cast<long>(rng_range(g, 1, 64)));
      Rat theta = make_rat(static_cast<long>(rng_range(g, 0, 64)), 64);
      return {id, PowerLaw(t1, theta)};
    }
    case RandomFamily::capped: {
      Rat t1(static_cast<long>(rng_range(g, 1, 64)));
      long long cap = static_cast<long long>(
          rng_range(g, 1, static_cast<unsigned long long>(m)));
      return {id, CappedSpeedup(t1, cap)};
    }
    default: {
      // non-increasing times, then raise each to k-1/k of its predecessor if
      // needed so the work stays non-decreasing
      std::vector<Rat> times;
      times.push_back(Rat(static_cast<long>(rng_range(g, 16, 64))));
      for (long long k = 2; k <= m; ++k) {
        Rat cand = times.back() * make_rat(static_cast<long>(rng_range(g, 8, 16)), 16);
        Rat lowest = times.back() * make_rat(static_cast<long>(k - 1), static_cast<long>(k));
        times.push_back(std::max(cand, lowest));
      }
      return {id, ExplicitTable{std::move(times)}};
    }
  }
}

}  // namespace detail

/// Seed-reproducible random monotone instances.
inline Instance gen_random_monotone(size_t n, long long m, RandomFamily family,
                                    unsigned long long seed) {
  if (family == RandomFamily::table && m > 4096)
    throw std::invalid_argument("random table family: m too large to materialize");
  std::mt19937_64 g(seed);
  std::vector<Job> jobs;
  for (size_t j = 0; j < n; ++j) {
    RandomFamily fam = family;
    if (family == RandomFamily::mixed && m > 4096) {
      // tables cannot be materialized; fall back to the parametric families
      fam = (detail::rng_range(g, 0, 1) == 0) ? RandomFamily::power : RandomFamily::capped;
    }
    jobs.push_back(detail::random_job(g, "j" + std::to_string(j), m, fam));
  }
  return Instance(std::move(jobs), m);
}

}  // namespace moldsched
