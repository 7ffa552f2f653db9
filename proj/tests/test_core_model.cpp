#include <catch2/catch_amalgamated.hpp>

#include "moldsched/generators.hpp"
#include "moldsched/schedule.hpp"

using namespace moldsched;

namespace {

Instance table_instance(std::vector<std::vector<long>> times, long long m) {
  std::vector<Job> jobs;
  for (size_t j = 0; j < times.size(); ++j) {
    ExplicitTable t;
    for (long v : times[j]) t.times.push_back(Rat(v));
    jobs.push_back({"j" + std::to_string(j), std::move(t)});
  }
  return Instance(std::move(jobs), m);
}

// independent linear-scan reference for gamma
std::optional<long long> gamma_scan(const Instance& inst, size_t j, const Rat& t) {
  for (long long k = 1; k <= inst.m; ++k)
    if (ptime(inst, j, k) <= t) return k;
  return std::nullopt;
}

}  // namespace

TEST_CASE("ptime evaluates every oracle family") {
  Instance tab = table_instance({{10, 6, 4, 3}}, 4);
  CHECK(ptime(tab, 0, 2) == 6);
  CHECK_THROWS_AS(ptime(tab, 0, 0), std::out_of_range);
  CHECK_THROWS_AS(ptime(tab, 0, 5), std::out_of_range);

  Instance pl({{"p", PowerLaw(Rat(16), Rat(1))}}, 8);
  CHECK(ptime(pl, 0, 4) == 4);

  Instance red({{"r", Reduction(3, 2)}}, 2);
  CHECK(ptime(red, 0, 2) == 5);  // 2*3 - 2 + 1

  Instance cap({{"c", CappedSpeedup(Rat(12), 3)}}, 8);
  CHECK(ptime(cap, 0, 2) == 6);
  CHECK(ptime(cap, 0, 5) == 4);  // capped at 3
}

TEST_CASE("work is k times ptime") {
  Instance tab = table_instance({{10, 6, 4, 3}}, 4);
  CHECK(work(tab, 0, 2) == 12);

  Instance red({{"r", Reduction(3, 2)}}, 2);
  CHECK(work(red, 0, 1) == 6);
  CHECK(work(red, 0, 2) == 10);  // strict increase, matches m*a - 2k = 2

  Instance pl({{"p", PowerLaw(Rat(16), Rat(1))}}, 8);
  for (long long k = 1; k <= 8; ++k) CHECK(work(pl, 0, k) == 16);  // constant work
}

TEST_CASE("power-law oracle is monotone for interior theta") {
  // rounded values must keep time non-increasing and work non-decreasing
  for (long p : {1L, 13L, 32L, 63L}) {
    PowerLaw pl(Rat(16), make_rat(p, 64));
    Rat prev_t = pl.time(1), prev_w = pl.time(1);
    CHECK(prev_t == 16);  // k=1 is exact
    for (long long k = 2; k <= 200; ++k) {
      Rat t = pl.time(k);
      Rat w = rat_of(k) * t;
      CHECK(t > 0);
      CHECK(t <= prev_t);
      CHECK(w >= prev_w);
      prev_t = t;
      prev_w = w;
    }
  }
}

TEST_CASE("power-law oracle stays monotone at huge k") {
  PowerLaw pl(Rat(7), make_rat(13, 64));
  long long base = (1LL << 61) - 5;
  Rat prev = pl.time(base - 1);
  for (long long k = base; k < base + 4; ++k) {
    Rat t = pl.time(k);
    CHECK(t <= prev);
    CHECK(rat_of(k) * t >= rat_of(k - 1) * prev);
    prev = t;
  }
}

TEST_CASE("gamma finds the least sufficient count") {
  Instance tab = table_instance({{10, 6, 4, 3}}, 4);
  CHECK(gamma(tab, 0, Rat(6)) == 2);
  CHECK(gamma(tab, 0, Rat(11)) == 1);
  CHECK_FALSE(gamma(tab, 0, Rat(2)).has_value());
  CHECK_THROWS_AS(gamma(tab, 0, Rat(0)), std::invalid_argument);
}

TEST_CASE("gamma agrees with a linear scan on random tables") {
  std::mt19937_64 g(7);
  for (int round = 0; round < 60; ++round) {
    long long m = 1 + static_cast<long long>(g() % 64);
    Instance inst = gen_random_monotone(1, m, RandomFamily::table, g());
    for (int probe = 0; probe < 20; ++probe) {
      Rat t = make_rat(1 + static_cast<long>(g() % 200), 1 + static_cast<long>(g() % 4));
      CHECK(gamma(inst, 0, t) == gamma_scan(inst, 0, t));
    }
    // exhaustive at the breakpoints themselves
    for (long long k = 1; k <= m; ++k) {
      Rat t = ptime(inst, 0, k);
      CHECK(gamma(inst, 0, t) == gamma_scan(inst, 0, t));
    }
  }
}

TEST_CASE("gamma on parametric oracles matches the scan") {
  std::mt19937_64 g(11);
  for (int round = 0; round < 40; ++round) {
    Instance inst = gen_random_monotone(1, 64, round % 2 ? RandomFamily::power : RandomFamily::capped,
                                        g());
    for (int probe = 0; probe < 10; ++probe) {
      Rat t = make_rat(1 + static_cast<long>(g() % 100), 1 + static_cast<long>(g() % 3));
      CHECK(gamma(inst, 0, t) == gamma_scan(inst, 0, t));
    }
  }
}

TEST_CASE("compress_count matches the lemma bound") {
  CHECK(compress_count(8, make_rat(1, 4)) == 6);
  CHECK(compress_count(4, make_rat(1, 4)) == 3);
  CHECK_THROWS_AS(compress_count(3, make_rat(1, 4)), std::invalid_argument);

  Instance pl({{"p", PowerLaw(Rat(16), Rat(1))}}, 8);
  CHECK(ptime(pl, 0, 6) <= (1 + 4 * make_rat(1, 4)) * ptime(pl, 0, 8));
}

TEST_CASE("compression lemma holds across random monotone jobs") {
  std::mt19937_64 g(3);
  for (int round = 0; round < 50; ++round) {
    Instance inst = gen_random_monotone(1, 64, RandomFamily::mixed, g());
    for (long rho_den : {8L, 6L, 4L}) {
      Rat rho = make_rat(1, rho_den);
      for (long long b = rho_den; b <= 64; ++b) {
        long long c = compress_count(b, rho);
        CHECK(ptime(inst, 0, c) <= (1 + 4 * rho) * ptime(inst, 0, b));
      }
    }
  }
}

TEST_CASE("validate_monotone pinpoints violations") {
  Instance ok = table_instance({{10, 6, 4, 3}}, 4);
  CHECK(validate_monotone(ok).ok);  // work 10,12,12,12

  ExplicitTable bad_work;
  for (long v : {18, 10, 6}) bad_work.times.push_back(Rat(v));
  bad_work.times.push_back(make_rat(5, 1));
  // work 18,20,18: decreases at k=3
  ExplicitTable t2;
  t2.times = {Rat(9), Rat(5), Rat(3)};
  auto rep = validate_monotone(Job{"x", ExplicitTable{{Rat(9), Rat(5), Rat(3)}}}, 3);
  CHECK_FALSE(rep.ok);
  CHECK(rep.k == 3);

  auto rep2 = validate_monotone(Job{"y", ExplicitTable{{Rat(10), Rat(11)}}}, 2);
  CHECK_FALSE(rep2.ok);
  CHECK(rep2.k == 2);
  CHECK(rep2.what.find("time increases") != std::string::npos);
}

TEST_CASE("validate_schedule checks demand at event boundaries") {
  Instance inst = table_instance({{4, 3}, {4, 3}}, 2);
  Schedule one_each;
  one_each.entries = {{Rat(0), 1}, {Rat(0), 1}};
  CHECK(validate_schedule(one_each, inst).ok);
  CHECK(one_each.makespan(inst) == 4);

  Schedule overlap;
  overlap.entries = {{Rat(0), 2}, {Rat(0), 2}};
  CHECK_FALSE(validate_schedule(overlap, inst).ok);

  Schedule serial;
  serial.entries = {{Rat(0), 2}, {Rat(3), 2}};
  CHECK(validate_schedule(serial, inst).ok);
  CHECK(serial.makespan(inst) == 6);
}

TEST_CASE("single job schedule on all machines") {
  Instance inst = table_instance({{10, 6, 4, 3}}, 4);
  Schedule s;
  s.entries = {{Rat(0), 4}};
  CHECK(validate_schedule(s, inst).ok);
  CHECK(s.makespan(inst) == 3);
}

TEST_CASE("list_schedule respects order and feasibility") {
  Instance one = table_instance({{5}}, 1);
  Schedule s1 = list_schedule(one, {1}, {0});
  CHECK(s1.entries[0].start == 0);

  Instance three = table_instance({{3, 3}, {3, 3}, {3, 3}}, 2);
  Schedule s = list_schedule(three, {1, 1, 1}, {0, 1, 2});
  CHECK(validate_schedule(s, three).ok);
  CHECK(s.makespan(three) == 6);

  CHECK_THROWS_AS(list_schedule(three, {1, 3, 1}, {0, 1, 2}), std::invalid_argument);
}

TEST_CASE("list_schedule output always validates") {
  std::mt19937_64 g(19);
  for (int round = 0; round < 40; ++round) {
    size_t n = 1 + g() % 5;
    long long m = 1 + static_cast<long long>(g() % 8);
    Instance inst = gen_random_monotone(n, m, RandomFamily::mixed, g());
    Allotment a(n);
    for (size_t j = 0; j < n; ++j) a[j] = 1 + static_cast<long long>(g() % m);
    Schedule s = list_schedule(inst, a, identity_order(n));
    CHECK(validate_schedule(s, inst).ok);
  }
}
