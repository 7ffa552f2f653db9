#pragma once

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "moldsched/generators.hpp"
#include "moldsched/io.hpp"
#include "moldsched/oracle.hpp"
#include "moldsched/solver.hpp"

namespace moldsched {

namespace cli {

inline Algo parse_algo(const std::string& s) {
  if (s == "auto") return Algo::automatic;
  if (s == "fptas") return Algo::fptas;
  if (s == "mrt-simple") return Algo::mrt_simple;
  if (s == "mrt-bounded") return Algo::mrt_bounded;
  if (s == "mrt-linear") return Algo::mrt_linear;
  throw std::invalid_argument("unknown algorithm \"" + s + "\"");
}

inline RandomFamily parse_family(const std::string& s) {
  if (s == "power") return RandomFamily::power;
  if (s == "capped") return RandomFamily::capped;
  if (s == "table") return RandomFamily::table;
  if (s == "mixed") return RandomFamily::mixed;
  throw std::invalid_argument("unknown family \"" + s + "\"");
}

inline unsigned long long default_seed() {
  if (const char* env = std::getenv("MOLDSCHED_SEED")) return std::strtoull(env, nullptr, 10);
  return 1;
}

inline void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write to " + path);
  f << content;
}

struct BenchRow {
  size_t n;
  long long m;
  double eps;
  std::string algo;
  Rat makespan, lower_bound;
  double wall_seconds;
};

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"solver for scheduling monotone moldable jobs"};
  app.require_subcommand(1);

  std::string instance_path, schedule_path, out_path;
  std::string algo_name = "auto", eps_str = "1/2";

  auto* validate = app.add_subcommand("validate", "check instance monotony (and a schedule)");
  validate->add_option("instance", instance_path)->required();
  validate->add_option("schedule", schedule_path);

  auto* estimate_cmd = app.add_subcommand("estimate", "print the makespan estimate and allotment");
  estimate_cmd->add_option("instance", instance_path)->required();

  auto* solve = app.add_subcommand("solve", "compute an approximate schedule");
  solve->add_option("instance", instance_path)->required();
  solve->add_option("--algo", algo_name, "auto|fptas|mrt-simple|mrt-bounded|mrt-linear");
  solve->add_option("--eps", eps_str, "accuracy parameter in (0,1]");
  solve->add_option("--out", out_path, "write the schedule JSON here instead of stdout");

  auto* oracle_cmd = app.add_subcommand("oracle", "exact optimum for desk-sized instances");
  oracle_cmd->add_option("instance", instance_path)->required();

  auto* gen = app.add_subcommand("gen", "write test instances");
  auto* gen_fp = gen->add_subcommand("fourpartition", "hardness-reduction instance");
  std::vector<long long> numbers;
  long long B = 0;
  gen_fp->add_option("--numbers", numbers, "4n comma-separated integers")
      ->required()
      ->delimiter(',');
  gen_fp->add_option("--B", B)->required();
  gen_fp->add_option("--out", out_path);
  auto* gen_rand = gen->add_subcommand("random", "seeded random monotone instance");
  size_t gn = 4;
  long long gm = 8;
  std::string family = "mixed";
  unsigned long long seed = default_seed();
  gen_rand->add_option("--n", gn);
  gen_rand->add_option("--m", gm);
  gen_rand->add_option("--family", family, "power|capped|table|mixed");
  gen_rand->add_option("--seed", seed);
  gen_rand->add_option("--out", out_path);

  auto* bench = app.add_subcommand("bench", "run a solver suite, emit CSV");
  std::string suite = "scaling";
  std::vector<size_t> sizes{2000, 20000};
  std::vector<std::string> algos{"mrt-linear", "mrt-bounded"};
  double bench_eps = 0.3;
  long long bench_m = 1LL << 40;
  unsigned threads = 1;
  bench->add_option("--suite", suite, "scaling");
  bench->add_option("--sizes", sizes)->delimiter(',');
  bench->add_option("--algos", algos)->delimiter(',');
  bench->add_option("--eps", bench_eps);
  bench->add_option("--m", bench_m);
  bench->add_option("--threads", threads);
  bench->add_option("--seed", seed);
  bench->add_option("--out", out_path);

  auto* selftest = app.add_subcommand("kpc-selftest", "fuzz the knapsack engine against brute force");
  size_t st_count = 200;
  selftest->add_option("--count", st_count);
  selftest->add_option("--seed", seed);

  try {
    std::vector<const char*> argv{"moldsched"};
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 1;
  }

  try {
    if (*validate) {
      Instance inst = io::load_instance(instance_path);
      auto rep = validate_monotone(inst);
      if (!rep.ok) {
        err << "not monotone: " << rep.what
            << " (raise the offending entry minimally to repair)\n";
        return 1;
      }
      if (!schedule_path.empty()) {
        std::ifstream f(schedule_path);
        if (!f) throw std::invalid_argument("cannot open schedule file: " + schedule_path);
        io::json v;
        f >> v;
        Schedule s = io::schedule_from_json(inst, v);
        auto srep = validate_schedule(s, inst);
        if (!srep.ok) {
          err << "invalid schedule: " << srep.what << "\n";
          return 1;
        }
        out << "ok makespan=" << rat_str(s.makespan(inst)) << "\n";
        return 0;
      }
      out << "ok\n";
      return 0;
    }

    if (*estimate_cmd) {
      Instance inst = io::load_instance(instance_path);
      Estimate est = estimate(inst);
      out << "omega=" << rat_str(est.omega) << "\n";
      for (size_t j = 0; j < inst.n(); ++j)
        out << inst.jobs[j].id << " " << est.allotment[j] << "\n";
      return 0;
    }

    if (*solve) {
      Instance inst = io::load_instance(instance_path);
      auto rep = validate_monotone(inst);
      if (!rep.ok) {
        err << "not monotone: " << rep.what << "\n";
        return 1;
      }
      SolveResult res = solve_with(inst, parse_algo(algo_name), parse_rat(eps_str));
      write_output(out_path, io::schedule_to_json(inst, res.schedule).dump(2) + "\n", out);
      out << "makespan=" << rat_str(res.schedule.makespan(inst))
          << " lower_bound=" << rat_str(res.omega) << "\n";
      return 0;
    }

    if (*oracle_cmd) {
      Instance inst = io::load_instance(instance_path);
      OracleResult res = opt_makespan(inst);
      out << io::schedule_to_json(inst, res.schedule).dump(2) << "\n";
      out << "optimum=" << rat_str(res.makespan) << "\n";
      return 0;
    }

    if (*gen_fp) {
      auto fp = gen_four_partition(numbers, B);
      if (!fp) {
        out << "trivial no-instance (numbers do not sum to n*B)\n";
        return 0;
      }
      write_output(out_path, io::instance_to_json(fp->instance).dump(2) + "\n", out);
      out << "target_d=" << rat_str(fp->target) << "\n";
      return 0;
    }

    if (*gen_rand) {
      Instance inst = gen_random_monotone(gn, gm, parse_family(family), seed);
      write_output(out_path, io::instance_to_json(inst).dump(2) + "\n", out);
      return 0;
    }

    if (*bench) {
      if (suite != "scaling") throw std::invalid_argument("unknown bench suite \"" + suite + "\"");
      std::vector<BenchRow> rows;
      std::vector<std::pair<size_t, std::string>> tasks;
      for (size_t n : sizes)
        for (const auto& a : algos) tasks.emplace_back(n, a);
      rows.resize(tasks.size());
      std::mutex mu;
      size_t next = 0;
      auto worker = [&] {
        for (;;) {
          size_t ix;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= tasks.size()) return;
            ix = next++;
          }
          auto [n, algo] = tasks[ix];
          Instance inst = gen_random_monotone(n, bench_m, RandomFamily::mixed, seed + ix);
          auto t0 = std::chrono::steady_clock::now();
          SolveResult res = solve_with(inst, parse_algo(algo),
                                       parse_rat(rat_str(Rat(bench_eps))));
          double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          rows[ix] = {n, bench_m, bench_eps, algo, res.schedule.makespan(inst), res.omega, secs};
        }
      };
      std::vector<std::thread> pool;
      for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();
      std::string csv =
          "n,m,eps,algo,makespan,lower_bound,ratio_vs_lb,wall_time,makespan_exact,lower_bound_"
          "exact\n";
      for (const auto& r : rows) {
        char wall[32];
        std::snprintf(wall, sizeof wall, "%.6f", r.wall_seconds);
        csv += std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.eps) +
               "," + r.algo + "," + rat_decimal(r.makespan) + "," + rat_decimal(r.lower_bound) +
               "," + rat_decimal(r.makespan / r.lower_bound) + "," + wall + "," +
               rat_str(r.makespan) + "," + rat_str(r.lower_bound) + "\n";
      }
      write_output(out_path, csv, out);
      return 0;
    }

    if (*selftest) {
      std::mt19937_64 g(seed);
      for (size_t round = 0; round < st_count; ++round) {
        size_t cnt = 1 + g() % 12;
        long long C = 1 + static_cast<long long>(g() % 60);
        std::vector<KpItem> items;
        for (size_t i = 0; i < cnt; ++i)
          items.push_back({"i" + std::to_string(i), 1 + static_cast<long long>(g() % 20),
                           Rat(static_cast<long>(g() % 50)), (g() % 3) == 0});
        Rat rho = make_rat(1, static_cast<long>(4 + g() % 8));
        long long smallest = C;
        for (const auto& it : items)
          if (it.compressible) smallest = std::min(smallest, it.size);
        long long nbar = std::max<long long>(
            1, to_ll(rat_ceil(rat_of(C) / ((1 - rho) * rat_of(smallest)))) + 1);
        KpcResult sol =
            kpc_solve(items, C, rho, rat_of(std::min<long long>(smallest, C)), rat_of(C), nbar);
        Rat exact = kp_bruteforce(items, C);
        Rat rho2 = 2 * rho - rho * rho;
        Rat size(0);
        for (size_t i : sol.chosen)
          size += (items[i].compressible ? (1 - rho2) : Rat(1)) * rat_of(items[i].size);
        if (sol.profit < exact || size > rat_of(C))
          throw contract_violation("kpc-selftest round " + std::to_string(round) + " failed");
      }
      out << "ok (" << st_count << " rounds)\n";
      return 0;
    }
  } catch (const contract_violation& e) {
    err << "contract violation: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace cli

}  // namespace moldsched
