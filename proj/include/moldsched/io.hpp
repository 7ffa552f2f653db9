#pragma once

#include <fstream>

#include <json.hpp>

#include "moldsched/schedule.hpp"

namespace moldsched {

namespace io {

using nlohmann::json;

inline Rat rat_from_json(const json& v, const char* what) {
  if (v.is_string()) return parse_rat(v.get<std::string>());
  if (v.is_number_integer()) return Rat(static_cast<long>(v.get<long long>()));
  if (v.is_number_unsigned()) return Rat(Int(std::to_string(v.get<unsigned long long>())));
  throw std::invalid_argument(std::string(what) + ": expected integer or \"p/q\" string");
}

inline long long int_from_json(const json& v, const char* what) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_string()) {
    Rat r = parse_rat(v.get<std::string>());
    if (r.get_den() != 1 || !r.get_num().fits_slong_p())
      throw std::invalid_argument(std::string(what) + ": expected an integer");
    return r.get_num().get_si();
  }
  throw std::invalid_argument(std::string(what) + ": expected an integer");
}

inline json oracle_to_json(const Oracle& o) {
  json out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ExplicitTable>) {
          out["kind"] = "table";
          json times = json::array();
          for (const Rat& t : v.times) times.push_back(rat_str(t));
          out["times"] = std::move(times);
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          out["kind"] = "power";
          out["t1"] = rat_str(v.t1);
          out["theta"] = rat_str(v.theta);
        } else if constexpr (std::is_same_v<T, CappedSpeedup>) {
          out["kind"] = "capped";
          out["t1"] = rat_str(v.t1);
          out["cap"] = v.cap;
        } else {
          out["kind"] = "reduction";
          out["a"] = v.a;
          out["m"] = v.machines;
        }
      },
      o);
  return out;
}

inline Oracle oracle_from_json(const json& v) {
  std::string kind = v.at("kind").get<std::string>();
  if (kind == "table") {
    ExplicitTable t;
    for (const auto& x : v.at("times")) t.times.push_back(rat_from_json(x, "table time"));
    return t;
  }
  if (kind == "power")
    return PowerLaw(rat_from_json(v.at("t1"), "t1"), rat_from_json(v.at("theta"), "theta"));
  if (kind == "capped")
    return CappedSpeedup(rat_from_json(v.at("t1"), "t1"), int_from_json(v.at("cap"), "cap"));
  if (kind == "reduction")
    return Reduction(int_from_json(v.at("a"), "a"), int_from_json(v.at("m"), "m"));
  throw std::invalid_argument("unknown oracle kind \"" + kind + "\"");
}

inline json instance_to_json(const Instance& inst) {
  json jobs = json::array();
  for (const auto& j : inst.jobs) jobs.push_back({{"id", j.id}, {"oracle", oracle_to_json(j.oracle)}});
  return json{{"m", inst.m}, {"jobs", std::move(jobs)}};
}

inline Instance instance_from_json(const json& v) {
  long long m = int_from_json(v.at("m"), "m");
  std::vector<Job> jobs;
  for (const auto& j : v.at("jobs"))
    jobs.push_back({j.at("id").get<std::string>(), oracle_from_json(j.at("oracle"))});
  return Instance(std::move(jobs), m);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  json v;
  try {
    in >> v;
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return instance_from_json(v);
}

inline json schedule_to_json(const Instance& inst, const Schedule& s) {
  json out = json::object();
  for (size_t j = 0; j < s.entries.size(); ++j)
    out[inst.jobs[j].id] = {{"start", rat_str(s.entries[j].start)},
                            {"procs", s.entries[j].procs}};
  return out;
}

inline Schedule schedule_from_json(const Instance& inst, const json& v) {
  Schedule s;
  s.entries.resize(inst.n());
  std::vector<bool> seen(inst.n(), false);
  for (size_t j = 0; j < inst.n(); ++j) {
    const std::string& id = inst.jobs[j].id;
    if (!v.contains(id)) throw std::invalid_argument("schedule missing job \"" + id + "\"");
    s.entries[j] = {rat_from_json(v.at(id).at("start"), "start"),
                    int_from_json(v.at(id).at("procs"), "procs")};
    seen[j] = true;
  }
  if (v.size() != inst.n()) throw std::invalid_argument("schedule mentions unknown jobs");
  return s;
}

}  // namespace io

}  // namespace moldsched
