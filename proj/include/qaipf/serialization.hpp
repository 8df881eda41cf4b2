// Copyright 2026 The qaipf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAIPF_SERIALIZATION_HPP
#define QAIPF_SERIALIZATION_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qaipf/errors.hpp"
#include "qaipf/estimator.hpp"
#include "qaipf/evolution.hpp"
#include "qaipf/model.hpp"
#include "qaipf/oracle.hpp"
#include "qaipf/sampling.hpp"

/**
 * \file
 * \brief JSON forms of instances, presample data, exact analyses and
 * estimate records.
 *
 * Objects are emitted with sorted keys and shortest round-trip doubles, so
 * the serialisation of a value is canonical and its FNV-1a hash can serve as
 * a content digest.
 */

namespace qaipf {

using Json = nlohmann::json;

/// Bumped on any change to a JSON or JSONL schema below.
inline constexpr std::string_view kFormatVersion = "qaipf-1";

/// 64-bit FNV-1a.
[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

[[nodiscard]] inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

[[nodiscard]] inline std::string canonical(const Json& j) { return j.dump(); }

[[nodiscard]] inline std::string digest(const Json& j) { return hex64(fnv1a64(canonical(j))); }

// --- schedule ---------------------------------------------------------------

inline void to_json(Json& j, const Schedule& s) { j = Json{{"tau", s.tau}, {"dt", s.dt}, {"gamma", s.gamma}}; }

inline void from_json(const Json& j, Schedule& s) {
  s.tau = j.at("tau").get<double>();
  s.dt = j.at("dt").get<double>();
  s.gamma = j.value("gamma", 1.0);
}

// --- instance ---------------------------------------------------------------

/// Clauses are stored as signed 1-based literals (DIMACS style).
inline void to_json(Json& j, const IsingInstance& inst) {
  j = Json::object();
  j["kind"] = to_string(inst.kind);
  j["n"] = inst.n;
  j["seed"] = inst.seed;
  j["offset"] = inst.offset;
  j["fields"] = inst.fields;
  Json pairs = Json::array();
  for (const auto& p : inst.pairs) {
    pairs.push_back(Json::array({p.i, p.j, p.value}));
  }
  j["pairs"] = std::move(pairs);
  Json triples = Json::array();
  for (const auto& t : inst.triples) {
    triples.push_back(Json::array({t.i, t.j, t.k, t.value}));
  }
  j["triples"] = std::move(triples);
  Json clauses = Json::array();
  for (const auto& c : inst.clauses) {
    Json lits = Json::array();
    for (int a = 0; a < 3; ++a) {
      lits.push_back(c.signs[a] * (c.vars[a] + 1));
    }
    clauses.push_back(std::move(lits));
  }
  j["clauses"] = std::move(clauses);
  j["planted"] = inst.planted;
}

inline void from_json(const Json& j, IsingInstance& inst) {
  inst = IsingInstance{};
  inst.kind = model_kind_from_string(j.at("kind").get<std::string>());
  inst.n = j.at("n").get<int>();
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.offset = j.at("offset").get<double>();
  inst.fields = j.at("fields").get<std::vector<double>>();
  for (const auto& p : j.at("pairs")) {
    inst.pairs.push_back({p.at(0).get<int>(), p.at(1).get<int>(), p.at(2).get<double>()});
  }
  for (const auto& t : j.at("triples")) {
    inst.triples.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>(), t.at(3).get<double>()});
  }
  for (const auto& c : j.at("clauses")) {
    SatClause clause;
    for (int a = 0; a < 3; ++a) {
      const int lit = c.at(static_cast<std::size_t>(a)).get<int>();
      if (lit == 0) {
        throw InvalidArgument("instance file: literal 0 in clause");
      }
      clause.vars[a] = (lit > 0 ? lit : -lit) - 1;
      clause.signs[a] = lit > 0 ? 1 : -1;
    }
    inst.clauses.push_back(clause);
  }
  inst.planted = j.at("planted").get<std::vector<int>>();
  inst.validate();
}

[[nodiscard]] inline std::string instance_digest(const IsingInstance& inst) { return digest(Json(inst)); }

// --- presample data ---------------------------------------------------------

inline void to_json(Json& j, const PresampleData& d) {
  Json records = Json::array();
  for (const auto& r : d.records) {
    records.push_back(Json{{"m", r.m}, {"energies", r.energies}});
  }
  j = Json{{"n", d.n},     {"n_e", d.n_e}, {"m_ps", d.m_ps}, {"schedule", d.schedule},
           {"seed", d.seed}, {"records", std::move(records)}};
}

inline void from_json(const Json& j, PresampleData& d) {
  d = PresampleData{};
  d.n = j.at("n").get<int>();
  d.n_e = j.at("n_e").get<int>();
  d.m_ps = j.at("m_ps").get<std::size_t>();
  d.schedule = j.at("schedule").get<Schedule>();
  d.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& r : j.at("records")) {
    d.records.push_back({r.at("m").get<BasisIndex>(), r.at("energies").get<std::vector<double>>()});
  }
  if (d.records.size() != presample_state_count(d.n, d.n_e)) {
    throw InvalidArgument("presample file: record count does not match n and n_e");
  }
}

// --- exact analysis and estimates -------------------------------------------

inline void to_json(Json& j, const ExactAnalysis& a) {
  j = Json{{"beta", a.beta},
           {"z1", a.z1},
           {"mu", a.mu},
           {"p_opt", a.p_opt},
           {"sigma2_min", a.sigma2_min},
           {"relative_sigma2_min", a.sigma2_min / (a.z1 * a.z1)},
           {"alpha_star", a.alpha_star},
           {"alpha_kl", a.alpha_kl},
           {"q_dist", a.q_dist}};
}

inline void to_json(Json& j, const EstimateResult& r) {
  j = Json{{"beta", r.beta},
           {"z_est", r.z_est},
           {"m_s", r.m_s},
           {"empirical_variance", r.empirical_variance},
           {"standard_error", r.standard_error},
           {"seed", r.seed},
           {"sampler", r.sampler},
           {"schedule", r.schedule}};
  if (!r.trajectories.empty()) {
    Json t = Json::array();
    for (const auto& tr : r.trajectories) {
      t.push_back(Json::array({tr.initial, tr.outcome}));
    }
    j["trajectories"] = std::move(t);
  }
}

// --- files ------------------------------------------------------------------

[[nodiscard]] inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text, bool append = false) {
  std::ofstream out(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

[[nodiscard]] inline Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

[[nodiscard]] inline IsingInstance read_instance(const std::string& path) {
  try {
    return read_json_file(path).get<IsingInstance>();
  } catch (const Json::exception& e) {
    throw InvalidArgument("'" + path + "' is not an instance file: " + e.what());
  }
}

}  // namespace qaipf

#endif  // QAIPF_SERIALIZATION_HPP
