#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "omegalab/codec.hpp"
#include "omegalab/diag.hpp"
#include "omegalab/extender.hpp"
#include "omegalab/finset.hpp"
#include "omegalab/generic.hpp"
#include "omegalab/permutation.hpp"

// JSON shapes for every artifact. Objects use nlohmann's default std::map
// storage, so keys always come out sorted; sets are sorted arrays.

namespace omegalab::io {

using json = nlohmann::json;

// Unreadable or unwritable files.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Readable but malformed documents.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

inline json set_to_json(const FinSet& s) { return s.members(); }

inline FinSet set_from_json(const json& j, std::size_t universe) {
  FinSet s(universe);
  for (const auto& x : j) s.insert(x.get<std::size_t>());
  return s;
}

// {"N": int, "sets": [[int,...],...], "labels": [string,...]?}
inline json family_to_json(const Family& family) {
  json j;
  j["N"] = family.universe;
  j["sets"] = json::array();
  for (const FinSet& s : family.sets) j["sets"].push_back(set_to_json(s));
  if (!family.labels.empty()) j["labels"] = family.labels;
  return j;
}

inline Family family_from_json(const json& j) {
  Family family;
  family.universe = j.at("N").get<std::size_t>();
  if (family.universe < 1) throw FormatError("family universe must be positive");
  for (const auto& s : j.at("sets")) family.sets.push_back(set_from_json(s, family.universe));
  if (j.contains("labels")) family.labels = j.at("labels").get<std::vector<std::string>>();
  family.validate();
  return family;
}

inline json spec_to_json(const CombinationSpec& spec) { return json{{"pos", spec.pos}, {"neg", spec.neg}}; }

inline CombinationSpec spec_from_json(const json& j) {
  CombinationSpec spec;
  spec.pos = j.value("pos", std::vector<std::size_t>{});
  spec.neg = j.value("neg", std::vector<std::size_t>{});
  std::sort(spec.pos.begin(), spec.pos.end());
  std::sort(spec.neg.begin(), spec.neg.end());
  return spec;
}

inline json independence_to_json(const IndependenceReport& r) {
  json j{{"ok", r.ok}, {"size_found", r.size_found}, {"threshold", r.threshold}, {"depth", r.depth}};
  j["failing"] = r.failing ? spec_to_json(*r.failing) : json(nullptr);
  return j;
}

// {"entries": [[a,b,i,value],...]} sorted by point code.
inline json partial_fn_to_json(const PartialFn& fn) {
  json entries = json::array();
  for (const auto& [code, value] : fn.entries()) {
    Point p = point_decode(code);
    entries.push_back({p.a, p.b, p.i, value});
  }
  return json{{"entries", entries}};
}

// Same document as partial_fn_to_json, laid out as {"entries": [[...],...]}.
inline std::string partial_fn_to_text(const PartialFn& fn) {
  std::ostringstream out;
  out << "{\"entries\": [";
  bool first = true;
  for (const auto& [code, value] : fn.entries()) {
    Point p = point_decode(code);
    out << (first ? "" : ",") << '[' << p.a << ',' << p.b << ',' << static_cast<int>(p.i) << ',' << value << ']';
    first = false;
  }
  out << "]}";
  return out.str();
}

inline PartialFn partial_fn_from_json(const json& j) {
  PartialFn fn;
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 4) throw FormatError("PartialFn entry must be [a,b,i,value]");
    int i = e[2].get<int>();
    if (i != 0 && i != 1) throw FormatError("PartialFn layer must be 0 or 1");
    fn.set(Point{e[0].get<std::uint64_t>(), e[1].get<std::uint64_t>(), static_cast<std::uint8_t>(i)},
           e[3].get<std::uint64_t>());
  }
  return fn;
}

inline json injection_to_json(const FiniteInjection& f) {
  json out = json::array();
  for (const auto& [x, y] : f.pairs()) out.push_back({x, y});
  return out;
}

inline FiniteInjection injection_from_json(const json& j) {
  FiniteInjection f;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw FormatError("injection pair must be [x, y]");
    f.add(p[0].get<std::size_t>(), p[1].get<std::size_t>());
  }
  return f;
}

// {"f": [[n, fn],...], "g": [[i, gi],...]}
inline ExtensionDemand extension_demand_from_json(const json& j) {
  return ExtensionDemand{injection_from_json(j.value("f", json::array())), injection_from_json(j.value("g", json::array()))};
}

inline json extension_demand_to_json(const ExtensionDemand& d) {
  return json{{"f", injection_to_json(d.f)}, {"g", injection_to_json(d.g)}};
}

// {"N": int, "map": [π(0), π(1), ...]}
inline json permutation_to_json(const Permutation& pi) { return json{{"N", pi.size()}, {"map", pi.images()}}; }

inline Permutation permutation_from_json(const json& j) {
  auto image = j.at("map").get<std::vector<std::size_t>>();
  if (j.contains("N") && j.at("N").get<std::size_t>() != image.size()) throw FormatError("permutation size mismatch");
  return Permutation(std::move(image));
}

inline json shuffle_to_json(const AtomShuffle& c) { return c.per_atom; }

// {"Ma": int, "Mk": int, "V": int, "values": [[m,k,i,v],...]} covering the grid.
inline json eta_to_json(const Eta& eta) {
  json values = json::array();
  for (std::size_t m = 0; m < eta.ma(); ++m)
    for (std::size_t k = 0; k < eta.mk(); ++k)
      for (int i = 0; i < 2; ++i) values.push_back({m, k, i, eta.at(m, k, i)});
  return json{{"Ma", eta.ma()}, {"Mk", eta.mk()}, {"V", eta.v()}, {"values", values}};
}

inline Eta eta_from_json(const json& j) {
  Eta eta(j.at("Ma").get<std::size_t>(), j.at("Mk").get<std::size_t>(), j.at("V").get<std::uint64_t>());
  std::vector<bool> seen(eta.ma() * eta.mk() * 2, false);
  for (const auto& e : j.at("values")) {
    if (!e.is_array() || e.size() != 4) throw FormatError("Eta value must be [m,k,i,v]");
    auto m = e[0].get<std::size_t>();
    auto k = e[1].get<std::size_t>();
    int i = e[2].get<int>();
    eta.set(m, k, i, e[3].get<std::uint64_t>());
    seen[(m * eta.mk() + k) * 2 + static_cast<std::size_t>(i)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw FormatError("Eta values do not cover the grid");
  return eta;
}

inline const char* polarity_name(Polarity p) { return p == Polarity::In ? "in" : "out"; }

inline json demand_to_json(const Demand& d) {
  return json{{"combo", spec_to_json(d.combo)}, {"rho", d.rho_index}, {"polarity", polarity_name(d.polarity)}};
}

// {"combo": {"pos": [...], "neg": [...]}, "rho": m, "polarity": "in"|"out"}
inline Demand demand_from_json(const json& j) {
  Demand d;
  d.combo = spec_from_json(j.value("combo", json::object()));
  d.rho_index = j.at("rho").get<std::uint64_t>();
  const std::string pol = j.value("polarity", std::string("in"));
  if (pol == "in") {
    d.polarity = Polarity::In;
  } else if (pol == "out") {
    d.polarity = Polarity::Out;
  } else {
    throw FormatError("polarity must be \"in\" or \"out\"");
  }
  return d;
}

inline json condition_report_to_json(const ConditionReport& r) {
  json j{{"ok", r.ok}};
  j["witness"] = r.witness ? json{{"m", r.witness->m}, {"n", r.witness->n}, {"i", r.witness->i}} : json(nullptr);
  return j;
}

inline json star_report_to_json(const StarReport& r) {
  json j{{"ok", r.ok}};
  j["failing"] = r.failing ? spec_to_json(*r.failing) : json(nullptr);
  j["probe"] = r.probe ? json(*r.probe) : json(nullptr);
  return j;
}

inline json generic_run_to_json(const GenericRun& run) {
  json j;
  j["status"] = run.status == RunStatus::Complete ? "complete" : "search_exhausted";
  j["schedule"] = json::array();
  for (const Demand& d : run.schedule) j["schedule"].push_back(demand_to_json(d));
  j["witnesses"] = json::array();
  for (const MetDemand& m : run.met) {
    j["witnesses"].push_back(json{{"step", m.step}, {"demand", demand_to_json(m.demand)}, {"witness", m.witness}});
  }
  j["A"] = run.w;
  j["decided_bound"] = run.decided_bound() ? json(*run.decided_bound()) : json(nullptr);
  j["failed_step"] = run.failed_step ? json(*run.failed_step) : json(nullptr);
  j["failure"] = run.failure;
  return j;
}

inline json catch_report_to_json(const CatchReport& r) {
  json pairs = json::array();
  for (const CatchEntry& e : r.pairs) {
    pairs.push_back(json{{"layer", e.layer}, {"m", e.m}, {"n", e.n}, {"k", e.k ? json(*e.k) : json(nullptr)}});
  }
  return json{{"ok", r.ok}, {"violations", r.violations()}, {"pairs", pairs}};
}

}  // namespace omegalab::io
