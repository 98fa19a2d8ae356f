#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "omegalab/diag.hpp"
#include "omegalab/finset.hpp"
#include "omegalab/generic.hpp"
#include "omegalab/json_io.hpp"
#include "omegalab/parallel.hpp"
#include "omegalab/permutation.hpp"
#include "omegalab/rng.hpp"

// End-to-end experiment: build K generic sets against K grid functions, check
// them, then sample permutations and confirm the per-pair catching argument.

namespace omegalab {

struct PipelineConfig {
  std::size_t universe = 1024;       // N
  std::size_t families = 1;          // K
  std::size_t threshold = 1;         // t for the joint independence check
  std::size_t depth = 1;             // d for independence, density and schedules
  std::size_t ma = 4;
  std::size_t mk = 4;
  std::uint64_t v = 2;
  std::uint64_t probes = 1;          // q
  std::uint64_t probe_bound = 1;     // density probes for check_star
  std::uint64_t search_bound = 1024;
  std::size_t samples = 10;
  std::uint64_t seed = 0;
  std::string eta_mode = "random";   // "random" or "zero"
  bool adversarial = false;
  std::size_t adversarial_steps = 2000;
  std::size_t match_threshold = 1;
};

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  if (!j.contains("seed")) throw std::invalid_argument("config must set \"seed\"");
  PipelineConfig c;
  c.universe = j.value("N", c.universe);
  c.families = j.value("K", c.families);
  c.threshold = j.value("t", c.threshold);
  c.depth = j.value("d", c.depth);
  c.ma = j.value("Ma", c.ma);
  c.mk = j.value("Mk", c.mk);
  c.v = j.value("V", c.v);
  c.probes = j.value("q", c.probes);
  c.probe_bound = j.value("probe_bound", c.probes);
  c.search_bound = j.value("search_bound", c.search_bound);
  c.samples = j.value("samples", c.samples);
  c.seed = j.at("seed").get<std::uint64_t>();
  c.eta_mode = j.value("eta", c.eta_mode);
  c.adversarial = j.value("adversarial", c.adversarial);
  c.adversarial_steps = j.value("adversarial_steps", c.adversarial_steps);
  c.match_threshold = j.value("match_threshold", c.match_threshold);
  if (c.universe < 1 || c.threshold < 1 || c.ma < 1 || c.mk < 1 || c.v < 1 || c.search_bound < 1 || c.probe_bound < 1) {
    throw std::invalid_argument("config values N, t, Ma, Mk, V, search_bound and probe_bound must be positive");
  }
  if (c.eta_mode != "random" && c.eta_mode != "zero") throw std::invalid_argument("eta must be \"random\" or \"zero\"");
  if (c.ma > c.universe) throw std::invalid_argument("Ma must not exceed N");
  return c;
}

inline nlohmann::json config_to_json(const PipelineConfig& c) {
  return nlohmann::json{{"N", c.universe},       {"K", c.families},
                        {"t", c.threshold},      {"d", c.depth},
                        {"Ma", c.ma},            {"Mk", c.mk},
                        {"V", c.v},              {"q", c.probes},
                        {"probe_bound", c.probe_bound}, {"search_bound", c.search_bound},
                        {"samples", c.samples},  {"seed", c.seed},
                        {"eta", c.eta_mode},     {"adversarial", c.adversarial},
                        {"adversarial_steps", c.adversarial_steps}, {"match_threshold", c.match_threshold}};
}

struct SampleResult {
  std::vector<std::size_t> moved;            // |moved_within(A_α, π)| per α
  std::vector<CatchReport> catches;          // per α (empty report when precondition failed)
  std::vector<bool> precondition;            // check_star_star held for α
  std::vector<std::size_t> match_counts;     // matches(f_from_pi(π), η_α)
};

struct PipelineResult {
  PipelineConfig config;
  std::vector<Eta> etas;
  std::vector<GenericRun> runs;
  std::vector<ConditionReport> star_star;
  Family joint;
  std::optional<IndependenceReport> independence;
  std::optional<StarReport> star;
  std::vector<SampleResult> samples;
  std::size_t catch_pairs = 0;
  std::size_t violations = 0;
  bool degraded = false;

  bool star_star_ok() const {
    for (const auto& r : star_star)
      if (!r.ok) return false;
    return true;
  }

  // 0 pass, 1 invariant violation, 2 degraded run.
  int exit_status() const {
    if (violations > 0 || !star_star_ok()) return 1;
    if (degraded) return 2;
    if ((independence && !independence->ok) || (star && !star->ok)) return 1;
    return 0;
  }
};

namespace pipeline_detail {

inline std::size_t moved_total(const std::vector<FinSet>& sets, const Permutation& pi) {
  std::size_t total = 0;
  for (const FinSet& a : sets) total += moved_within(a, pi).size();
  return total;
}

// Hill-climbs Σ_α |moved_within(A_α, π)| by redirecting π(x) to y for x, y in
// a common A_α; moves that lower the objective are undone.
inline Permutation adversarial_permutation(const std::vector<FinSet>& sets, Rng& rng, std::size_t universe,
                                           std::size_t steps) {
  Permutation pi = Permutation::random(universe, rng);
  std::vector<std::vector<std::size_t>> members;
  for (const FinSet& a : sets) {
    auto m = a.members();
    if (m.size() >= 2) members.push_back(std::move(m));
  }
  if (members.empty()) return pi;
  std::size_t score = moved_total(sets, pi);
  for (std::size_t s = 0; s < steps; ++s) {
    const auto& pool = members[rng.below(members.size())];
    std::size_t x = pool[rng.below(pool.size())];
    std::size_t y = pool[rng.below(pool.size())];
    if (x == y) continue;
    std::size_t z = pi.inverse_at(y);
    pi.swap_images(x, z);
    std::size_t candidate = moved_total(sets, pi);
    if (candidate < score) {
      pi.swap_images(x, z);
    } else {
      score = candidate;
    }
  }
  return pi;
}

}  // namespace pipeline_detail

inline PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;
  result.config = config;
  result.joint.universe = config.universe;

  for (std::size_t alpha = 0; alpha < config.families; ++alpha) {
    Eta eta;
    if (config.eta_mode == "zero") {
      eta = Eta::constant(config.ma, config.mk, config.v, 0);
    } else {
      Rng rng(mix_seed(config.seed, alpha));
      eta = Eta::random(config.ma, config.mk, config.v, rng);
    }
    auto schedule = auto_schedule(result.joint, config.probes, std::min(config.depth, result.joint.size()));
    GenericRun run = build_generic(result.joint, eta, schedule, config.search_bound);
    if (run.status != RunStatus::Complete) result.degraded = true;
    result.star_star.push_back(check_star_star(run.a, eta));
    result.joint.push_back(run.a, "A" + std::to_string(alpha));
    result.etas.push_back(std::move(eta));
    result.runs.push_back(std::move(run));
  }

  if (config.families > 0) {
    const std::size_t d = std::min(config.depth, result.joint.size());
    result.independence = is_independent(result.joint, config.threshold, d);
    result.star = check_star(result.joint, config.probe_bound, config.search_bound, d);
  }

  result.samples.resize(config.families > 0 ? config.samples : 0);
  parallel_for(result.samples.size(), [&](std::size_t index) {
    Rng rng(mix_seed(config.seed ^ 0x5eed5eed5eed5eedULL, index));
    Permutation pi = config.adversarial
                         ? pipeline_detail::adversarial_permutation(result.joint.sets, rng, config.universe,
                                                                    config.adversarial_steps)
                         : Permutation::random(config.universe, rng);
    GridFn f = f_from_pi(pi, config.ma, config.mk);
    SampleResult& sample = result.samples[index];
    for (std::size_t alpha = 0; alpha < config.families; ++alpha) {
      const FinSet& a = result.joint.sets[alpha];
      sample.moved.push_back(moved_within(a, pi).size());
      sample.match_counts.push_back(matches(f, result.etas[alpha], config.match_threshold).count);
      if (result.star_star[alpha].ok) {
        sample.catches.push_back(verify_catch(a, result.etas[alpha], pi));
        sample.precondition.push_back(true);
      } else {
        sample.catches.emplace_back();
        sample.precondition.push_back(false);
      }
    }
  });
  for (const SampleResult& s : result.samples) {
    for (const CatchReport& c : s.catches) {
      result.catch_pairs += c.pairs.size();
      result.violations += c.violations();
    }
  }
  return result;
}

inline nlohmann::json pipeline_to_json(const PipelineResult& r) {
  using nlohmann::json;
  json j;
  j["config"] = config_to_json(r.config);
  j["seed"] = r.config.seed;
  j["families"] = json::array();
  for (std::size_t alpha = 0; alpha < r.runs.size(); ++alpha) {
    json fam = io::generic_run_to_json(r.runs[alpha]);
    fam.erase("schedule");
    fam["alpha"] = alpha;
    fam["schedule_size"] = r.runs[alpha].schedule.size();
    fam["star_star"] = io::condition_report_to_json(r.star_star[alpha]);
    fam["eta"] = io::eta_to_json(r.etas[alpha]);
    j["families"].push_back(std::move(fam));
  }
  j["independence"] = r.independence ? io::independence_to_json(*r.independence) : json(nullptr);
  j["star"] = r.star ? io::star_report_to_json(*r.star) : json(nullptr);
  j["permutations"] = json::array();
  for (std::size_t idx = 0; idx < r.samples.size(); ++idx) {
    const SampleResult& s = r.samples[idx];
    json catches = json::array();
    for (std::size_t alpha = 0; alpha < s.catches.size(); ++alpha) {
      json c = io::catch_report_to_json(s.catches[alpha]);
      c["precondition"] = s.precondition[alpha];
      catches.push_back(std::move(c));
    }
    j["permutations"].push_back(
        json{{"index", idx}, {"moved", s.moved}, {"matches", s.match_counts}, {"catch", std::move(catches)}});
  }
  j["summary"] = json{{"samples", r.samples.size()},
                      {"catch_pairs", r.catch_pairs},
                      {"violations", r.violations},
                      {"degraded", r.degraded},
                      {"star_star_ok", r.star_star_ok()},
                      {"exit_status", r.exit_status()}};
  return j;
}

// One-screen human summary.
inline std::string pipeline_summary(const PipelineResult& r) {
  std::string out;
  for (std::size_t alpha = 0; alpha < r.runs.size(); ++alpha) {
    const GenericRun& run = r.runs[alpha];
    out += "A" + std::to_string(alpha) + ": |A|=" + std::to_string(run.w.size()) + ", demands met " +
           std::to_string(run.met.size()) + "/" + std::to_string(run.schedule.size());
    if (run.status != RunStatus::Complete) out += " (search exhausted: " + run.failure + ")";
    out += r.star_star[alpha].ok ? ", pairwise matching: ok\n" : ", pairwise matching: FAIL\n";
  }
  if (r.independence) {
    out += "independence: ";
    if (r.independence->ok) {
      out += "ok\n";
    } else {
      out += "FAIL at " + io::spec_to_json(*r.independence->failing).dump() + " (size " +
             std::to_string(r.independence->size_found) + " < " + std::to_string(r.independence->threshold) + ")\n";
    }
  }
  if (r.star) {
    out += "density: ";
    out += r.star->ok ? "ok\n"
                      : "FAIL at " + io::spec_to_json(*r.star->failing).dump() + ", probe " + std::to_string(*r.star->probe) + "\n";
  }
  out += std::string("theorem-shadow: ") + (r.violations == 0 ? "PASS" : "FAIL") +
         " (π samples: " + std::to_string(r.samples.size()) + ", violations: " + std::to_string(r.violations) + ")\n";
  return out;
}

}  // namespace omegalab
