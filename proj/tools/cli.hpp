#pragma once

#include <cstdint>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "omegalab/omegalab.hpp"

// Command-line front end. run_cli() is separate from main() so tests can drive
// it in-process with captured streams.
//
// Exit status: 0 pass, 1 invariant violation, 2 degraded / budget exhausted,
// 64 usage, 65 malformed input, 66 unreadable input, 74 write failure.

namespace omegalab::cli {

using nlohmann::json;

enum Exit : int {
  kPass = 0,
  kViolation = 1,
  kDegraded = 2,
  kUsage = 64,
  kDataError = 65,
  kNoInput = 66,
  kIoError = 74,
};

struct WriteError : io::IoError {
  using io::IoError::IoError;
};

namespace detail {

inline void emit(const json& doc, const std::string& out_path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  try {
    io::write_text_file(out_path, text);
  } catch (const io::IoError& e) {
    throw WriteError(e.what());
  }
}

inline json read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    try {
      return json::parse(in);
    } catch (const json::parse_error& e) {
      throw io::FormatError(std::string("stdin: ") + e.what());
    }
  }
  return io::read_json_file(path);
}

// "auto:q=Q" or a path to a JSON array of demands.
inline std::vector<Demand> parse_schedule(const std::string& spec, const Family& prior, std::size_t max_depth) {
  const std::string prefix = "auto:q=";
  if (spec.rfind(prefix, 0) == 0) {
    std::uint64_t q = 0;
    try {
      q = std::stoull(spec.substr(prefix.size()));
    } catch (...) {
      throw CLI::ValidationError("--demands", "expected auto:q=<count>");
    }
    return auto_schedule(prior, q, std::min(max_depth, prior.size()));
  }
  std::vector<Demand> out;
  for (const auto& d : io::read_json_file(spec)) out.push_back(io::demand_from_json(d));
  return out;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in = std::cin) {
  CLI::App app{"omegalab: finite experiments on independent families, generic sets and diagonalization"};
  app.require_subcommand(1);
  app.allow_extras(false);

  std::function<int()> action;

  // gen-family
  std::size_t gen_k = 0, gen_n = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-family", "Print bit_family(k, N)");
  gen->add_option("--k", gen_k, "number of sets")->required();
  gen->add_option("--n", gen_n, "universe size")->required();
  gen->add_option("--out", gen_out, "output path (default stdout)");
  gen->callback([&] {
    action = [&] {
      detail::emit(io::family_to_json(bit_family(gen_k, gen_n)), gen_out, out);
      return int{kPass};
    };
  });

  // check-indep
  std::string indep_family;
  std::size_t indep_t = 1;
  std::optional<std::size_t> indep_d;
  auto* indep = app.add_subcommand("check-indep", "Check independence of a family");
  indep->add_option("--family", indep_family, "family JSON")->required();
  indep->add_option("--t", indep_t, "size threshold")->required();
  indep->add_option("--d", indep_d, "combination depth (default: family size)");
  indep->callback([&] {
    action = [&] {
      Family family = io::family_from_json(detail::read_input(indep_family, in));
      IndependenceReport r = is_independent(family, indep_t, indep_d.value_or(family.size()));
      detail::emit(io::independence_to_json(r), "", out);
      if (!r.ok) err << "independence fails at " << io::spec_to_json(*r.failing).dump() << "\n";
      return r.ok ? int{kPass} : int{kViolation};
    };
  });

  // check-saturation
  std::string sat_family;
  std::size_t sat_s = 0;
  auto* sat = app.add_subcommand("check-saturation", "Check that a family meets every demand (p, q) with |p|+|q| <= s");
  sat->add_option("--family", sat_family, "family JSON")->required();
  sat->add_option("--s", sat_s, "demand size bound")->required();
  sat->callback([&] {
    action = [&] {
      Family family = io::family_from_json(detail::read_input(sat_family, in));
      SaturationReport r = is_saturated(family, sat_s);
      json doc{{"ok", r.ok}};
      doc["witness"] = r.ok ? json(nullptr) : json{{"p", r.p}, {"q", r.q}};
      detail::emit(doc, "", out);
      return r.ok ? int{kPass} : int{kViolation};
    };
  });

  // rho
  std::uint64_t rho_m = 0;
  auto* rho_cmd = app.add_subcommand("rho", "Print the m-th finite partial function");
  rho_cmd->add_option("m", rho_m, "index")->required();
  rho_cmd->callback([&] {
    action = [&] {
      out << io::partial_fn_to_text(rho(rho_m)) << "\n";
      return int{kPass};
    };
  });

  // rho-index
  std::string rho_index_path = "-";
  auto* rho_index_cmd = app.add_subcommand("rho-index", "Print the index of a partial function (JSON file or stdin)");
  rho_index_cmd->add_option("file", rho_index_path, "PartialFn JSON, '-' for stdin");
  rho_index_cmd->callback([&] {
    action = [&] {
      PartialFn fn = io::partial_fn_from_json(detail::read_input(rho_index_path, in));
      out << rho_index(fn) << "\n";
      return int{kPass};
    };
  });

  // extend-perm
  std::string ext_family, ext_demand, ext_out;
  std::size_t ext_t = 1, ext_d = 1, ext_l = 1, ext_budget = 1;
  std::uint64_t ext_seed = 0;
  auto* ext = app.add_subcommand("extend-perm", "Extend a demand (f, g) to a permutation keeping the closure independent");
  ext->add_option("--family", ext_family, "family JSON")->required();
  ext->add_option("--demand", ext_demand, "demand JSON {\"f\": [[n, fn]...], \"g\": [[i, gi]...]}")->required();
  ext->add_option("--t", ext_t, "independence threshold")->required();
  ext->add_option("--d", ext_d, "independence depth")->required();
  ext->add_option("--L", ext_l, "orbit depth")->required();
  ext->add_option("--budget", ext_budget, "shuffle attempts")->required();
  ext->add_option("--seed", ext_seed, "PRNG seed")->required();
  ext->add_option("--out", ext_out, "output path (default stdout)");
  ext->callback([&] {
    action = [&] {
      Family family = io::family_from_json(detail::read_input(ext_family, in));
      ExtensionDemand demand = io::extension_demand_from_json(io::read_json_file(ext_demand));
      json doc;
      int status = kPass;
      try {
        GoodShuffleResult r = find_good_c(demand.f, demand.g, family, ext_t, ext_d, ext_l, ext_budget, ext_seed);
        doc["attempts"] = r.attempts;
        doc["found"] = r.found;
        if (r.found) {
          doc["shuffle"] = io::shuffle_to_json(r.shuffle);
          doc["permutation"] = io::permutation_to_json(r.pi);
          doc["closure"] = io::family_to_json(r.closure);
          doc["independence"] = io::independence_to_json(r.report);
          if (!satisfies_demand(r.pi, demand.f, demand.g, family)) status = kViolation;
        } else {
          doc["status"] = "budget_exhausted";
          doc["best_min_size"] = r.best_min_size;
          doc["independence"] = io::independence_to_json(r.report);
          status = kDegraded;
        }
      } catch (const CardinalityMismatch& e) {
        doc = json{{"found", false}, {"status", "cardinality_mismatch"}, {"message", e.what()}};
        status = kDegraded;
      }
      detail::emit(doc, ext_out, out);
      return status;
    };
  });

  // close-orbit
  std::string close_family, close_perm;
  std::size_t close_l = 1;
  auto* close = app.add_subcommand("close-orbit", "Close a family under pi^l for -L <= l <= L");
  close->add_option("--family", close_family, "family JSON")->required();
  close->add_option("--perm", close_perm, "permutation JSON {\"N\": n, \"map\": [...]}")->required();
  close->add_option("--L", close_l, "orbit depth")->required();
  close->callback([&] {
    action = [&] {
      Family family = io::family_from_json(detail::read_input(close_family, in));
      Permutation pi = io::permutation_from_json(io::read_json_file(close_perm));
      detail::emit(io::family_to_json(orbit_closure(family, pi, close_l)), "", out);
      return int{kPass};
    };
  });

  // build-generic
  std::string gen_families, gen_eta, gen_demands, gen_run_out;
  std::uint64_t gen_search = 0;
  std::optional<std::size_t> gen_depth;
  auto* build = app.add_subcommand("build-generic", "Build a generic set meeting a schedule of dense sets");
  build->add_option("--families", gen_families, "family JSON of previously built sets")->required();
  build->add_option("--eta", gen_eta, "Eta JSON")->required();
  build->add_option("--demands", gen_demands, "auto:q=Q or a JSON array of demands")->required();
  build->add_option("--search-bound", gen_search, "largest index searched (exclusive)")->required();
  build->add_option("--d", gen_depth, "combination depth for auto schedules (default: all)");
  build->add_option("--out", gen_run_out, "output path (default stdout)");
  build->callback([&] {
    action = [&] {
      Family prior = io::family_from_json(detail::read_input(gen_families, in));
      Eta eta = io::eta_from_json(io::read_json_file(gen_eta));
      auto schedule = detail::parse_schedule(gen_demands, prior, gen_depth.value_or(prior.size()));
      GenericRun run = build_generic(prior, eta, schedule, gen_search);
      json doc = io::generic_run_to_json(run);
      doc["star_star"] = io::condition_report_to_json(check_star_star(run.a, eta));
      detail::emit(doc, gen_run_out, out);
      if (!doc["star_star"]["ok"].get<bool>()) return int{kViolation};
      return run.status == RunStatus::Complete ? int{kPass} : int{kDegraded};
    };
  });

  // verify-star
  std::string star_families;
  std::uint64_t star_probe = 1, star_search = 1;
  std::optional<std::size_t> star_depth;
  auto* star = app.add_subcommand("verify-star", "Check that every combination indexes a dense subset of Y");
  star->add_option("--families", star_families, "family JSON")->required();
  star->add_option("--probe-bound", star_probe, "probes rho(0..P-1)")->required();
  star->add_option("--search-bound", star_search, "largest index searched (exclusive)")->required();
  star->add_option("--d", star_depth, "combination depth (default: family size)");
  star->callback([&] {
    action = [&] {
      Family family = io::family_from_json(detail::read_input(star_families, in));
      StarReport r = check_star(family, star_probe, star_search, star_depth.value_or(family.size()));
      detail::emit(io::star_report_to_json(r), "", out);
      return r.ok ? int{kPass} : int{kViolation};
    };
  });

  // verify-starstar
  std::string ss_family, ss_eta;
  std::optional<std::size_t> ss_index;
  auto* ss = app.add_subcommand("verify-starstar", "Check the pairwise matching property of sets against an Eta");
  ss->add_option("--family", ss_family, "family JSON")->required();
  ss->add_option("--eta", ss_eta, "Eta JSON")->required();
  ss->add_option("--index", ss_index, "check only this member");
  ss->callback([&] {
    action = [&] {
      Family family = io::family_from_json(detail::read_input(ss_family, in));
      Eta eta = io::eta_from_json(io::read_json_file(ss_eta));
      json results = json::array();
      bool ok = true;
      for (std::size_t i = 0; i < family.size(); ++i) {
        if (ss_index && *ss_index != i) continue;
        ConditionReport r = check_star_star(family.sets[i], eta);
        ok = ok && r.ok;
        json entry = io::condition_report_to_json(r);
        entry["index"] = i;
        results.push_back(entry);
      }
      if (ss_index && *ss_index >= family.size()) throw std::out_of_range("--index outside the family");
      detail::emit(json{{"ok", ok}, {"sets", results}}, "", out);
      return ok ? int{kPass} : int{kViolation};
    };
  });

  // diag-experiment
  std::string diag_config, diag_out;
  auto* diag = app.add_subcommand("diag-experiment", "Run the full seeded experiment and write a JSON report");
  diag->add_option("--config", diag_config, "config JSON")->required();
  diag->add_option("--out", diag_out, "report path (default stdout)");
  diag->callback([&] {
    action = [&] {
      PipelineConfig config = config_from_json(io::read_json_file(diag_config));
      PipelineResult result = run_pipeline(config);
      detail::emit(pipeline_to_json(result), diag_out, out);
      (diag_out.empty() ? err : out) << pipeline_summary(result);
      return result.exit_status();
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    return action();
  } catch (const WriteError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << "\n";
    return kNoInput;
  } catch (const nlohmann::json::exception& e) {
    err << "malformed input: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace omegalab::cli
