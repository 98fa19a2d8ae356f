#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omegalab/codec.hpp"
#include "omegalab/errors.hpp"
#include "omegalab/finset.hpp"
#include "omegalab/rng.hpp"

// The poset of finite conditions w ⊆ ω tied to a grid function η, its dense
// sets, and a builder that meets a finite schedule of them.
//
// w is a condition when for all m < n in w and each layer i there is a k with
// rho(n)(m, k, i) = η(m, k, i). Conditions are ordered by end extension.

namespace omegalab {

// A total grid function {0..Ma-1} × {0..Mk-1} × {0,1} → [0, V).
class Eta {
 public:
  Eta() = default;
  Eta(std::size_t ma, std::size_t mk, std::uint64_t v)
      : ma_(ma), mk_(mk), v_(v), values_(ma * mk * 2, 0) {
    if (v == 0) throw std::invalid_argument("Eta value bound must be positive");
  }

  static Eta constant(std::size_t ma, std::size_t mk, std::uint64_t v, std::uint64_t value) {
    Eta eta(ma, mk, v);
    for (auto& x : eta.values_) x = value;
    if (value >= v) throw std::invalid_argument("Eta value out of range");
    return eta;
  }

  static Eta random(std::size_t ma, std::size_t mk, std::uint64_t v, Rng& rng) {
    Eta eta(ma, mk, v);
    for (auto& x : eta.values_) x = rng.below(v);
    return eta;
  }

  std::size_t ma() const { return ma_; }
  std::size_t mk() const { return mk_; }
  std::uint64_t v() const { return v_; }

  bool in_grid(std::uint64_t m, std::uint64_t k) const { return m < ma_ && k < mk_; }

  std::uint64_t at(std::uint64_t m, std::uint64_t k, int i) const {
    if (!in_grid(m, k) || (i != 0 && i != 1)) {
      throw GridOverflow("Eta lookup (" + std::to_string(m) + ", " + std::to_string(k) + ", " + std::to_string(i) +
                         ") outside a " + std::to_string(ma_) + "x" + std::to_string(mk_) + " grid");
    }
    return values_[(m * mk_ + k) * 2 + static_cast<std::size_t>(i)];
  }

  void set(std::uint64_t m, std::uint64_t k, int i, std::uint64_t value) {
    at(m, k, i);
    if (value >= v_) throw std::invalid_argument("Eta value out of range");
    values_[(m * mk_ + k) * 2 + static_cast<std::size_t>(i)] = value;
  }

  friend bool operator==(const Eta&, const Eta&) = default;

 private:
  std::size_t ma_ = 0;
  std::size_t mk_ = 0;
  std::uint64_t v_ = 1;
  std::vector<std::uint64_t> values_;
};

// Increasing finite sequence of naturals.
using Condition = std::vector<std::uint64_t>;

struct PairWitness {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  int i = 0;
  friend bool operator==(const PairWitness&, const PairWitness&) = default;
};

struct ConditionReport {
  bool ok = true;
  std::optional<PairWitness> witness;  // least failing (m, n, i)
};

namespace generic_detail {

// ∃k < Mk with rho_n(m, k, i) = η(m, k, i).
inline bool row_matches(const PartialFn& rho_n, const Eta& eta, std::uint64_t m, int i) {
  for (std::uint64_t k = 0; k < eta.mk(); ++k) {
    auto v = rho_n.at(Point{m, k, static_cast<std::uint8_t>(i)});
    if (v && *v == eta.at(m, k, i)) return true;
  }
  return false;
}

}  // namespace generic_detail

// Checks the condition property on an increasing sequence. Only the smaller
// element of each pair is looked up in η, so the largest element may sit
// outside the grid; any other element outside it raises GridOverflow.
inline ConditionReport check_pairs(const std::vector<std::uint64_t>& sorted, const Eta& eta) {
  ConditionReport report;
  if (sorted.size() < 2) return report;
  for (std::size_t a = 0; a + 1 < sorted.size(); ++a) {
    if (sorted[a] >= eta.ma()) {
      throw GridOverflow("element " + std::to_string(sorted[a]) + " outside the Eta grid of height " +
                         std::to_string(eta.ma()));
    }
  }
  std::vector<PartialFn> rhos;
  rhos.reserve(sorted.size());
  for (std::uint64_t n : sorted) rhos.push_back(rho(n));
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    for (std::size_t b = a + 1; b < sorted.size(); ++b) {
      for (int i = 0; i < 2; ++i) {
        if (!generic_detail::row_matches(rhos[b], eta, sorted[a], i)) {
          report.ok = false;
          report.witness = PairWitness{sorted[a], sorted[b], i};
          return report;
        }
      }
    }
  }
  return report;
}

inline ConditionReport is_condition(Condition w, const Eta& eta) {
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return check_pairs(w, eta);
}

// ∀i ∀m < n: m, n ∈ A ⇒ ∃k rho_n(m, k, i) = η(m, k, i).
inline ConditionReport check_star_star(const FinSet& a, const Eta& eta) {
  auto members = a.members();
  return check_pairs(std::vector<std::uint64_t>(members.begin(), members.end()), eta);
}

enum class Polarity { In, Out };

// In: meet {w : ∃n ∈ w ∩ B, rho_n ⊇ ρ}. Out: meet {w : ∃n ∈ B ∖ w, n < max w,
// rho_n ⊇ ρ}. B is a Boolean combination of the previously built sets.
struct Demand {
  CombinationSpec combo;
  std::uint64_t rho_index = 0;
  Polarity polarity = Polarity::In;
  friend bool operator==(const Demand&, const Demand&) = default;
};

struct ExtendResult {
  bool met = false;
  Condition w;
  std::optional<std::uint64_t> witness;
  std::string failure;  // set when not met
};

namespace generic_detail {

// ρ ∪ {(m, k_{m,i}, i) ↦ η(m, k_{m,i}, i) : m ∈ u, i ∈ {0,1}} with k_{m,i}
// the least k such that (m, k, i) is free in ρ. nullopt (with a reason) when
// some m or k leaves the grid.
inline std::optional<PartialFn> pad_with_eta(const PartialFn& base, const Condition& u, const Eta& eta, std::string& why) {
  PartialFn out = base;
  for (std::uint64_t m : u) {
    if (m >= eta.ma()) {
      why = "condition element " + std::to_string(m) + " lies outside the Eta grid of height " + std::to_string(eta.ma());
      return std::nullopt;
    }
    for (int i = 0; i < 2; ++i) {
      std::uint64_t k = 0;
      while (k < eta.mk() && base.defined_at(Point{m, k, static_cast<std::uint8_t>(i)})) ++k;
      if (k == eta.mk()) {
        why = "no free k below " + std::to_string(eta.mk()) + " at row " + std::to_string(m);
        return std::nullopt;
      }
      out.set(Point{m, k, static_cast<std::uint8_t>(i)}, eta.at(m, k, i));
    }
  }
  return out;
}

inline std::uint64_t next_after(const Condition& u) { return u.empty() ? 0 : u.back() + 1; }

}  // namespace generic_detail

// Extends u inside the dense set named by the demand (the constructive content
// of the density argument). Failure to find a witness below search_bound is
// reported, not thrown.
inline ExtendResult extend_to_meet(const Condition& u, const Demand& demand, const Eta& eta, const Family& prior,
                                   std::uint64_t search_bound) {
  ExtendResult result;
  const FinSet b = boolean_combination(prior, demand.combo);
  const PartialFn target = rho(demand.rho_index);
  const FinSet everything = FinSet::full(prior.universe);

  // Least n > max(u), n ∈ pool, with rho_n ⊇ base ∪ (η-padding over u).
  auto in_step = [&](const PartialFn& base, const FinSet& pool, std::uint64_t lower) -> std::optional<std::uint64_t> {
    std::string why;
    auto padded = generic_detail::pad_with_eta(base, u, eta, why);
    if (!padded) {
      result.failure = why;
      return std::nullopt;
    }
    auto n = least_extension_in(pool, *padded, lower, search_bound);
    if (!n) result.failure = "no extension below search bound " + std::to_string(search_bound);
    return n;
  };

  if (demand.polarity == Polarity::In) {
    auto n = in_step(target, b, generic_detail::next_after(u));
    if (!n) return result;
    result.w = u;
    result.w.push_back(*n);
    result.witness = n;
    result.met = true;
    return result;
  }

  FinSet outside = b;
  for (std::uint64_t x : u) {
    if (x < outside.universe()) outside.erase(static_cast<std::size_t>(x));
  }
  auto witness = least_extension_in(outside, target, 0, search_bound);
  if (!witness) {
    result.failure = "no Out-witness below search bound " + std::to_string(search_bound);
    return result;
  }
  result.witness = witness;
  if (!u.empty() && *witness < u.back()) {
    result.w = u;
    result.met = true;
    return result;
  }
  // Decide non-membership of the witness by end-extending past it.
  auto n = in_step(PartialFn{}, everything, *witness + 1);
  if (!n) return result;
  result.w = u;
  result.w.push_back(*n);
  result.met = true;
  return result;
}

struct MetDemand {
  std::size_t step = 0;
  Demand demand;
  std::uint64_t witness = 0;
};

enum class RunStatus { Complete, SearchExhausted };

struct GenericRun {
  RunStatus status = RunStatus::Complete;
  std::vector<Demand> schedule;
  std::vector<MetDemand> met;
  std::vector<Condition> trail;  // condition after each met demand
  Condition w;
  FinSet a;
  std::optional<std::size_t> failed_step;
  std::string failure;

  // Membership of every n < max(w) is decided.
  std::optional<std::uint64_t> decided_bound() const {
    if (w.empty()) return std::nullopt;
    return w.back();
  }
};

// Folds extend_to_meet over the schedule from the empty condition. Stops at
// the first demand that cannot be met and returns the partial run.
inline GenericRun build_generic(const Family& prior, const Eta& eta, const std::vector<Demand>& schedule,
                                std::uint64_t search_bound) {
  GenericRun run;
  run.schedule = schedule;
  for (std::size_t step = 0; step < schedule.size(); ++step) {
    ExtendResult r = extend_to_meet(run.w, schedule[step], eta, prior, search_bound);
    if (!r.met) {
      run.status = RunStatus::SearchExhausted;
      run.failed_step = step;
      run.failure = r.failure;
      break;
    }
    run.w = std::move(r.w);
    run.met.push_back(MetDemand{step, schedule[step], *r.witness});
    run.trail.push_back(run.w);
  }
  run.a = FinSet(prior.universe);
  for (std::uint64_t x : run.w) run.a.insert(static_cast<std::size_t>(x));
  return run;
}

// Every combination of the prior sets (up to max_depth) × probes rho(0..q-1)
// × {In, Out}, cycling through the combinations for each probe.
inline std::vector<Demand> auto_schedule(const Family& prior, std::uint64_t probes, std::size_t max_depth) {
  std::vector<CombinationSpec> specs;
  for_each_combination(prior, 0, max_depth, [&](const CombinationSpec& spec, const FinSet&) {
    specs.push_back(spec);
    return true;
  });
  std::vector<Demand> out;
  for (std::uint64_t p = 0; p < probes; ++p) {
    for (const CombinationSpec& spec : specs) {
      out.push_back(Demand{spec, p, Polarity::In});
      out.push_back(Demand{spec, p, Polarity::Out});
    }
  }
  return out;
}

inline std::vector<Demand> auto_schedule(const Family& prior, std::uint64_t probes) {
  return auto_schedule(prior, probes, prior.size());
}

struct StarReport {
  bool ok = true;
  std::optional<CombinationSpec> failing;
  std::optional<std::uint64_t> probe;
};

// Each nonempty combination of the family (depth <= max_depth) indexes a
// dense subset of Y at the given bounds. Empty combinations are skipped: they
// are the zero of the Boolean algebra, and emptiness is independence's
// concern, not density's.
inline StarReport check_star(const Family& family, std::uint64_t probe_bound, std::uint64_t search_bound,
                             std::size_t max_depth) {
  StarReport report;
  for_each_combination(family, 0, max_depth, [&](const CombinationSpec& spec, const FinSet& b) {
    if (b.empty()) return true;
    DensityReport d = is_dense_in_Y(b, probe_bound, search_bound);
    if (!d.ok) {
      report.ok = false;
      report.failing = spec;
      report.probe = d.unwitnessed;
      return false;
    }
    return true;
  });
  return report;
}

inline StarReport check_star(const Family& family, std::uint64_t probe_bound, std::uint64_t search_bound) {
  return check_star(family, probe_bound, search_bound, family.size());
}

}  // namespace omegalab
