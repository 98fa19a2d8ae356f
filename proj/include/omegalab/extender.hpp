#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omegalab/errors.hpp"
#include "omegalab/finset.hpp"
#include "omegalab/permutation.hpp"
#include "omegalab/rng.hpp"

// Extending a compatible finite pair (f, g) to a permutation of the universe
// that respects the family, via the atoms of the Boolean algebra generated by
// dom(g).

namespace omegalab {

// Finite injective map on points (PartialInjection) or on family indices
// (FamilyMap).
class FiniteInjection {
 public:
  FiniteInjection() = default;
  FiniteInjection(std::initializer_list<std::pair<const std::size_t, std::size_t>> pairs) {
    for (const auto& [x, y] : pairs) add(x, y);
  }

  void add(std::size_t x, std::size_t y) {
    if (map_.count(x) != 0) throw std::invalid_argument("injection already defined at " + std::to_string(x));
    if (range_.count(y) != 0) throw std::invalid_argument("injection already hits " + std::to_string(y));
    map_.emplace(x, y);
    range_.emplace(y, x);
  }

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  bool in_domain(std::size_t x) const { return map_.count(x) != 0; }
  bool in_range(std::size_t y) const { return range_.count(y) != 0; }
  std::size_t operator()(std::size_t x) const { return map_.at(x); }
  const std::map<std::size_t, std::size_t>& pairs() const { return map_; }

  // Every domain and range element is below `bound`.
  bool within(std::size_t bound) const {
    return (map_.empty() || map_.rbegin()->first < bound) && (range_.empty() || range_.rbegin()->first < bound);
  }

 private:
  std::map<std::size_t, std::size_t> map_;
  std::map<std::size_t, std::size_t> range_;
};

using PartialInjection = FiniteInjection;
using FamilyMap = FiniteInjection;

struct CompatibilityReport {
  bool ok = true;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // (n, member index)
};

// ∀n ∈ dom(f) ∀i ∈ dom(g): n ∈ A_i ⇔ f(n) ∈ A_{g(i)}.
inline CompatibilityReport check_compatible(const PartialInjection& f, const FamilyMap& g, const Family& family) {
  if (!f.within(family.universe)) throw std::out_of_range("f leaves the universe");
  if (!g.within(family.size())) throw std::out_of_range("g uses an index outside the family");
  CompatibilityReport report;
  for (const auto& [n, fn] : f.pairs()) {
    for (const auto& [i, gi] : g.pairs()) {
      if (family.sets[i].contains(n) != family.sets[gi].contains(fn)) {
        report.ok = false;
        report.witness = {n, i};
        return report;
      }
    }
  }
  return report;
}

struct AtomDecomposition {
  std::vector<std::size_t> generators;  // dom(g), ascending
  std::vector<FinSet> atoms;
  // signatures[k][r]: atom k lies inside generator r.
  std::vector<std::vector<bool>> signatures;
  // action[k]: index of g(atom k).
  std::vector<std::size_t> action;
};

namespace extender_detail {

// Signature of each point with respect to the given member indices, keyed
// most-significant-first so that map order is numeric order with the first
// generator as bit 0.
inline std::map<std::vector<bool>, FinSet> cells(const Family& family, const std::vector<std::size_t>& members) {
  std::map<std::vector<bool>, FinSet> out;
  std::vector<bool> key(members.size());
  for (std::size_t x = 0; x < family.universe; ++x) {
    for (std::size_t r = 0; r < members.size(); ++r) key[members.size() - 1 - r] = family.sets[members[r]].contains(x);
    auto it = out.find(key);
    if (it == out.end()) it = out.emplace(key, FinSet(family.universe)).first;
    it->second.insert(x);
  }
  return out;
}

}  // namespace extender_detail

// The nonempty cells of the partition generated by {A_i : i ∈ dom(g)}, and the
// permutation of those cells induced by extending g homomorphically.
inline AtomDecomposition atoms_of(const FamilyMap& g, const Family& family) {
  if (!g.within(family.size())) throw std::out_of_range("g uses an index outside the family");
  AtomDecomposition out;
  std::vector<std::size_t> images;
  for (const auto& [i, gi] : g.pairs()) {
    out.generators.push_back(i);
    images.push_back(gi);
  }
  auto atoms = extender_detail::cells(family, out.generators);
  // g(atom) = ⋂ A_{g(i)}^{σ_i}: the cell with the same signature relative to
  // the image generators.
  auto image_cells = extender_detail::cells(family, images);

  for (const auto& [key, set] : atoms) {
    out.atoms.push_back(set);
    out.signatures.emplace_back(key.rbegin(), key.rend());
  }
  std::vector<bool> hit(out.atoms.size(), false);
  std::size_t k = 0;
  for (const auto& [key, set] : atoms) {
    auto it = image_cells.find(key);
    if (it == image_cells.end()) {
      throw InducedMapNotPermutation("image of atom " + std::to_string(k) + " is empty");
    }
    std::size_t first = *it->second.min();
    std::size_t target = out.atoms.size();
    for (std::size_t j = 0; j < out.atoms.size(); ++j) {
      if (out.atoms[j].contains(first)) target = j;
    }
    if (out.atoms[target] != it->second || hit[target]) {
      throw InducedMapNotPermutation("image of atom " + std::to_string(k) + " is not an atom");
    }
    hit[target] = true;
    out.action.push_back(target);
    ++k;
  }
  return out;
}

// Per-atom permutations c_k of {0, ..., |atom_k ∖ dom(f)| - 1}. An empty
// shuffle means identity everywhere.
struct AtomShuffle {
  std::vector<std::vector<std::size_t>> per_atom;

  friend bool operator==(const AtomShuffle&, const AtomShuffle&) = default;
};

inline std::vector<std::size_t> free_points(const FinSet& atom, const PartialInjection& f, bool range_side) {
  std::vector<std::size_t> out;
  for (std::size_t x : atom.members()) {
    if (!(range_side ? f.in_range(x) : f.in_domain(x))) out.push_back(x);
  }
  return out;
}

// Sizes |atom_k ∖ dom(f)|; a shuffle must match these.
inline std::vector<std::size_t> shuffle_sizes(const AtomDecomposition& atoms, const PartialInjection& f) {
  std::vector<std::size_t> sizes;
  for (const FinSet& atom : atoms.atoms) sizes.push_back(free_points(atom, f, false).size());
  return sizes;
}

inline AtomShuffle random_shuffle(const std::vector<std::size_t>& sizes, Rng& rng) {
  AtomShuffle c;
  for (std::size_t n : sizes) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    c.per_atom.push_back(std::move(perm));
  }
  return c;
}

// π(i) = f(i) on dom(f); on atom_k ∖ dom(f),
//   π(i) = h'_{action(k)}(c_k(h_k^{-1}(i)))
// where h_k enumerates atom_k ∖ dom(f) and h'_j enumerates atom_j ∖ ran(f),
// both increasing.
inline Permutation build_pi(const PartialInjection& f, const FamilyMap& g, const Family& family,
                            const AtomDecomposition& atoms, const AtomShuffle& c) {
  auto compat = check_compatible(f, g, family);
  if (!compat.ok) {
    throw IncompatiblePair("f and g disagree at point " + std::to_string(compat.witness->first) + ", member " +
                           std::to_string(compat.witness->second));
  }
  if (!c.per_atom.empty() && c.per_atom.size() != atoms.atoms.size()) {
    throw std::invalid_argument("shuffle has the wrong number of atoms");
  }
  std::vector<std::size_t> image(family.universe, family.universe);
  for (const auto& [n, fn] : f.pairs()) image[n] = fn;
  for (std::size_t k = 0; k < atoms.atoms.size(); ++k) {
    std::vector<std::size_t> source = free_points(atoms.atoms[k], f, false);
    std::vector<std::size_t> target = free_points(atoms.atoms[atoms.action[k]], f, true);
    if (source.size() != target.size()) {
      throw CardinalityMismatch("atom " + std::to_string(k) + " has " + std::to_string(source.size()) +
                                " free points but its image has " + std::to_string(target.size()));
    }
    const std::vector<std::size_t>* ck = c.per_atom.empty() ? nullptr : &c.per_atom[k];
    if (ck != nullptr && ck->size() != source.size()) throw std::invalid_argument("shuffle size mismatch at atom " + std::to_string(k));
    for (std::size_t j = 0; j < source.size(); ++j) image[source[j]] = target[ck ? (*ck)[j] : j];
  }
  return Permutation(std::move(image));
}

inline Permutation build_pi(const PartialInjection& f, const FamilyMap& g, const Family& family, const AtomShuffle& c = {}) {
  return build_pi(f, g, family, atoms_of(g, family), c);
}

// π extends f and π[A_i] = A_{g(i)} for all i ∈ dom(g).
inline bool satisfies_demand(const Permutation& pi, const PartialInjection& f, const FamilyMap& g, const Family& family) {
  for (const auto& [n, fn] : f.pairs()) {
    if (pi(n) != fn) return false;
  }
  for (const auto& [i, gi] : g.pairs()) {
    if (pi.image_of(family.sets[i]) != family.sets[gi]) return false;
  }
  return true;
}

// {π^ℓ[A] : A ∈ family, -L <= ℓ <= L} without duplicates. Original members
// come first, then for ℓ = 1..L each member's π^ℓ and π^-ℓ images.
inline Family orbit_closure(const Family& family, const Permutation& pi, std::size_t depth) {
  if (pi.size() != family.universe) throw std::invalid_argument("permutation and family live in different universes");
  Family out;
  out.universe = family.universe;
  const bool labelled = !family.labels.empty();
  auto add = [&](FinSet s, std::string label) {
    if (std::find(out.sets.begin(), out.sets.end(), s) != out.sets.end()) return;
    out.sets.push_back(std::move(s));
    if (labelled) out.labels.push_back(std::move(label));
  };
  for (std::size_t i = 0; i < family.size(); ++i) add(family.sets[i], labelled ? family.labels[i] : std::string{});
  Permutation forward = pi;
  Permutation backward = pi.inverse();
  Permutation fwd_power = Permutation::identity(pi.size());
  Permutation bwd_power = fwd_power;
  for (std::size_t l = 1; l <= depth; ++l) {
    fwd_power = forward.compose(fwd_power);
    bwd_power = backward.compose(bwd_power);
    if (fwd_power.is_identity()) break;
    for (std::size_t i = 0; i < family.size(); ++i) {
      std::string name = labelled ? family.labels[i] : std::string{};
      add(fwd_power.image_of(family.sets[i]), labelled ? "pi^" + std::to_string(l) + "[" + name + "]" : "");
      add(bwd_power.image_of(family.sets[i]), labelled ? "pi^-" + std::to_string(l) + "[" + name + "]" : "");
    }
  }
  return out;
}

struct GoodShuffleResult {
  bool found = false;
  std::size_t attempts = 0;
  AtomShuffle shuffle;
  Permutation pi;
  Family closure;
  IndependenceReport report;
  // When not found: the candidate whose smallest combination was largest.
  std::size_t best_min_size = 0;
  std::optional<AtomShuffle> best_shuffle;
};

// Samples per-atom shuffles until the orbit closure of the resulting π is
// independent at (threshold, depth). Running out of budget is reported, not
// thrown. The depth is capped at the closure's size.
inline GoodShuffleResult find_good_c(const PartialInjection& f, const FamilyMap& g, const Family& family,
                                     std::size_t threshold, std::size_t depth, std::size_t orbit_depth,
                                     std::size_t budget, std::uint64_t seed) {
  auto compat = check_compatible(f, g, family);
  if (!compat.ok) throw IncompatiblePair("demand is not compatible with the family");
  AtomDecomposition atoms = atoms_of(g, family);
  std::vector<std::size_t> sizes = shuffle_sizes(atoms, f);
  for (std::size_t k = 0; k < atoms.atoms.size(); ++k) {
    std::size_t target = free_points(atoms.atoms[atoms.action[k]], f, true).size();
    if (sizes[k] != target) {
      throw CardinalityMismatch("atom " + std::to_string(k) + " has " + std::to_string(sizes[k]) +
                                " free points but its image has " + std::to_string(target));
    }
  }

  GoodShuffleResult result;
  Rng rng(seed);
  bool have_best = false;
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    AtomShuffle c = random_shuffle(sizes, rng);
    Permutation pi = build_pi(f, g, family, atoms, c);
    Family closure = orbit_closure(family, pi, orbit_depth);
    IndependenceReport report = is_independent(closure, threshold, std::min(depth, closure.size()));
    result.attempts = attempt + 1;
    if (report.ok) {
      result.found = true;
      result.shuffle = std::move(c);
      result.pi = std::move(pi);
      result.closure = std::move(closure);
      result.report = report;
      return result;
    }
    std::size_t score = min_combination_size(closure, std::min(depth, closure.size()));
    if (!have_best || score > result.best_min_size) {
      have_best = true;
      result.best_min_size = score;
      result.best_shuffle = std::move(c);
      result.report = report;
    }
  }
  return result;
}

struct ExtensionDemand {
  PartialInjection f;
  FamilyMap g;
};

struct HomogenizeParams {
  std::size_t threshold = 1;
  std::size_t depth = 1;
  std::size_t orbit_depth = 1;
  std::size_t budget = 1;
  std::uint64_t seed = 0;
};

enum class HomogenizeStatus { Complete, BudgetExhausted, CardinalityMismatch, Incompatible, InducedMapNotPermutation };

struct HomogenizeResult {
  HomogenizeStatus status = HomogenizeStatus::Complete;
  Family family;
  std::vector<Permutation> permutations;  // one per processed demand
  std::optional<std::size_t> failed_demand;
  std::string message;
};

// Meets the demands one at a time, replacing the family by the orbit closure
// after each. Member indices in later demands refer to the family current at
// that step; closure keeps existing members at their indices.
inline HomogenizeResult homogenize(const Family& family, const std::vector<ExtensionDemand>& demands, const HomogenizeParams& params) {
  HomogenizeResult result;
  result.family = family;
  for (std::size_t idx = 0; idx < demands.size(); ++idx) {
    const ExtensionDemand& demand = demands[idx];
    auto fail = [&](HomogenizeStatus status, std::string message) {
      result.status = status;
      result.failed_demand = idx;
      result.message = std::move(message);
    };
    try {
      GoodShuffleResult step = find_good_c(demand.f, demand.g, result.family, params.threshold, params.depth,
                                           params.orbit_depth, params.budget, mix_seed(params.seed, idx));
      if (!step.found) {
        fail(HomogenizeStatus::BudgetExhausted, "no good shuffle within " + std::to_string(params.budget) + " attempts");
        return result;
      }
      result.family = std::move(step.closure);
      result.permutations.push_back(std::move(step.pi));
    } catch (const CardinalityMismatch& e) {
      fail(HomogenizeStatus::CardinalityMismatch, e.what());
      return result;
    } catch (const IncompatiblePair& e) {
      fail(HomogenizeStatus::Incompatible, e.what());
      return result;
    } catch (const InducedMapNotPermutation& e) {
      fail(HomogenizeStatus::InducedMapNotPermutation, e.what());
      return result;
    }
  }
  return result;
}

}  // namespace omegalab
