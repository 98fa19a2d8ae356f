#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omegalab {

// A subset of the bounded universe {0, ..., N-1}, stored as a packed bitset.
// Bits at positions >= N are always zero, so equality is plain word equality.
class FinSet {
 public:
  FinSet() = default;
  explicit FinSet(std::size_t universe)
      : universe_(universe), words_((universe + 63) / 64, 0) {}

  static FinSet full(std::size_t universe) {
    FinSet s(universe);
    std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t{0});
    s.trim();
    return s;
  }

  static FinSet of(std::size_t universe, std::span<const std::size_t> members) {
    FinSet s(universe);
    for (std::size_t x : members) s.insert(x);
    return s;
  }

  static FinSet of(std::size_t universe, std::initializer_list<std::size_t> members) {
    return of(universe, std::span<const std::size_t>(members.begin(), members.size()));
  }

  std::size_t universe() const { return universe_; }

  bool contains(std::size_t x) const {
    return x < universe_ && ((words_[x / 64] >> (x % 64)) & 1u) != 0;
  }

  void insert(std::size_t x) {
    if (x >= universe_) {
      throw std::out_of_range("element " + std::to_string(x) + " outside universe of size " +
                              std::to_string(universe_));
    }
    words_[x / 64] |= std::uint64_t{1} << (x % 64);
  }

  void erase(std::size_t x) {
    if (x < universe_) words_[x / 64] &= ~(std::uint64_t{1} << (x % 64));
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  bool empty() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }

  // Least member >= from.
  std::optional<std::size_t> next(std::size_t from) const {
    if (from >= universe_) return std::nullopt;
    std::size_t wi = from / 64;
    std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (from % 64));
    while (true) {
      if (w != 0) return wi * 64 + static_cast<std::size_t>(std::countr_zero(w));
      if (++wi >= words_.size()) return std::nullopt;
      w = words_[wi];
    }
  }

  std::optional<std::size_t> min() const { return next(0); }

  std::optional<std::size_t> max() const {
    for (std::size_t wi = words_.size(); wi-- > 0;) {
      if (words_[wi] != 0) return wi * 64 + 63 - static_cast<std::size_t>(std::countl_zero(words_[wi]));
    }
    return std::nullopt;
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w != 0) {
        out.push_back(wi * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

  bool is_subset_of(const FinSet& other) const {
    check_same_universe(other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if ((words_[i] & ~other.words_[i]) != 0) return false;
    }
    return true;
  }

  bool intersects(const FinSet& other) const {
    check_same_universe(other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if ((words_[i] & other.words_[i]) != 0) return true;
    }
    return false;
  }

  FinSet complement() const {
    FinSet out(universe_);
    for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = ~words_[i];
    out.trim();
    return out;
  }

  FinSet& operator&=(const FinSet& other) {
    check_same_universe(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }

  FinSet& operator|=(const FinSet& other) {
    check_same_universe(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }

  // this &= ~other
  FinSet& subtract(const FinSet& other) {
    check_same_universe(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
    return *this;
  }

  friend FinSet operator&(FinSet a, const FinSet& b) { return a &= b; }
  friend FinSet operator|(FinSet a, const FinSet& b) { return a |= b; }
  friend bool operator==(const FinSet&, const FinSet&) = default;

  std::span<const std::uint64_t> words() const { return words_; }

 private:
  void trim() {
    if (universe_ % 64 != 0 && !words_.empty()) {
      words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
    }
  }

  void check_same_universe(const FinSet& other) const {
    if (other.universe_ != universe_) {
      throw std::invalid_argument("sets live in different universes (" + std::to_string(universe_) +
                                  " vs " + std::to_string(other.universe_) + ")");
    }
  }

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

// An ordered, optionally labelled list of sets over one universe. Indices are
// the members' names.
struct Family {
  std::size_t universe = 1;
  std::vector<FinSet> sets;
  std::vector<std::string> labels;  // empty, or one per set

  Family() = default;
  Family(std::size_t n, std::vector<FinSet> members, std::vector<std::string> names = {})
      : universe(n), sets(std::move(members)), labels(std::move(names)) {
    validate();
  }

  std::size_t size() const { return sets.size(); }
  const FinSet& operator[](std::size_t i) const { return sets.at(i); }

  void validate() const {
    for (const FinSet& s : sets) {
      if (s.universe() != universe) throw std::invalid_argument("family member outside the family's universe");
    }
    if (!labels.empty() && labels.size() != sets.size()) {
      throw std::invalid_argument("label count does not match set count");
    }
  }

  void push_back(FinSet s, std::string label = {}) {
    if (s.universe() != universe) throw std::invalid_argument("family member outside the family's universe");
    if (!labels.empty() || !label.empty()) {
      labels.resize(sets.size());
      labels.push_back(std::move(label));
    }
    sets.push_back(std::move(s));
  }
};

// Positive and negative member indices of a Boolean combination. Both lists are
// kept sorted.
struct CombinationSpec {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;

  std::size_t depth() const { return pos.size() + neg.size(); }
  friend bool operator==(const CombinationSpec&, const CombinationSpec&) = default;
};

inline void validate_spec(const CombinationSpec& spec, std::size_t family_size) {
  auto check = [&](const std::vector<std::size_t>& idx) {
    for (std::size_t i : idx) {
      if (i >= family_size) {
        throw std::out_of_range("combination index " + std::to_string(i) + " out of range for family of size " +
                                std::to_string(family_size));
      }
    }
  };
  check(spec.pos);
  check(spec.neg);
  for (std::size_t i : spec.pos) {
    if (std::find(spec.neg.begin(), spec.neg.end(), i) != spec.neg.end()) {
      throw std::invalid_argument("index " + std::to_string(i) + " is both positive and negative");
    }
  }
}

// Intersection of the positive members and the complements of the negative
// ones; the empty combination is the whole universe.
inline FinSet boolean_combination(const Family& family, const CombinationSpec& spec) {
  validate_spec(spec, family.size());
  FinSet out = FinSet::full(family.universe);
  for (std::size_t i : spec.pos) out &= family.sets[i];
  for (std::size_t j : spec.neg) out.subtract(family.sets[j]);
  return out;
}

// Visits Boolean combinations of `family` with min_depth <= depth <= max_depth in
// canonical order: by depth, then by the sorted support (pos ∪ neg)
// lexicographically, then by sign pattern with positive before negative at
// each support position. The visitor receives (spec, combination) and returns
// false to stop. Returns false iff the visitor stopped the walk.
template <class Visitor>
bool for_each_combination(const Family& family, std::size_t min_depth, std::size_t max_depth, Visitor&& visit) {
  const std::size_t k = family.size();
  max_depth = std::min(max_depth, k);
  std::vector<FinSet> prefix;
  std::vector<std::size_t> support;
  std::vector<bool> positive;
  CombinationSpec spec;

  for (std::size_t depth = min_depth; depth <= max_depth; ++depth) {
    support.resize(depth);
    for (std::size_t i = 0; i < depth; ++i) support[i] = i;
    prefix.assign(depth + 1, FinSet::full(family.universe));
    positive.assign(depth, true);

    while (true) {
      // Depth-first over sign patterns, '+' first.
      bool keep_going = true;
      auto walk = [&](auto&& self, std::size_t level) -> void {
        if (!keep_going) return;
        if (level == depth) {
          spec.pos.clear();
          spec.neg.clear();
          for (std::size_t i = 0; i < depth; ++i) (positive[i] ? spec.pos : spec.neg).push_back(support[i]);
          if (!visit(static_cast<const CombinationSpec&>(spec), static_cast<const FinSet&>(prefix[depth]))) {
            keep_going = false;
          }
          return;
        }
        const FinSet& member = family.sets[support[level]];
        prefix[level + 1] = prefix[level];
        prefix[level + 1] &= member;
        positive[level] = true;
        self(self, level + 1);
        if (!keep_going) return;
        prefix[level + 1] = prefix[level];
        prefix[level + 1].subtract(member);
        positive[level] = false;
        self(self, level + 1);
      };
      walk(walk, 0);
      if (!keep_going) return false;

      // Next support subset in lexicographic order.
      std::size_t i = depth;
      while (i > 0 && support[i - 1] == k - depth + i - 1) --i;
      if (i == 0) break;
      ++support[i - 1];
      for (std::size_t j = i; j < depth; ++j) support[j] = support[j - 1] + 1;
    }
  }
  return true;
}

struct IndependenceReport {
  bool ok = true;
  std::optional<CombinationSpec> failing;
  // Size of the failing combination, or the minimum over all checked ones.
  std::size_t size_found = 0;
  std::size_t threshold = 0;
  // Combination depth actually checked.
  std::size_t depth = 0;
};

// Every combination with at most `depth` members has at least `threshold`
// elements. On failure reports the first failing combination in canonical
// order.
inline IndependenceReport is_independent(const Family& family, std::size_t threshold, std::size_t depth) {
  if (threshold < 1) throw std::invalid_argument("threshold must be at least 1");
  if (depth > family.size()) throw std::invalid_argument("depth exceeds family size");
  IndependenceReport report;
  report.threshold = threshold;
  report.depth = depth;
  report.size_found = std::numeric_limits<std::size_t>::max();
  for_each_combination(family, 0, depth, [&](const CombinationSpec& spec, const FinSet& combo) {
    std::size_t n = combo.size();
    if (n < threshold) {
      report.ok = false;
      report.failing = spec;
      report.size_found = n;
      return false;
    }
    report.size_found = std::min(report.size_found, n);
    return true;
  });
  return report;
}

inline IndependenceReport is_independent(const Family& family, std::size_t threshold) {
  return is_independent(family, threshold, family.size());
}

// Smallest combination size over all combinations of depth <= depth.
inline std::size_t min_combination_size(const Family& family, std::size_t depth) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for_each_combination(family, 0, depth, [&](const CombinationSpec&, const FinSet& combo) {
    best = std::min(best, combo.size());
    return best > 0;
  });
  return best;
}

struct SaturationReport {
  bool ok = true;
  // Least unmet demand: points that must be in a member / must be outside it.
  std::vector<std::size_t> p;
  std::vector<std::size_t> q;
};

// Member-incidence view: set x of the result holds the indices of the members
// of `family` that contain x.
inline Family transpose(const Family& family) {
  Family out;
  out.universe = family.size();
  out.sets.reserve(family.universe);
  for (std::size_t x = 0; x < family.universe; ++x) {
    FinSet column(family.size());
    for (std::size_t a = 0; a < family.size(); ++a) {
      if (family.sets[a].contains(x)) column.insert(a);
    }
    out.sets.push_back(std::move(column));
  }
  return out;
}

// For all disjoint p, q with |p| + |q| <= s some member A has p ⊆ A and
// A ∩ q = ∅. A demand (p, q) is met iff the combination (pos = p, neg = q) of
// the transposed family is nonempty, so the walk reuses the combination order.
inline SaturationReport is_saturated(const Family& family, std::size_t s) {
  SaturationReport report;
  if (s == 0) return report;
  Family columns = transpose(family);
  for_each_combination(columns, 1, s, [&](const CombinationSpec& spec, const FinSet& members) {
    if (members.empty()) {
      report.ok = false;
      report.p = spec.pos;
      report.q = spec.neg;
      return false;
    }
    return true;
  });
  return report;
}

// A_j = {n < N : bit j of n is set}.
inline Family bit_family(std::size_t k, std::size_t universe) {
  if (universe < 1) throw std::invalid_argument("universe must be nonempty");
  if (k >= 64 || (std::size_t{1} << k) > universe) {
    throw std::invalid_argument("bit_family: 2^" + std::to_string(k) + " exceeds universe " + std::to_string(universe));
  }
  Family family;
  family.universe = universe;
  for (std::size_t j = 0; j < k; ++j) {
    FinSet a(universe);
    for (std::size_t n = 0; n < universe; ++n) {
      if ((n >> j) & 1u) a.insert(n);
    }
    family.sets.push_back(std::move(a));
  }
  return family;
}

}  // namespace omegalab
