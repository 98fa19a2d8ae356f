#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "omegalab/codec.hpp"
#include "omegalab/errors.hpp"
#include "omegalab/finset.hpp"
#include "omegalab/generic.hpp"
#include "omegalab/permutation.hpp"

namespace omegalab {

// {n ∈ A : π(n) ∈ A ∖ {n}}
inline FinSet moved_within(const FinSet& a, const Permutation& pi) {
  if (pi.size() != a.universe()) throw std::invalid_argument("set and permutation live in different universes");
  FinSet out(a.universe());
  for (std::size_t n : a.members()) {
    std::size_t image = pi(n);
    if (image != n && a.contains(image)) out.insert(n);
  }
  return out;
}

// ({m ∈ A : m < π(m) ∈ A}, {n ∈ A : n > π(n) ∈ A})
inline std::pair<FinSet, FinSet> case_split(const FinSet& a, const Permutation& pi) {
  if (pi.size() != a.universe()) throw std::invalid_argument("set and permutation live in different universes");
  FinSet up(a.universe());
  FinSet down(a.universe());
  for (std::size_t n : a.members()) {
    std::size_t image = pi(n);
    if (!a.contains(image)) continue;
    if (n < image) up.insert(n);
    if (n > image) down.insert(n);
  }
  return {std::move(up), std::move(down)};
}

// Partial function on the grid {0..Ma-1} × {0..Mk-1} × {0,1}; absent entries
// never match anything.
class GridFn {
 public:
  GridFn() = default;
  GridFn(std::size_t ma, std::size_t mk) : ma_(ma), mk_(mk), values_(ma * mk * 2) {}

  std::size_t ma() const { return ma_; }
  std::size_t mk() const { return mk_; }

  std::optional<std::uint64_t> at(std::size_t m, std::size_t k, int i) const { return values_.at(slot(m, k, i)); }
  void set(std::size_t m, std::size_t k, int i, std::optional<std::uint64_t> v) { values_.at(slot(m, k, i)) = v; }

  static GridFn from_eta(const Eta& eta) {
    GridFn f(eta.ma(), eta.mk());
    for (std::size_t m = 0; m < eta.ma(); ++m)
      for (std::size_t k = 0; k < eta.mk(); ++k)
        for (int i = 0; i < 2; ++i) f.set(m, k, i, eta.at(m, k, i));
    return f;
  }

 private:
  std::size_t slot(std::size_t m, std::size_t k, int i) const {
    if (m >= ma_ || k >= mk_ || (i != 0 && i != 1)) throw GridOverflow("GridFn lookup outside its grid");
    return (m * mk_ + k) * 2 + static_cast<std::size_t>(i);
  }

  std::size_t ma_ = 0;
  std::size_t mk_ = 0;
  std::vector<std::optional<std::uint64_t>> values_;
};

// f(m, k, 0) = rho_{π(m)}(m, k, 0) and f(m, k, 1) = rho_{π^-1(m)}(m, k, 1).
inline GridFn f_from_pi(const Permutation& pi, std::size_t ma, std::size_t mk) {
  if (ma > pi.size()) throw std::invalid_argument("grid rows exceed the permutation's universe");
  GridFn f(ma, mk);
  for (std::size_t m = 0; m < ma; ++m) {
    const PartialFn forward = rho(pi(m));
    const PartialFn backward = rho(pi.inverse_at(m));
    for (std::size_t k = 0; k < mk; ++k) {
      f.set(m, k, 0, forward.at(Point{m, k, 0}));
      f.set(m, k, 1, backward.at(Point{m, k, 1}));
    }
  }
  return f;
}

struct MatchReport {
  std::size_t count = 0;
  std::size_t threshold = 0;
  bool verdict = false;
};

// Number of grid points where f is present and equal to η; the finite
// stand-in for "agrees infinitely often" is count >= threshold.
inline MatchReport matches(const GridFn& f, const Eta& eta, std::size_t threshold) {
  MatchReport report;
  report.threshold = threshold;
  const std::size_t ma = std::min(f.ma(), eta.ma());
  const std::size_t mk = std::min(f.mk(), eta.mk());
  for (std::size_t m = 0; m < ma; ++m)
    for (std::size_t k = 0; k < mk; ++k)
      for (int i = 0; i < 2; ++i) {
        auto v = f.at(m, k, i);
        if (v && *v == eta.at(m, k, i)) ++report.count;
      }
  report.verdict = report.count >= threshold;
  return report;
}

struct CatchEntry {
  int layer = 0;  // 0: m < π(m) = n, 1: n > π(n) = m
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  std::optional<std::uint64_t> k;  // least matching k, if any
};

struct CatchReport {
  bool ok = true;
  std::vector<CatchEntry> pairs;
  std::size_t violations() const {
    return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const CatchEntry& e) { return !e.k; }));
  }
};

// For each pair m < n in A linked by π (either direction) confirms a k with
// f_from_pi(π) = η at (m, k, layer). Requires check_star_star(A, η); a set
// failing it raises PreconditionUnmet instead of a falsified verdict.
inline CatchReport verify_catch(const FinSet& a, const Eta& eta, const Permutation& pi) {
  ConditionReport pre = check_star_star(a, eta);
  if (!pre.ok) throw PreconditionUnmet("set does not satisfy the pairwise matching property");
  auto [up, down] = case_split(a, pi);
  CatchReport report;
  auto confirm = [&](int layer, std::uint64_t m, std::uint64_t n) {
    // f(m, k, 0) reads rho_{π(m)}, f(m, k, 1) reads rho_{π^-1(m)}; here both are rho_n.
    const PartialFn fn = rho(layer == 0 ? pi(m) : pi.inverse_at(m));
    CatchEntry entry{layer, m, n, std::nullopt};
    for (std::uint64_t k = 0; k < eta.mk(); ++k) {
      auto v = fn.at(Point{m, k, static_cast<std::uint8_t>(layer)});
      if (v && *v == eta.at(m, k, layer)) {
        entry.k = k;
        break;
      }
    }
    if (!entry.k) report.ok = false;
    report.pairs.push_back(entry);
  };
  for (std::size_t m : up.members()) confirm(0, m, pi(m));
  for (std::size_t n : down.members()) confirm(1, pi(n), n);
  return report;
}

}  // namespace omegalab
