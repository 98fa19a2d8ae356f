#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omegalab/finset.hpp"

// Canonical numbering of X = ω × ω × 2 and of the finite partial functions
// X → ω.
//
// A point (a, b, i) has code 2·pair(a, b) + i. A (point code, value) entry has
// pair code pair(point code, value). A raw code is a finite set of pair codes
// (read as the binary support of an integer); it is functional when no two of
// its entries share a point. rho(m) is the m-th functional raw code in
// increasing integer order.
//
// Raw codes are kept as sorted vectors of pair codes, so arbitrarily large raw
// codes are representable; only the index m is limited to 64 bits.

namespace omegalab {

inline std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 s = static_cast<unsigned __int128>(a) + b;
  unsigned __int128 q = s * (s + 1) / 2 + b;
  if (q > std::numeric_limits<std::uint64_t>::max()) {
    throw std::overflow_error("cantor_pair(" + std::to_string(a) + ", " + std::to_string(b) + ") overflows 64 bits");
  }
  return static_cast<std::uint64_t>(q);
}

inline std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t q) {
  // Largest w with w(w+1)/2 <= q.
  auto tri = [](unsigned __int128 w) { return w * (w + 1) / 2; };
  std::uint64_t w = static_cast<std::uint64_t>((std::sqrt(8.0L * static_cast<long double>(q) + 1.0L) - 1.0L) / 2.0L);
  while (tri(w) > q) --w;
  while (tri(w + 1) <= q) ++w;
  std::uint64_t b = q - static_cast<std::uint64_t>(tri(w));
  return {w - b, b};
}

struct Point {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint8_t i = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline std::uint64_t point_code(const Point& p) {
  if (p.i > 1) throw std::invalid_argument("point layer must be 0 or 1");
  std::uint64_t c = cantor_pair(p.a, p.b);
  if (c > (std::numeric_limits<std::uint64_t>::max() - 1) / 2) throw std::overflow_error("point code overflows 64 bits");
  return 2 * c + p.i;
}

inline Point point_decode(std::uint64_t code) {
  auto [a, b] = cantor_unpair(code / 2);
  return Point{a, b, static_cast<std::uint8_t>(code % 2)};
}

// A finite partial function X → ω, keyed by point code.
class PartialFn {
 public:
  PartialFn() = default;

  // Adds or confirms an entry; a conflicting value is rejected.
  void set(const Point& p, std::uint64_t value) { set_code(point_code(p), value); }

  void set_code(std::uint64_t code, std::uint64_t value) {
    auto [it, inserted] = entries_.emplace(code, value);
    if (!inserted && it->second != value) {
      throw std::invalid_argument("partial function already maps point code " + std::to_string(code) +
                                  " to a different value");
    }
  }

  // Absent points yield nullopt, never a default value.
  std::optional<std::uint64_t> at(const Point& p) const { return at_code(point_code(p)); }

  std::optional<std::uint64_t> at_code(std::uint64_t code) const {
    auto it = entries_.find(code);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  bool defined_at(const Point& p) const { return entries_.count(point_code(p)) != 0; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Sorted by point code.
  const std::map<std::uint64_t, std::uint64_t>& entries() const { return entries_; }

  friend bool operator==(const PartialFn&, const PartialFn&) = default;

 private:
  std::map<std::uint64_t, std::uint64_t> entries_;
};

// ρ' ⊇ ρ: every entry of ρ appears identically in ρ'.
inline bool extends(const PartialFn& larger, const PartialFn& smaller) {
  for (const auto& [code, value] : smaller.entries()) {
    auto v = larger.at_code(code);
    if (!v || *v != value) return false;
  }
  return true;
}

using RawCode = std::vector<std::uint64_t>;  // sorted pair codes

namespace codec_detail {

inline std::uint64_t point_of(std::uint64_t pair_code) { return cantor_unpair(pair_code).first; }

inline bool mul_checked(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return !__builtin_mul_overflow(a, b, &out);
}

inline bool add_checked(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return !__builtin_add_overflow(a, b, &out);
}

// Number of functional subsets of pair codes {0, ..., limit-1} that avoid the
// points in `used`; nullopt when it does not fit in 64 bits.
//
// Diagonal s of the pairing holds codes s(s+1)/2 + v for v = 0..s, with point
// s - v. Below `limit` there are D full diagonals plus the first r codes of
// diagonal D, so point q occurs max(0, D - q) times, plus once more when
// D - r < q <= D.
inline std::optional<std::uint64_t> free_count(std::uint64_t limit, const std::vector<std::uint64_t>& used) {
  std::uint64_t d = static_cast<std::uint64_t>((std::sqrt(8.0L * static_cast<long double>(limit) + 1.0L) - 1.0L) / 2.0L);
  auto tri = [](unsigned __int128 w) { return w * (w + 1) / 2; };
  while (tri(d) > limit) --d;
  while (tri(d + 1) <= limit) ++d;
  const std::uint64_t r = limit - static_cast<std::uint64_t>(tri(d));
  std::uint64_t total = 1;
  for (std::uint64_t q = 0; q <= d; ++q) {
    std::uint64_t count = (d > q ? d - q : 0) + ((r > 0 && q + r > d) ? 1 : 0);
    if (count == 0) continue;
    if (std::find(used.begin(), used.end(), q) != used.end()) continue;
    if (!mul_checked(total, count + 1, total)) return std::nullopt;
  }
  return total;
}

}  // namespace codec_detail

inline bool is_functional(const RawCode& raw) {
  std::vector<std::uint64_t> points;
  points.reserve(raw.size());
  for (std::uint64_t c : raw) points.push_back(codec_detail::point_of(c));
  std::sort(points.begin(), points.end());
  return std::adjacent_find(points.begin(), points.end()) == points.end();
}

inline RawCode raw_code(const PartialFn& fn) {
  RawCode raw;
  raw.reserve(fn.size());
  for (const auto& [code, value] : fn.entries()) raw.push_back(cantor_pair(code, value));
  std::sort(raw.begin(), raw.end());
  return raw;
}

inline PartialFn from_raw(const RawCode& raw) {
  PartialFn fn;
  for (std::uint64_t c : raw) {
    auto [point, value] = cantor_unpair(c);
    fn.set_code(point, value);
  }
  return fn;
}

// Number of functional raw codes strictly below `raw` (which must itself be
// functional); nullopt when that count does not fit in 64 bits.
inline std::optional<std::uint64_t> try_rank(const RawCode& raw) {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> used;
  for (std::size_t idx = raw.size(); idx-- > 0;) {
    auto below = codec_detail::free_count(raw[idx], used);
    if (!below || !codec_detail::add_checked(total, *below, total)) return std::nullopt;
    used.push_back(codec_detail::point_of(raw[idx]));
  }
  return total;
}

// The m-th functional raw code.
inline RawCode unrank(std::uint64_t m) {
  RawCode raw;
  if (m == 0) return raw;
  // Top bit j: F(j) <= m < F(j+1), where F(j) counts functional codes below 2^j.
  std::uint64_t top = 0;
  while (true) {
    auto next = codec_detail::free_count(top + 1, {});
    if (!next || *next > m) break;
    ++top;
  }
  std::vector<std::uint64_t> used;
  m -= *codec_detail::free_count(top, used);
  raw.push_back(top);
  used.push_back(codec_detail::point_of(top));
  for (std::uint64_t bit = top; bit-- > 0;) {
    auto zero_branch = codec_detail::free_count(bit, used);
    if (zero_branch && m >= *zero_branch) {
      m -= *zero_branch;
      raw.push_back(bit);
      used.push_back(codec_detail::point_of(bit));
    }
  }
  std::reverse(raw.begin(), raw.end());
  return raw;
}

inline PartialFn rho(std::uint64_t m) { return from_raw(unrank(m)); }

inline std::optional<std::uint64_t> try_rho_index(const PartialFn& fn) {
  RawCode raw;
  try {
    raw = raw_code(fn);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
  return try_rank(raw);
}

inline std::uint64_t rho_index(const PartialFn& fn) {
  auto m = try_rho_index(fn);
  if (!m) throw std::overflow_error("rho index of this partial function does not fit in 64 bits");
  return *m;
}

// Least functional raw code Y with Y ⊇ required and Y >= floor (as integers).
// `floor` must be functional.
inline RawCode least_functional_superset(const RawCode& required, const RawCode& floor) {
  if (std::includes(floor.begin(), floor.end(), required.begin(), required.end())) return floor;

  // Otherwise Y > floor. At the highest bit where they differ Y has a 1 and
  // floor a 0; Y agrees with floor above it and is minimal (just `required`)
  // below it. Take the lowest such bit that keeps Y a functional superset.
  const std::uint64_t top = std::max(floor.empty() ? 0 : floor.back(), required.empty() ? 0 : required.back());
  for (std::uint64_t bit = 0;; ++bit) {
    if (std::binary_search(floor.begin(), floor.end(), bit)) continue;
    auto floor_above = std::upper_bound(floor.begin(), floor.end(), bit);
    auto req_above = std::upper_bound(required.begin(), required.end(), bit);
    if (bit <= top && !std::includes(floor_above, floor.end(), req_above, required.end())) continue;
    RawCode y(required.begin(), std::lower_bound(required.begin(), required.end(), bit));
    y.push_back(bit);
    y.insert(y.end(), floor_above, floor.end());
    if (is_functional(y)) return y;
  }
}

// Least n in `candidates` with lower <= n < search_bound and rho(n) ⊇ fn.
inline std::optional<std::uint64_t> least_extension_in(const FinSet& candidates, const PartialFn& fn,
                                                       std::uint64_t lower, std::uint64_t search_bound) {
  RawCode required;
  try {
    required = raw_code(fn);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
  auto start = try_rank(required);
  if (!start) return std::nullopt;
  std::uint64_t lb = std::max(lower, *start);
  while (lb < search_bound) {
    auto b = candidates.next(static_cast<std::size_t>(lb));
    if (!b || *b >= search_bound) return std::nullopt;
    if (required.empty()) return *b;
    RawCode y = least_functional_superset(required, unrank(*b));
    auto r = try_rank(y);
    if (!r) return std::nullopt;
    if (*r == *b) return *b;
    lb = *r;
  }
  return std::nullopt;
}

struct DensityReport {
  bool ok = true;
  std::optional<std::uint64_t> unwitnessed;  // least probe m without an extension in B
};

// For every m < probe_bound some n ∈ B with n < search_bound has rho(n) ⊇ rho(m).
inline DensityReport is_dense_in_Y(const FinSet& b, std::uint64_t probe_bound, std::uint64_t search_bound) {
  if (probe_bound < 1 || search_bound < 1) throw std::invalid_argument("density bounds must be positive");
  DensityReport report;
  for (std::uint64_t m = 0; m < probe_bound; ++m) {
    if (!least_extension_in(b, rho(m), 0, search_bound)) {
      report.ok = false;
      report.unwitnessed = m;
      return report;
    }
  }
  return report;
}

}  // namespace omegalab
