#include <gtest/gtest.h>

#include <vector>

#include "omegalab/diag.hpp"
#include "omegalab/errors.hpp"
#include "oracles.hpp"

using namespace omegalab;

namespace {

const oracle::Enumeration& rhos() {
  static const oracle::Enumeration e = oracle::enumerate_rho(4096);
  return e;
}

Permutation swap_of(std::size_t n, std::size_t a, std::size_t b) {
  std::vector<std::size_t> image(n);
  for (std::size_t x = 0; x < n; ++x) image[x] = x;
  std::swap(image[a], image[b]);
  return Permutation(std::move(image));
}

std::optional<std::uint64_t> oracle_value(std::uint64_t n, std::uint64_t m, std::uint64_t k, int i) {
  const auto& fn = rhos().fns.at(n);
  auto it = fn.find({m, k, i});
  if (it == fn.end()) return std::nullopt;
  return it->second;
}

// Random subsets of {0..3} plus an optional larger element, kept only when
// they satisfy the pairwise matching property.
FinSet random_matching_set(const Eta& eta, std::size_t universe, Rng& rng) {
  for (;;) {
    FinSet a(universe);
    for (std::size_t m = 0; m < 4; ++m)
      if (rng.below(2)) a.insert(m);
    if (rng.below(3)) a.insert(4 + rng.below(universe - 4));
    if (check_star_star(a, eta).ok && a.size() >= 2) return a;
  }
}

// A permutation that moves members of A onto members of A: random, then a
// few swaps among members, so pairs actually occur.
Permutation linking_permutation(const FinSet& a, Rng& rng) {
  Permutation pi = Permutation::random(a.universe(), rng);
  auto members = a.members();
  for (int s = 0; s < 3; ++s) {
    std::size_t x = members[rng.below(members.size())];
    std::size_t y = members[rng.below(members.size())];
    pi.swap_images(x, pi.inverse_at(y));
  }
  return pi;
}

}  // namespace

TEST(MovedWithin, Examples) {
  FinSet a = FinSet::of(8, {0, 1});
  EXPECT_TRUE(moved_within(a, Permutation::identity(8)).empty());
  EXPECT_EQ(moved_within(a, swap_of(8, 0, 1)).members(), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(moved_within(FinSet::of(8, {0, 2}), swap_of(8, 0, 1)).empty());
}

TEST(CaseSplit, Examples) {
  auto [u0, d0] = case_split(FinSet::of(8, {0, 1}), Permutation::identity(8));
  EXPECT_TRUE(u0.empty());
  EXPECT_TRUE(d0.empty());
  auto [u1, d1] = case_split(FinSet::of(8, {0, 1}), swap_of(8, 0, 1));
  EXPECT_EQ(u1.members(), (std::vector<std::size_t>{0}));
  EXPECT_EQ(d1.members(), (std::vector<std::size_t>{1}));
  auto [u2, d2] = case_split(FinSet::of(8, {0, 3}), swap_of(8, 0, 3));
  EXPECT_EQ(u2.members(), (std::vector<std::size_t>{0}));
  EXPECT_EQ(d2.members(), (std::vector<std::size_t>{3}));
}

TEST(CaseSplit, UnionIsMovedWithin) {
  Rng rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng.below(80);
    FinSet a(n);
    for (std::size_t x = 0; x < n; ++x)
      if (rng.below(2)) a.insert(x);
    Permutation pi = Permutation::random(n, rng);
    auto [up, down] = case_split(a, pi);
    FinSet joined = up;
    joined |= down;
    EXPECT_EQ(joined, moved_within(a, pi));
    // Plain definition of moved_within.
    for (std::size_t x = 0; x < n; ++x) {
      bool expected = a.contains(x) && pi(x) != x && a.contains(pi(x));
      EXPECT_EQ(joined.contains(x), expected);
    }
  }
}

TEST(FFromPi, Examples) {
  GridFn id = f_from_pi(Permutation::identity(8), 4, 4);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_FALSE(id.at(0, k, 0).has_value());
  Permutation pi = swap_of(8, 0, 3);
  GridFn f = f_from_pi(pi, 4, 4);
  EXPECT_EQ(f.at(0, 0, 0), std::optional<std::uint64_t>{0});
  EXPECT_EQ(f.at(0, 0, 1), std::optional<std::uint64_t>{0});
  EXPECT_THROW(f_from_pi(pi, 9, 1), std::invalid_argument);
}

TEST(FFromPi, MatchesOracleAndInversionSymmetry) {
  Rng rng(59);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4096;
    Permutation pi = Permutation::random(n, rng);
    Permutation inv = pi.inverse();
    GridFn f = f_from_pi(pi, 6, 4);
    GridFn g = f_from_pi(inv, 6, 4);
    for (std::uint64_t m = 0; m < 6; ++m) {
      for (std::uint64_t k = 0; k < 4; ++k) {
        EXPECT_EQ(f.at(m, k, 0), oracle_value(pi(m), m, k, 0));
        EXPECT_EQ(f.at(m, k, 1), oracle_value(pi.inverse_at(m), m, k, 1));
        // Layer 1 of f(π) and layer 0 of f(π⁻¹) read the same row source.
        EXPECT_EQ(g.at(m, k, 0), oracle_value(pi.inverse_at(m), m, k, 0));
        EXPECT_EQ(g.at(m, k, 1), oracle_value(pi(m), m, k, 1));
      }
    }
  }
}

TEST(Matches, Examples) {
  Rng rng(61);
  Eta eta = Eta::random(4, 5, 3, rng);
  EXPECT_EQ(matches(GridFn::from_eta(eta), eta, 1).count, 40u);
  GridFn shifted(4, 5);
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t k = 0; k < 5; ++k)
      for (int i = 0; i < 2; ++i) shifted.set(m, k, i, eta.at(m, k, i) + 1);
  EXPECT_EQ(matches(shifted, eta, 1).count, 0u);
  MatchReport absent = matches(GridFn(4, 5), eta, 1);
  EXPECT_EQ(absent.count, 0u);
  EXPECT_FALSE(absent.verdict);
  EXPECT_TRUE(matches(GridFn(4, 5), eta, 0).verdict);
}

TEST(Matches, MonotoneInGridSize) {
  Rng rng(67);
  for (int trial = 0; trial < 40; ++trial) {
    Eta eta = Eta::random(12, 12, 2, rng);
    Permutation pi = Permutation::random(4096, rng);
    std::size_t prev = 0;
    for (std::size_t size = 1; size <= 12; ++size) {
      std::size_t count = matches(f_from_pi(pi, size, size), eta, 0).count;
      EXPECT_GE(count, prev);
      prev = count;
    }
  }
}

TEST(VerifyCatch, Examples) {
  Eta zero = Eta::constant(8, 8, 2, 0);
  FinSet a = FinSet::of(16, {0, 3});
  EXPECT_TRUE(verify_catch(a, zero, Permutation::identity(16)).pairs.empty());

  CatchReport r = verify_catch(a, zero, swap_of(16, 0, 3));
  EXPECT_TRUE(r.ok);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0].layer, 0);
  EXPECT_EQ(r.pairs[0].m, 0u);
  EXPECT_EQ(r.pairs[0].n, 3u);
  EXPECT_EQ(r.pairs[0].k, std::optional<std::uint64_t>{0});
  EXPECT_EQ(r.pairs[1].layer, 1);
  EXPECT_EQ(r.pairs[1].m, 0u);
  EXPECT_EQ(r.pairs[1].n, 3u);
  EXPECT_EQ(r.violations(), 0u);

  EXPECT_THROW(verify_catch(FinSet::of(16, {0, 1}), zero, Permutation::identity(16)), PreconditionUnmet);
}

TEST(VerifyCatch, ExactOnRandomMatchingSets) {
  Rng rng(71);
  std::size_t pairs = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Eta eta = Eta::random(4, 4, 1 + rng.below(2), rng);
    FinSet a = random_matching_set(eta, 4096, rng);
    Permutation pi = rng.below(2) ? linking_permutation(a, rng) : Permutation::random(4096, rng);
    CatchReport r = verify_catch(a, eta, pi);
    EXPECT_EQ(r.violations(), 0u);
    EXPECT_TRUE(r.ok);
    pairs += r.pairs.size();
    // Brute confirmation: every linked pair has a k where ρ_n agrees with η.
    GridFn f = f_from_pi(pi, 4, 4);
    for (std::size_t x : a.members()) {
      std::size_t y = pi(x);
      if (y == x || !a.contains(y)) continue;
      std::size_t m = std::min(x, y), n = std::max(x, y);
      int layer = x < y ? 0 : 1;
      bool found = false;
      for (std::uint64_t k = 0; k < 4; ++k) {
        auto v = oracle_value(n, m, k, layer);
        if (v && *v == eta.at(m, k, layer)) {
          found = true;
          EXPECT_EQ(f.at(m, k, layer), v);
        }
      }
      EXPECT_TRUE(found);
    }
  }
  EXPECT_GT(pairs, 100u);
}
