#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "instances.hpp"
#include "omegalab/errors.hpp"
#include "omegalab/extender.hpp"

using namespace omegalab;

namespace {

std::vector<std::size_t> images(const Permutation& pi) {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < pi.size(); ++x) out.push_back(pi(x));
  return out;
}

Family two_blocks() { return Family(4, {FinSet::of(4, {0, 1}), FinSet::of(4, {2, 3})}); }

// Postconditions by explicit loops, not via satisfies_demand.
void expect_postconditions(const Permutation& pi, const PartialInjection& f, const FamilyMap& g, const Family& family) {
  for (const auto& [n, fn] : f.pairs()) EXPECT_EQ(pi(n), fn);
  for (const auto& [i, gi] : g.pairs()) {
    for (std::size_t x = 0; x < family.universe; ++x) {
      EXPECT_EQ(family.sets[i].contains(x), family.sets[gi].contains(pi(x))) << "x=" << x << " i=" << i;
    }
  }
}

std::set<std::vector<std::size_t>> as_set(const Family& f) {
  std::set<std::vector<std::size_t>> out;
  for (const FinSet& s : f.sets) out.insert(s.members());
  return out;
}

}  // namespace

TEST(Compatible, Examples) {
  Family f = bit_family(2, 8);
  CompatibilityReport bad = check_compatible({{3, 2}}, {{0, 0}}, f);
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.witness, (std::pair<std::size_t, std::size_t>{3, 0}));
  EXPECT_TRUE(check_compatible({{1, 2}}, {{0, 1}}, f).ok);
  EXPECT_TRUE(check_compatible({}, {}, f).ok);
}

TEST(Atoms, SwapOnBitFamily) {
  AtomDecomposition d = atoms_of({{0, 1}, {1, 0}}, bit_family(2, 8));
  ASSERT_EQ(d.atoms.size(), 4u);
  EXPECT_EQ(d.atoms[0].members(), (std::vector<std::size_t>{0, 4}));
  EXPECT_EQ(d.atoms[1].members(), (std::vector<std::size_t>{1, 5}));
  EXPECT_EQ(d.atoms[2].members(), (std::vector<std::size_t>{2, 6}));
  EXPECT_EQ(d.atoms[3].members(), (std::vector<std::size_t>{3, 7}));
  EXPECT_EQ(d.action, (std::vector<std::size_t>{0, 2, 1, 3}));
}

TEST(Atoms, IdentityMaps) {
  Family f = bit_family(2, 8);
  AtomDecomposition one = atoms_of({{0, 0}}, f);
  ASSERT_EQ(one.atoms.size(), 2u);
  EXPECT_EQ(one.atoms[0], f[0].complement());
  EXPECT_EQ(one.atoms[1], f[0]);
  EXPECT_EQ(one.action, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(atoms_of({{0, 0}, {1, 1}}, f).action, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Atoms, NonPermutationIsReported) {
  // A_0 ⊂ A_1, so mapping A_0 to A_1 alone sends the outside cell onto a
  // smaller cell.
  Family f(4, {FinSet::of(4, {0}), FinSet::of(4, {0, 1})});
  EXPECT_THROW(atoms_of({{0, 1}}, f), InducedMapNotPermutation);
}

TEST(BuildPi, SwapOnTwoBlocks) {
  Permutation pi = build_pi({}, {{0, 1}, {1, 0}}, two_blocks());
  EXPECT_EQ(images(pi), (std::vector<std::size_t>{2, 3, 0, 1}));
}

TEST(BuildPi, SwapWithPinnedPoint) {
  Permutation pi = build_pi({{0, 2}}, {{0, 1}, {1, 0}}, two_blocks());
  EXPECT_EQ(images(pi), (std::vector<std::size_t>{2, 3, 0, 1}));
}

TEST(BuildPi, IdentityDemandGivesIdentity) {
  EXPECT_TRUE(build_pi({}, {{0, 0}, {1, 1}}, bit_family(2, 8)).is_identity());
}

TEST(BuildPi, ShuffleIsApplied) {
  AtomShuffle c{{{1, 0}, {1, 0}}};  // reverse within each block
  Permutation pi = build_pi({}, {{0, 1}, {1, 0}}, two_blocks(), c);
  EXPECT_EQ(images(pi), (std::vector<std::size_t>{3, 2, 1, 0}));
}

TEST(BuildPi, Errors) {
  Family f = two_blocks();
  EXPECT_THROW(build_pi({{0, 0}}, {{0, 1}, {1, 0}}, f), IncompatiblePair);
  // Pinning 2 onto block {2,3} while the swap sends block {0,1} there leaves
  // atom sizes unequal.
  Family g(4, {FinSet::of(4, {0, 1}), FinSet::of(4, {2, 3})});
  EXPECT_THROW(build_pi({{2, 3}}, {{0, 0}, {1, 1}}, g, AtomShuffle{{{0}, {0, 1}}}), std::invalid_argument);
}

TEST(BuildPi, CardinalityMismatch) {
  // Cells sized 1 and 3: a swap of A_0 with A_1 cannot be a bijection.
  Family f(4, {FinSet::of(4, {0}), FinSet::of(4, {1, 2, 3})});
  EXPECT_THROW(build_pi({}, {{0, 1}, {1, 0}}, f), CardinalityMismatch);
}

TEST(BuildPi, RandomCompatibleInstancesMeetPostconditions) {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    instances::Compatible inst = instances::random_compatible(64, rng);
    ASSERT_TRUE(check_compatible(inst.f, inst.g, inst.family).ok);
    AtomDecomposition atoms = atoms_of(inst.g, inst.family);
    AtomShuffle c = random_shuffle(shuffle_sizes(atoms, inst.f), rng);
    Permutation pi = build_pi(inst.f, inst.g, inst.family, atoms, c);
    expect_postconditions(pi, inst.f, inst.g, inst.family);
    EXPECT_TRUE(satisfies_demand(pi, inst.f, inst.g, inst.family));
  }
}

TEST(BuildPi, SucceedsOnlyWhenCompatible) {
  Rng rng(7);
  int refused = 0;
  for (int trial = 0; trial < 300; ++trial) {
    instances::Compatible inst = instances::random_compatible(24, rng);
    // Scramble f so it is sometimes incompatible.
    PartialInjection f;
    std::vector<std::size_t> targets;
    for (std::size_t x = 0; x < inst.family.universe; ++x) targets.push_back(x);
    rng.shuffle(std::span<std::size_t>(targets));
    for (std::size_t x = 0; x < inst.family.universe; ++x)
      if (rng.below(5) == 0) f.add(x, targets[x]);
    bool compatible = check_compatible(f, inst.g, inst.family).ok;
    try {
      Permutation pi = build_pi(f, inst.g, inst.family);
      EXPECT_TRUE(compatible);
      expect_postconditions(pi, f, inst.g, inst.family);
    } catch (const IncompatiblePair&) {
      EXPECT_FALSE(compatible);
      ++refused;
    } catch (const CardinalityMismatch&) {
      EXPECT_TRUE(compatible);
    }
  }
  EXPECT_GT(refused, 0);
}

TEST(Atoms, PartitionTheUniverse) {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    instances::Compatible inst = instances::random_compatible(100, rng);
    AtomDecomposition d = atoms_of(inst.g, inst.family);
    std::vector<int> hits(inst.family.universe, 0);
    for (const FinSet& a : d.atoms) {
      EXPECT_FALSE(a.empty());
      for (std::size_t x : a.members()) ++hits[x];
    }
    for (int h : hits) EXPECT_EQ(h, 1);
    std::vector<std::size_t> sorted = d.action;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) EXPECT_EQ(sorted[k], k);
  }
}

TEST(OrbitClosure, Examples) {
  Family f = bit_family(2, 8);
  Rng rng(1);
  Permutation pi = Permutation::random(8, rng);
  EXPECT_EQ(orbit_closure(f, pi, 0).sets, f.sets);
  EXPECT_EQ(orbit_closure(f, Permutation::identity(8), 5).sets, f.sets);

  Family one(4, {FinSet::of(4, {0, 1})});
  Family closed = orbit_closure(one, Permutation({2, 3, 0, 1}), 1);
  ASSERT_EQ(closed.size(), 2u);
  EXPECT_EQ(closed[0].members(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(closed[1].members(), (std::vector<std::size_t>{2, 3}));
}

TEST(OrbitClosure, MatchesPowersAndSettlesAtDoubleDepth) {
  Rng rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = 2 + rng.below(30);
    Family f(n, {});
    for (std::size_t j = 0; j < 1 + rng.below(3); ++j) {
      FinSet s(n);
      for (std::size_t x = 0; x < n; ++x)
        if (rng.below(2)) s.insert(x);
      f.push_back(s);
    }
    Permutation pi = Permutation::random(n, rng);
    for (std::size_t l = 0; l <= 3; ++l) {
      std::set<std::vector<std::size_t>> expected;
      for (long long e = -static_cast<long long>(l); e <= static_cast<long long>(l); ++e) {
        for (const FinSet& s : f.sets) {
          // π^e[A] by repeated application, independent of Permutation::power.
          FinSet cur = s;
          for (long long r = 0; r < (e < 0 ? -e : e); ++r) {
            FinSet next(n);
            for (std::size_t x : cur.members()) next.insert(e < 0 ? pi.inverse_at(x) : pi(x));
            cur = next;
          }
          expected.insert(cur.members());
        }
      }
      Family closed = orbit_closure(f, pi, l);
      EXPECT_EQ(as_set(closed), expected);
      EXPECT_EQ(closed.size(), expected.size());
      EXPECT_EQ(as_set(orbit_closure(closed, pi, l)), as_set(orbit_closure(f, pi, 2 * l)));
    }
  }
}

TEST(FindGoodC, ZeroBudget) {
  GoodShuffleResult r = find_good_c({}, {{0, 1}, {1, 0}}, bit_family(2, 64), 4, 2, 1, 0, 1);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.attempts, 0u);
}

TEST(FindGoodC, IdentityDemandSucceedsAtOnce) {
  Family f = bit_family(3, 64);
  GoodShuffleResult r = find_good_c({}, {{0, 0}, {1, 1}, {2, 2}}, f, 8, 3, 2, 10, 3);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.attempts, 1u);
  EXPECT_EQ(r.closure.sets, f.sets);
}

TEST(FindGoodC, PaddedBitFamilySwap) {
  const std::size_t n = std::size_t{1} << 12;
  Family f = bit_family(2, n);
  // Padding: sets cutting each cell of A_0, A_1 in half at random.
  Rng pad(77);
  for (int j = 0; j < 2; ++j) {
    FinSet s(n);
    for (std::size_t x = 0; x < n; ++x)
      if (pad.below(2)) s.insert(x);
    f.push_back(s);
  }
  PartialInjection none;
  FamilyMap swap{{0, 1}, {1, 0}};
  GoodShuffleResult r = find_good_c(none, swap, f, 8, 4, 2, 10000, 5);
  ASSERT_TRUE(r.found);
  EXPECT_TRUE(is_independent(r.closure, 8, std::min<std::size_t>(4, r.closure.size())).ok);
  expect_postconditions(r.pi, none, swap, f);
  EXPECT_EQ(r.pi, build_pi(none, swap, f, r.shuffle));
}

TEST(FindGoodC, Deterministic) {
  Family f = bit_family(3, 256);
  auto a = find_good_c({}, {{0, 1}, {1, 0}}, f, 4, 3, 2, 50, 9);
  auto b = find_good_c({}, {{0, 1}, {1, 0}}, f, 4, 3, 2, 50, 9);
  EXPECT_EQ(a.found, b.found);
  EXPECT_EQ(a.attempts, b.attempts);
  EXPECT_EQ(a.shuffle, b.shuffle);
}

TEST(FindGoodC, RejectsBadDemands) {
  Family f = bit_family(2, 8);
  EXPECT_THROW(find_good_c({{3, 2}}, {{0, 0}}, f, 1, 1, 1, 5, 0), IncompatiblePair);
  Family skew(4, {FinSet::of(4, {0}), FinSet::of(4, {1, 2, 3})});
  EXPECT_THROW(find_good_c({}, {{0, 1}, {1, 0}}, skew, 1, 1, 1, 5, 0), CardinalityMismatch);
}

TEST(Homogenize, NoDemands) {
  Family f = bit_family(2, 16);
  HomogenizeResult r = homogenize(f, {}, {});
  EXPECT_EQ(r.status, HomogenizeStatus::Complete);
  EXPECT_EQ(r.family.sets, f.sets);
  EXPECT_TRUE(r.permutations.empty());
}

TEST(Homogenize, EmptyDemandKeepsFamily) {
  Family f = bit_family(2, 16);
  HomogenizeParams p;
  p.threshold = 1;
  p.depth = 2;
  p.orbit_depth = 1;
  p.budget = 5;
  HomogenizeResult r = homogenize(f, {ExtensionDemand{}}, p);
  ASSERT_EQ(r.status, HomogenizeStatus::Complete);
  ASSERT_EQ(r.permutations.size(), 1u);
  EXPECT_EQ(r.permutations[0].size(), 16u);
}

TEST(Homogenize, TwoSwapDemands) {
  Family f = bit_family(3, std::size_t{1} << 12);
  std::vector<ExtensionDemand> demands{{{}, {{0, 1}, {1, 0}}}, {{}, {{1, 2}, {2, 1}}}};
  HomogenizeParams p;
  p.threshold = 8;
  p.depth = 4;
  p.orbit_depth = 2;
  p.budget = 200;
  p.seed = 13;
  HomogenizeResult r = homogenize(f, demands, p);
  ASSERT_EQ(r.status, HomogenizeStatus::Complete) << r.message;
  ASSERT_EQ(r.permutations.size(), 2u);
  EXPECT_TRUE(is_independent(r.family, 8, 4).ok);
  // Each step's family is a prefix of the final one, so the indices of the
  // demands still name the same sets.
  expect_postconditions(r.permutations[0], demands[0].f, demands[0].g, f);
  expect_postconditions(r.permutations[1], demands[1].f, demands[1].g, r.family);
}

TEST(Homogenize, ReportsFailingStep) {
  Family skew(4, {FinSet::of(4, {0}), FinSet::of(4, {1, 2, 3})});
  HomogenizeParams p;
  p.budget = 3;
  HomogenizeResult r = homogenize(skew, {ExtensionDemand{}, ExtensionDemand{{}, {{0, 1}, {1, 0}}}}, p);
  EXPECT_EQ(r.status, HomogenizeStatus::CardinalityMismatch);
  EXPECT_EQ(r.failed_demand, std::optional<std::size_t>{1});
  EXPECT_EQ(r.permutations.size(), 1u);
}
