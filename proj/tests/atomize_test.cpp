// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"
#include "wste/atomize.hpp"

using namespace wste;

namespace {

std::vector<std::pair<unsigned, unsigned>> spans(const Atomization& a) {
  std::vector<std::pair<unsigned, unsigned>> out;
  for (const Atom& at : a.atoms()) out.push_back({at.hi, at.lo});
  return out;
}

using Spans = std::vector<std::pair<unsigned, unsigned>>;

// Independent oracle: bits i and j share an atom iff no access separates
// them, i.e. every access contains both or neither.
Spans brute_force_atoms(unsigned m, const std::vector<std::pair<unsigned, unsigned>>& accesses) {
  auto same = [&](unsigned i, unsigned j) {
    for (auto [q, p] : accesses)
      if ((i >= p && i <= q) != (j >= p && j <= q)) return false;
    return true;
  };
  Spans out;
  unsigned lo = 0;
  for (unsigned b = 1; b <= m; ++b)
    if (b == m || !same(b - 1, b)) {
      out.push_back({b - 1, lo});
      lo = b;
    }
  return out;
}

unsigned word(const Module& m, const char* n) { return static_cast<unsigned>(m.find_word(n)); }

}  // namespace

TEST(Induce, TableRows) {
  EXPECT_EQ(spans(induce(16, 10, 7)), (Spans{{6, 0}, {10, 7}, {15, 11}}));
  EXPECT_EQ(spans(induce(16, 15, 0)), (Spans{{15, 0}}));
  EXPECT_EQ(spans(induce(8, 7, 4)), (Spans{{3, 0}, {7, 4}}));
  EXPECT_EQ(spans(induce(8, 3, 0)), (Spans{{3, 0}, {7, 4}}));
}

TEST(Induce, OutOfRange) {
  EXPECT_THROW(induce(8, 8, 0), std::out_of_range);
  EXPECT_THROW(induce(8, 2, 3), std::out_of_range);
}

TEST(Refine, Examples) {
  Atomization whole(8);
  EXPECT_EQ(spans(refine(whole, induce(8, 7, 4))), (Spans{{3, 0}, {7, 4}}));
  Atomization r = refine(induce(8, 7, 4), induce(8, 5, 2));
  EXPECT_EQ(spans(r), (Spans{{1, 0}, {3, 2}, {5, 4}, {7, 6}}));
  EXPECT_EQ(refine(r, r), r);
  EXPECT_THROW(refine(Atomization(8), Atomization(4)), std::invalid_argument);
}

TEST(Refine, MatchesEquivalenceClasses) {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 500; ++iter) {
    unsigned m = 1 + rng() % 16;
    std::vector<std::pair<unsigned, unsigned>> acc;
    Atomization a(m);
    for (unsigned k = rng() % 5; k > 0; --k) {
      unsigned p = rng() % m, q = p + rng() % (m - p);
      acc.push_back({q, p});
      a = refine(a, induce(m, q, p));
    }
    EXPECT_EQ(spans(a), brute_force_atoms(m, acc));
  }
}

TEST(AtomizeDesign, NoSlicesOneAtomPerWord) {
  Module m = load_module("input a:8, b:8; reg r:8; wire s:8; s = a + b; r <= s;");
  AtomMap at = atomize(m);
  for (unsigned w = 0; w < m.words.size(); ++w) EXPECT_EQ(at.atoms(w).size(), 1u);
}

TEST(AtomizeDesign, PaperFragment) {
  Module m = load_module("input a:16, b:8; wire c:8; c[4:1] = a[10:7] + b[5:2]; c[7:5] = 0; c[0] = 0;");
  AtomMap at = atomize(m);
  EXPECT_EQ(at.words[word(m, "a")].cuts(), (std::set<unsigned>{7, 11}));
  EXPECT_EQ(at.words[word(m, "b")].cuts(), (std::set<unsigned>{2, 6}));
  EXPECT_EQ(at.words[word(m, "c")].cuts(), (std::set<unsigned>{1, 5}));
}

TEST(AtomizeDesign, ArrayIndexAndShiftAmountNotAtomized) {
  Module m = load_module(
      "input i:3, d:8, k:8; array A:[3]8; wire o:8, s:8; A[i] <= d; o = A[i]; s = d << k;");
  AtomMap at = atomize(m);
  EXPECT_EQ(at.atoms(word(m, "i")).size(), 1u);
  EXPECT_EQ(at.atoms(word(m, "k")).size(), 1u);
}

TEST(AtomizeDesign, SpecAccessesRefine) {
  Module m = load_module("input a:8; wire y:8; y = a;");
  std::vector<Access> extra = {{word(m, "y"), 5, 2}};
  AtomMap at = atomize(m, extra);
  EXPECT_EQ(spans(at.words[word(m, "y")]), (Spans{{1, 0}, {5, 2}, {7, 6}}));
  EXPECT_EQ(at.largest_atom(), 8u);
  EXPECT_EQ(at.atom_count(), 4u);
}

TEST(AtomizeDesign, SadLargestAtomNotBitBlasted) {
  Module m = load_module(wste::testing::read_source("designs/sad/sad.wdl"), "sad", {{"W", 32}});
  AtomMap at = atomize(m);
  EXPECT_EQ(at.largest_atom(), 32u);
  EXPECT_EQ(at.atoms(word(m, "acc")).size(), 2u);  // sad_hi reads the upper half
}

TEST(AtomizeProperty, RandomDesignsAligned) {
  for (unsigned seed = 0; seed < 200; ++seed) {
    Module m = load_module(wste::testing::RandomDesign(seed).generate());
    auto acc = collect_accesses(m);
    AtomMap at = atomize(m);
    for (const Access& a : acc) EXPECT_TRUE(at.words[a.word].aligned(a.hi, a.lo)) << "seed " << seed;
  }
}

TEST(AtomizeProperty, OrderIndependentAndFixpoint) {
  std::mt19937 rng(3);
  for (unsigned seed = 0; seed < 50; ++seed) {
    Module m = load_module(wste::testing::RandomDesign(seed).generate());
    std::vector<unsigned> widths;
    for (const auto& w : m.words) widths.push_back(w.width);
    auto acc = collect_accesses(m);
    AtomMap ref = atomize_accesses(widths, acc);
    for (int k = 0; k < 10; ++k) {
      std::shuffle(acc.begin(), acc.end(), rng);
      AtomMap again = atomize_accesses(widths, acc);
      for (unsigned w = 0; w < widths.size(); ++w) EXPECT_EQ(again.words[w], ref.words[w]);
    }
    // Re-running on the atoms themselves changes nothing.
    std::vector<Access> atoms_as_accesses;
    for (unsigned w = 0; w < widths.size(); ++w)
      for (const Atom& a : ref.atoms(w)) atoms_as_accesses.push_back({w, a.hi, a.lo});
    AtomMap fix = atomize_accesses(widths, atoms_as_accesses);
    for (unsigned w = 0; w < widths.size(); ++w) EXPECT_EQ(fix.words[w], ref.words[w]);
  }
}

TEST(AtomTable, Format) {
  Module m = load_module("input a:16, b:8; wire c:8; c[4:1] = a[10:7] + b[5:2]; c[7:5] = 0; c[0] = 0;");
  std::string t = format_atom_table(m, atomize(m));
  EXPECT_NE(t.find("a\t16\t15:11 10:7 6:0"), std::string::npos) << t;
}
