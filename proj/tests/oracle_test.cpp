// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "wste/oracle.hpp"

using namespace wste;

TEST(Lattice, JoinBasics) {
  EXPECT_EQ(join(LatticeValue::x(), LatticeValue::defined(5)), LatticeValue::defined(5));
  EXPECT_EQ(join(LatticeValue::defined(3), LatticeValue::defined(7)), LatticeValue::top());
  EXPECT_EQ(join(LatticeValue::defined(3), LatticeValue::defined(3)), LatticeValue::defined(3));
  EXPECT_EQ(join(LatticeValue::top(), LatticeValue::x()), LatticeValue::top());
}

TEST(Lattice, JoinIsSemilatticeAtWidthTwo) {
  auto all = atom_lattice(2);
  ASSERT_EQ(all.size(), 6u);
  for (const auto& a : all) {
    EXPECT_EQ(join(a, a), a);
    for (const auto& b : all) {
      EXPECT_EQ(join(a, b), join(b, a));
      EXPECT_TRUE(leq(a, join(a, b)));
      for (const auto& c : all) EXPECT_EQ(join(join(a, b), c), join(a, join(b, c)));
    }
  }
}

TEST(Lattice, SingleThreeBitAtom) {
  unsigned w[] = {3};
  LatticeStats s = enumerate_lattice(w);
  EXPECT_EQ(s.size, 10);
  EXPECT_EQ(s.height, 2u);
  EXPECT_EQ(s, lattice_stats(w));
}

TEST(Lattice, BitBlastedSpecialCase) {
  // Three 1-bit atoms: every bit is 0, 1 or X, plus Top.
  unsigned w[] = {1, 1, 1};
  LatticeStats s = lattice_stats(w);
  EXPECT_EQ(s.size, 28);
  EXPECT_EQ(s.height, 4u);
  std::vector<BigUint> levels{1, 6, 12, 8, 1};
  EXPECT_EQ(s.level_sizes, levels);
  EXPECT_EQ(s, enumerate_lattice(w));
}

TEST(Lattice, MixedWidthsMatchEnumeration) {
  unsigned w[] = {2, 1};
  EXPECT_EQ(lattice_stats(w), enumerate_lattice(w));
  EXPECT_EQ(lattice_stats(w).size, 5 * 3 + 1);
}

TEST(ExactEval, Examples) {
  TernaryWord xx = TernaryWord::all_x(2), zz = TernaryWord::of(2, 0);
  TernaryWord args1[] = {xx, zz};
  EXPECT_EQ(eval_exact(RtlOp::And, args1)->str(), "00");

  TernaryWord ox{2, 0, 0b01}, one = TernaryWord::of(2, 1);
  TernaryWord args2[] = {ox, one};
  EXPECT_EQ(eval_exact(RtlOp::Add, args2)->str(), "XX");
  EXPECT_EQ(eval_exact(RtlOp::Add, args2)->slice(0, 0).str(), "X");

  TernaryWord args3[] = {TernaryWord::of(4, 13), TernaryWord::of(4, 4)};
  EXPECT_EQ(eval_exact(RtlOp::Udiv, args3)->str(), "0011");
}

TEST(ExactEval, ZeroDivisorIsExcluded) {
  TernaryWord args[] = {TernaryWord::of(3, 5), TernaryWord::of(3, 0)};
  EXPECT_FALSE(eval_exact(RtlOp::Udiv, args).has_value());
  TernaryWord args2[] = {TernaryWord::of(3, 5), TernaryWord{3, 0, 0b001}};
  EXPECT_EQ(eval_exact(RtlOp::Udiv, args2)->str(), "101");
}

TEST(ExactEval, Budget) {
  TernaryWord args[] = {TernaryWord::all_x(8), TernaryWord::all_x(8)};
  EXPECT_THROW(eval_exact(RtlOp::Add, args, 0, 12), BudgetError);
}

TEST(ExactEval, MonotoneInInformationOrder) {
  // Refining one X bit never turns a defined output bit into X.
  const RtlOp ops[] = {RtlOp::Add, RtlOp::Sub, RtlOp::Mul, RtlOp::And, RtlOp::Xor, RtlOp::Shl, RtlOp::Ult};
  for (RtlOp op : ops) {
    for (std::uint64_t v = 0; v < 64; ++v) {
      for (std::uint64_t xm = 0; xm < 64; ++xm) {
        TernaryWord a{3, v & 7 & ~(xm & 7), xm & 7}, b{3, (v >> 3) & ~(xm >> 3), xm >> 3};
        TernaryWord coarse[] = {a, b};
        auto r = eval_exact(op, coarse);
        for (unsigned bit = 0; bit < 6; ++bit) {
          if (!(xm >> bit & 1)) continue;
          for (int val = 0; val < 2; ++val) {
            TernaryWord fine[] = {a, b};
            TernaryWord& t = fine[bit / 3];
            t.xmask &= ~(1ull << (bit % 3));
            if (val) t.val |= 1ull << (bit % 3);
            auto f = eval_exact(op, fine);
            EXPECT_EQ(f->xmask & ~r->xmask, 0u) << rtl_op_name(op);
            EXPECT_EQ((f->val ^ r->val) & ~r->xmask, 0u) << rtl_op_name(op);
          }
        }
      }
    }
  }
}

TEST(Tape, MatchesEvaluator) {
  ExprContext cx;
  Expr a = cx.var("a", Sort::bv(4)), b = cx.var("b", Sort::bv(4));
  Expr c = cx.var("c", Sort::boolean());
  Expr arr = cx.var("A", Sort::array(1, Sort::bv(4)));
  Expr roots[] = {
      cx.add(a, b),
      cx.concat(cx.extract(a, 2, 1), cx.udiv(a, b)),
      cx.ite(c, cx.shl(a, b), cx.lshr_const(b, 1)),
      cx.read(cx.update(arr, cx.extract(a, 0, 0), b), cx.extract(b, 0, 0)),
      cx.land(c, cx.ult(a, b)),
  };
  Expr inputs[] = {a, b, c, arr};
  Tape tape(inputs, roots);
  std::vector<std::uint64_t> scratch, out(std::size(roots));
  for (std::uint64_t va = 0; va < 16; ++va)
    for (std::uint64_t vb = 0; vb < 16; ++vb)
      for (std::uint64_t vc = 0; vc < 2; ++vc) {
        std::uint64_t in[] = {va, vb, vc, 0xa5};
        tape.run(in, out.data(), scratch);
        Env env;
        env["a"] = BitVector::from_u64(4, va);
        env["b"] = BitVector::from_u64(4, vb);
        env["c"] = vc != 0;
        auto av = ArrayValue::constant(Sort::array(1, Sort::bv(4)), BitVector::from_u64(4, 0))
                      ->store(BitVector::from_u64(1, 0), BitVector::from_u64(4, 5))
                      ->store(BitVector::from_u64(1, 1), BitVector::from_u64(4, 0xa));
        env["A"] = av;
        for (std::size_t k = 0; k < std::size(roots); ++k) {
          Value v = eval(roots[k], env);
          std::uint64_t want = v.is_bool() ? v.as_bool() : v.as_bv().to_u64();
          EXPECT_EQ(out[k], want) << k;
        }
      }
}

TEST(Soundness, SmallWidthsAllTemplates) {
  const RtlOp ops[] = {RtlOp::Add,  RtlOp::Sub, RtlOp::Mul,      RtlOp::Udiv,      RtlOp::Urem, RtlOp::Not,
                       RtlOp::And,  RtlOp::Or,  RtlOp::Xor,      RtlOp::Nand,      RtlOp::Nor,  RtlOp::Xnor,
                       RtlOp::Eq,   RtlOp::Ult, RtlOp::Ule,      RtlOp::Ite,       RtlOp::Shl,  RtlOp::Lshr,
                       RtlOp::Slice, RtlOp::Concat, RtlOp::ShlConst, RtlOp::LshrConst};
  for (RtlOp op : ops) {
    for (unsigned m = 1; m <= 2; ++m) {
      SoundnessReport r = check_template_soundness(op, m);
      EXPECT_EQ(r.violations, 0u) << r.op << " m=" << m << " " << (r.samples.empty() ? "" : r.samples[0]);
      EXPECT_EQ(r.exact_mismatches, 0u) << r.op << " m=" << m;
      EXPECT_EQ(r.imprecise, 0u) << r.op << " m=" << m;
    }
  }
}

TEST(Soundness, LiteralShiftRuleIsUnsound) {
  SoundnessReport strict = check_template_soundness(RtlOp::Shl, 3, ShiftMode::StrictSound);
  SoundnessReport literal = check_template_soundness(RtlOp::Shl, 3, ShiftMode::PaperFaithful);
  EXPECT_EQ(strict.violations, 0u);
  EXPECT_GT(literal.violations, 0u);
}

TEST(Soundness, ArraysSmall) {
  SoundnessReport r = check_array_soundness(2, 2);
  EXPECT_EQ(r.violations, 0u) << (r.samples.empty() ? "" : r.samples[0]);
  EXPECT_EQ(r.exact_mismatches, 0u);
}

TEST(Soundness, SerialAndParallelAgree) {
  SoundnessReport a = check_template_soundness(RtlOp::Add, 3, ShiftMode::StrictSound, false);
  SoundnessReport b = check_template_soundness(RtlOp::Add, 3, ShiftMode::StrictSound, true);
  EXPECT_EQ(a.checks, b.checks);
  EXPECT_EQ(a.configs, b.configs);
  EXPECT_EQ(a.violations, b.violations);
}

TEST(ExactSim, SerialAndParallelAgree) {
  Module m = load_module("input a:3, b:3; reg r:3, q:3; wire y:3; y = a * b + r; r <= y; q <= q ^ (y >> a);");
  std::vector<std::map<unsigned, XValue>> stim(2);
  stim[0][m.find_word("a")] = XValue{BitVector::from_u64(3, 1), BitVector::from_u64(3, 2)};
  stim[1][m.find_word("b")] = XValue{BitVector::from_u64(3, 4), BitVector::zeros(3)};
  XTrace s = simulate_x(m, stim, 2, 16, false), p = simulate_x(m, stim, 2, 16, true);
  ASSERT_EQ(s.frames.size(), p.frames.size());
  for (std::size_t t = 0; t < s.frames.size(); ++t)
    for (std::size_t w = 0; w < s.frames[t].size(); ++w) EXPECT_EQ(s.frames[t][w].str(), p.frames[t][w].str());
}
