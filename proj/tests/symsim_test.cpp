// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "wste/oracle.hpp"
#include "wste/ste.hpp"
#include "wste/symsim.hpp"

using namespace wste;

namespace {

struct Fixture {
  ExprContext cx;
  SideConstraints side;
  TemplateEnv env{cx, side};

  Expr c(unsigned w, std::uint64_t v) { return cx.bv_u64(w, v); }
  SymAtom valid(unsigned w, std::uint64_t v) { return {c(w, v), cx.false_expr()}; }
  SymAtom x(unsigned w, std::uint64_t payload = 0) { return {c(w, payload), cx.true_expr()}; }
  SymWord word(SymAtom a) { return SymWord::of(std::move(a)); }
  // Pieces given least significant first.
  SymWord word(std::vector<SymAtom> atoms) {
    std::vector<Piece> ps;
    unsigned lo = 0;
    for (auto& a : atoms) {
      unsigned w = a.val.width();
      ps.push_back({lo, std::move(a)});
      lo += w;
    }
    return SymWord(std::move(ps));
  }
};

std::uint64_t u64(Expr e) {
  EXPECT_EQ(e.op(), Op::BvConst);
  return e.bv_value().to_u64();
}

}  // namespace

TEST(Template, AddValueIgnoresInvalidBits) {
  Fixture f;
  SymAtom r = t_add(f.cx, f.word(f.x(4, 0b0011)), f.word(f.valid(4, 0b0001)), 3, 0);
  EXPECT_EQ(u64(r.val), 0b0100u);
  EXPECT_TRUE(r.inv.is_true());
}

TEST(Template, AllConstantFolds) {
  Fixture f;
  SymWord a = f.word(f.valid(4, 9)), b = f.word(f.valid(4, 5));
  for (RtlOp op : {RtlOp::Add, RtlOp::Sub, RtlOp::Mul, RtlOp::And, RtlOp::Or, RtlOp::Xor}) {
    SymWord args[] = {a, b};
    SymAtom r = apply_template(f.env, op, args, 3, 1);
    EXPECT_EQ(r.val.op(), Op::BvConst) << rtl_op_name(op);
    EXPECT_TRUE(r.inv.is_false()) << rtl_op_name(op);
  }
}

TEST(Template, Udiv) {
  Fixture f;
  DivResult d = t_div(f.env, f.word(f.valid(4, 13)), f.word(f.valid(4, 4)), 3, 0);
  EXPECT_EQ(u64(d.quot.val), 3u);
  EXPECT_EQ(u64(d.rem.val), 1u);
  EXPECT_TRUE(d.quot.inv.is_false());
}

TEST(Template, CarryCases) {
  Fixture f;
  Expr va = f.cx.var("va", Sort::bv(4)), vb = f.cx.var("vb", Sort::bv(4));
  // Both valid: no invalid bit anywhere.
  SymAtom r = t_add(f.cx, f.word({va, f.cx.false_expr()}), f.word({vb, f.cx.false_expr()}), 3, 2);
  EXPECT_TRUE(r.inv.is_false());
  // a's two low bits are valid zeros, b is X: no carry out of bit 1.
  SymWord a = f.word({f.valid(2, 0), f.x(2)});
  EXPECT_TRUE(inv_carry(f.cx, a, f.word(f.x(4)), 2, false).is_false());
  // Symmetric: a's low bits X, b = 0100.
  SymWord a2 = f.word({f.x(2), f.valid(2, 0b10)});
  SymWord b2 = f.word({f.valid(2, 0b00), f.valid(2, 0b01)});
  EXPECT_TRUE(inv_carry(f.cx, a2, b2, 2, false).is_false());
  SymAtom s = t_add(f.cx, a2, b2, 3, 2);
  TernaryWord args[] = {TernaryWord{4, 0b1000, 0b0011}, TernaryWord::of(4, 0b0100)};
  TernaryWord exact = eval_exact(RtlOp::Add, args)->slice(3, 2);
  ASSERT_TRUE(exact.defined());
  EXPECT_TRUE(s.inv.is_false());
  EXPECT_EQ(u64(s.val), exact.val);
}

TEST(Template, DivisionByX) {
  Fixture f;
  DivResult d = t_div(f.env, f.word(f.valid(4, 0)), f.word(f.x(4)), 3, 0);
  EXPECT_TRUE(d.quot.inv.is_false());  // quotient never exceeds the dividend
  EXPECT_TRUE(d.rem.inv.is_true());
}

TEST(Template, DivisionAddsWitnessAndAssumption) {
  Fixture f;
  Expr vb = f.cx.var("b", Sort::bv(4));
  t_div(f.env, f.word(f.x(4)), f.word({vb, f.cx.var("ib", Sort::boolean())}), 3, 0);
  EXPECT_EQ(f.side.witnesses.size(), 1u);
  EXPECT_EQ(f.side.div_by_zero.size(), 1u);
  EXPECT_GE(f.side.constraints.size(), 2u);
  // Same operands reuse the witness.
  t_div(f.env, f.word(f.x(4)), f.word({vb, f.cx.var("ib", Sort::boolean())}), 1, 0);
  EXPECT_EQ(f.side.witnesses.size(), 1u);
}

TEST(Template, Ite) {
  Fixture f;
  SymAtom r = t_ite(f.cx, f.word(f.x(1)), f.word(f.valid(4, 6)), f.word(f.valid(4, 6)), 3, 0);
  EXPECT_TRUE(r.inv.is_false());
  Expr it = f.cx.var("it", Sort::boolean());
  SymAtom r2 = t_ite(f.cx, f.word(f.valid(1, 1)), f.word({f.c(4, 6), it}), f.word(f.x(4)), 3, 0);
  EXPECT_EQ(r2.inv, it);
  SymAtom r3 = t_ite(f.cx, f.word(f.x(1)), f.word(f.valid(4, 3)), f.word(f.valid(4, 5)), 3, 0);
  EXPECT_TRUE(r3.inv.is_true());
  TernaryWord args[] = {TernaryWord::all_x(1), TernaryWord::of(4, 3), TernaryWord::of(4, 5)};
  EXPECT_FALSE(eval_exact(RtlOp::Ite, args)->defined());
}

TEST(Template, BitwiseAbsorption) {
  Fixture f;
  SymAtom a = t_bitwise(f.cx, RtlOp::And, f.word(f.x(3)), f.word(f.valid(3, 0)), 2, 0);
  EXPECT_TRUE(a.inv.is_false());
  EXPECT_EQ(u64(a.val), 0u);
  SymAtom o = t_bitwise(f.cx, RtlOp::Or, f.word(f.x(3)), f.word(f.valid(3, 7)), 2, 0);
  EXPECT_TRUE(o.inv.is_false());
  EXPECT_EQ(u64(o.val), 7u);
}

TEST(Template, ArrayRead) {
  Fixture f;
  SymArray base = array_base(f.cx, "arr!A", true, {2}, 4);
  Expr i = f.cx.var("i", Sort::bv(2));
  EXPECT_TRUE(array_read(f.cx, base, {i, f.cx.false_expr()}, 3, 0).inv.is_false());
  SymArray un = array_base(f.cx, "arr!B", false, {2}, 4);
  EXPECT_TRUE(array_read(f.cx, un, {i, f.cx.false_expr()}, 3, 0).inv.is_true());

  Expr ie = f.cx.var("ie", Sort::boolean());
  SymArray up = array_update(f.cx, base, {i, f.cx.false_expr()}, f.word({f.c(4, 9), ie}));
  SymAtom r = array_read(f.cx, up, {i, f.cx.false_expr()}, 3, 0);
  EXPECT_EQ(r.inv, ie);
  EXPECT_EQ(u64(r.val), 9u);
  EXPECT_TRUE(array_read(f.cx, up, f.x(2), 3, 0).inv.is_true());
}

TEST(Template, ShiftConst) {
  Fixture f;
  Expr ia = f.cx.var("ia", Sort::boolean());
  SymWord a = f.word({f.cx.var("a", Sort::bv(4)), ia});
  EXPECT_TRUE(t_shift_const(f.cx, RtlOp::ShlConst, a, 2, 1, 0).inv.is_false());
  EXPECT_EQ(t_shift_const(f.cx, RtlOp::ShlConst, a, 2, 3, 2).inv, ia);
}

TEST(Template, ShiftVariableModes) {
  Fixture f;
  SymWord d = f.word(f.x(3));
  for (ShiftMode mode : {ShiftMode::StrictSound, ShiftMode::PaperFaithful})
    EXPECT_TRUE(t_shift(f.cx, RtlOp::Shl, f.word(f.valid(3, 0)), d, 2, 0, mode).inv.is_false());
  EXPECT_TRUE(t_shift(f.cx, RtlOp::Shl, f.word(f.valid(3, 1)), d, 0, 0, ShiftMode::StrictSound).inv.is_true());
  EXPECT_TRUE(t_shift(f.cx, RtlOp::Shl, f.word(f.valid(3, 1)), d, 0, 0, ShiftMode::PaperFaithful).inv.is_false());
  // The exact result bit is X: shifting 1 by 0 or by 1 differs in bit 0.
  TernaryWord args[] = {TernaryWord::of(3, 1), TernaryWord::all_x(3)};
  EXPECT_EQ(eval_exact(RtlOp::Shl, args)->slice(0, 0).str(), "X");
}

TEST(Template, MulAndCompare) {
  Fixture f;
  EXPECT_TRUE(t_mul(f.cx, f.word(f.x(4)), f.word(f.valid(4, 0)), 3, 0).inv.is_false());
  Expr a = f.cx.var("a", Sort::bv(4)), b = f.cx.var("b", Sort::bv(4));
  SymAtom e = t_cmp(f.cx, RtlOp::Eq, f.word({a, f.cx.false_expr()}), f.word({b, f.cx.false_expr()}));
  EXPECT_TRUE(e.inv.is_false());
}

TEST(Lub, Cases) {
  Fixture f;
  LubResult same = lub(f.cx, f.valid(4, 5), f.valid(4, 5));
  EXPECT_TRUE(same.top.is_false());
  EXPECT_EQ(u64(same.c.val), 5u);
  EXPECT_TRUE(same.c.inv.is_false());

  LubResult xv = lub(f.cx, f.x(4, 3), f.valid(4, 7));
  EXPECT_TRUE(xv.top.is_false());
  EXPECT_EQ(u64(xv.c.val), 7u);
  EXPECT_TRUE(xv.c.inv.is_false());

  EXPECT_TRUE(lub(f.cx, f.valid(4, 3), f.valid(4, 7)).top.is_true());
}

// ---------------------------------------------------------------------------
// Frame simulation

TEST(Step, AllXRegisterChainStaysX) {
  ExprContext cx;
  SideConstraints side;
  TemplateEnv env(cx, side);
  Module m = load_module("input a:4; reg r1:4, r2:4; r1 <= a; r2 <= r1 + 1;");
  AtomMap atoms = atomize(m);
  Simulator sim(env, m, atoms);
  SymState s = sim.initial_state();
  for (int t = 0; t < 3; ++t) {
    sim.settle(s);
    for (const auto& w : s.words) EXPECT_TRUE(w.inv(cx).is_true());
    s = sim.next_state(s);
  }
}

TEST(Step, ConstantInitIsValid) {
  ExprContext cx;
  SideConstraints side;
  TemplateEnv env(cx, side);
  Module m = load_module("reg r:4 = 3, q:8 = 0; wire w:8; w = {r, r} * q + 5; r <= r + 1; q <= w;");
  AtomMap atoms = atomize(m);
  Simulator sim(env, m, atoms);
  SymState s = sim.initial_state();
  for (int t = 0; t < 3; ++t) {
    sim.settle(s);
    for (const auto& w : s.words) EXPECT_TRUE(w.inv(cx).is_false());
    s = sim.next_state(s);
  }
}

TEST(Step, SerialMultiplierProduct) {
  ExprContext cx;
  Module m = load_module(wste::testing::read_source("designs/smul/smul.wdl"));
  Spec spec = parse_spec(wste::testing::read_source("designs/smul/q1.spec"), m, cx);
  SteOptions opt;
  opt.keep_trace = true;
  SteRun run = run_ste(cx, m, spec, 0, opt);
  const SymWord& prod = run.trace.at(9).words[m.find_word("prod")];
  EXPECT_TRUE(prod.inv(cx).is_false());
  Expr val = prod.val(cx);
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::uint64_t a = rng() & 255, b = rng() & 255;
    Env e{{"a", BitVector::from_u64(8, a)}, {"b", BitVector::from_u64(8, b)}};
    Evaluator ev(&e);
    EXPECT_EQ(ev.eval_bv(val).to_u64(), (a * b) & 255);
  }
}

// Refining X inputs to values never makes a defined atom X or changes it.
TEST(Step, MonotoneOnRandomDesigns) {
  wste::testing::RandomDesignOptions o;
  o.division = false;
  std::mt19937 rng(17);
  for (unsigned seed = 0; seed < 40; ++seed) {
    ExprContext cx;
    SideConstraints side;
    TemplateEnv env(cx, side);
    Module m = load_module(wste::testing::RandomDesign(seed, o).generate());
    AtomMap atoms = atomize(m);
    Simulator sim(env, m, atoms);
    SymState s = sim.initial_state();
    std::vector<std::pair<std::string, unsigned>> vals;
    std::vector<std::string> invs;
    for (unsigned w = 0; w < m.words.size(); ++w) {
      if (m.words[w].kind == WordKind::Wire) continue;
      auto& ps = s.words[w].pieces();
      for (unsigned k = 0; k < ps.size(); ++k) {
        std::string n = m.words[w].name + "_" + std::to_string(k);
        ps[k].a = {cx.var("v_" + n, Sort::bv(ps[k].width())), cx.var("i_" + n, Sort::boolean())};
        vals.push_back({"v_" + n, ps[k].width()});
        invs.push_back("i_" + n);
      }
    }
    sim.settle(s);
    SymState next = sim.next_state(s);
    std::vector<SymAtom> outs;
    for (const auto* st : {&s, &next})
      for (const auto& w : st->words)
        for (const auto& p : w.pieces()) outs.push_back(p.a);

    for (int trial = 0; trial < 20; ++trial) {
      Env e1;
      for (const auto& [n, w] : vals) e1[n] = BitVector::from_u64(w, rng());
      for (const auto& n : invs) e1[n] = (rng() & 1) != 0;
      Env e2 = e1;
      for (const auto& n : invs)
        if (e2[n].as_bool() && (rng() & 1)) e2[n] = false;
      Evaluator ev1(&e1), ev2(&e2);
      for (const SymAtom& a : outs) {
        if (ev1.eval_bool(a.inv)) continue;
        ASSERT_FALSE(ev2.eval_bool(a.inv)) << "seed " << seed;
        ASSERT_EQ(ev1.eval_bv(a.val), ev2.eval_bv(a.val)) << "seed " << seed;
      }
    }
  }
}
