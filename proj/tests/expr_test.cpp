// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "wste/expr.hpp"

using namespace wste;

namespace {

std::uint64_t mask(unsigned w) { return w >= 64 ? ~0ull : (1ull << w) - 1; }

}  // namespace

TEST(Expr, ConstantFolding) {
  ExprContext cx;
  Expr e = cx.add(cx.bv_u64(4, 3), cx.bv_u64(4, 5));
  ASSERT_EQ(e.op(), Op::BvConst);
  EXPECT_EQ(e.bv_value(), BitVector::from_u64(4, 8));
}

TEST(Expr, IteSameBranches) {
  ExprContext cx;
  Expr b = cx.var("b", Sort::boolean());
  Expr e = cx.var("e", Sort::bv(8));
  EXPECT_EQ(cx.ite(b, e, e), e);
}

TEST(Expr, ExtractOfConstant) {
  ExprContext cx;
  Expr e = cx.extract(cx.bv_u64(4, 0b0110), 2, 1);
  EXPECT_EQ(e, cx.bv_u64(2, 0b11));
}

TEST(Expr, SortErrorsNameOperator) {
  ExprContext cx;
  Expr a = cx.var("a", Sort::bv(8));
  Expr b = cx.var("b", Sort::bv(4));
  try {
    cx.add(a, b);
    FAIL() << "expected SortError";
  } catch (const SortError& err) {
    std::string msg = err.what();
    EXPECT_NE(msg.find("bvadd"), std::string::npos);
    EXPECT_NE(msg.find("BitVec 8"), std::string::npos);
    EXPECT_NE(msg.find("BitVec 4"), std::string::npos);
  }
  EXPECT_THROW(cx.extract(a, 8, 0), SortError);
  EXPECT_THROW(cx.extract(a, 2, 3), SortError);
  EXPECT_THROW(cx.var("a", Sort::bv(4)), SortError);
}

TEST(Expr, HashConsing) {
  ExprContext cx;
  Expr a = cx.var("a", Sort::bv(8));
  Expr b = cx.var("b", Sort::bv(8));
  Expr e1 = cx.mul(cx.add(a, b), a);
  std::size_t before = cx.size();
  Expr e2 = cx.mul(cx.add(a, b), a);
  EXPECT_EQ(e1.id(), e2.id());
  EXPECT_EQ(cx.size(), before);
}

TEST(Expr, FreeVars) {
  ExprContext cx;
  EXPECT_TRUE(free_vars(cx.zeros(8)).empty());
  Expr v = cx.var("v", Sort::bv(8));
  ASSERT_EQ(free_vars(v).size(), 1u);
  Expr g = cx.var("g", Sort::boolean());
  Expr v1 = cx.var("v1", Sort::bv(4));
  Expr v2 = cx.var("v2", Sort::bv(4));
  auto fv = free_vars(cx.ite(g, v1, v2));
  ASSERT_EQ(fv.size(), 3u);
  EXPECT_EQ(fv[0].name(), "g");
  EXPECT_EQ(fv[1].name(), "v1");
  EXPECT_EQ(fv[2].name(), "v2");
}

TEST(Expr, EvalExamples) {
  ExprContext cx;
  Env env;
  Expr x = cx.var("x", Sort::bv(4));
  env["x"] = BitVector::from_u64(4, 9);
  EXPECT_EQ(eval(cx.add(x, x), env).as_bv().to_u64(), 2u);
  EXPECT_TRUE(eval(cx.ult(cx.bv_u64(4, 3), cx.bv_u64(4, 5)), env).as_bool());
  Expr z = cx.var("z", Sort::bv(4));
  env["z"] = BitVector::zeros(4);
  env["y"] = BitVector::from_u64(4, 5);
  Expr y = cx.var("y", Sort::bv(4));
  EXPECT_EQ(eval(cx.udiv(y, z), env).as_bv().to_u64(), 15u);
  EXPECT_EQ(eval(cx.urem(y, z), env).as_bv().to_u64(), 5u);
  EXPECT_EQ(cx.udiv(cx.bv_u64(4, 5), cx.zeros(4)), cx.bv_u64(4, 15));
}

TEST(Expr, EvalMissingVariable) {
  ExprContext cx;
  Env env;
  EXPECT_THROW(eval(cx.var("nope", Sort::bv(3)), env), EvalError);
}

TEST(Expr, ArraysReadOverWrite) {
  ExprContext cx;
  Sort as = Sort::array(2, Sort::bv(8));
  Expr A = cx.var("A", as);
  Expr i = cx.var("i", Sort::bv(2));
  Expr v = cx.var("v", Sort::bv(8));
  Expr u = cx.update(A, i, v);
  EXPECT_EQ(cx.read(u, i), v);
  Expr u2 = cx.update(A, cx.bv_u64(2, 1), v);
  EXPECT_EQ(cx.read(u2, cx.bv_u64(2, 2)), cx.read(A, cx.bv_u64(2, 2)));

  Env env;
  env["A"] = Value(ArrayValue::constant(as, BitVector::from_u64(8, 7)));
  env["i"] = BitVector::from_u64(2, 3);
  env["v"] = BitVector::from_u64(8, 200);
  Expr j = cx.var("j", Sort::bv(2));
  env["j"] = BitVector::from_u64(2, 0);
  EXPECT_EQ(eval(cx.read(u, j), env).as_bv().to_u64(), 7u);
  env["j"] = BitVector::from_u64(2, 3);
  EXPECT_EQ(eval(cx.read(u, j), env).as_bv().to_u64(), 200u);
}

TEST(Expr, ExtractThroughConcatAndShift) {
  ExprContext cx;
  Expr a = cx.var("a", Sort::bv(4));
  Expr b = cx.var("b", Sort::bv(4));
  Expr c = cx.concat(a, b);
  EXPECT_EQ(cx.extract(c, 3, 0), b);
  EXPECT_EQ(cx.extract(c, 7, 4), a);
  EXPECT_EQ(cx.concat(cx.extract(a, 3, 2), cx.extract(a, 1, 0)), a);
  EXPECT_EQ(cx.extract(cx.shl_const(a, 2), 1, 0), cx.zeros(2));
  EXPECT_EQ(cx.extract(cx.shl_const(a, 2), 3, 2), cx.extract(a, 1, 0));
  EXPECT_EQ(cx.extract(cx.lshr_const(a, 1), 2, 0), cx.extract(a, 3, 1));
}

TEST(Expr, BoolBvRoundTrip) {
  ExprContext cx;
  Expr g = cx.var("g", Sort::boolean());
  EXPECT_EQ(cx.bv_to_bool(cx.bool_to_bv(g)), g);
}

// Random terms over 4-bit and boolean variables, evaluated twice: through the
// context (which simplifies while building) and by a direct uint64 reference
// interpreter that never sees the simplified form.
namespace {

struct Ref {
  bool is_bool;
  unsigned width;
  std::uint64_t v;
};

struct Gen {
  ExprContext& cx;
  std::mt19937_64& rng;
  const std::vector<std::uint64_t>& env_bv;  // x0..x2
  const std::vector<bool>& env_b;            // p0..p1

  unsigned pick(unsigned n) { return static_cast<unsigned>(rng() % n); }

  std::pair<Expr, Ref> bv(unsigned depth, unsigned w) {
    if (depth == 0 || pick(5) == 0) {
      if (pick(3) == 0) {
        std::uint64_t c = rng() & mask(w);
        if (pick(2)) c = pick(2) ? 0 : mask(w);
        return {cx.bv_u64(w, c), {false, w, c}};
      }
      unsigned k = pick(3);
      Expr x = cx.var("x" + std::to_string(k), Sort::bv(4));
      std::uint64_t v = env_bv[k];
      if (w == 4) return {x, {false, 4, v}};
      unsigned lo = pick(4 - w + 1);
      return {cx.extract(x, lo + w - 1, lo), {false, w, (v >> lo) & mask(w)}};
    }
    unsigned which = pick(14);
    if (which == 13 && w >= 2) {
      unsigned hw = 1 + pick(w - 1);
      auto [h, hr] = bv(depth - 1, hw);
      auto [l, lr] = bv(depth - 1, w - hw);
      return {cx.concat(h, l), {false, w, (hr.v << (w - hw)) | lr.v}};
    }
    if (which == 12) {
      auto [c, cr] = boolean(depth - 1);
      auto [t, tr] = bv(depth - 1, w);
      auto [e, er] = bv(depth - 1, w);
      return {cx.ite(c, t, e), cr.v ? tr : er};
    }
    if (which == 11) {
      auto [a, ar] = bv(depth - 1, w);
      return {cx.bvnot(a), {false, w, ~ar.v & mask(w)}};
    }
    if (which == 10) {
      unsigned k = pick(w + 1);
      auto [a, ar] = bv(depth - 1, w);
      bool left = pick(2);
      std::uint64_t r = k >= w ? 0 : (left ? (ar.v << k) & mask(w) : ar.v >> k);
      return {left ? cx.shl_const(a, k) : cx.lshr_const(a, k), {false, w, r}};
    }
    if (which == 9 && w < 4) {
      auto [a, ar] = bv(depth - 1, 4);
      unsigned lo = pick(4 - w + 1);
      return {cx.extract(a, lo + w - 1, lo), {false, w, (ar.v >> lo) & mask(w)}};
    }
    auto [a, ar] = bv(depth - 1, w);
    auto [b, br] = bv(depth - 1, w);
    std::uint64_t m = mask(w);
    switch (which % 9) {
      case 0: return {cx.add(a, b), {false, w, (ar.v + br.v) & m}};
      case 1: return {cx.sub(a, b), {false, w, (ar.v - br.v) & m}};
      case 2: return {cx.mul(a, b), {false, w, (ar.v * br.v) & m}};
      case 3: return {cx.udiv(a, b), {false, w, br.v == 0 ? m : ar.v / br.v}};
      case 4: return {cx.urem(a, b), {false, w, br.v == 0 ? ar.v : ar.v % br.v}};
      case 5: return {cx.bvand(a, b), {false, w, ar.v & br.v}};
      case 6: return {cx.bvor(a, b), {false, w, ar.v | br.v}};
      case 7: return {cx.bvxor(a, b), {false, w, ar.v ^ br.v}};
      default: {
        bool left = pick(2);
        std::uint64_t r = br.v >= w ? 0 : (left ? (ar.v << br.v) & m : ar.v >> br.v);
        return {left ? cx.shl(a, b) : cx.lshr(a, b), {false, w, r}};
      }
    }
  }

  std::pair<Expr, Ref> boolean(unsigned depth) {
    if (depth == 0 || pick(5) == 0) {
      unsigned k = pick(3);
      if (k == 2) {
        bool c = pick(2);
        return {cx.boolean(c), {true, 0, c}};
      }
      return {cx.var("p" + std::to_string(k), Sort::boolean()), {true, 0, env_b[k]}};
    }
    switch (pick(8)) {
      case 0: {
        auto [a, ar] = boolean(depth - 1);
        return {cx.lnot(a), {true, 0, !ar.v}};
      }
      case 1: {
        auto [a, ar] = boolean(depth - 1);
        auto [b, br] = boolean(depth - 1);
        return {cx.land(a, b), {true, 0, ar.v && br.v}};
      }
      case 2: {
        auto [a, ar] = boolean(depth - 1);
        auto [b, br] = boolean(depth - 1);
        return {cx.lor(a, b), {true, 0, ar.v || br.v}};
      }
      case 3: {
        auto [c, cr] = boolean(depth - 1);
        auto [a, ar] = boolean(depth - 1);
        auto [b, br] = boolean(depth - 1);
        return {cx.ite(c, a, b), cr.v ? ar : br};
      }
      case 4: {
        auto [a, ar] = boolean(depth - 1);
        auto [b, br] = boolean(depth - 1);
        return {cx.eq(a, b), {true, 0, ar.v == br.v}};
      }
      default: {
        unsigned w = 1 + pick(4);
        auto [a, ar] = bv(depth - 1, w);
        auto [b, br] = bv(depth - 1, w);
        unsigned k = pick(3);
        if (k == 0) return {cx.eq(a, b), {true, 0, ar.v == br.v}};
        if (k == 1) return {cx.ult(a, b), {true, 0, ar.v < br.v}};
        return {cx.ule(a, b), {true, 0, ar.v <= br.v}};
      }
    }
  }
};

}  // namespace

TEST(Expr, SimplificationPreservesSemantics) {
  std::mt19937_64 rng(20240611);
  for (int round = 0; round < 400; ++round) {
    ExprContext cx;
    std::vector<std::uint64_t> xs = {rng() & 15, rng() & 15, rng() & 15};
    std::vector<bool> ps = {static_cast<bool>(rng() & 1), static_cast<bool>(rng() & 1)};
    Gen gen{cx, rng, xs, ps};
    Env env;
    for (int k = 0; k < 3; ++k) env["x" + std::to_string(k)] = BitVector::from_u64(4, xs[k]);
    for (int k = 0; k < 2; ++k) env["p" + std::to_string(k)] = static_cast<bool>(ps[k]);
    for (int t = 0; t < 20; ++t) {
      if (rng() & 1) {
        unsigned w = 1 + static_cast<unsigned>(rng() % 4);
        auto [e, r] = gen.bv(5, w);
        ASSERT_EQ(e.width(), w);
        EXPECT_EQ(eval(e, env).as_bv().to_u64(), r.v) << to_string(e);
      } else {
        auto [e, r] = gen.boolean(5);
        EXPECT_EQ(eval(e, env).as_bool(), r.v != 0) << to_string(e);
      }
    }
  }
}

TEST(Expr, WideConstants) {
  ExprContext cx;
  Expr a = cx.ones(64);
  Expr one = cx.bv_u64(64, 1);
  EXPECT_EQ(cx.add(a, one), cx.zeros(64));
  Expr w = cx.bv(BitVector::ones(100));
  EXPECT_EQ(cx.extract(w, 99, 36), cx.ones(64));
}
