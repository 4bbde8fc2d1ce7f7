// SPDX-License-Identifier: Apache-2.0

#include "wste/symsim.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace wste {

SymAtom x_atom(ExprContext& cx, unsigned width) { return {cx.zeros(width), cx.true_expr()}; }

SymAtom valid_atom(ExprContext& cx, Expr val) { return {val, cx.false_expr()}; }

// ---------------------------------------------------------------------------
// SymWord

SymWord::SymWord(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  unsigned next = 0;
  for (const auto& p : pieces_) {
    if (p.lo != next) throw std::invalid_argument("SymWord pieces are not contiguous");
    if (p.a.val.width() == 0 || !p.a.inv.sort().is_bool()) throw std::invalid_argument("malformed SymWord piece");
    next += p.width();
  }
  width_ = next;
}

std::vector<unsigned> SymWord::boundaries() const {
  std::vector<unsigned> out;
  for (std::size_t i = 1; i < pieces_.size(); ++i) out.push_back(pieces_[i].lo);
  return out;
}

Expr SymWord::val(ExprContext& cx) const { return val(cx, width_ - 1, 0); }

Expr SymWord::val(ExprContext& cx, unsigned q, unsigned p) const {
  std::vector<Expr> parts;  // msb first
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    if (it->lo > q || it->hi() < p) continue;
    unsigned h = std::min(q, it->hi()) - it->lo;
    unsigned l = std::max(p, it->lo) - it->lo;
    parts.push_back(cx.extract(it->a.val, h, l));
  }
  return cx.concat(parts);
}

Expr SymWord::inv(ExprContext& cx, unsigned q, unsigned p) const {
  Expr acc = cx.false_expr();
  for (const auto& pc : pieces_)
    if (pc.lo <= q && pc.hi() >= p) acc = cx.lor(acc, pc.a.inv);
  return acc;
}

SymWord SymWord::slice(ExprContext& cx, unsigned q, unsigned p) const {
  if (p > q || q >= width_) throw std::out_of_range("SymWord slice out of range");
  std::vector<Piece> out;
  for (const auto& pc : pieces_) {
    if (pc.lo > q || pc.hi() < p) continue;
    unsigned h = std::min(q, pc.hi());
    unsigned l = std::max(p, pc.lo);
    out.push_back({l - p, {cx.extract(pc.a.val, h - pc.lo, l - pc.lo), pc.a.inv}});
  }
  return SymWord(std::move(out));
}

SymWord SymWord::concat(const SymWord& hi, const SymWord& lo) {
  std::vector<Piece> out = lo.pieces_;
  for (const auto& pc : hi.pieces_) out.push_back({pc.lo + lo.width_, pc.a});
  return SymWord(std::move(out));
}

// ---------------------------------------------------------------------------
// Templates

namespace {

Expr nonzero(ExprContext& cx, Expr v) { return cx.ne(v, cx.zeros(v.width())); }

// Zero-absorption for a conjunction-like operator: result valid when both
// operands are valid or one valid operand is zero.
Expr absorb_zero(ExprContext& cx, Expr ia, Expr va, Expr ib, Expr vb) {
  return cx.land(cx.land(cx.lor(ia, ib), cx.lor(ia, nonzero(cx, va))), cx.lor(ib, nonzero(cx, vb)));
}

// Comparisons of a width-m bit-vector against integer constants that may
// fall outside [0, 2^m - 1].
Expr ge_const(ExprContext& cx, Expr i, long long c) {
  if (c <= 0) return cx.true_expr();
  BigUint max = width_mask(i.width());
  if (BigUint(c) > max) return cx.false_expr();
  return cx.uge(i, cx.bv(i.width(), BigUint(c)));
}

Expr le_const(ExprContext& cx, Expr i, long long d) {
  if (d < 0) return cx.false_expr();
  BigUint max = width_mask(i.width());
  if (BigUint(d) >= max) return cx.true_expr();
  return cx.ule(i, cx.bv(i.width(), BigUint(d)));
}

Expr const_u(ExprContext& cx, unsigned width, unsigned long long v) { return cx.bv(width, BigUint(v)); }

std::vector<std::pair<unsigned, unsigned>> segments(const std::vector<unsigned>& bounds, unsigned q, unsigned p) {
  std::vector<unsigned> cut;
  for (unsigned b : bounds)
    if (b > p && b <= q) cut.push_back(b);
  std::sort(cut.begin(), cut.end());
  cut.erase(std::unique(cut.begin(), cut.end()), cut.end());
  std::vector<std::pair<unsigned, unsigned>> out;
  unsigned lo = p;
  for (unsigned c : cut) {
    out.push_back({c - 1, lo});
    lo = c;
  }
  out.push_back({q, lo});
  return out;
}

std::vector<unsigned> merge(std::vector<unsigned> a, const std::vector<unsigned>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

SymAtom not_atom(ExprContext& cx, const SymAtom& a) { return {cx.bvnot(a.val), a.inv}; }

SymAtom and_atom(ExprContext& cx, const SymAtom& a, const SymAtom& b) {
  return {cx.bvand(a.val, b.val), absorb_zero(cx, a.inv, a.val, b.inv, b.val)};
}

SymAtom or_atom(ExprContext& cx, const SymAtom& a, const SymAtom& b) {
  return not_atom(cx, and_atom(cx, not_atom(cx, a), not_atom(cx, b)));
}

SymAtom xor_atom(ExprContext& cx, const SymAtom& a, const SymAtom& b) {
  return or_atom(cx, and_atom(cx, a, not_atom(cx, b)), and_atom(cx, not_atom(cx, a), b));
}

Expr bitwise_inv(ExprContext& cx, RtlOp op, const SymAtom& a, const SymAtom& b) {
  switch (op) {
    case RtlOp::Not: return a.inv;
    case RtlOp::And:
    case RtlOp::Nand: return and_atom(cx, a, b).inv;
    case RtlOp::Or:
    case RtlOp::Nor: return or_atom(cx, a, b).inv;
    case RtlOp::Xor:
    case RtlOp::Xnor: return xor_atom(cx, a, b).inv;
    default: throw std::invalid_argument("not a bit-wise operator");
  }
}

Expr bitwise_val(ExprContext& cx, RtlOp op, Expr a, Expr b) {
  switch (op) {
    case RtlOp::Not: return cx.bvnot(a);
    case RtlOp::And: return cx.bvand(a, b);
    case RtlOp::Or: return cx.bvor(a, b);
    case RtlOp::Xor: return cx.bvxor(a, b);
    case RtlOp::Nand: return cx.bvnot(cx.bvand(a, b));
    case RtlOp::Nor: return cx.bvnot(cx.bvor(a, b));
    case RtlOp::Xnor: return cx.bvnot(cx.bvxor(a, b));
    default: throw std::invalid_argument("not a bit-wise operator");
  }
}

}  // namespace

Expr inv_carry(ExprContext& cx, const SymWord& a, const SymWord& b, unsigned r, bool carry_in_one) {
  if (r == 0) return cx.false_expr();
  Expr ia = a.inv(cx, r - 1, 0), ib = b.inv(cx, r - 1, 0);
  Expr va = a.val(cx, r - 1, 0), vb = b.val(cx, r - 1, 0);
  if (!carry_in_one) return absorb_zero(cx, ia, va, ib, vb);
  // a + ~b + 1: the carry is forced to 1 by a valid all-ones a or a valid zero b.
  Expr a_free = cx.ne(va, cx.ones(r));
  return cx.land(cx.land(cx.lor(ia, ib), cx.lor(ia, a_free)), cx.lor(ib, nonzero(cx, vb)));
}

SymAtom t_add(ExprContext& cx, const SymWord& a, const SymWord& b, unsigned q, unsigned p) {
  Expr val = cx.extract(cx.add(a.val(cx), b.val(cx)), q, p);
  Expr inv = cx.lor(cx.lor(a.inv(cx, q, p), b.inv(cx, q, p)), inv_carry(cx, a, b, p, false));
  return {val, inv};
}

SymAtom t_sub(ExprContext& cx, const SymWord& a, const SymWord& b, unsigned q, unsigned p) {
  Expr val = cx.extract(cx.sub(a.val(cx), b.val(cx)), q, p);
  Expr inv = cx.lor(cx.lor(a.inv(cx, q, p), b.inv(cx, q, p)), inv_carry(cx, a, b, p, true));
  return {val, inv};
}

SymAtom t_mul(ExprContext& cx, const SymWord& a, const SymWord& b, unsigned q, unsigned p) {
  // Product bits [q:p] depend only on operand bits [q:0].
  Expr val = cx.extract(cx.mul(a.val(cx), b.val(cx)), q, p);
  Expr inv = absorb_zero(cx, a.inv(cx, q, 0), a.val(cx, q, 0), b.inv(cx, q, 0), b.val(cx, q, 0));
  return {val, inv};
}

DivResult t_div(TemplateEnv& env, const SymWord& a, const SymWord& b, unsigned q, unsigned p) {
  ExprContext& cx = env.cx;
  unsigned m = a.width();
  Expr va = a.val(cx), vb = b.val(cx);
  Expr ia_all = a.inv(cx), ib = b.inv(cx);

  auto key = std::make_pair(vb.id(), ib.id());
  Expr i;
  if (auto it = env.witness_cache.find(key); it != env.witness_cache.end()) {
    i = it->second;
  } else {
    i = cx.fresh_var("div_i", Sort::bv(m));
    env.witness_cache.emplace(key, i);
    env.side.witnesses.push_back(i);
    Expr valid_b = cx.lnot(ib);
    Expr lower = cx.ule(cx.pow2(i), vb);
    Expr upper = cx.lor(cx.eq(i, const_u(cx, m, m - 1)), cx.ult(vb, cx.pow2(cx.add(i, const_u(cx, m, 1)))));
    Expr in_range = cx.ult(i, const_u(cx, m, m));
    env.side.constraints.push_back(cx.limplies(valid_b, cx.land(cx.land(in_range, lower), upper)));
    env.side.constraints.push_back(cx.limplies(valid_b, nonzero(cx, vb)));
    env.side.div_by_zero.push_back(cx.land(valid_b, cx.eq(vb, cx.zeros(m))));
  }

  Expr is_pow = cx.eq(vb, cx.pow2(i));
  long long mm = m, qq = q, pp = p;

  Expr temp1 = cx.lor(a.inv(cx, m - 1, p), nonzero(cx, a.val(cx, m - 1, p)));
  // inv(a[min(q+i, m-1) : p+i]) with symbolic i, by piece overlap.
  Expr shifted = cx.false_expr();
  for (const auto& pc : a.pieces()) {
    long long lo = pc.lo, hi = pc.hi();
    Expr overlap = cx.land(ge_const(cx, i, lo - qq), le_const(cx, i, hi - pp));
    shifted = cx.lor(shifted, cx.land(overlap, pc.a.inv));
  }
  Expr temp3 = cx.land(le_const(cx, i, mm - 1 - pp), shifted);
  Expr i_lt_p = cx.lnot(ge_const(cx, i, pp));
  Expr temp2 = cx.ite(is_pow, temp3, cx.lor(i_lt_p, a.inv(cx, m - 1, p)));
  Expr inv_quot = cx.land(cx.lor(ia_all, ib), cx.ite(ib, temp1, temp2));

  // inv(a[min(q, i-1) : p]) under i > p.
  Expr low = cx.false_expr();
  for (const auto& pc : a.pieces()) {
    if (pc.lo > q || pc.hi() < p) continue;
    Expr overlap = ge_const(cx, i, static_cast<long long>(pc.lo) + 1);
    low = cx.lor(low, cx.land(overlap, pc.a.inv));
  }
  Expr rem_pow = cx.land(ge_const(cx, i, pp + 1), low);
  Expr inv_rem = cx.lor(ib, cx.land(ia_all, cx.ite(is_pow, rem_pow, ge_const(cx, i, pp))));

  // A zero payload only occurs for an X divisor (valid zero divisors are
  // assumed away), where the quotient slice can still be known; dividing by 1
  // instead keeps the value rule consistent with that case.
  Expr safe_b = cx.ite(cx.eq(vb, cx.zeros(m)), const_u(cx, m, 1), vb);
  return {{cx.extract(cx.udiv(va, safe_b), q, p), inv_quot}, {cx.extract(cx.urem(va, safe_b), q, p), inv_rem}};
}

SymAtom t_bitwise(ExprContext& cx, RtlOp op, const SymWord& a, const SymWord& b, unsigned q, unsigned p) {
  bool unary = op == RtlOp::Not;
  std::vector<unsigned> bounds = a.boundaries();
  if (!unary) bounds = merge(bounds, b.boundaries());
  Expr inv = cx.false_expr();
  for (auto [h, l] : segments(bounds, q, p)) {
    SymAtom sa = a.atom(cx, h, l);
    SymAtom sb = unary ? sa : b.atom(cx, h, l);
    inv = cx.lor(inv, bitwise_inv(cx, op, sa, sb));
  }
  Expr val = cx.extract(bitwise_val(cx, op, a.val(cx), unary ? Expr() : b.val(cx)), q, p);
  return {val, inv};
}

SymAtom t_ite(ExprContext& cx, const SymWord& c, const SymWord& t, const SymWord& e, unsigned q, unsigned p) {
  Expr ic = c.inv(cx);
  Expr sel = cx.bv_to_bool(c.val(cx));
  Expr inv = cx.false_expr();
  for (auto [h, l] : segments(merge(t.boundaries(), e.boundaries()), q, p)) {
    SymAtom st = t.atom(cx, h, l), se = e.atom(cx, h, l);
    Expr unknown_sel = cx.lor(cx.lor(st.inv, se.inv), cx.ne(st.val, se.val));
    inv = cx.lor(inv, cx.ite(ic, unknown_sel, cx.ite(sel, st.inv, se.inv)));
  }
  Expr val = cx.extract(cx.ite(sel, t.val(cx), e.val(cx)), q, p);
  return {val, inv};
}

SymAtom t_cmp(ExprContext& cx, RtlOp op, const SymWord& a, const SymWord& b) {
  Expr va = a.val(cx), vb = b.val(cx);
  Expr r;
  switch (op) {
    case RtlOp::Eq: r = cx.eq(va, vb); break;
    case RtlOp::Ult: r = cx.ult(va, vb); break;
    case RtlOp::Ule: r = cx.ule(va, vb); break;
    default: throw std::invalid_argument("not a comparison");
  }
  return {cx.bool_to_bv(r), cx.lor(a.inv(cx), b.inv(cx))};
}

SymAtom t_shift_const(ExprContext& cx, RtlOp op, const SymWord& a, unsigned k, unsigned q, unsigned p) {
  unsigned m = a.width();
  Expr inv;
  Expr val;
  if (op == RtlOp::ShlConst) {
    val = cx.extract(cx.shl_const(a.val(cx), k), q, p);
    if (p >= k) inv = a.inv(cx, q - k, p - k);
    else if (q >= k) inv = a.inv(cx, q - k, 0);
    else inv = cx.false_expr();
  } else if (op == RtlOp::LshrConst) {
    val = cx.extract(cx.lshr_const(a.val(cx), k), q, p);
    if (q + k <= m - 1) inv = a.inv(cx, q + k, p + k);
    else if (p + k <= m - 1) inv = a.inv(cx, m - 1, p + k);
    else inv = cx.false_expr();
  } else {
    throw std::invalid_argument("not a constant shift");
  }
  return {val, inv};
}

SymAtom t_shift(ExprContext& cx, RtlOp op, const SymWord& a, const SymWord& d, unsigned q, unsigned p, ShiftMode mode) {
  unsigned m = a.width();
  Expr id = d.inv(cx), vd = d.val(cx);
  Expr val, ia, va;
  unsigned bound;
  if (op == RtlOp::Shl) {
    val = cx.extract(cx.shl(a.val(cx), vd), q, p);
    ia = a.inv(cx, q, 0);
    va = a.val(cx, q, 0);
    bound = q;
  } else if (op == RtlOp::Lshr) {
    val = cx.extract(cx.lshr(a.val(cx), vd), q, p);
    ia = a.inv(cx, m - 1, p);
    va = a.val(cx, m - 1, p);
    bound = m - 1 - p;
  } else {
    throw std::invalid_argument("not a variable shift");
  }
  Expr in_reach = cx.ule(vd, const_u(cx, m, bound));
  Expr inv;
  if (mode == ShiftMode::PaperFaithful)
    inv = cx.land(ia, cx.lor(id, in_reach));
  else
    inv = cx.ite(id, cx.lor(ia, nonzero(cx, va)), cx.land(ia, in_reach));
  return {val, inv};
}

SymAtom apply_template(TemplateEnv& env, RtlOp op, std::span<const SymWord> args, unsigned q, unsigned p, unsigned k) {
  ExprContext& cx = env.cx;
  switch (op) {
    case RtlOp::Add: return t_add(cx, args[0], args[1], q, p);
    case RtlOp::Sub: return t_sub(cx, args[0], args[1], q, p);
    case RtlOp::Mul: return t_mul(cx, args[0], args[1], q, p);
    case RtlOp::Udiv: return t_div(env, args[0], args[1], q, p).quot;
    case RtlOp::Urem: return t_div(env, args[0], args[1], q, p).rem;
    case RtlOp::Not: return t_bitwise(cx, op, args[0], args[0], q, p);
    case RtlOp::And:
    case RtlOp::Or:
    case RtlOp::Xor:
    case RtlOp::Nand:
    case RtlOp::Nor:
    case RtlOp::Xnor: return t_bitwise(cx, op, args[0], args[1], q, p);
    case RtlOp::Ite: return t_ite(cx, args[0], args[1], args[2], q, p);
    case RtlOp::Eq:
    case RtlOp::Ult:
    case RtlOp::Ule: return t_cmp(cx, op, args[0], args[1]);
    case RtlOp::ShlConst:
    case RtlOp::LshrConst: return t_shift_const(cx, op, args[0], k, q, p);
    case RtlOp::Shl:
    case RtlOp::Lshr: return t_shift(cx, op, args[0], args[1], q, p, env.shift_mode);
    case RtlOp::Concat: return SymWord::concat(args[0], args[1]).atom(cx, q, p);
    case RtlOp::Slice: return args[0].atom(cx, q, p);
    default: break;
  }
  throw std::invalid_argument(std::string("no template for operator ") + rtl_op_name(op));
}

LubResult lub(ExprContext& cx, const SymAtom& a, const SymAtom& b) {
  if (a.val.width() != b.val.width()) throw std::invalid_argument("lub of atoms with different widths");
  Expr top = cx.land(cx.land(cx.lnot(a.inv), cx.lnot(b.inv)), cx.ne(a.val, b.val));
  SymAtom c{cx.ite(a.inv, b.val, a.val), cx.land(a.inv, b.inv)};
  return {c, top};
}

// ---------------------------------------------------------------------------
// Arrays

Sort array_sort(std::span<const unsigned> index_widths, unsigned elem_width) {
  Sort s = Sort::bv(elem_width);
  for (std::size_t k = index_widths.size(); k-- > 0;) s = Sort::array(index_widths[k], s);
  return s;
}

SymArray array_base(ExprContext& cx, const std::string& var_name, bool initialized, std::vector<unsigned> index_widths,
                    unsigned elem_width) {
  auto n = std::make_shared<SymArrayNode>();
  n->kind = SymArrayNode::Kind::Base;
  n->initialized = initialized;
  n->val = cx.var(var_name, array_sort(index_widths, elem_width));
  n->index_widths = std::move(index_widths);
  n->elem_width = elem_width;
  return n;
}

SymArray array_update(ExprContext& cx, const SymArray& a, const SymAtom& idx, const SymWord& elem) {
  if (a->index_widths.size() != 1) throw std::invalid_argument("element update on an array of arrays");
  auto n = std::make_shared<SymArrayNode>();
  n->kind = SymArrayNode::Kind::Update;
  n->prev = a;
  n->idx = idx;
  n->elem = elem;
  n->val = cx.update(a->val, idx.val, elem.val(cx));
  n->index_widths = a->index_widths;
  n->elem_width = a->elem_width;
  return n;
}

SymArray array_update_row(ExprContext& cx, const SymArray& a, const SymAtom& idx, const SymArray& row) {
  auto n = std::make_shared<SymArrayNode>();
  n->kind = SymArrayNode::Kind::Update;
  n->prev = a;
  n->idx = idx;
  n->elem_array = row;
  n->val = cx.update(a->val, idx.val, row->val);
  n->index_widths = a->index_widths;
  n->elem_width = a->elem_width;
  return n;
}

SymArray array_select(ExprContext& cx, const SymArray& a, const SymAtom& idx) {
  if (a->index_widths.size() < 2) throw std::invalid_argument("row select on a one-dimensional array");
  auto n = std::make_shared<SymArrayNode>();
  n->kind = SymArrayNode::Kind::Select;
  n->prev = a;
  n->idx = idx;
  n->val = cx.read(a->val, idx.val);
  n->index_widths.assign(a->index_widths.begin() + 1, a->index_widths.end());
  n->elem_width = a->elem_width;
  return n;
}

namespace {

Expr read_rec(ExprContext& cx, const SymArrayNode& n, std::vector<SymAtom> path, unsigned q, unsigned p) {
  switch (n.kind) {
    case SymArrayNode::Kind::Base:
      return cx.boolean(!n.initialized);
    case SymArrayNode::Kind::Select: {
      path.insert(path.begin(), n.idx);
      return cx.lor(n.idx.inv, read_rec(cx, *n.prev, std::move(path), q, p));
    }
    case SymArrayNode::Kind::Update: {
      Expr hit = cx.eq(path.front().val, n.idx.val);
      Expr here;
      if (path.size() == 1) {
        here = n.elem.inv(cx, q, p);
      } else {
        std::vector<SymAtom> rest(path.begin() + 1, path.end());
        here = read_rec(cx, *n.elem_array, std::move(rest), q, p);
      }
      Expr older = read_rec(cx, *n.prev, std::move(path), q, p);
      return cx.lor(n.idx.inv, cx.ite(hit, here, older));
    }
  }
  return cx.true_expr();
}

}  // namespace

Expr inv_array_read(ExprContext& cx, const SymArray& a, std::span<const SymAtom> path, unsigned q, unsigned p) {
  Expr acc = cx.false_expr();
  for (const auto& i : path) acc = cx.lor(acc, i.inv);
  return cx.lor(acc, read_rec(cx, *a, std::vector<SymAtom>(path.begin(), path.end()), q, p));
}

SymAtom array_read(ExprContext& cx, const SymArray& a, const SymAtom& idx, unsigned q, unsigned p) {
  if (a->index_widths.size() != 1) throw std::invalid_argument("element read needs all indices");
  Expr val = cx.extract(cx.read(a->val, idx.val), q, p);
  SymAtom path[1] = {idx};
  return {val, inv_array_read(cx, a, path, q, p)};
}

std::string array_base_name(const std::string& array) { return "arr!" + array; }

// ---------------------------------------------------------------------------
// Simulator

Simulator::Simulator(TemplateEnv& env, const Module& m, const AtomMap& atoms) : env_(env), m_(m), atoms_(atoms) {}

SymWord Simulator::x_word(unsigned word) {
  std::vector<Piece> pieces;
  for (const auto& a : atoms_.atoms(word)) pieces.push_back({a.lo, x_atom(cx(), a.width())});
  return SymWord(std::move(pieces));
}

SymState Simulator::initial_state() {
  SymState s;
  for (unsigned w = 0; w < m_.words.size(); ++w) {
    const Word& word = m_.words[w];
    if (word.kind == WordKind::Reg && word.init) {
      std::vector<Piece> pieces;
      for (const auto& a : atoms_.atoms(w))
        pieces.push_back({a.lo, valid_atom(cx(), cx().bv(bv_extract(*word.init, a.hi, a.lo)))});
      s.words.emplace_back(std::move(pieces));
    } else {
      s.words.push_back(x_word(w));
    }
  }
  for (const auto& a : m_.arrays)
    s.arrays.push_back(array_base(cx(), array_base_name(a.name), a.initialized, a.index_widths, a.elem_width));
  return s;
}

void Simulator::clear_memo() {
  memo_.clear();
  array_memo_.clear();
}

void Simulator::settle(SymState& s, const Drive& drive) {
  clear_memo();
  for (const auto& c : m_.comb) {
    auto atoms = atoms_.atoms(c.word);
    std::vector<unsigned> cuts;
    std::vector<unsigned> targets;
    for (unsigned k = 0; k < atoms.size(); ++k) {
      if (atoms[k].lo < c.lo || atoms[k].hi > c.hi) continue;
      targets.push_back(k);
      if (atoms[k].lo > c.lo) cuts.push_back(atoms[k].lo - c.lo);
    }
    SymWord v = eval(c.rhs, s, cuts);
    for (unsigned k : targets) {
      SymAtom a = v.atom(cx(), atoms[k].hi - c.lo, atoms[k].lo - c.lo);
      if (drive) a = drive(c.word, k, a);
      s.words[c.word].pieces()[k].a = a;
    }
  }
}

SymState Simulator::next_state(const SymState& s) {
  SymState n;
  for (unsigned w = 0; w < m_.words.size(); ++w) {
    if (m_.words[w].kind != WordKind::Reg) {
      n.words.push_back(x_word(w));
      continue;
    }
    auto atoms = atoms_.atoms(w);
    std::vector<unsigned> cuts;
    for (const auto& a : atoms)
      if (a.lo > 0) cuts.push_back(a.lo);
    SymWord v = eval(m_.reg_next[w], s, cuts);
    std::vector<Piece> pieces;
    for (const auto& a : atoms) pieces.push_back({a.lo, v.atom(cx(), a.hi, a.lo)});
    n.words.emplace_back(std::move(pieces));
  }
  for (unsigned a = 0; a < m_.arrays.size(); ++a) n.arrays.push_back(eval_array(m_.array_next[a], s));
  clear_memo();
  return n;
}

SymWord Simulator::eval(const Rtl& e, const SymState& s, const std::vector<unsigned>& cuts) {
  auto key = std::make_pair(e->id, cuts);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  SymWord r = eval_uncached(e, s, cuts);
  memo_.emplace(std::move(key), r);
  return r;
}

SymArray Simulator::eval_array(const Rtl& e, const SymState& s) {
  if (auto it = array_memo_.find(e->id); it != array_memo_.end()) return it->second;
  SymArray r;
  switch (e->op) {
    case RtlOp::Array:
      r = s.arrays.at(e->ref);
      break;
    case RtlOp::Read: {
      SymArray base = eval_array(e->args[0], s);
      SymAtom idx = eval(e->args[1], s, {}).atom(cx());
      r = array_select(cx(), base, idx);
      break;
    }
    case RtlOp::Update: {
      SymArray base = eval_array(e->args[0], s);
      SymAtom idx = eval(e->args[1], s, {}).atom(cx());
      if (e->args[2]->is_array())
        r = array_update_row(cx(), base, idx, eval_array(e->args[2], s));
      else
        r = array_update(cx(), base, idx, eval(e->args[2], s, {}));
      break;
    }
    default:
      throw std::logic_error(std::string("array-valued expression of kind ") + rtl_op_name(e->op));
  }
  array_memo_.emplace(e->id, r);
  return r;
}

namespace {

std::vector<unsigned> clip(const std::vector<unsigned>& cuts, unsigned width) {
  std::vector<unsigned> out;
  for (unsigned c : cuts)
    if (c > 0 && c < width) out.push_back(c);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename Fn>
SymWord by_segments(ExprContext& cx, unsigned width, const std::vector<unsigned>& bounds, Fn&& fn) {
  (void)cx;
  std::vector<Piece> pieces;
  for (auto [h, l] : segments(bounds, width - 1, 0)) pieces.push_back({l, fn(h, l)});
  return SymWord(std::move(pieces));
}

}  // namespace

SymWord Simulator::eval_uncached(const Rtl& e, const SymState& s, const std::vector<unsigned>& cuts_in) {
  ExprContext& c = cx();
  unsigned w = e->width;
  std::vector<unsigned> cuts = clip(cuts_in, w);
  const auto& args = e->args;
  switch (e->op) {
    case RtlOp::Const:
      return by_segments(c, w, cuts, [&](unsigned h, unsigned l) { return valid_atom(c, c.bv(bv_extract(e->value, h, l))); });
    case RtlOp::Word:
      return s.words.at(e->ref).slice(c, e->hi, e->lo);
    case RtlOp::Var:
      throw std::logic_error("guard variable '" + e->text + "' inside a design expression");
    case RtlOp::Slice: {
      unsigned xw = args[0]->width;
      std::vector<unsigned> cc;
      for (unsigned k : cuts) cc.push_back(k + e->lo);
      cc.push_back(e->lo);
      cc.push_back(e->hi + 1);
      return eval(args[0], s, clip(cc, xw)).slice(c, e->hi, e->lo);
    }
    case RtlOp::Concat: {
      unsigned lw = args[1]->width;
      std::vector<unsigned> hc, lc;
      for (unsigned k : cuts) {
        if (k < lw) lc.push_back(k);
        if (k > lw) hc.push_back(k - lw);
      }
      return SymWord::concat(eval(args[0], s, hc), eval(args[1], s, lc));
    }
    case RtlOp::Not: {
      SymWord a = eval(args[0], s, cuts);
      std::vector<Piece> pieces;
      for (const auto& pc : a.pieces()) pieces.push_back({pc.lo, not_atom(c, pc.a)});
      return SymWord(std::move(pieces));
    }
    case RtlOp::And:
    case RtlOp::Or:
    case RtlOp::Xor:
    case RtlOp::Nand:
    case RtlOp::Nor:
    case RtlOp::Xnor: {
      SymWord a = eval(args[0], s, cuts), b = eval(args[1], s, cuts);
      auto bounds = merge(merge(cuts, a.boundaries()), b.boundaries());
      return by_segments(c, w, bounds, [&](unsigned h, unsigned l) { return t_bitwise(c, e->op, a, b, h, l); });
    }
    case RtlOp::Add:
    case RtlOp::Sub: {
      SymWord a = eval(args[0], s, cuts), b = eval(args[1], s, cuts);
      return by_segments(c, w, cuts, [&](unsigned h, unsigned l) {
        return e->op == RtlOp::Add ? t_add(c, a, b, h, l) : t_sub(c, a, b, h, l);
      });
    }
    case RtlOp::Mul: {
      SymWord a = eval(args[0], s, {}), b = eval(args[1], s, {});
      return by_segments(c, w, cuts, [&](unsigned h, unsigned l) { return t_mul(c, a, b, h, l); });
    }
    case RtlOp::Udiv:
    case RtlOp::Urem: {
      SymWord a = eval(args[0], s, cuts), b = eval(args[1], s, {});
      return by_segments(c, w, cuts, [&](unsigned h, unsigned l) {
        DivResult r = t_div(env_, a, b, h, l);
        return e->op == RtlOp::Udiv ? r.quot : r.rem;
      });
    }
    case RtlOp::Shl:
    case RtlOp::Lshr: {
      SymWord a = eval(args[0], s, {}), d = eval(args[1], s, {});
      return by_segments(c, w, cuts, [&](unsigned h, unsigned l) { return t_shift(c, e->op, a, d, h, l, env_.shift_mode); });
    }
    case RtlOp::ShlConst:
    case RtlOp::LshrConst: {
      unsigned k = e->hi;
      bool left = e->op == RtlOp::ShlConst;
      std::vector<unsigned> ac;
      for (unsigned x : cuts) ac.push_back(left ? (x > k ? x - k : 0) : x + k);
      SymWord a = eval(args[0], s, clip(ac, w));
      std::vector<unsigned> bounds = cuts;
      bounds.push_back(left ? k : w - k);
      for (unsigned b : a.boundaries()) bounds.push_back(left ? b + k : (b > k ? b - k : 0));
      return by_segments(c, w, clip(bounds, w), [&](unsigned h, unsigned l) { return t_shift_const(c, e->op, a, k, h, l); });
    }
    case RtlOp::Eq:
    case RtlOp::Ult:
    case RtlOp::Ule: {
      SymWord a = eval(args[0], s, {}), b = eval(args[1], s, {});
      return SymWord::of(t_cmp(c, e->op, a, b));
    }
    case RtlOp::Ite: {
      SymWord sel = eval(args[0], s, {});
      SymWord t = eval(args[1], s, cuts), f = eval(args[2], s, cuts);
      auto bounds = merge(merge(cuts, t.boundaries()), f.boundaries());
      return by_segments(c, w, bounds, [&](unsigned h, unsigned l) { return t_ite(c, sel, t, f, h, l); });
    }
    case RtlOp::Read: {
      SymArray arr = eval_array(args[0], s);
      SymAtom idx = eval(args[1], s, {}).atom(c);
      return by_segments(c, w, cuts, [&](unsigned h, unsigned l) { return array_read(c, arr, idx, h, l); });
    }
    case RtlOp::Array:
    case RtlOp::Update:
      break;
  }
  throw std::logic_error(std::string("array-valued expression used as a word: ") + rtl_op_name(e->op));
}

}  // namespace wste
