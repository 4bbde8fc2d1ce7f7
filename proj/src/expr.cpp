// SPDX-License-Identifier: Apache-2.0

#include "wste/expr.hpp"

#include <sstream>
#include <unordered_set>

namespace wste {

// ---------------------------------------------------------------------------
// Sort

Sort Sort::bv(unsigned width) {
  if (width == 0) throw SortError("bit-vector width must be at least 1");
  Sort s;
  s.kind_ = Kind::BitVec;
  s.width_ = width;
  return s;
}

Sort Sort::boolean() { return Sort(); }

Sort Sort::array(unsigned index_width, const Sort& element) {
  if (index_width == 0) throw SortError("array index width must be at least 1");
  if (element.is_bool()) throw SortError("arrays of booleans are not supported");
  Sort s;
  s.kind_ = Kind::Array;
  s.index_width_ = index_width;
  s.element_ = std::make_shared<const Sort>(element);
  return s;
}

std::string Sort::to_string() const {
  switch (kind_) {
    case Kind::BitVec:
      return "(_ BitVec " + std::to_string(width_) + ")";
    case Kind::Bool:
      return "Bool";
    case Kind::Array:
      return "(Array (_ BitVec " + std::to_string(index_width_) + ") " + element_->to_string() + ")";
  }
  return "?";
}

std::size_t Sort::hash() const {
  std::size_t h = static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ull;
  h ^= width_ + 0x9e3779b9 + (h << 6) + (h >> 2);
  h ^= index_width_ + 0x9e3779b9 + (h << 6) + (h >> 2);
  if (element_) h ^= element_->hash() + 0x9e3779b9 + (h << 6) + (h >> 2);
  return h;
}

bool operator==(const Sort& a, const Sort& b) {
  if (a.kind_ != b.kind_ || a.width_ != b.width_ || a.index_width_ != b.index_width_) return false;
  if (a.kind_ != Sort::Kind::Array) return true;
  return *a.element_ == *b.element_;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::BvConst: return "bvconst";
    case Op::BoolConst: return "boolconst";
    case Op::Var: return "var";
    case Op::Add: return "bvadd";
    case Op::Sub: return "bvsub";
    case Op::Mul: return "bvmul";
    case Op::Udiv: return "bvudiv";
    case Op::Urem: return "bvurem";
    case Op::Concat: return "concat";
    case Op::Extract: return "extract";
    case Op::BvNot: return "bvnot";
    case Op::BvAnd: return "bvand";
    case Op::BvOr: return "bvor";
    case Op::BvXor: return "bvxor";
    case Op::Shl: return "bvshl";
    case Op::Lshr: return "bvlshr";
    case Op::ShlConst: return "shl-const";
    case Op::LshrConst: return "lshr-const";
    case Op::Eq: return "=";
    case Op::Ult: return "bvult";
    case Op::Ule: return "bvule";
    case Op::Ite: return "ite";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Read: return "select";
    case Op::Update: return "store";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Values

bool Value::as_bool() const {
  if (!is_bool()) throw EvalError("value is not a boolean");
  return std::get<bool>(v_);
}

const BitVector& Value::as_bv() const {
  if (!is_bv()) throw EvalError("value is not a bit-vector");
  return std::get<BitVector>(v_);
}

const ArrayValue& Value::as_array() const { return *array_ptr(); }

const std::shared_ptr<const ArrayValue>& Value::array_ptr() const {
  if (!is_array()) throw EvalError("value is not an array");
  return std::get<std::shared_ptr<const ArrayValue>>(v_);
}

std::string Value::to_string() const {
  if (is_bool()) return as_bool() ? "true" : "false";
  if (is_bv()) return "#b" + as_bv().to_binary();
  std::string s = "[array";
  for (const auto& [k, v] : as_array().stores()) s += " " + k.str() + "->" + v.to_string();
  return s + "]";
}

bool operator==(const Value& a, const Value& b) {
  if (a.is_bool() && b.is_bool()) return a.as_bool() == b.as_bool();
  if (a.is_bv() && b.is_bv()) return a.as_bv() == b.as_bv();
  if (a.is_array() && b.is_array()) return a.array_ptr() == b.array_ptr();
  return false;
}

std::shared_ptr<const ArrayValue> ArrayValue::constant(const Sort& sort, Value dflt) {
  return std::make_shared<const ArrayValue>(sort, [dflt](const BitVector&) { return dflt; });
}

Value ArrayValue::read(const BitVector& idx) const {
  if (auto it = stores_.find(idx.value()); it != stores_.end()) return it->second;
  return base_(idx);
}

std::shared_ptr<const ArrayValue> ArrayValue::store(const BitVector& idx, Value v) const {
  auto copy = std::make_shared<ArrayValue>(*this);
  copy->stores_[idx.value()] = std::move(v);
  return copy;
}

Value apply_op(Op op, std::span<const Value> a, unsigned p0, unsigned p1) {
  switch (op) {
    case Op::Add: return bv_add(a[0].as_bv(), a[1].as_bv());
    case Op::Sub: return bv_sub(a[0].as_bv(), a[1].as_bv());
    case Op::Mul: return bv_mul(a[0].as_bv(), a[1].as_bv());
    case Op::Udiv: return bv_udiv(a[0].as_bv(), a[1].as_bv());
    case Op::Urem: return bv_urem(a[0].as_bv(), a[1].as_bv());
    case Op::Concat: return bv_concat(a[0].as_bv(), a[1].as_bv());
    case Op::Extract: return bv_extract(a[0].as_bv(), p0, p1);
    case Op::BvNot: return bv_not(a[0].as_bv());
    case Op::BvAnd: return bv_and(a[0].as_bv(), a[1].as_bv());
    case Op::BvOr: return bv_or(a[0].as_bv(), a[1].as_bv());
    case Op::BvXor: return bv_xor(a[0].as_bv(), a[1].as_bv());
    case Op::Shl: return bv_shl(a[0].as_bv(), a[1].as_bv());
    case Op::Lshr: return bv_lshr(a[0].as_bv(), a[1].as_bv());
    case Op::ShlConst: return bv_shl(a[0].as_bv(), p0);
    case Op::LshrConst: return bv_lshr(a[0].as_bv(), p0);
    case Op::Eq: return a[0] == a[1];
    case Op::Ult: return bv_ult(a[0].as_bv(), a[1].as_bv());
    case Op::Ule: return bv_ule(a[0].as_bv(), a[1].as_bv());
    case Op::Ite: return a[0].as_bool() ? a[1] : a[2];
    case Op::Not: return !a[0].as_bool();
    case Op::And: return a[0].as_bool() && a[1].as_bool();
    case Op::Or: return a[0].as_bool() || a[1].as_bool();
    case Op::Read: return a[0].as_array().read(a[1].as_bv());
    case Op::Update: return Value(a[0].as_array().store(a[1].as_bv(), a[2]));
    case Op::BvConst:
    case Op::BoolConst:
    case Op::Var:
      break;
  }
  throw EvalError(std::string("apply_op: not an operator: ") + op_name(op));
}

// ---------------------------------------------------------------------------
// Context

std::size_t ExprContext::KeyHash::operator()(const Key& k) const {
  std::size_t h = static_cast<std::size_t>(k.op) * 1000003u;
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
  mix(k.p0);
  mix(k.p1);
  for (auto id : k.kids) mix(id);
  mix(std::hash<std::string>{}(k.name));
  mix(k.flag);
  mix(k.value.width());
  mix(static_cast<std::size_t>(k.value.to_u64()));
  return h;
}

ExprContext::ExprContext() {
  false_ = intern(Op::BoolConst, Sort::boolean(), {}, 0, 0, {}, false);
  true_ = intern(Op::BoolConst, Sort::boolean(), {}, 0, 0, {}, true);
}

Expr ExprContext::intern(Op op, const Sort& sort, std::vector<Expr> kids, unsigned p0, unsigned p1,
                         BitVector value, bool flag, std::string name) {
  Key key{op, p0, p1, {}, value, flag, name};
  key.kids.reserve(kids.size());
  for (auto k : kids) key.kids.push_back(k.id());
  if (auto it = table_.find(key); it != table_.end()) return Expr(it->second);
  Node& n = nodes_.emplace_back();
  n.id = static_cast<std::uint32_t>(nodes_.size() - 1);
  n.op = op;
  n.sort = sort;
  n.children = std::move(kids);
  n.p0 = p0;
  n.p1 = p1;
  n.value = std::move(value);
  n.flag = flag;
  n.name = std::move(name);
  table_.emplace(std::move(key), &n);
  return Expr(&n);
}

Expr ExprContext::bv(const BitVector& v) { return intern(Op::BvConst, Sort::bv(v.width()), {}, 0, 0, v); }

Expr ExprContext::var(const std::string& name, const Sort& sort) {
  if (auto it = vars_.find(name); it != vars_.end()) {
    if (it->second.sort() != sort)
      throw SortError("variable '" + name + "' redeclared with sort " + sort.to_string() + " (was " +
                      it->second.sort().to_string() + ")");
    return it->second;
  }
  Expr v = intern(Op::Var, sort, {}, 0, 0, {}, false, name);
  vars_.emplace(name, v);
  return v;
}

Expr ExprContext::fresh_var(const std::string& prefix, const Sort& sort) {
  std::string name;
  do {
    name = prefix + "!" + std::to_string(fresh_counter_++);
  } while (vars_.count(name));
  return var(name, sort);
}

Expr ExprContext::concat(std::span<const Expr> parts) {
  if (parts.empty()) throw SortError("concat of zero parts");
  Expr acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = concat(acc, parts[i]);
  return acc;
}

Expr ExprContext::zext(Expr e, unsigned width) {
  if (width < e.width()) throw SortError("zext to narrower width");
  if (width == e.width()) return e;
  return concat(zeros(width - e.width()), e);
}

Expr ExprContext::land(std::span<const Expr> xs) {
  Expr acc = true_;
  for (auto x : xs) acc = land(acc, x);
  return acc;
}

Expr ExprContext::lor(std::span<const Expr> xs) {
  Expr acc = false_;
  for (auto x : xs) acc = lor(acc, x);
  return acc;
}

Expr ExprContext::bv_to_bool(Expr v) {
  if (v.sort() != Sort::bv(1)) throw SortError("bv_to_bool expects a 1-bit vector");
  return eq(v, bv_u64(1, 1));
}

namespace {

std::string widths_of(std::span<const Expr> kids) {
  std::string s;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (i) s += ", ";
    s += kids[i].sort().to_string();
  }
  return s;
}

[[noreturn]] void sort_fail(Op op, std::span<const Expr> kids, const std::string& why) {
  throw SortError(std::string(op_name(op)) + ": " + why + " (operands: " + widths_of(kids) + ")");
}

}  // namespace

Sort ExprContext::check_sort(Op op, std::span<const Expr> k, unsigned p0, unsigned p1) const {
  auto arity = [&](std::size_t n) {
    if (k.size() != n) sort_fail(op, k, "expected " + std::to_string(n) + " operands");
    for (auto e : k)
      if (!e) sort_fail(op, k, "null operand");
  };
  auto same_bv = [&]() {
    arity(2);
    if (!k[0].sort().is_bv() || k[0].sort() != k[1].sort()) sort_fail(op, k, "operand widths differ");
  };
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Udiv:
    case Op::Urem:
    case Op::BvAnd:
    case Op::BvOr:
    case Op::BvXor:
    case Op::Shl:
    case Op::Lshr:
      same_bv();
      return k[0].sort();
    case Op::BvNot:
    case Op::ShlConst:
    case Op::LshrConst:
      arity(1);
      if (!k[0].sort().is_bv()) sort_fail(op, k, "expected a bit-vector");
      return k[0].sort();
    case Op::Concat:
      arity(2);
      if (!k[0].sort().is_bv() || !k[1].sort().is_bv()) sort_fail(op, k, "expected bit-vectors");
      return Sort::bv(k[0].width() + k[1].width());
    case Op::Extract:
      arity(1);
      if (!k[0].sort().is_bv()) sort_fail(op, k, "expected a bit-vector");
      if (p1 > p0 || p0 >= k[0].width())
        sort_fail(op, k, "bounds [" + std::to_string(p0) + ":" + std::to_string(p1) + "] out of range");
      return Sort::bv(p0 - p1 + 1);
    case Op::Eq:
      arity(2);
      if (k[0].sort() != k[1].sort() || k[0].sort().is_array()) sort_fail(op, k, "operand sorts differ");
      return Sort::boolean();
    case Op::Ult:
    case Op::Ule:
      same_bv();
      return Sort::boolean();
    case Op::Ite:
      arity(3);
      if (!k[0].sort().is_bool()) sort_fail(op, k, "condition must be Bool");
      if (k[1].sort() != k[2].sort()) sort_fail(op, k, "branch sorts differ");
      return k[1].sort();
    case Op::Not:
      arity(1);
      if (!k[0].sort().is_bool()) sort_fail(op, k, "expected Bool");
      return Sort::boolean();
    case Op::And:
    case Op::Or:
      arity(2);
      if (!k[0].sort().is_bool() || !k[1].sort().is_bool()) sort_fail(op, k, "expected Bool");
      return Sort::boolean();
    case Op::Read:
      arity(2);
      if (!k[0].sort().is_array() || k[1].sort() != Sort::bv(k[0].sort().index_width()))
        sort_fail(op, k, "index sort does not match array");
      return k[0].sort().element();
    case Op::Update:
      arity(3);
      if (!k[0].sort().is_array() || k[1].sort() != Sort::bv(k[0].sort().index_width()) ||
          k[2].sort() != k[0].sort().element())
        sort_fail(op, k, "index/element sort does not match array");
      return k[0].sort();
    case Op::BvConst:
    case Op::BoolConst:
    case Op::Var:
      break;
  }
  sort_fail(op, k, "not constructible through mk");
}

Expr ExprContext::mk(Op op, std::span<const Expr> kids, unsigned p0, unsigned p1) {
  Sort sort = check_sort(op, kids, p0, p1);
  if (Expr s = simplify(op, kids, p0, p1, sort)) return s;
  return intern(op, sort, std::vector<Expr>(kids.begin(), kids.end()), p0, p1);
}

Expr ExprContext::simplify(Op op, std::span<const Expr> k, unsigned p0, unsigned p1, const Sort& sort) {
  bool all_const = op != Op::Read && op != Op::Update;
  for (auto e : k) all_const = all_const && e.is_const();
  if (all_const) {
    std::vector<Value> vals;
    vals.reserve(k.size());
    for (auto e : k) vals.push_back(e.op() == Op::BoolConst ? Value(e.bool_value()) : Value(e.bv_value()));
    Value r = apply_op(op, vals, p0, p1);
    return r.is_bool() ? boolean(r.as_bool()) : bv(r.as_bv());
  }

  auto is_zero = [](Expr e) { return e.op() == Op::BvConst && e.bv_value().is_zero(); };
  auto is_ones = [](Expr e) { return e.op() == Op::BvConst && e.bv_value().is_ones(); };
  auto is_one = [](Expr e) { return e.op() == Op::BvConst && e.bv_value().value() == 1; };

  switch (op) {
    case Op::Add:
      if (is_zero(k[0])) return k[1];
      if (is_zero(k[1])) return k[0];
      break;
    case Op::Sub:
      if (is_zero(k[1])) return k[0];
      if (k[0] == k[1]) return zeros(sort.width());
      break;
    case Op::Mul:
      if (is_zero(k[0]) || is_zero(k[1])) return zeros(sort.width());
      if (is_one(k[0])) return k[1];
      if (is_one(k[1])) return k[0];
      break;
    case Op::Udiv:
      if (is_one(k[1])) return k[0];
      break;
    case Op::Urem:
      if (is_one(k[1])) return zeros(sort.width());
      break;
    case Op::BvAnd:
      if (is_zero(k[0]) || is_zero(k[1])) return zeros(sort.width());
      if (is_ones(k[0])) return k[1];
      if (is_ones(k[1])) return k[0];
      if (k[0] == k[1]) return k[0];
      break;
    case Op::BvOr:
      if (is_ones(k[0]) || is_ones(k[1])) return ones(sort.width());
      if (is_zero(k[0])) return k[1];
      if (is_zero(k[1])) return k[0];
      if (k[0] == k[1]) return k[0];
      break;
    case Op::BvXor:
      if (is_zero(k[0])) return k[1];
      if (is_zero(k[1])) return k[0];
      if (k[0] == k[1]) return zeros(sort.width());
      break;
    case Op::BvNot:
      if (k[0].op() == Op::BvNot) return k[0].child(0);
      break;
    case Op::Shl:
    case Op::Lshr:
      if (is_zero(k[0])) return zeros(sort.width());
      if (k[1].op() == Op::BvConst) {
        const BigUint& amt = k[1].bv_value().value();
        if (amt >= sort.width()) return zeros(sort.width());
        unsigned a = static_cast<unsigned>(amt);
        return op == Op::Shl ? shl_const(k[0], a) : lshr_const(k[0], a);
      }
      break;
    case Op::ShlConst:
    case Op::LshrConst:
      if (p0 == 0) return k[0];
      if (p0 >= sort.width()) return zeros(sort.width());
      break;
    case Op::Concat:
      if (k[0].op() == Op::Extract && k[1].op() == Op::Extract && k[0].child(0) == k[1].child(0) &&
          k[0].lo() == k[1].hi() + 1)
        return extract(k[0].child(0), k[0].hi(), k[1].lo());
      break;
    case Op::Extract: {
      Expr x = k[0];
      unsigned w = x.width();
      if (p1 == 0 && p0 == w - 1) return x;
      switch (x.op()) {
        case Op::Extract:
          return extract(x.child(0), x.lo() + p0, x.lo() + p1);
        case Op::Concat: {
          Expr hi = x.child(0);
          Expr lo = x.child(1);
          unsigned lw = lo.width();
          if (p0 < lw) return extract(lo, p0, p1);
          if (p1 >= lw) return extract(hi, p0 - lw, p1 - lw);
          return concat(extract(hi, p0 - lw, 0), extract(lo, lw - 1, p1));
        }
        case Op::ShlConst: {
          unsigned s = x.hi();
          if (p0 < s) return zeros(p0 - p1 + 1);
          if (p1 >= s) return extract(x.child(0), p0 - s, p1 - s);
          break;
        }
        case Op::LshrConst: {
          unsigned s = x.hi();
          if (p1 + s >= w) return zeros(p0 - p1 + 1);
          if (p0 + s <= w - 1) return extract(x.child(0), p0 + s, p1 + s);
          break;
        }
        default:
          break;
      }
      break;
    }
    case Op::Eq: {
      if (k[0] == k[1]) return true_;
      if (k[0].sort().is_bool()) {
        if (k[0].is_true()) return k[1];
        if (k[1].is_true()) return k[0];
        if (k[0].is_false()) return lnot(k[1]);
        if (k[1].is_false()) return lnot(k[0]);
        break;
      }
      // (ite c k1 k2) = k3 with constant branches folds to a boolean ite.
      for (int side = 0; side < 2; ++side) {
        Expr a = k[side];
        Expr c = k[1 - side];
        if (c.op() == Op::BvConst && a.op() == Op::Ite && a.child(1).is_const() && a.child(2).is_const())
          return ite(a.child(0), boolean(a.child(1) == c), boolean(a.child(2) == c));
      }
      break;
    }
    case Op::Ult:
      if (is_zero(k[1]) || k[0] == k[1]) return false_;
      break;
    case Op::Ule:
      if (is_zero(k[0]) || is_ones(k[1]) || k[0] == k[1]) return true_;
      break;
    case Op::Ite: {
      Expr c = k[0], t = k[1], e = k[2];
      if (c.is_true()) return t;
      if (c.is_false()) return e;
      if (t == e) return t;
      if (c.op() == Op::Not) return ite(c.child(0), e, t);
      if (t.op() == Op::Ite && t.child(0) == c) return ite(c, t.child(1), e);
      if (e.op() == Op::Ite && e.child(0) == c) return ite(c, t, e.child(2));
      if (sort.is_bool()) {
        if (t.is_true() && e.is_false()) return c;
        if (t.is_false() && e.is_true()) return lnot(c);
        if (t.is_true()) return lor(c, e);
        if (t.is_false()) return land(lnot(c), e);
        if (e.is_true()) return lor(lnot(c), t);
        if (e.is_false()) return land(c, t);
      }
      break;
    }
    case Op::Not:
      if (k[0].op() == Op::Not) return k[0].child(0);
      break;
    case Op::And: {
      Expr a = k[0], b = k[1];
      if (a.is_false() || b.is_false()) return false_;
      if (a.is_true()) return b;
      if (b.is_true()) return a;
      if (a == b) return a;
      if ((a.op() == Op::Not && a.child(0) == b) || (b.op() == Op::Not && b.child(0) == a)) return false_;
      break;
    }
    case Op::Or: {
      Expr a = k[0], b = k[1];
      if (a.is_true() || b.is_true()) return true_;
      if (a.is_false()) return b;
      if (b.is_false()) return a;
      if (a == b) return a;
      if ((a.op() == Op::Not && a.child(0) == b) || (b.op() == Op::Not && b.child(0) == a)) return true_;
      break;
    }
    case Op::Read: {
      Expr arr = k[0], idx = k[1];
      if (arr.op() == Op::Update) {
        Expr widx = arr.child(1);
        if (widx == idx) return arr.child(2);
        if (widx.op() == Op::BvConst && idx.op() == Op::BvConst) return read(arr.child(0), idx);
      }
      break;
    }
    default:
      break;
  }
  return Expr();
}

// ---------------------------------------------------------------------------
// Evaluation

void Evaluator::reset(const Env* env) {
  env_ = env;
  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
}

Value Evaluator::eval(Expr e) {
  std::uint32_t id = e.id();
  if (id < stamp_.size() && stamp_[id] == generation_) return memo_[id];
  Value result;
  switch (e.op()) {
    case Op::BvConst:
      result = e.bv_value();
      break;
    case Op::BoolConst:
      result = e.bool_value();
      break;
    case Op::Var: {
      if (!env_) throw EvalError("no environment bound for variable '" + e.name() + "'");
      auto it = env_->find(e.name());
      if (it == env_->end()) throw EvalError("unbound variable '" + e.name() + "'");
      result = it->second;
      bool ok = (e.sort().is_bool() && result.is_bool()) ||
                (e.sort().is_bv() && result.is_bv() && result.as_bv().width() == e.width()) ||
                (e.sort().is_array() && result.is_array());
      if (!ok) throw EvalError("variable '" + e.name() + "' bound to a value of the wrong sort");
      break;
    }
    case Op::Ite: {
      bool c = eval(e.child(0)).as_bool();
      result = eval(e.child(c ? 1 : 2));
      break;
    }
    case Op::And: {
      result = eval(e.child(0)).as_bool() && eval(e.child(1)).as_bool();
      break;
    }
    case Op::Or: {
      result = eval(e.child(0)).as_bool() || eval(e.child(1)).as_bool();
      break;
    }
    default: {
      Value args[3];
      auto kids = e.children();
      for (std::size_t i = 0; i < kids.size(); ++i) args[i] = eval(kids[i]);
      result = apply_op(e.op(), std::span<const Value>(args, kids.size()), e.hi(), e.lo());
      break;
    }
  }
  if (id >= stamp_.size()) {
    stamp_.resize(id + 1, 0);
    memo_.resize(id + 1);
  }
  stamp_[id] = generation_;
  memo_[id] = result;
  return result;
}

Value eval(Expr e, const Env& env) {
  Evaluator ev(&env);
  return ev.eval(e);
}

std::vector<Expr> free_vars(std::span<const Expr> roots) {
  std::unordered_set<std::uint32_t> seen;
  std::vector<Expr> stack(roots.begin(), roots.end());
  std::vector<Expr> vars;
  while (!stack.empty()) {
    Expr e = stack.back();
    stack.pop_back();
    if (!seen.insert(e.id()).second) continue;
    if (e.op() == Op::Var) vars.push_back(e);
    for (auto c : e.children()) stack.push_back(c);
  }
  std::sort(vars.begin(), vars.end(), [](Expr a, Expr b) { return a.name() < b.name(); });
  return vars;
}

std::size_t dag_size(std::span<const Expr> roots) {
  std::unordered_set<std::uint32_t> seen;
  std::vector<Expr> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    Expr e = stack.back();
    stack.pop_back();
    if (!seen.insert(e.id()).second) continue;
    for (auto c : e.children()) stack.push_back(c);
  }
  return seen.size();
}

namespace {

void print(std::ostream& os, Expr e) {
  switch (e.op()) {
    case Op::BvConst:
      os << "#b" << e.bv_value().to_binary();
      return;
    case Op::BoolConst:
      os << (e.bool_value() ? "true" : "false");
      return;
    case Op::Var:
      os << e.name();
      return;
    case Op::Extract:
      os << "((_ extract " << e.hi() << " " << e.lo() << ") ";
      print(os, e.child(0));
      os << ")";
      return;
    case Op::ShlConst:
    case Op::LshrConst:
      os << "(" << op_name(e.op()) << " " << e.hi() << " ";
      print(os, e.child(0));
      os << ")";
      return;
    default:
      os << "(" << op_name(e.op());
      for (auto c : e.children()) {
        os << " ";
        print(os, c);
      }
      os << ")";
  }
}

}  // namespace

std::string to_string(Expr e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

}  // namespace wste
