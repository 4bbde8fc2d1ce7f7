// SPDX-License-Identifier: Apache-2.0
//
// Width checking, name resolution and desugaring of WDL into a Module.

#include <algorithm>
#include <atomic>
#include <queue>
#include <set>
#include <unordered_set>

#include "wste/ir.hpp"

namespace wste {

const char* rtl_op_name(RtlOp op) {
  switch (op) {
    case RtlOp::Const: return "const";
    case RtlOp::Word: return "word";
    case RtlOp::Var: return "var";
    case RtlOp::Array: return "array";
    case RtlOp::Slice: return "slice";
    case RtlOp::Concat: return "concat";
    case RtlOp::Not: return "~";
    case RtlOp::Add: return "+";
    case RtlOp::Sub: return "-";
    case RtlOp::Mul: return "*";
    case RtlOp::Udiv: return "/";
    case RtlOp::Urem: return "%";
    case RtlOp::And: return "&";
    case RtlOp::Or: return "|";
    case RtlOp::Xor: return "^";
    case RtlOp::Nand: return "~&";
    case RtlOp::Nor: return "~|";
    case RtlOp::Xnor: return "~^";
    case RtlOp::Shl: return "<<";
    case RtlOp::Lshr: return ">>";
    case RtlOp::ShlConst: return "<<k";
    case RtlOp::LshrConst: return ">>k";
    case RtlOp::Eq: return "==";
    case RtlOp::Ult: return "<";
    case RtlOp::Ule: return "<=";
    case RtlOp::Ite: return "?:";
    case RtlOp::Read: return "read";
    case RtlOp::Update: return "update";
  }
  return "?";
}

namespace rtl {

namespace {
std::atomic<std::uint64_t> next_id{1};

std::shared_ptr<RtlNode> fresh(RtlOp op, unsigned width, SrcLoc loc) {
  auto n = std::make_shared<RtlNode>();
  n->op = op;
  n->width = width;
  n->loc = loc;
  n->id = next_id.fetch_add(1, std::memory_order_relaxed);
  return n;
}
}  // namespace

Rtl make(RtlOp op, unsigned width, std::vector<Rtl> args, SrcLoc loc, unsigned hi, unsigned lo) {
  auto n = fresh(op, width, loc);
  n->args = std::move(args);
  n->hi = hi;
  n->lo = lo;
  return n;
}

Rtl constant(const BitVector& v, SrcLoc loc) {
  auto n = fresh(RtlOp::Const, v.width(), loc);
  n->value = v;
  return n;
}

Rtl word(int id, unsigned hi, unsigned lo, SrcLoc loc) {
  auto n = fresh(RtlOp::Word, hi - lo + 1, loc);
  n->ref = id;
  n->hi = hi;
  n->lo = lo;
  return n;
}

Rtl var(int id, const std::string& name, unsigned width, SrcLoc loc) {
  auto n = fresh(RtlOp::Var, width, loc);
  n->ref = id;
  n->text = name;
  return n;
}

Rtl array(int id, unsigned elem_width, std::vector<unsigned> index_widths, SrcLoc loc) {
  auto n = fresh(RtlOp::Array, elem_width, loc);
  n->ref = id;
  n->index_widths = std::move(index_widths);
  return n;
}

Rtl slice(const Rtl& e, unsigned hi, unsigned lo, SrcLoc loc) {
  if (lo > hi || hi >= e->width) throw ElabError(loc, "slice out of range");
  if (lo == 0 && hi == e->width - 1) return e;
  switch (e->op) {
    case RtlOp::Word:
      return word(e->ref, e->lo + hi, e->lo + lo, loc);
    case RtlOp::Const:
      return constant(bv_extract(e->value, hi, lo), loc);
    case RtlOp::Slice:
      return slice(e->args[0], e->lo + hi, e->lo + lo, loc);
    case RtlOp::Concat: {
      const Rtl& h = e->args[0];
      const Rtl& l = e->args[1];
      unsigned lw = l->width;
      if (hi < lw) return slice(l, hi, lo, loc);
      if (lo >= lw) return slice(h, hi - lw, lo - lw, loc);
      return concat(slice(h, hi - lw, 0, loc), slice(l, lw - 1, lo, loc), loc);
    }
    default:
      return make(RtlOp::Slice, hi - lo + 1, {e}, loc, hi, lo);
  }
}

Rtl concat(const Rtl& hi, const Rtl& lo, SrcLoc loc) {
  if (hi->op == RtlOp::Word && lo->op == RtlOp::Word && hi->ref == lo->ref && hi->lo == lo->hi + 1)
    return word(hi->ref, hi->hi, lo->lo, loc);
  if (hi->op == RtlOp::Const && lo->op == RtlOp::Const) return constant(bv_concat(hi->value, lo->value), loc);
  return make(RtlOp::Concat, hi->width + lo->width, {hi, lo}, loc);
}

Rtl ite(const Rtl& c, const Rtl& t, const Rtl& e, SrcLoc loc) {
  if (t == e) return t;
  if (c->op == RtlOp::Const) return c->value.is_zero() ? e : t;
  auto n = fresh(RtlOp::Ite, t->width, loc);
  n->args = {c, t, e};
  n->index_widths = t->index_widths;
  return n;
}

Rtl read(const Rtl& arr, const Rtl& idx, SrcLoc loc) {
  auto n = fresh(RtlOp::Read, arr->width, loc);
  n->args = {arr, idx};
  n->index_widths.assign(arr->index_widths.begin() + 1, arr->index_widths.end());
  return n;
}

Rtl update(const Rtl& arr, const Rtl& idx, const Rtl& elem, SrcLoc loc) {
  auto n = fresh(RtlOp::Update, arr->width, loc);
  n->args = {arr, idx, elem};
  n->index_widths = arr->index_widths;
  return n;
}

Rtl splice(const Rtl& base, unsigned hi, unsigned lo, const Rtl& part, SrcLoc loc) {
  unsigned w = base->width;
  Rtl r = part;
  if (hi + 1 < w) r = concat(slice(base, w - 1, hi + 1, loc), r, loc);
  if (lo > 0) r = concat(r, slice(base, lo - 1, 0, loc), loc);
  return r;
}

}  // namespace rtl

void walk(const Rtl& root, const std::function<void(const RtlNode&)>& fn) {
  std::unordered_set<const RtlNode*> seen;
  std::vector<const RtlNode*> stack{root.get()};
  while (!stack.empty()) {
    const RtlNode* n = stack.back();
    stack.pop_back();
    if (!n || !seen.insert(n).second) continue;
    fn(*n);
    for (const auto& a : n->args) stack.push_back(a.get());
  }
}

int Module::find_word(std::string_view name) const {
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i].name == name) return static_cast<int>(i);
  return -1;
}

int Module::find_array(std::string_view name) const {
  for (std::size_t i = 0; i < arrays.size(); ++i)
    if (arrays[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {

std::vector<unsigned> words_of_kind(const Module& m, WordKind k) {
  std::vector<unsigned> out;
  for (unsigned i = 0; i < m.words.size(); ++i)
    if (m.words[i].kind == k) out.push_back(i);
  return out;
}

}  // namespace

std::vector<unsigned> Module::inputs() const { return words_of_kind(*this, WordKind::Input); }
std::vector<unsigned> Module::registers() const { return words_of_kind(*this, WordKind::Reg); }
std::vector<unsigned> Module::wires() const { return words_of_kind(*this, WordKind::Wire); }

// ---------------------------------------------------------------------------
// Constant and runtime expressions

BigUint eval_const(const AstPtr& e, const std::map<std::string, BigUint>& params) {
  switch (e->kind) {
    case Ast::Kind::Number:
    case Ast::Kind::Sized:
      return e->value;
    case Ast::Kind::Ident: {
      auto it = params.find(e->text);
      if (it == params.end()) throw ElabError(e->loc, "'" + e->text + "' is not a constant parameter");
      return it->second;
    }
    case Ast::Kind::Binary: {
      BigUint a = eval_const(e->args[0], params);
      BigUint b = eval_const(e->args[1], params);
      const std::string& op = e->text;
      if (op == "+") return a + b;
      if (op == "-") {
        if (b > a) throw ElabError(e->loc, "negative constant");
        return a - b;
      }
      if (op == "*") return a * b;
      if (op == "/" || op == "%") {
        if (b == 0) throw ElabError(e->loc, "constant division by zero");
        return op == "/" ? BigUint(a / b) : BigUint(a % b);
      }
      if (op == "<<" || op == ">>") {
        if (b > 4096) throw ElabError(e->loc, "constant shift too large");
        unsigned k = static_cast<unsigned>(b);
        return op == "<<" ? BigUint(a << k) : BigUint(a >> k);
      }
      break;
    }
    default:
      break;
  }
  throw ElabError(e->loc, "expected a constant expression");
}

unsigned eval_width(const AstPtr& e, const std::map<std::string, BigUint>& params) {
  BigUint v = eval_const(e, params);
  if (v == 0 || v > 4096) throw ElabError(e->loc, "width " + v.str() + " out of range (1..4096)");
  return static_cast<unsigned>(v);
}

namespace {

bool is_const_ast(const AstPtr& e, const std::map<std::string, BigUint>& params) {
  switch (e->kind) {
    case Ast::Kind::Number:
    case Ast::Kind::Sized:
      return true;
    case Ast::Kind::Ident:
      return params.count(e->text) > 0;
    case Ast::Kind::Binary:
      return is_const_ast(e->args[0], params) && is_const_ast(e->args[1], params);
    default:
      return false;
  }
}

bool one_of(const std::string& s, std::initializer_list<const char*> xs) {
  for (const char* x : xs)
    if (s == x) return true;
  return false;
}

class ExprElab {
 public:
  explicit ExprElab(const Scope& scope) : scope_(scope) {}

  std::optional<unsigned> self_width(const AstPtr& e) {
    switch (e->kind) {
      case Ast::Kind::Number:
        return std::nullopt;
      case Ast::Kind::Sized:
        return e->width;
      case Ast::Kind::Ident: {
        if (scope_.params.count(e->text)) return std::nullopt;
        return resolve(e)->width;
      }
      case Ast::Kind::Unary:
        if (e->text == "!") return 1u;
        return self_width(e->args[0]);
      case Ast::Kind::Binary: {
        const std::string& op = e->text;
        if (one_of(op, {"==", "!=", "<", "<=", ">", ">=", "&&", "||"})) return 1u;
        if (op == "<<" || op == ">>") return self_width(e->args[0]);
        if (auto w = self_width(e->args[0])) return w;
        return self_width(e->args[1]);
      }
      case Ast::Kind::Ternary:
        if (auto w = self_width(e->args[1])) return w;
        return self_width(e->args[2]);
      case Ast::Kind::Concat: {
        unsigned total = 0;
        for (const auto& a : e->args) {
          auto w = self_width(a);
          if (!w) throw ElabError(a->loc, "unsized literal in concatenation");
          total += *w;
        }
        return total;
      }
      case Ast::Kind::Index: {
        Rtl base = maybe_array(e->args[0]);
        if (base) return base->width;
        return 1u;
      }
      case Ast::Kind::Range: {
        unsigned hi = to_uint(e->args[1]);
        unsigned lo = to_uint(e->args[2]);
        if (lo > hi) throw ElabError(e->loc, "slice [" + std::to_string(hi) + ":" + std::to_string(lo) + "] is reversed");
        return hi - lo + 1;
      }
      case Ast::Kind::Call:
        if (e->text == "zext") {
          if (e->args.size() != 2) throw ElabError(e->loc, "zext takes (expr, width)");
          return eval_width(e->args[1], scope_.params);
        }
        throw ElabError(e->loc, "unknown function '" + e->text + "'");
    }
    return std::nullopt;
  }

  Rtl elab(const AstPtr& e, unsigned ctx) {
    unsigned w = self_width(e).value_or(ctx);
    switch (e->kind) {
      case Ast::Kind::Number:
        return literal(e, e->value, w);
      case Ast::Kind::Sized:
        return rtl::constant(BitVector(e->width, e->value), e->loc);
      case Ast::Kind::Ident: {
        if (auto it = scope_.params.find(e->text); it != scope_.params.end()) return literal(e, it->second, w);
        Rtl r = resolve(e);
        if (r->is_array()) throw ElabError(e->loc, "array '" + e->text + "' used without an index");
        return r;
      }
      case Ast::Kind::Unary: {
        if (e->text == "~") return rtl::make(RtlOp::Not, w, {elab_w(e->args[0], w)}, e->loc);
        Rtl a = to_bool(e->args[0]);
        return rtl::make(RtlOp::Not, 1, {a}, e->loc);
      }
      case Ast::Kind::Binary:
        return binary(e, w);
      case Ast::Kind::Ternary: {
        Rtl c = to_bool(e->args[0]);
        Rtl t = elab_w(e->args[1], w);
        Rtl f = elab_w(e->args[2], w);
        return rtl::ite(c, t, f, e->loc);
      }
      case Ast::Kind::Concat: {
        Rtl acc;
        for (const auto& a : e->args) {
          Rtl p = elab(a, 0);
          acc = acc ? rtl::concat(acc, p, e->loc) : p;
        }
        return acc;
      }
      case Ast::Kind::Index: {
        if (Rtl base = maybe_array(e->args[0])) {
          Rtl idx = elab_w(e->args[1], base->index_widths.front());
          Rtl r = rtl::read(base, idx, e->loc);
          if (r->is_array()) throw ElabError(e->loc, "array row used as a value; index all dimensions");
          return r;
        }
        Rtl base = elab(e->args[0], 0);
        if (!is_const_ast(e->args[1], scope_.params))
          throw ElabError(e->args[1]->loc, "bit select needs a constant index");
        unsigned k = to_uint(e->args[1]);
        if (k >= base->width)
          throw ElabError(e->loc, "bit " + std::to_string(k) + " out of range for width " + std::to_string(base->width));
        return rtl::slice(base, k, k, e->loc);
      }
      case Ast::Kind::Range: {
        Rtl base = elab(e->args[0], 0);
        unsigned hi = to_uint(e->args[1]);
        unsigned lo = to_uint(e->args[2]);
        if (lo > hi || hi >= base->width)
          throw ElabError(e->loc, "slice [" + std::to_string(hi) + ":" + std::to_string(lo) + "] out of range for width " +
                                      std::to_string(base->width));
        return rtl::slice(base, hi, lo, e->loc);
      }
      case Ast::Kind::Call: {
        unsigned n = eval_width(e->args[1], scope_.params);
        Rtl a = elab(e->args[0], 0);
        if (n < a->width) throw ElabError(e->loc, "zext to " + std::to_string(n) + " bits narrows a " +
                                                      std::to_string(a->width) + "-bit value");
        if (n == a->width) return a;
        return rtl::concat(rtl::constant(BitVector::zeros(n - a->width), e->loc), a, e->loc);
      }
    }
    throw ElabError(e->loc, "unsupported expression");
  }

  Rtl to_bool(const AstPtr& e) {
    Rtl r = elab(e, 1);
    if (r->width == 1) return r;
    Rtl z = rtl::constant(BitVector::zeros(r->width), e->loc);
    return rtl::make(RtlOp::Not, 1, {rtl::make(RtlOp::Eq, 1, {r, z}, e->loc)}, e->loc);
  }

  Rtl maybe_array(const AstPtr& e) {
    if (e->kind == Ast::Kind::Ident) {
      if (scope_.params.count(e->text)) return nullptr;
      Rtl r = resolve(e);
      return r->is_array() ? r : nullptr;
    }
    if (e->kind == Ast::Kind::Index) {
      Rtl base = maybe_array(e->args[0]);
      if (!base) return nullptr;
      Rtl idx = elab_w(e->args[1], base->index_widths.front());
      Rtl r = rtl::read(base, idx, e->loc);
      return r->is_array() ? r : nullptr;
    }
    return nullptr;
  }

 private:
  Rtl resolve(const AstPtr& e) {
    Rtl r = scope_.lookup(e->text, e->loc);
    if (!r) throw ElabError(e->loc, "undeclared name '" + e->text + "'");
    return r;
  }

  unsigned to_uint(const AstPtr& e) {
    BigUint v = eval_const(e, scope_.params);
    if (v > 1u << 20) throw ElabError(e->loc, "index too large");
    return static_cast<unsigned>(v);
  }

  Rtl literal(const AstPtr& e, const BigUint& v, unsigned w) {
    if (w == 0) throw ElabError(e->loc, "cannot infer the width of literal " + v.str());
    if (v > width_mask(w)) throw ElabError(e->loc, "literal " + v.str() + " does not fit in " + std::to_string(w) + " bits");
    return rtl::constant(BitVector(w, v), e->loc);
  }

  Rtl elab_w(const AstPtr& e, unsigned w) {
    Rtl r = elab(e, w);
    if (r->width != w)
      throw ElabError(e->loc, "width mismatch: expected " + std::to_string(w) + " bits, got " + std::to_string(r->width) +
                                  " in '" + print(e) + "'");
    return r;
  }

  Rtl binary(const AstPtr& e, unsigned w) {
    const std::string& op = e->text;
    const AstPtr& a = e->args[0];
    const AstPtr& b = e->args[1];
    SrcLoc loc = e->loc;
    if (op == "&&" || op == "||") {
      Rtl x = to_bool(a), y = to_bool(b);
      return rtl::make(op == "&&" ? RtlOp::And : RtlOp::Or, 1, {x, y}, loc);
    }
    if (one_of(op, {"==", "!=", "<", "<=", ">", ">="})) {
      auto wa = self_width(a);
      if (!wa) wa = self_width(b);
      if (!wa) throw ElabError(loc, "cannot infer operand width of '" + op + "'");
      Rtl x = elab(a, *wa), y = elab(b, *wa);
      check_same(e, x, y);
      if (op == "==") return rtl::make(RtlOp::Eq, 1, {x, y}, loc);
      if (op == "!=") return rtl::make(RtlOp::Not, 1, {rtl::make(RtlOp::Eq, 1, {x, y}, loc)}, loc);
      if (op == "<") return rtl::make(RtlOp::Ult, 1, {x, y}, loc);
      if (op == "<=") return rtl::make(RtlOp::Ule, 1, {x, y}, loc);
      if (op == ">") return rtl::make(RtlOp::Ult, 1, {y, x}, loc);
      return rtl::make(RtlOp::Ule, 1, {y, x}, loc);
    }
    if (op == "<<" || op == ">>") {
      Rtl x = elab_w(a, w);
      if (is_const_ast(b, scope_.params)) {
        BigUint k = eval_const(b, scope_.params);
        if (k >= w) return rtl::constant(BitVector::zeros(w), loc);
        return rtl::make(op == "<<" ? RtlOp::ShlConst : RtlOp::LshrConst, w, {x}, loc, static_cast<unsigned>(k));
      }
      Rtl d = elab(b, 0);
      if (d->width > w)
        throw ElabError(loc, "shift amount is wider (" + std::to_string(d->width) + ") than the shifted value (" +
                                 std::to_string(w) + ")");
      if (d->width < w) d = rtl::concat(rtl::constant(BitVector::zeros(w - d->width), loc), d, loc);
      return rtl::make(op == "<<" ? RtlOp::Shl : RtlOp::Lshr, w, {x, d}, loc);
    }
    RtlOp rop;
    if (op == "+") rop = RtlOp::Add;
    else if (op == "-") rop = RtlOp::Sub;
    else if (op == "*") rop = RtlOp::Mul;
    else if (op == "/") rop = RtlOp::Udiv;
    else if (op == "%") rop = RtlOp::Urem;
    else if (op == "&") rop = RtlOp::And;
    else if (op == "|") rop = RtlOp::Or;
    else if (op == "^") rop = RtlOp::Xor;
    else if (op == "~&") rop = RtlOp::Nand;
    else if (op == "~|") rop = RtlOp::Nor;
    else if (op == "~^" || op == "^~") rop = RtlOp::Xnor;
    else throw ElabError(loc, "unknown operator '" + op + "'");
    if (w == 0) throw ElabError(loc, "cannot infer operand width of '" + op + "'");
    Rtl x = elab(a, w), y = elab(b, w);
    check_same(e, x, y);
    return rtl::make(rop, x->width, {x, y}, loc);
  }

  void check_same(const AstPtr& e, const Rtl& x, const Rtl& y) {
    if (x->width != y->width)
      throw ElabError(e->loc, "width mismatch in '" + e->text + "': " + print(e->args[0]) + " has " +
                                  std::to_string(x->width) + " bits, " + print(e->args[1]) + " has " +
                                  std::to_string(y->width));
  }

  const Scope& scope_;
};

}  // namespace

Rtl elab_expr(const AstPtr& e, const Scope& scope, unsigned ctx_width) {
  ExprElab el(scope);
  return el.elab(e, ctx_width);
}

// ---------------------------------------------------------------------------
// Design elaboration

namespace {

struct Interval {
  unsigned word, hi, lo;
};

class DesignElab {
 public:
  DesignElab(const Design& d, const ParamOverrides& ov) : d_(d), ov_(ov) { m_.name = d.name; }

  Module run() {
    for (const auto& [k, v] : ov_) {
      bool found = false;
      for (const auto& s : d_.stmts)
        if (s.kind == Stmt::Kind::Param && s.name == k) found = true;
      if (!found) throw ElabError({}, "override of unknown parameter '" + k + "'");
    }
    scope_.params = {};
    scope_.lookup = [this](const std::string& n, SrcLoc loc) -> Rtl {
      int w = m_.find_word(n);
      if (w >= 0) return rtl::word(w, m_.words[w].width - 1, 0, loc);
      int a = m_.find_array(n);
      if (a >= 0) return rtl::array(a, m_.arrays[a].elem_width, m_.arrays[a].index_widths, loc);
      return nullptr;
    };
    for (const auto& s : d_.stmts) top_stmt(s);
    m_.params = scope_.params;
    finish();
    return std::move(m_);
  }

 private:
  void declare(const std::string& name, SrcLoc loc) {
    if (m_.find_word(name) >= 0 || m_.find_array(name) >= 0 || scope_.params.count(name))
      throw ElabError(loc, "duplicate declaration of '" + name + "'");
  }

  void add_word(const Stmt& s, WordKind kind, bool output) {
    declare(s.name, s.loc);
    Word w;
    w.name = s.name;
    w.width = eval_width(s.width, scope_.params);
    w.kind = kind;
    w.output = output;
    w.loc = s.loc;
    if (s.init) {
      BigUint v = eval_const(s.init, scope_.params);
      if (v > width_mask(w.width)) throw ElabError(s.init->loc, "initial value does not fit in " + std::to_string(w.width) + " bits");
      w.init = BitVector(w.width, v);
    }
    m_.words.push_back(std::move(w));
    m_.reg_next.push_back(nullptr);
    if (kind == WordKind::Reg) {
      unsigned id = static_cast<unsigned>(m_.words.size() - 1);
      m_.reg_next[id] = rtl::word(static_cast<int>(id), m_.words[id].width - 1, 0, s.loc);
    }
  }

  void top_stmt(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Param: {
        declare(s.name, s.loc);
        auto it = ov_.find(s.name);
        scope_.params[s.name] = it != ov_.end() ? it->second : eval_const(s.init, scope_.params);
        return;
      }
      case Stmt::Kind::Input:
        add_word(s, WordKind::Input, false);
        return;
      case Stmt::Kind::Wire:
        add_word(s, WordKind::Wire, false);
        return;
      case Stmt::Kind::Reg:
        add_word(s, WordKind::Reg, false);
        return;
      case Stmt::Kind::Output:
        if (s.width) {
          add_word(s, WordKind::Wire, true);
        } else {
          int w = m_.find_word(s.name);
          if (w < 0) throw ElabError(s.loc, "output '" + s.name + "' is not a declared word");
          m_.words[w].output = true;
        }
        return;
      case Stmt::Kind::Array: {
        declare(s.name, s.loc);
        ArrayInfo a;
        a.name = s.name;
        for (const auto& iw : s.index_widths) {
          unsigned w = eval_width(iw, scope_.params);
          if (w > 24) throw ElabError(iw->loc, "array index width above 24 bits is not supported");
          a.index_widths.push_back(w);
        }
        a.elem_width = eval_width(s.width, scope_.params);
        a.initialized = !s.uninit;
        a.loc = s.loc;
        m_.arrays.push_back(a);
        int id = static_cast<int>(m_.arrays.size() - 1);
        m_.array_next.push_back(rtl::array(id, a.elem_width, a.index_widths, s.loc));
        return;
      }
      case Stmt::Kind::Comb:
        comb(s);
        return;
      case Stmt::Kind::Seq:
      case Stmt::Kind::If:
        seq(s, nullptr);
        return;
    }
  }

  // Resolves a word lvalue to (word, hi, lo).
  Interval word_lvalue(const AstPtr& lhs) {
    const AstPtr* base = &lhs;
    unsigned hi = 0, lo = 0;
    bool sliced = false;
    if (lhs->kind == Ast::Kind::Range) {
      base = &lhs->args[0];
      hi = to_uint(lhs->args[1]);
      lo = to_uint(lhs->args[2]);
      sliced = true;
    } else if (lhs->kind == Ast::Kind::Index) {
      base = &lhs->args[0];
      hi = lo = to_uint(lhs->args[1]);
      sliced = true;
    }
    if ((*base)->kind != Ast::Kind::Ident) throw ElabError(lhs->loc, "invalid assignment target");
    int w = m_.find_word((*base)->text);
    if (w < 0) throw ElabError(lhs->loc, "undeclared word '" + (*base)->text + "'");
    unsigned width = m_.words[w].width;
    if (!sliced) {
      hi = width - 1;
      lo = 0;
    }
    if (lo > hi || hi >= width)
      throw ElabError(lhs->loc, "slice [" + std::to_string(hi) + ":" + std::to_string(lo) + "] out of range for '" +
                                    m_.words[w].name + "' (width " + std::to_string(width) + ")");
    return {static_cast<unsigned>(w), hi, lo};
  }

  unsigned to_uint(const AstPtr& e) {
    BigUint v = eval_const(e, scope_.params);
    if (v > 1u << 20) throw ElabError(e->loc, "index too large");
    return static_cast<unsigned>(v);
  }

  void comb(const Stmt& s) {
    Interval iv = word_lvalue(s.lhs);
    const Word& w = m_.words[iv.word];
    if (w.kind != WordKind::Wire)
      throw ElabError(s.loc, "'" + w.name + "' is " + (w.kind == WordKind::Reg ? "a register" : "an input") +
                                 "; only wires take combinational assignments");
    unsigned width = iv.hi - iv.lo + 1;
    ExprElab el(scope_);
    Rtl rhs = el.elab(s.rhs, width);
    if (rhs->width != width)
      throw ElabError(s.loc, "width mismatch: '" + print(s.lhs) + "' has " + std::to_string(width) + " bits, '" +
                                 print(s.rhs) + "' has " + std::to_string(rhs->width));
    for (const auto& c : m_.comb)
      if (c.word == iv.word && c.lo <= iv.hi && iv.lo <= c.hi)
        throw ElabError(s.loc, "multiple drivers for '" + w.name + "[" + std::to_string(std::min(c.hi, iv.hi)) + ":" +
                                   std::to_string(std::max(c.lo, iv.lo)) + "]' (first at " + c.loc.str() + ")");
    m_.comb.push_back({iv.word, iv.hi, iv.lo, rhs, s.loc});
  }

  Rtl and1(const Rtl& a, const Rtl& b, SrcLoc loc) {
    if (!a) return b;
    return rtl::make(RtlOp::And, 1, {a, b}, loc);
  }

  void seq(const Stmt& s, const Rtl& cond) {
    ExprElab el(scope_);
    if (s.kind == Stmt::Kind::If) {
      Rtl c = el.to_bool(s.rhs);
      for (const auto& t : s.then_body) seq(t, and1(cond, c, s.loc));
      Rtl nc = rtl::make(RtlOp::Not, 1, {c}, s.loc);
      for (const auto& t : s.else_body) seq(t, and1(cond, nc, s.loc));
      return;
    }
    if (s.kind == Stmt::Kind::Comb)
      throw ElabError(s.loc, "combinational assignment inside 'if'; use a conditional expression instead");
    if (s.kind != Stmt::Kind::Seq) throw ElabError(s.loc, "declarations must appear at top level");

    // Array element write: A[i] <= e or B[i][j] <= e.
    AstPtr root = s.lhs;
    while (root->kind == Ast::Kind::Index) root = root->args[0];
    if (root->kind == Ast::Kind::Ident && m_.find_array(root->text) >= 0) {
      array_write(s, cond, el);
      return;
    }
    Interval iv = word_lvalue(s.lhs);
    const Word& w = m_.words[iv.word];
    if (w.kind != WordKind::Reg)
      throw ElabError(s.loc, "'" + w.name + "' is not a register; use '=' for wires");
    unsigned width = iv.hi - iv.lo + 1;
    Rtl rhs = el.elab(s.rhs, width);
    if (rhs->width != width)
      throw ElabError(s.loc, "width mismatch: '" + print(s.lhs) + "' has " + std::to_string(width) + " bits, '" +
                                 print(s.rhs) + "' has " + std::to_string(rhs->width));
    Rtl& next = m_.reg_next[iv.word];
    Rtl part = cond ? rtl::ite(cond, rhs, rtl::slice(next, iv.hi, iv.lo, s.loc), s.loc) : rhs;
    next = rtl::splice(next, iv.hi, iv.lo, part, s.loc);
  }

  void array_write(const Stmt& s, const Rtl& cond, ExprElab& el) {
    std::vector<AstPtr> idx_asts;
    AstPtr cur = s.lhs;
    while (cur->kind == Ast::Kind::Index) {
      idx_asts.insert(idx_asts.begin(), cur->args[1]);
      cur = cur->args[0];
    }
    int a = m_.find_array(cur->text);
    const ArrayInfo& info = m_.arrays[a];
    if (idx_asts.size() != info.index_widths.size())
      throw ElabError(s.loc, "array '" + info.name + "' has " + std::to_string(info.index_widths.size()) +
                                 " dimensions; write needs all indices");
    std::vector<Rtl> idx;
    for (std::size_t k = 0; k < idx_asts.size(); ++k) {
      Rtl r = el.elab(idx_asts[k], info.index_widths[k]);
      if (r->width != info.index_widths[k])
        throw ElabError(idx_asts[k]->loc, "index width " + std::to_string(r->width) + " does not match " +
                                              std::to_string(info.index_widths[k]));
      idx.push_back(r);
    }
    Rtl rhs = el.elab(s.rhs, info.elem_width);
    if (rhs->width != info.elem_width)
      throw ElabError(s.loc, "element width " + std::to_string(info.elem_width) + " does not match value width " +
                                 std::to_string(rhs->width));
    Rtl& next = m_.array_next[a];
    next = write_path(next, idx, 0, rhs, cond, s.loc);
  }

  // update(A, i, update(A[i], j, ...)) for arrays of arrays.
  Rtl write_path(const Rtl& arr, const std::vector<Rtl>& idx, std::size_t k, const Rtl& val, const Rtl& cond, SrcLoc loc) {
    Rtl old = rtl::read(arr, idx[k], loc);
    Rtl elem;
    if (k + 1 == idx.size()) {
      elem = cond ? rtl::ite(cond, val, old, loc) : val;
    } else {
      elem = write_path(old, idx, k + 1, val, cond, loc);
    }
    return rtl::update(arr, idx[k], elem, loc);
  }

  void finish() {
    // Every wire bit driven exactly once.
    for (unsigned w = 0; w < m_.words.size(); ++w) {
      if (m_.words[w].kind != WordKind::Wire) continue;
      std::vector<bool> driven(m_.words[w].width, false);
      for (const auto& c : m_.comb)
        if (c.word == w)
          for (unsigned b = c.lo; b <= c.hi; ++b) driven[b] = true;
      for (unsigned b = 0; b < driven.size(); ++b)
        if (!driven[b])
          throw ElabError(m_.words[w].loc, "wire '" + m_.words[w].name + "' bit " + std::to_string(b) + " is never driven");
    }
    order_comb();
  }

  void order_comb() {
    std::size_t n = m_.comb.size();
    std::vector<std::vector<std::size_t>> users(n);
    std::vector<std::size_t> indeg(n, 0);
    std::vector<std::set<std::size_t>> deps(n);
    for (std::size_t i = 0; i < n; ++i) {
      walk(m_.comb[i].rhs, [&](const RtlNode& node) {
        if (node.op != RtlOp::Word || m_.words[node.ref].kind != WordKind::Wire) return;
        for (std::size_t j = 0; j < n; ++j) {
          const auto& c = m_.comb[j];
          if (c.word == static_cast<unsigned>(node.ref) && c.lo <= node.hi && node.lo <= c.hi) deps[i].insert(j);
        }
      });
    }
    for (std::size_t i = 0; i < n; ++i)
      for (auto j : deps[i]) {
        users[j].push_back(i);
        ++indeg[i];
      }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
      if (indeg[i] == 0) ready.push(i);
    std::vector<CombAssign> ordered;
    std::vector<bool> done(n, false);
    while (!ready.empty()) {
      std::size_t i = ready.top();
      ready.pop();
      done[i] = true;
      ordered.push_back(m_.comb[i]);
      for (auto u : users[i])
        if (--indeg[u] == 0) ready.push(u);
    }
    if (ordered.size() == n) {
      m_.comb = std::move(ordered);
      return;
    }
    // Report one cycle among the remaining assignments.
    std::size_t start = 0;
    while (done[start]) ++start;
    std::vector<std::size_t> path;
    std::vector<int> pos(n, -1);
    std::size_t cur = start;
    while (pos[cur] < 0) {
      pos[cur] = static_cast<int>(path.size());
      path.push_back(cur);
      for (auto j : deps[cur])
        if (!done[j]) {
          cur = j;
          break;
        }
    }
    std::string msg = "combinational cycle: ";
    for (std::size_t k = static_cast<std::size_t>(pos[cur]); k < path.size(); ++k)
      msg += m_.words[m_.comb[path[k]].word].name + " <- ";
    msg += m_.words[m_.comb[cur].word].name;
    throw ElabError(m_.comb[cur].loc, msg);
  }

  const Design& d_;
  const ParamOverrides& ov_;
  Module m_;
  Scope scope_;
};

}  // namespace

Module elaborate(const Design& d, const ParamOverrides& overrides) { return DesignElab(d, overrides).run(); }

}  // namespace wste
