// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "wste/bitvector.hpp"

namespace wste {

class Sort {
 public:
  enum class Kind : std::uint8_t { BitVec, Bool, Array };

  static Sort bv(unsigned width);
  static Sort boolean();
  static Sort array(unsigned index_width, const Sort& element);

  Kind kind() const { return kind_; }
  bool is_bv() const { return kind_ == Kind::BitVec; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_array() const { return kind_ == Kind::Array; }
  unsigned width() const { return width_; }
  unsigned index_width() const { return index_width_; }
  const Sort& element() const { return *element_; }

  /// SMT-LIB rendering, e.g. `(_ BitVec 8)`.
  std::string to_string() const;
  std::size_t hash() const;

  friend bool operator==(const Sort& a, const Sort& b);
  friend bool operator!=(const Sort& a, const Sort& b) { return !(a == b); }

 private:
  Kind kind_ = Kind::Bool;
  unsigned width_ = 0;
  unsigned index_width_ = 0;
  std::shared_ptr<const Sort> element_;
};

enum class Op : std::uint8_t {
  BvConst,
  BoolConst,
  Var,
  Add,
  Sub,
  Mul,
  Udiv,
  Urem,
  Concat,
  Extract,
  BvNot,
  BvAnd,
  BvOr,
  BvXor,
  Shl,
  Lshr,
  ShlConst,
  LshrConst,
  Eq,
  Ult,
  Ule,
  Ite,
  Not,
  And,
  Or,
  Read,
  Update,
};

const char* op_name(Op op);

/// Raised when an operator is applied to operands of the wrong sort.
class SortError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when evaluation hits an unbound variable or an ill-formed value.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Node;

/// Handle to a hash-consed node. Two handles compare equal iff they refer
/// to the same node, which (within one context) means structural equality.
class Expr {
 public:
  Expr() = default;

  explicit operator bool() const { return node_ != nullptr; }
  std::uint32_t id() const;
  Op op() const;
  const Sort& sort() const;
  unsigned width() const;
  std::span<const Expr> children() const;
  Expr child(std::size_t i) const { return children()[i]; }
  std::size_t num_children() const { return children().size(); }

  // Extract bounds; ShlConst/LshrConst store the amount in hi().
  unsigned hi() const;
  unsigned lo() const;

  const BitVector& bv_value() const;
  bool bool_value() const;
  const std::string& name() const;

  bool is_const() const;
  bool is_true() const;
  bool is_false() const;

  friend bool operator==(Expr a, Expr b) { return a.node_ == b.node_; }
  friend bool operator!=(Expr a, Expr b) { return a.node_ != b.node_; }
  friend bool operator<(Expr a, Expr b) { return a.id() < b.id(); }

 private:
  friend class ExprContext;
  explicit Expr(const Node* n) : node_(n) {}
  const Node* node_ = nullptr;
};

struct Node {
  std::uint32_t id = 0;
  Op op = Op::BoolConst;
  Sort sort;
  std::vector<Expr> children;
  unsigned p0 = 0;
  unsigned p1 = 0;
  BitVector value;
  bool flag = false;
  std::string name;
};

inline std::uint32_t Expr::id() const { return node_->id; }
inline Op Expr::op() const { return node_->op; }
inline const Sort& Expr::sort() const { return node_->sort; }
inline unsigned Expr::width() const { return node_->sort.width(); }
inline std::span<const Expr> Expr::children() const { return node_->children; }
inline unsigned Expr::hi() const { return node_->p0; }
inline unsigned Expr::lo() const { return node_->p1; }
inline const BitVector& Expr::bv_value() const { return node_->value; }
inline bool Expr::bool_value() const { return node_->flag; }
inline const std::string& Expr::name() const { return node_->name; }
inline bool Expr::is_const() const { return node_->op == Op::BvConst || node_->op == Op::BoolConst; }
inline bool Expr::is_true() const { return node_->op == Op::BoolConst && node_->flag; }
inline bool Expr::is_false() const { return node_->op == Op::BoolConst && !node_->flag; }

struct ExprHash {
  std::size_t operator()(Expr e) const { return e.id(); }
};

/// Owns every node. Construction goes through `mk`, which sort-checks,
/// applies one bottom-up simplification step and interns the result.
/// A context is not thread-safe; finished DAGs may be read concurrently.
class ExprContext {
 public:
  ExprContext();
  ExprContext(const ExprContext&) = delete;
  ExprContext& operator=(const ExprContext&) = delete;

  Expr mk(Op op, std::span<const Expr> kids, unsigned p0 = 0, unsigned p1 = 0);
  Expr mk(Op op, std::initializer_list<Expr> kids, unsigned p0 = 0, unsigned p1 = 0) {
    return mk(op, std::span<const Expr>(kids.begin(), kids.size()), p0, p1);
  }

  Expr bv(const BitVector& v);
  Expr bv(unsigned width, const BigUint& v) { return bv(BitVector(width, v)); }
  Expr bv_u64(unsigned width, std::uint64_t v) { return bv(BitVector::from_u64(width, v)); }
  Expr zeros(unsigned width) { return bv(BitVector::zeros(width)); }
  Expr ones(unsigned width) { return bv(BitVector::ones(width)); }
  Expr boolean(bool b) { return b ? true_ : false_; }
  Expr true_expr() const { return true_; }
  Expr false_expr() const { return false_; }

  /// Returns the unique variable with this name; re-declaring with another
  /// sort is a SortError.
  Expr var(const std::string& name, const Sort& sort);
  /// A variable whose name is guaranteed not to clash with earlier ones.
  Expr fresh_var(const std::string& prefix, const Sort& sort);
  const std::map<std::string, Expr>& vars() const { return vars_; }

  Expr add(Expr a, Expr b) { return mk(Op::Add, {a, b}); }
  Expr sub(Expr a, Expr b) { return mk(Op::Sub, {a, b}); }
  Expr mul(Expr a, Expr b) { return mk(Op::Mul, {a, b}); }
  Expr udiv(Expr a, Expr b) { return mk(Op::Udiv, {a, b}); }
  Expr urem(Expr a, Expr b) { return mk(Op::Urem, {a, b}); }
  Expr concat(Expr hi, Expr lo) { return mk(Op::Concat, {hi, lo}); }
  /// Most-significant part first.
  Expr concat(std::span<const Expr> parts);
  Expr extract(Expr e, unsigned hi, unsigned lo) { return mk(Op::Extract, {e}, hi, lo); }
  Expr zext(Expr e, unsigned width);
  Expr bvnot(Expr a) { return mk(Op::BvNot, {a}); }
  Expr bvand(Expr a, Expr b) { return mk(Op::BvAnd, {a, b}); }
  Expr bvor(Expr a, Expr b) { return mk(Op::BvOr, {a, b}); }
  Expr bvxor(Expr a, Expr b) { return mk(Op::BvXor, {a, b}); }
  Expr shl(Expr a, Expr d) { return mk(Op::Shl, {a, d}); }
  Expr lshr(Expr a, Expr d) { return mk(Op::Lshr, {a, d}); }
  Expr shl_const(Expr a, unsigned k) { return mk(Op::ShlConst, {a}, k); }
  Expr lshr_const(Expr a, unsigned k) { return mk(Op::LshrConst, {a}, k); }
  /// 1 << i, at the width of i.
  Expr pow2(Expr i) { return shl(bv_u64(i.width(), 1), i); }
  Expr eq(Expr a, Expr b) { return mk(Op::Eq, {a, b}); }
  Expr ne(Expr a, Expr b) { return lnot(eq(a, b)); }
  Expr ult(Expr a, Expr b) { return mk(Op::Ult, {a, b}); }
  Expr ule(Expr a, Expr b) { return mk(Op::Ule, {a, b}); }
  Expr ugt(Expr a, Expr b) { return ult(b, a); }
  Expr uge(Expr a, Expr b) { return ule(b, a); }
  Expr ite(Expr c, Expr t, Expr e) { return mk(Op::Ite, {c, t, e}); }
  Expr lnot(Expr a) { return mk(Op::Not, {a}); }
  Expr land(Expr a, Expr b) { return mk(Op::And, {a, b}); }
  Expr lor(Expr a, Expr b) { return mk(Op::Or, {a, b}); }
  Expr limplies(Expr a, Expr b) { return lor(lnot(a), b); }
  Expr land(std::span<const Expr> xs);
  Expr lor(std::span<const Expr> xs);
  Expr read(Expr arr, Expr idx) { return mk(Op::Read, {arr, idx}); }
  Expr update(Expr arr, Expr idx, Expr elem) { return mk(Op::Update, {arr, idx, elem}); }
  /// 1-bit vector from a boolean: ite(b, #b1, #b0).
  Expr bool_to_bv(Expr b) { return ite(b, bv_u64(1, 1), bv_u64(1, 0)); }
  /// Boolean from a 1-bit vector: (v = #b1).
  Expr bv_to_bool(Expr v);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Key {
    Op op;
    unsigned p0;
    unsigned p1;
    std::vector<std::uint32_t> kids;
    BitVector value;
    bool flag;
    std::string name;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  Sort check_sort(Op op, std::span<const Expr> kids, unsigned p0, unsigned p1) const;
  Expr simplify(Op op, std::span<const Expr> kids, unsigned p0, unsigned p1, const Sort& sort);
  Expr intern(Op op, const Sort& sort, std::vector<Expr> kids, unsigned p0, unsigned p1,
              BitVector value = {}, bool flag = false, std::string name = {});

  std::deque<Node> nodes_;
  std::unordered_map<Key, const Node*, KeyHash> table_;
  std::map<std::string, Expr> vars_;
  unsigned fresh_counter_ = 0;
  Expr true_;
  Expr false_;
};

class ArrayValue;

/// Concrete value of any sort.
class Value {
 public:
  Value() = default;
  Value(bool b) : v_(b) {}  // NOLINT
  Value(BitVector bv) : v_(std::move(bv)) {}  // NOLINT
  Value(std::shared_ptr<const ArrayValue> a) : v_(std::move(a)) {}  // NOLINT

  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_bv() const { return std::holds_alternative<BitVector>(v_); }
  bool is_array() const { return std::holds_alternative<std::shared_ptr<const ArrayValue>>(v_); }
  bool as_bool() const;
  const BitVector& as_bv() const;
  const ArrayValue& as_array() const;
  const std::shared_ptr<const ArrayValue>& array_ptr() const;

  std::string to_string() const;

 private:
  std::variant<bool, BitVector, std::shared_ptr<const ArrayValue>> v_{false};
};

bool operator==(const Value& a, const Value& b);

/// Array value: a base function over indices plus explicit stores.
/// Extensional equality is never needed by evaluation, so the base may be
/// an arbitrary function (e.g. a solver model's lambda).
class ArrayValue {
 public:
  using BaseFn = std::function<Value(const BitVector&)>;

  ArrayValue(Sort sort, BaseFn base) : sort_(std::move(sort)), base_(std::move(base)) {}
  static std::shared_ptr<const ArrayValue> constant(const Sort& sort, Value dflt);

  const Sort& sort() const { return sort_; }
  Value read(const BitVector& idx) const;
  std::shared_ptr<const ArrayValue> store(const BitVector& idx, Value v) const;
  const std::map<BigUint, Value>& stores() const { return stores_; }

 private:
  Sort sort_;
  BaseFn base_;
  std::map<BigUint, Value> stores_;
};

using Env = std::unordered_map<std::string, Value>;

/// Applies the concrete semantics of one operator to evaluated operands.
Value apply_op(Op op, std::span<const Value> args, unsigned p0, unsigned p1);

/// Memoizing evaluator; reusable across environments via `reset`.
class Evaluator {
 public:
  explicit Evaluator(const Env* env = nullptr) : env_(env) {}
  void reset(const Env* env);
  Value eval(Expr e);
  bool eval_bool(Expr e) { return eval(e).as_bool(); }
  BitVector eval_bv(Expr e) { return eval(e).as_bv(); }

 private:
  const Env* env_;
  std::vector<Value> memo_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 1;
};

Value eval(Expr e, const Env& env);

/// Free variables reachable from the roots, ordered by name.
std::vector<Expr> free_vars(std::span<const Expr> roots);
inline std::vector<Expr> free_vars(Expr e) { return free_vars(std::span<const Expr>(&e, 1)); }

/// Debug rendering in SMT-LIB-like prefix syntax (no sharing).
std::string to_string(Expr e);

/// Number of distinct nodes reachable from the roots.
std::size_t dag_size(std::span<const Expr> roots);

}  // namespace wste
