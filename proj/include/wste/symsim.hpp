// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wste/atomize.hpp"
#include "wste/expr.hpp"
#include "wste/ir.hpp"

namespace wste {

enum class ShiftMode : std::uint8_t { StrictSound, PaperFaithful };

/// Invalid-bit encoded atom: the value is X when `inv` holds, else `val`.
struct SymAtom {
  Expr val;
  Expr inv;
};

SymAtom x_atom(ExprContext& cx, unsigned width);
SymAtom valid_atom(ExprContext& cx, Expr val);

struct Piece {
  unsigned lo = 0;
  SymAtom a;
  unsigned width() const { return a.val.width(); }
  unsigned hi() const { return lo + width() - 1; }
};

/// Word value as contiguous pieces, least significant first. Each piece is
/// all-X or fully defined.
class SymWord {
 public:
  SymWord() = default;
  explicit SymWord(std::vector<Piece> pieces);
  static SymWord of(SymAtom a) { return SymWord({Piece{0, std::move(a)}}); }

  unsigned width() const { return width_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::vector<Piece>& pieces() { return pieces_; }
  /// Interior piece boundaries (the `lo` of every piece but the first).
  std::vector<unsigned> boundaries() const;

  Expr val(ExprContext& cx) const;
  Expr val(ExprContext& cx, unsigned q, unsigned p) const;
  /// Disjunction of the invalid bits of pieces overlapping [q:p].
  Expr inv(ExprContext& cx, unsigned q, unsigned p) const;
  Expr inv(ExprContext& cx) const { return inv(cx, width_ - 1, 0); }
  SymAtom atom(ExprContext& cx, unsigned q, unsigned p) const { return {val(cx, q, p), inv(cx, q, p)}; }
  SymAtom atom(ExprContext& cx) const { return atom(cx, width_ - 1, 0); }
  /// Sub-word [q:p], keeping piece structure (pieces cut at q and p).
  SymWord slice(ExprContext& cx, unsigned q, unsigned p) const;
  static SymWord concat(const SymWord& hi, const SymWord& lo);

 private:
  std::vector<Piece> pieces_;
  unsigned width_ = 0;
};

/// Append-only constraints produced while simulating (division witnesses).
struct SideConstraints {
  std::vector<Expr> constraints;
  std::vector<Expr> witnesses;
  // not inv(b) and val(b) = 0, one per division, for the optional
  // division-by-zero reachability query.
  std::vector<Expr> div_by_zero;
};

struct TemplateEnv {
  ExprContext& cx;
  SideConstraints& side;
  ShiftMode shift_mode = ShiftMode::StrictSound;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Expr> witness_cache;

  TemplateEnv(ExprContext& c, SideConstraints& s, ShiftMode m = ShiftMode::StrictSound)
      : cx(c), side(s), shift_mode(m) {}
};

// ---------------------------------------------------------------------------
// Templates. Each returns the (val, inv) of result slice [q:p]; val follows
// the operator's concrete semantics on the val components only.

Expr inv_carry(ExprContext& cx, const SymWord& a, const SymWord& b, unsigned r, bool carry_in_one);
SymAtom t_add(ExprContext& cx, const SymWord& a, const SymWord& b, unsigned q, unsigned p);
SymAtom t_sub(ExprContext& cx, const SymWord& a, const SymWord& b, unsigned q, unsigned p);
SymAtom t_mul(ExprContext& cx, const SymWord& a, const SymWord& b, unsigned q, unsigned p);
struct DivResult {
  SymAtom quot;
  SymAtom rem;
};
DivResult t_div(TemplateEnv& env, const SymWord& a, const SymWord& b, unsigned q, unsigned p);
/// op in {Not, And, Or, Xor, Nand, Nor, Xnor}; `b` ignored for Not.
SymAtom t_bitwise(ExprContext& cx, RtlOp op, const SymWord& a, const SymWord& b, unsigned q, unsigned p);
SymAtom t_ite(ExprContext& cx, const SymWord& c, const SymWord& t, const SymWord& e, unsigned q, unsigned p);
/// op in {Eq, Ult, Ule}; 1-bit result.
SymAtom t_cmp(ExprContext& cx, RtlOp op, const SymWord& a, const SymWord& b);
SymAtom t_shift_const(ExprContext& cx, RtlOp op, const SymWord& a, unsigned k, unsigned q, unsigned p);
SymAtom t_shift(ExprContext& cx, RtlOp op, const SymWord& a, const SymWord& d, unsigned q, unsigned p, ShiftMode mode);

/// Dispatches on the RTL operator. `k` is the amount for constant shifts.
SymAtom apply_template(TemplateEnv& env, RtlOp op, std::span<const SymWord> args, unsigned q, unsigned p,
                       unsigned k = 0);

struct LubResult {
  SymAtom c;
  Expr top;  // the join is Top
};
LubResult lub(ExprContext& cx, const SymAtom& a, const SymAtom& b);

// ---------------------------------------------------------------------------
// Arrays: chain of updates over a base, with a parallel array-sorted val.

struct SymArrayNode;
using SymArray = std::shared_ptr<const SymArrayNode>;

struct SymArrayNode {
  enum class Kind : std::uint8_t { Base, Update, Select };
  Kind kind = Kind::Base;
  bool initialized = true;  // Base
  SymArray prev;            // Update: previous array; Select: parent
  SymAtom idx;              // Update, Select
  SymWord elem;             // Update of a bit-vector element
  SymArray elem_array;      // Update of a row (arrays of arrays)
  Expr val;
  std::vector<unsigned> index_widths;
  unsigned elem_width = 0;
};

Sort array_sort(std::span<const unsigned> index_widths, unsigned elem_width);
SymArray array_base(ExprContext& cx, const std::string& var_name, bool initialized,
                    std::vector<unsigned> index_widths, unsigned elem_width);
SymArray array_update(ExprContext& cx, const SymArray& a, const SymAtom& idx, const SymWord& elem);
SymArray array_update_row(ExprContext& cx, const SymArray& a, const SymAtom& idx, const SymArray& row);
SymArray array_select(ExprContext& cx, const SymArray& a, const SymAtom& idx);
/// Element read a[idx][q:p].
SymAtom array_read(ExprContext& cx, const SymArray& a, const SymAtom& idx, unsigned q, unsigned p);
Expr inv_array_read(ExprContext& cx, const SymArray& a, std::span<const SymAtom> path, unsigned q, unsigned p);

// ---------------------------------------------------------------------------
// Frame-level simulation of a module.

struct SymState {
  std::vector<SymWord> words;  // by word id; pieces are exactly the atoms
  std::vector<SymArray> arrays;
};

class Simulator {
 public:
  Simulator(TemplateEnv& env, const Module& m, const AtomMap& atoms);

  const Module& module() const { return m_; }
  const AtomMap& atoms() const { return atoms_; }
  ExprContext& cx() { return env_.cx; }

  /// Frame-0 state: registers at their init value or X, inputs and wires X,
  /// arrays at their base.
  SymState initial_state();
  SymWord x_word(unsigned word);

  /// Called for every atom as soon as its circuit value is known; returns
  /// the value to store (e.g. the lub with an antecedent).
  using Drive = std::function<SymAtom(unsigned word, unsigned atom, const SymAtom& circuit)>;

  /// Evaluates combinational assignments in order, writing wire atoms.
  void settle(SymState& s, const Drive& drive = {});
  /// Registers and arrays after the clock edge; inputs and wires are X.
  SymState next_state(const SymState& s);

  /// Evaluates `e` so that the result has piece boundaries at least at `cuts`.
  SymWord eval(const Rtl& e, const SymState& s, const std::vector<unsigned>& cuts);
  SymArray eval_array(const Rtl& e, const SymState& s);
  void clear_memo();

 private:
  SymWord eval_uncached(const Rtl& e, const SymState& s, const std::vector<unsigned>& cuts);

  TemplateEnv& env_;
  const Module& m_;
  const AtomMap& atoms_;
  std::map<std::pair<std::uint64_t, std::vector<unsigned>>, SymWord> memo_;
  std::unordered_map<std::uint64_t, SymArray> array_memo_;
};

/// Name of the array-sorted variable holding an array's frame-0 contents.
std::string array_base_name(const std::string& array);

}  // namespace wste
