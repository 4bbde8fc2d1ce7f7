// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wste/bitvector.hpp"

namespace wste {

struct SrcLoc {
  unsigned line = 0;
  unsigned col = 0;
  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

/// Error with a source position; `what()` is prefixed with "line:col: ".
class SourceError : public std::runtime_error {
 public:
  SourceError(SrcLoc loc, const std::string& msg) : std::runtime_error(loc.str() + ": " + msg), loc_(loc) {}
  SrcLoc loc() const { return loc_; }

 private:
  SrcLoc loc_;
};

class ParseError : public SourceError {
 public:
  using SourceError::SourceError;
};

class ElabError : public SourceError {
 public:
  using SourceError::SourceError;
};

// ---------------------------------------------------------------------------
// Lexer, shared by design, spec and stimulus readers.

enum class Tok : std::uint8_t { End, Ident, Number, Sized, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SrcLoc loc;
  BigUint value;
  unsigned width = 0;  // Sized literals only
};

std::vector<Token> tokenize(std::string_view text);

// ---------------------------------------------------------------------------
// Surface syntax

struct Ast;
using AstPtr = std::shared_ptr<const Ast>;

struct Ast {
  enum class Kind : std::uint8_t {
    Number,   // unsized decimal literal; width from context
    Sized,    // 8'hff
    Ident,
    Unary,    // text = operator
    Binary,   // text = operator
    Ternary,  // args = cond, then, else
    Concat,
    Index,    // args = base, index
    Range,    // args = base, hi, lo
    Call,     // text = callee
  };
  Kind kind = Kind::Number;
  SrcLoc loc;
  std::string text;
  BigUint value;
  unsigned width = 0;
  std::vector<AstPtr> args;
};

bool same_ast(const AstPtr& a, const AstPtr& b);

struct Stmt {
  enum class Kind : std::uint8_t { Param, Input, Output, Wire, Reg, Array, Comb, Seq, If };
  Kind kind = Kind::Param;
  SrcLoc loc;
  std::string name;
  AstPtr width;                      // Input/Output/Wire/Reg; element width for Array
  AstPtr init;                       // Reg init, Param value
  std::vector<AstPtr> index_widths;  // Array
  bool uninit = false;               // Array
  AstPtr lhs;                        // Comb/Seq
  AstPtr rhs;                        // Comb/Seq; condition for If
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
};

struct Design {
  std::string name = "top";
  std::vector<Stmt> stmts;
};

/// Recursive-descent parser for WDL. Only syntax is checked here; name
/// resolution and widths are the job of `elaborate`.
Design parse_design(std::string_view text, std::string name = "top");

std::string print(const Design& d);
std::string print(const AstPtr& e);
bool same_design(const Design& a, const Design& b);

/// Shared expression grammar, for the spec and stimulus readers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().kind == Tok::End; }
  bool is(std::string_view punct, std::size_t ahead = 0) const;
  bool is_ident(std::string_view word, std::size_t ahead = 0) const;
  bool accept(std::string_view punct);
  void expect(std::string_view punct);
  std::string expect_ident();
  [[noreturn]] void fail(const std::string& msg) const;

  AstPtr expression();
  AstPtr postfix();  // identifier followed by [..] selectors

 private:
  AstPtr ternary();
  AstPtr binary(int level);
  AstPtr unary();
  AstPtr primary();
  AstPtr selectors(AstPtr base);

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Elaborated design

enum class WordKind : std::uint8_t { Input, Wire, Reg };

struct Word {
  std::string name;
  unsigned width = 0;
  WordKind kind = WordKind::Wire;
  bool output = false;
  std::optional<BitVector> init;
  SrcLoc loc;
};

struct ArrayInfo {
  std::string name;
  std::vector<unsigned> index_widths;  // outermost first
  unsigned elem_width = 0;
  bool initialized = true;
  SrcLoc loc;
};

enum class RtlOp : std::uint8_t {
  Const,
  Word,   // ref = word id, slice [hi:lo]
  Var,    // spec guard variable; ref = var id, text = name
  Array,  // ref = array id
  Slice,  // of a non-word expression
  Concat,
  Not,
  Add,
  Sub,
  Mul,
  Udiv,
  Urem,
  And,
  Or,
  Xor,
  Nand,
  Nor,
  Xnor,
  Shl,
  Lshr,
  ShlConst,  // amount in hi
  LshrConst,
  Eq,
  Ult,
  Ule,
  Ite,
  Read,    // args = array-valued, index
  Update,  // args = array-valued, index, element (bit-vector or array-valued)
};

const char* rtl_op_name(RtlOp op);

struct RtlNode;
using Rtl = std::shared_ptr<const RtlNode>;

struct RtlNode {
  RtlOp op = RtlOp::Const;
  unsigned width = 0;                  // element width for array-valued nodes
  std::vector<unsigned> index_widths;  // remaining index dimensions, outermost first
  BitVector value;
  int ref = -1;
  std::string text;
  unsigned hi = 0;
  unsigned lo = 0;
  std::vector<Rtl> args;
  SrcLoc loc;
  std::uint64_t id = 0;

  bool is_array() const { return !index_widths.empty(); }
};

// Builders with light structural folding (slices of words and concats).
namespace rtl {
Rtl make(RtlOp op, unsigned width, std::vector<Rtl> args, SrcLoc loc = {}, unsigned hi = 0, unsigned lo = 0);
Rtl constant(const BitVector& v, SrcLoc loc = {});
Rtl word(int id, unsigned hi, unsigned lo, SrcLoc loc = {});
Rtl var(int id, const std::string& name, unsigned width, SrcLoc loc = {});
Rtl array(int id, unsigned elem_width, std::vector<unsigned> index_widths, SrcLoc loc = {});
Rtl slice(const Rtl& e, unsigned hi, unsigned lo, SrcLoc loc = {});
Rtl concat(const Rtl& hi, const Rtl& lo, SrcLoc loc = {});
Rtl ite(const Rtl& c, const Rtl& t, const Rtl& e, SrcLoc loc = {});
Rtl read(const Rtl& arr, const Rtl& idx, SrcLoc loc = {});
Rtl update(const Rtl& arr, const Rtl& idx, const Rtl& elem, SrcLoc loc = {});
/// Replaces bits [hi:lo] of `base` by `part`.
Rtl splice(const Rtl& base, unsigned hi, unsigned lo, const Rtl& part, SrcLoc loc = {});
}  // namespace rtl

/// Visits every node reachable from the root once.
void walk(const Rtl& root, const std::function<void(const RtlNode&)>& fn);

struct CombAssign {
  unsigned word = 0;
  unsigned hi = 0;
  unsigned lo = 0;
  Rtl rhs;
  SrcLoc loc;
};

/// An elaborated, width-checked design together with its transition
/// function: combinational assignments in dependency order, plus next-state
/// expressions for every register and array.
struct Module {
  std::string name;
  std::map<std::string, BigUint> params;
  std::vector<Word> words;
  std::vector<ArrayInfo> arrays;
  std::vector<CombAssign> comb;
  std::vector<Rtl> reg_next;    // by word id; null for non-registers
  std::vector<Rtl> array_next;  // by array id

  int find_word(std::string_view name) const;
  int find_array(std::string_view name) const;
  std::vector<unsigned> inputs() const;
  std::vector<unsigned> registers() const;
  std::vector<unsigned> wires() const;
};

using ParamOverrides = std::map<std::string, BigUint>;

Module elaborate(const Design& d, const ParamOverrides& overrides = {});

inline Module load_module(std::string_view text, std::string name = "top", const ParamOverrides& ov = {}) {
  return elaborate(parse_design(text, std::move(name)), ov);
}

// ---------------------------------------------------------------------------
// Expression elaboration, exposed for the spec reader.

struct Scope {
  std::map<std::string, BigUint> params;
  // Resolves a runtime identifier to a node (word, guard variable, array).
  std::function<Rtl(const std::string&, SrcLoc)> lookup;
};

BigUint eval_const(const AstPtr& e, const std::map<std::string, BigUint>& params);
unsigned eval_width(const AstPtr& e, const std::map<std::string, BigUint>& params);
/// Elaborates `e` to a bit-vector node. `ctx_width` (0 = none) sizes
/// unsized literals when the expression has no self-determined width.
Rtl elab_expr(const AstPtr& e, const Scope& scope, unsigned ctx_width);

}  // namespace wste
