// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wste/expr.hpp"
#include "wste/ir.hpp"
#include "wste/symsim.hpp"

namespace wste {

// ---------------------------------------------------------------------------
// Atom-value lattice: m-bit constants, X below them, Top above.

struct LatticeValue {
  enum class Kind : std::uint8_t { Defined, X, Top };
  Kind kind = Kind::X;
  std::uint64_t v = 0;

  static LatticeValue defined(std::uint64_t v) { return {Kind::Defined, v}; }
  static LatticeValue x() { return {Kind::X, 0}; }
  static LatticeValue top() { return {Kind::Top, 0}; }
  std::string str() const;
  friend bool operator==(const LatticeValue& a, const LatticeValue& b) {
    return a.kind == b.kind && (a.kind != Kind::Defined || a.v == b.v);
  }
};

bool leq(const LatticeValue& a, const LatticeValue& b);
LatticeValue join(const LatticeValue& a, const LatticeValue& b);
/// All 2^m + 2 elements of the m-bit atom lattice.
std::vector<LatticeValue> atom_lattice(unsigned m);

/// Product lattice over atoms of the given widths, with a single Top.
/// Level i holds the states with exactly i defined atoms; Top is level r+1.
struct LatticeStats {
  unsigned height = 0;
  BigUint size;
  std::vector<BigUint> level_sizes;
  friend bool operator==(const LatticeStats&, const LatticeStats&) = default;
};

LatticeStats lattice_stats(std::span<const unsigned> widths);
/// Brute force: builds every element and measures chains via the order.
LatticeStats enumerate_lattice(std::span<const unsigned> widths);

// ---------------------------------------------------------------------------
// Exact X propagation by concretization.

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TernaryWord {
  unsigned width = 0;
  std::uint64_t val = 0;
  std::uint64_t xmask = 0;  // set bits are X

  static TernaryWord of(unsigned w, std::uint64_t v);
  static TernaryWord all_x(unsigned w);
  bool defined() const { return xmask == 0; }
  TernaryWord slice(unsigned q, unsigned p) const;
  std::string str() const;  // msb first, 'X' for unknown bits
  friend bool operator==(const TernaryWord& a, const TernaryWord& b) {
    return a.width == b.width && a.xmask == b.xmask && ((a.val ^ b.val) & ~a.xmask) == 0;
  }
};

inline std::uint64_t mask64(unsigned w) { return w >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1; }

/// Concrete semantics of an RTL operator on words of at most 64 bits.
/// `widths` are the operand widths; `k` is the constant shift amount.
std::uint64_t concrete_op(RtlOp op, std::span<const std::uint64_t> args, std::span<const unsigned> widths,
                          unsigned k = 0);
unsigned result_width(RtlOp op, std::span<const unsigned> widths);

/// Result of `op` where a bit is X iff two concretizations of the operands'
/// X bits disagree on it. Concretizations that divide by zero are ignored;
/// nullopt when none remain.
std::optional<TernaryWord> eval_exact(RtlOp op, std::span<const TernaryWord> args, unsigned k = 0,
                                      unsigned budget = 12);

// ---------------------------------------------------------------------------
// Straight-line uint64 evaluator for expression DAGs whose bit-vectors are at
// most 64 bits wide. Arrays with bit-vector elements are packed when all
// entries fit in 64 bits.

class Tape {
 public:
  Tape(std::span<const Expr> inputs, std::span<const Expr> roots);
  /// `in` follows the order of `inputs`; `out` the order of `roots`.
  void run(const std::uint64_t* in, std::uint64_t* out, std::vector<std::uint64_t>& scratch) const;
  std::size_t size() const { return code_.size(); }

 private:
  struct Ins {
    Op op;
    unsigned width;  // result width (bits of the packed value for arrays)
    unsigned ew;     // element width for array reads/updates
    std::uint32_t a, b, c;
    unsigned p0, p1;
    std::uint64_t k;  // constant value
  };
  std::vector<Ins> code_;
  std::vector<std::uint32_t> input_slots_;
  std::vector<std::uint32_t> root_slots_;
};

// ---------------------------------------------------------------------------
// Template soundness sweep.

struct SoundnessReport {
  std::string op;
  unsigned width = 0;
  std::uint64_t configs = 0;          // operand configurations examined
  std::uint64_t checks = 0;           // (configuration, slice, witness) triples
  std::uint64_t violations = 0;       // inv false but oracle X or value differs
  std::uint64_t exact_mismatches = 0;  // all operands valid, val differs from concrete
  std::uint64_t imprecise = 0;        // all operands valid yet inv not false
  std::vector<std::string> samples;   // first few violations, one line each
};

/// Exhaustive over operand atomizations, payloads and inv flags for
/// `op` at width m. Constant shifts sweep every amount 0..m; Concat sweeps
/// every split of m; Slice is extract from an m-bit operand.
SoundnessReport check_template_soundness(RtlOp op, unsigned m, ShiftMode mode = ShiftMode::StrictSound,
                                         bool parallel = true);
/// Reads through update chains (up to `max_updates`) on 2-entry arrays with
/// m-bit elements, initialized or not.
SoundnessReport check_array_soundness(unsigned m, unsigned max_updates, bool parallel = true);

// ---------------------------------------------------------------------------
// Concrete two-valued simulation.

struct ConcreteState {
  std::vector<BitVector> words;
  std::vector<std::shared_ptr<const ArrayValue>> arrays;
};

class ConcreteSim {
 public:
  explicit ConcreteSim(const Module& m) : m_(m) {}

  /// Registers without init take `reg_value(word)` (default 0); arrays take
  /// `array_value(id)` (default all zero).
  ConcreteState initial_state(const std::function<BitVector(unsigned)>& reg_value = {},
                              const std::function<std::shared_ptr<const ArrayValue>(unsigned)>& array_value = {});
  /// Called after a word has been (partly) written by a comb assignment;
  /// may overwrite bits.
  using Force = std::function<void(unsigned word, BitVector& value)>;
  void settle(ConcreteState& s, const Force& force = {});
  ConcreteState next_state(const ConcreteState& s);

  BitVector eval(const Rtl& e, const ConcreteState& s);
  Value eval_array(const Rtl& e, const ConcreteState& s);

 private:
  const Module& m_;
  std::unordered_map<std::uint64_t, BitVector> memo_;
  std::unordered_map<std::uint64_t, Value> array_memo_;
};

Sort array_value_sort(const ArrayInfo& a);

/// A word value with unknown bits, of any width.
struct XValue {
  BitVector val;
  BitVector xmask;
  std::string str() const;  // hex when fully known, else binary with X
};

struct XTrace {
  std::vector<std::vector<XValue>> frames;  // frames[t][word]
};

/// Exact X simulation: every X bit of the stimulus and of uninitialized
/// registers is enumerated (at most `budget` bits in total).
/// `stimulus[t][input]` gives the input value for frame t (missing: all X).
XTrace simulate_x(const Module& m, const std::vector<std::map<unsigned, XValue>>& stimulus, unsigned frames,
                  unsigned budget = 12, bool parallel = true);

}  // namespace wste
