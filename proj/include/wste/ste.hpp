// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wste/atomize.hpp"
#include "wste/expr.hpp"
#include "wste/ir.hpp"
#include "wste/obligation.hpp"
#include "wste/solver.hpp"
#include "wste/symsim.hpp"

namespace wste {

/// (g, a, vexpr, start, end): for t in [start, end), under g, word[hi:lo]
/// carries vexpr.
struct TrajectoryTuple {
  Expr guard;  // Bool over guard variables
  unsigned word = 0;
  unsigned hi = 0, lo = 0;
  Expr vexpr;  // width hi - lo + 1, over guard variables
  unsigned start = 0, end = 1;
  SrcLoc loc;
  std::string text;  // "name[hi:lo]" for reports
};

enum class AntFailPolicy : std::uint8_t { Report, Assume };

struct Spec {
  std::vector<Expr> vars;  // guard variables in declaration order
  Expr constr;
  std::vector<TrajectoryTuple> ants;
  std::vector<TrajectoryTuple> cons;

  unsigned frames() const;
  std::vector<Access> accesses() const;
};

/// Spec text: `var x:8;`, `constr e;`,
/// `ant (g) w[q:p] = e @ [s,e);`, `cons (g) w = e @ t;`.
Spec parse_spec(std::string_view text, const Module& m, ExprContext& cx);

/// Lowers a design expression to an Expr. `leaf` resolves Word, Var and
/// Array nodes; everything else follows the operator semantics.
class RtlLowering {
 public:
  using Leaf = std::function<Expr(const RtlNode&)>;
  RtlLowering(ExprContext& cx, Leaf leaf) : cx_(cx), leaf_(std::move(leaf)) {}
  Expr operator()(const Rtl& e);
  void clear() { memo_.clear(); }

 private:
  ExprContext& cx_;
  Leaf leaf_;
  std::unordered_map<std::uint64_t, Expr> memo_;
};

struct SteOptions {
  ShiftMode shift_mode = ShiftMode::StrictSound;
  /// Keeps the per-frame symbolic states (for inspection and tests).
  bool keep_trace = false;
};

struct SteRun {
  Obligation ob;
  AtomMap atoms;
  std::vector<SymState> trace;  // per frame, after settling
  SideConstraints side;
};

/// Atomizes the design together with the spec and builds the STE
/// obligation over `frames` frames (0 = spec.frames()).
SteRun run_ste(ExprContext& cx, const Module& m, const Spec& spec, unsigned frames = 0, const SteOptions& opt = {});

/// Word-level unrolling without invalid bits. Undriven input bits get one
/// fresh variable per input word and frame.
Obligation run_bmc(ExprContext& cx, const Module& m, const Spec& spec, unsigned frames = 0);

enum class Verdict : std::uint8_t { Pass, Fail, AntecedentFailure, Unknown };
const char* verdict_name(Verdict v);

struct CheckOptions {
  AntFailPolicy policy = AntFailPolicy::Report;
  SolverConfig solver;
  /// Called with (query name, script) for every script that is built.
  std::function<void(const std::string&, const SmtScript&)> on_script;
  /// Build the scripts but do not run the solver.
  bool dry_run = false;
  bool div_by_zero_query = false;
};

struct QueryRecord {
  std::string name;
  SatStatus status = SatStatus::Unknown;
  double seconds = 0;       // solver
  double emit_seconds = 0;  // script construction
  std::size_t assertions = 0;
};

struct VerifResult {
  Verdict verdict = Verdict::Unknown;
  bool vacuous = false;
  std::vector<std::string> warnings;
  std::string diagnostics;
  Env model;                          // guard variables, witnesses, fresh inputs
  std::vector<std::string> defaulted;  // model entries missing from the solver answer
  std::vector<std::size_t> violated;   // indices into ob.checks
  std::vector<std::size_t> antfail;    // indices into ob.antfail
  bool model_valid = true;
  std::optional<bool> div_by_zero_reachable;
  std::vector<QueryRecord> queries;
};

VerifResult check(ExprContext& cx, const Obligation& ob, const CheckOptions& opt);

/// Two-valued replay of a counterexample: antecedent-driven atoms take their
/// vexpr under the model, other inputs take the model's BMC payload (or 0),
/// uninitialized registers 0, arrays the model's base contents.
struct ReplayResult {
  std::vector<std::size_t> mismatched;  // indices into ob.checks whose value differs
  std::vector<std::vector<BitVector>> frames;
};
ReplayResult replay(const Module& m, const Spec& spec, const Obligation& ob, const Env& model);

}  // namespace wste
