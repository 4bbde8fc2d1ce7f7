// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wste/expr.hpp"
#include "wste/obligation.hpp"

namespace wste {

// ---------------------------------------------------------------------------
// SMT-LIB emission

/// Valid SMT-LIB symbol for an engine name: simple symbols pass through,
/// anything else is quoted with |...|.
std::string smt_symbol(const std::string& name);

struct SmtScript {
  std::string text;
  std::map<std::string, Expr> symbols;  // SMT symbol -> declared variable
  std::vector<Expr> assertions;         // what the script asserts, for model validation
  std::size_t assertion_count = 0;
};

/// Script asserting every formula; `named` become `define-fun`s referenced
/// by name inside the assertions (`named[i].second` must appear in them).
/// `declare` lists variables declared even when no assertion mentions them.
SmtScript emit_script(std::span<const Expr> assertions,
                      std::span<const std::pair<std::string, Expr>> named = {},
                      std::span<const Expr> declare = {});

enum class Query : std::uint8_t { AntFail, NegOk, Consistency, DivByZero };

/// AntFail:     constr, side, OR antfail
/// NegOk:       constr, side, no_antfail, NOT AND ok_i (ok_i named per check)
/// Consistency: constr, side, no_antfail (vacuity probe)
/// DivByZero:   constr, side, OR div_by_zero
SmtScript emit(ExprContext& cx, const Obligation& ob, Query q);

/// Replaces widths, indices and numerals by placeholders so that scripts
/// differing only in datapath width compare equal.
std::string erase_widths(const std::string& script);

// ---------------------------------------------------------------------------
// S-expressions

struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> list;
  bool is_atom() const { return !atom.empty(); }
  std::string str() const;
};

/// Parses a sequence of top-level s-expressions.
std::vector<SExpr> parse_sexprs(std::string_view text);

// ---------------------------------------------------------------------------
// Running a solver

struct SolverConfig {
  /// Shell command; `{}` is replaced by the script path (appended if absent).
  std::string command;
  std::chrono::milliseconds timeout{60000};
};

/// `$WSTE_SOLVER` if set, else `z3 -smt2 {}`.
std::string default_solver_command();

enum class SatStatus : std::uint8_t { Sat, Unsat, Unknown };
const char* status_name(SatStatus s);

struct SolverAnswer {
  SatStatus status = SatStatus::Unknown;
  std::map<std::string, Value> model;  // SMT symbol -> value
  std::string raw;
  std::string diagnostics;
  bool timed_out = false;
  double seconds = 0;
};

SolverAnswer solve(const SmtScript& script, const SolverConfig& cfg);

/// Reads `(model ...)` / bare define-fun lists; `symbols` supplies the sorts.
std::map<std::string, Value> parse_model(const std::vector<SExpr>& defs, const std::map<std::string, Expr>& symbols);

// ---------------------------------------------------------------------------
// Models back in engine terms

struct Reconstruction {
  Env env;                             // every declared variable, by engine name
  std::vector<std::string> defaulted;  // variables missing from the model
  std::vector<std::size_t> violated;   // indices into ob.checks
  std::vector<std::size_t> antfail;    // indices into ob.antfail
  bool valid = true;                   // every assertion true under env
};

/// Demangles the model, evaluates each assertion of `script` (a validation
/// failure is counted globally) and lists failing checks / antecedent
/// conflicts.
Reconstruction reconstruct(const SolverAnswer& ans, const SmtScript& script, const Obligation& ob);

struct ValidationCounters {
  std::uint64_t validated = 0;
  std::uint64_t failures = 0;
};
ValidationCounters model_validation_counters();

}  // namespace wste
