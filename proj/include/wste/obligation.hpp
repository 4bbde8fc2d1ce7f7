// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "wste/expr.hpp"

namespace wste {

/// OK_{a,t} for one consequent atom and frame.
struct CheckItem {
  std::string label;  // "word[hi:lo]@t"
  std::size_t tuple = 0;
  unsigned word = 0;
  unsigned hi = 0, lo = 0;
  unsigned frame = 0;
  Expr ok;
};

/// Condition under which an antecedent and the circuit (or two antecedents)
/// force different defined values on an atom.
struct AntFailItem {
  std::string label;
  std::size_t tuple = 0;
  unsigned word = 0;
  unsigned hi = 0, lo = 0;
  unsigned frame = 0;
  Expr cond;
};

struct Obligation {
  Expr constr;
  std::vector<Expr> side;       // division witnesses, BMC assumptions
  std::vector<Expr> witnesses;  // division witness variables
  std::vector<Expr> div_by_zero;
  std::vector<AntFailItem> antfail;
  Expr no_antfail;
  std::vector<CheckItem> checks;
  Expr ok;
  std::vector<Expr> guard_vars;
  std::vector<Expr> fresh_inputs;  // BMC only
  unsigned frames = 0;
  bool bmc = false;
};

}  // namespace wste
