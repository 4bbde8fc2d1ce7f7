// SPDX-License-Identifier: Apache-2.0

#include "wste/ste.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>

#include "wste/oracle.hpp"

namespace wste {

// ---------------------------------------------------------------------------
// Spec

unsigned Spec::frames() const {
  unsigned t = 0;
  for (const auto& a : ants) t = std::max(t, a.end);
  for (const auto& c : cons) t = std::max(t, c.end);
  return t;
}

std::vector<Access> Spec::accesses() const {
  std::vector<Access> out;
  for (const auto* list : {&ants, &cons})
    for (const auto& t : *list) out.push_back({t.word, t.hi, t.lo});
  return out;
}

Expr RtlLowering::operator()(const Rtl& e) {
  if (auto it = memo_.find(e->id); it != memo_.end()) return it->second;
  auto kid = [&](std::size_t i) { return (*this)(e->args[i]); };
  Expr r;
  switch (e->op) {
    case RtlOp::Const: r = cx_.bv(e->value); break;
    case RtlOp::Word:
    case RtlOp::Var:
    case RtlOp::Array: r = leaf_(*e); break;
    case RtlOp::Slice: r = cx_.extract(kid(0), e->hi, e->lo); break;
    case RtlOp::Concat: r = cx_.concat(kid(0), kid(1)); break;
    case RtlOp::Not: r = cx_.bvnot(kid(0)); break;
    case RtlOp::Add: r = cx_.add(kid(0), kid(1)); break;
    case RtlOp::Sub: r = cx_.sub(kid(0), kid(1)); break;
    case RtlOp::Mul: r = cx_.mul(kid(0), kid(1)); break;
    case RtlOp::Udiv: r = cx_.udiv(kid(0), kid(1)); break;
    case RtlOp::Urem: r = cx_.urem(kid(0), kid(1)); break;
    case RtlOp::And: r = cx_.bvand(kid(0), kid(1)); break;
    case RtlOp::Or: r = cx_.bvor(kid(0), kid(1)); break;
    case RtlOp::Xor: r = cx_.bvxor(kid(0), kid(1)); break;
    case RtlOp::Nand: r = cx_.bvnot(cx_.bvand(kid(0), kid(1))); break;
    case RtlOp::Nor: r = cx_.bvnot(cx_.bvor(kid(0), kid(1))); break;
    case RtlOp::Xnor: r = cx_.bvnot(cx_.bvxor(kid(0), kid(1))); break;
    case RtlOp::Shl: r = cx_.shl(kid(0), kid(1)); break;
    case RtlOp::Lshr: r = cx_.lshr(kid(0), kid(1)); break;
    case RtlOp::ShlConst: r = cx_.shl_const(kid(0), e->hi); break;
    case RtlOp::LshrConst: r = cx_.lshr_const(kid(0), e->hi); break;
    case RtlOp::Eq: r = cx_.bool_to_bv(cx_.eq(kid(0), kid(1))); break;
    case RtlOp::Ult: r = cx_.bool_to_bv(cx_.ult(kid(0), kid(1))); break;
    case RtlOp::Ule: r = cx_.bool_to_bv(cx_.ule(kid(0), kid(1))); break;
    case RtlOp::Ite: r = cx_.ite(cx_.bv_to_bool(kid(0)), kid(1), kid(2)); break;
    case RtlOp::Read: r = cx_.read(kid(0), kid(1)); break;
    case RtlOp::Update: r = cx_.update(kid(0), kid(1), kid(2)); break;
  }
  memo_.emplace(e->id, r);
  return r;
}

namespace {

Expr to_bool(ExprContext& cx, Expr v) {
  if (v.width() == 1) return cx.bv_to_bool(v);
  return cx.ne(v, cx.zeros(v.width()));
}

std::string slice_text(const Module& m, unsigned w, unsigned hi, unsigned lo) {
  const Word& word = m.words[w];
  if (hi == word.width - 1 && lo == 0) return word.name;
  if (hi == lo) return word.name + "[" + std::to_string(hi) + "]";
  return word.name + "[" + std::to_string(hi) + ":" + std::to_string(lo) + "]";
}

std::string label(const Module& m, unsigned w, unsigned hi, unsigned lo, unsigned t) {
  return slice_text(m, w, hi, lo) + "@" + std::to_string(t);
}

}  // namespace

Spec parse_spec(std::string_view text, const Module& m, ExprContext& cx) {
  Spec spec;
  spec.constr = cx.true_expr();
  std::map<std::string, Expr> vars;
  Scope scope;
  scope.params = m.params;
  scope.lookup = [&](const std::string& n, SrcLoc loc) -> Rtl {
    auto it = vars.find(n);
    if (it != vars.end()) return rtl::var(0, n, it->second.width(), loc);
    if (m.find_word(n) >= 0 || m.find_array(n) >= 0)
      throw ElabError(loc, "spec expressions may only use guard variables, '" + n + "' is a design name");
    return nullptr;
  };
  RtlLowering lower(cx, [&](const RtlNode& n) -> Expr {
    if (n.op != RtlOp::Var) throw ElabError(n.loc, "unexpected design reference in spec");
    return vars.at(n.text);
  });

  TokenStream ts(tokenize(text));
  while (!ts.at_end()) {
    SrcLoc loc = ts.peek().loc;
    if (ts.is_ident("var")) {
      ts.next();
      do {
        std::string name = ts.expect_ident();
        ts.expect(":");
        unsigned w = eval_width(ts.expression(), m.params);
        if (vars.count(name)) throw ElabError(loc, "duplicate guard variable '" + name + "'");
        if (m.find_word(name) >= 0 || m.find_array(name) >= 0 || m.params.count(name))
          throw ElabError(loc, "guard variable '" + name + "' clashes with a design name");
        Expr v = cx.var(name, Sort::bv(w));
        vars.emplace(name, v);
        spec.vars.push_back(v);
      } while (ts.accept(","));
      ts.expect(";");
    } else if (ts.is_ident("constr")) {
      ts.next();
      Expr c = to_bool(cx, lower(elab_expr(ts.expression(), scope, 0)));
      ts.expect(";");
      spec.constr = cx.land(spec.constr, c);
    } else if (ts.is_ident("ant") || ts.is_ident("cons")) {
      bool ant = ts.next().text == "ant";
      TrajectoryTuple t;
      t.loc = loc;
      t.guard = cx.true_expr();
      if (ts.accept("(")) {
        t.guard = to_bool(cx, lower(elab_expr(ts.expression(), scope, 0)));
        ts.expect(")");
      }
      SrcLoc tloc = ts.peek().loc;
      AstPtr target = ts.postfix();
      AstPtr base = target->kind == Ast::Kind::Ident ? target : target->args.at(0);
      if (base->kind != Ast::Kind::Ident) throw ParseError(tloc, "expected word or word slice");
      int w = m.find_word(base->text);
      if (w < 0) throw ElabError(tloc, "unknown word '" + base->text + "'");
      t.word = static_cast<unsigned>(w);
      const unsigned width = m.words[t.word].width;
      t.hi = width - 1;
      t.lo = 0;
      if (target->kind == Ast::Kind::Index) {
        t.hi = t.lo = static_cast<unsigned>(eval_const(target->args[1], m.params));
      } else if (target->kind == Ast::Kind::Range) {
        t.hi = static_cast<unsigned>(eval_const(target->args[1], m.params));
        t.lo = static_cast<unsigned>(eval_const(target->args[2], m.params));
      } else if (target->kind != Ast::Kind::Ident) {
        throw ParseError(tloc, "expected word or word slice");
      }
      if (t.lo > t.hi || t.hi >= width)
        throw ElabError(tloc, "slice [" + std::to_string(t.hi) + ":" + std::to_string(t.lo) + "] out of range for '" +
                                  base->text + "'");
      ts.expect("=");
      AstPtr ve = ts.expression();
      Rtl vr = elab_expr(ve, scope, t.hi - t.lo + 1);
      if (vr->width != t.hi - t.lo + 1)
        throw ElabError(ve->loc, "value has " + std::to_string(vr->width) + " bits, " + slice_text(m, t.word, t.hi, t.lo) +
                                     " has " + std::to_string(t.hi - t.lo + 1));
      t.vexpr = lower(vr);
      ts.expect("@");
      if (ts.accept("[")) {
        t.start = static_cast<unsigned>(eval_const(ts.expression(), m.params));
        ts.expect(",");
        t.end = static_cast<unsigned>(eval_const(ts.expression(), m.params));
        ts.expect(")");
      } else {
        t.start = static_cast<unsigned>(eval_const(ts.expression(), m.params));
        t.end = t.start + 1;
      }
      if (t.end < t.start + 1) throw ElabError(loc, "time interval needs end >= start + 1");
      ts.expect(";");
      t.text = slice_text(m, t.word, t.hi, t.lo);
      (ant ? spec.ants : spec.cons).push_back(std::move(t));
    } else {
      ts.fail("expected 'var', 'constr', 'ant' or 'cons'");
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// STE

SteRun run_ste(ExprContext& cx, const Module& m, const Spec& spec, unsigned frames, const SteOptions& opt) {
  const unsigned T = frames ? frames : spec.frames();
  if (T < spec.frames()) throw std::invalid_argument("spec needs " + std::to_string(spec.frames()) + " frames");
  SteRun run;
  run.atoms = atomize(m, spec.accesses());
  TemplateEnv env(cx, run.side, opt.shift_mode);
  Simulator sim(env, m, run.atoms);

  // Antecedent drive per (frame, word, atom), in tuple order.
  struct Drive {
    std::size_t tuple;
    SymAtom a;
  };
  std::map<std::tuple<unsigned, unsigned, unsigned>, std::vector<Drive>> drives;
  for (std::size_t i = 0; i < spec.ants.size(); ++i) {
    const auto& tp = spec.ants[i];
    auto atoms = run.atoms.atoms(tp.word);
    for (unsigned k = 0; k < atoms.size(); ++k) {
      if (atoms[k].lo < tp.lo || atoms[k].hi > tp.hi) continue;
      SymAtom a{cx.extract(tp.vexpr, atoms[k].hi - tp.lo, atoms[k].lo - tp.lo), cx.lnot(tp.guard)};
      for (unsigned t = tp.start; t < tp.end; ++t) drives[{t, tp.word, k}].push_back({i, a});
    }
  }

  Obligation& ob = run.ob;
  unsigned t_now = 0;
  auto apply = [&](unsigned w, unsigned k, SymAtom cur) {
    auto it = drives.find({t_now, w, k});
    if (it == drives.end()) return cur;
    for (const auto& d : it->second) {
      LubResult l = lub(cx, cur, d.a);
      if (!l.top.is_false()) {
        Atom at = run.atoms.atoms(w)[k];
        ob.antfail.push_back({label(m, w, at.hi, at.lo, t_now), d.tuple, w, at.hi, at.lo, t_now, l.top});
      }
      cur = l.c;
    }
    return cur;
  };

  std::vector<Expr> oks;
  SymState state = sim.initial_state();
  for (unsigned t = 0; t < T; ++t) {
    t_now = t;
    if (t > 0) state = sim.next_state(state);
    for (unsigned w = 0; w < m.words.size(); ++w) {
      if (m.words[w].kind == WordKind::Wire) continue;
      auto& pieces = state.words[w].pieces();
      for (unsigned k = 0; k < pieces.size(); ++k) pieces[k].a = apply(w, k, pieces[k].a);
    }
    sim.settle(state, [&](unsigned w, unsigned k, const SymAtom& c) { return apply(w, k, c); });

    for (std::size_t i = 0; i < spec.cons.size(); ++i) {
      const auto& tp = spec.cons[i];
      if (t < tp.start || t >= tp.end) continue;
      auto atoms = run.atoms.atoms(tp.word);
      for (unsigned k = 0; k < atoms.size(); ++k) {
        if (atoms[k].lo < tp.lo || atoms[k].hi > tp.hi) continue;
        const SymAtom& s = state.words[tp.word].pieces()[k].a;
        Expr want = cx.extract(tp.vexpr, atoms[k].hi - tp.lo, atoms[k].lo - tp.lo);
        Expr ok = cx.limplies(tp.guard, cx.land(cx.lnot(s.inv), cx.eq(want, s.val)));
        ob.checks.push_back({label(m, tp.word, atoms[k].hi, atoms[k].lo, t), i, tp.word, atoms[k].hi, atoms[k].lo, t, ok});
        oks.push_back(ok);
      }
    }
    if (opt.keep_trace) run.trace.push_back(state);
  }

  ob.constr = spec.constr;
  ob.side = run.side.constraints;
  ob.witnesses = run.side.witnesses;
  ob.div_by_zero = run.side.div_by_zero;
  std::vector<Expr> fails;
  for (const auto& a : ob.antfail) fails.push_back(a.cond);
  ob.no_antfail = cx.lnot(cx.lor(fails));
  ob.ok = cx.land(oks);
  ob.guard_vars = spec.vars;
  ob.frames = T;
  return run;
}

// ---------------------------------------------------------------------------
// BMC

namespace {

Expr splice_expr(ExprContext& cx, Expr base, unsigned hi, unsigned lo, Expr part) {
  unsigned w = base.width();
  std::vector<Expr> parts;
  if (hi + 1 < w) parts.push_back(cx.extract(base, w - 1, hi + 1));
  parts.push_back(part);
  if (lo > 0) parts.push_back(cx.extract(base, lo - 1, 0));
  return cx.concat(parts);
}

bool active(const TrajectoryTuple& t, unsigned frame) { return frame >= t.start && frame < t.end; }

}  // namespace

Obligation run_bmc(ExprContext& cx, const Module& m, const Spec& spec, unsigned frames) {
  const unsigned T = frames ? frames : spec.frames();
  if (T < spec.frames()) throw std::invalid_argument("spec needs " + std::to_string(spec.frames()) + " frames");
  Obligation ob;
  ob.bmc = true;
  std::vector<Expr> words(m.words.size()), arrays(m.arrays.size());
  RtlLowering lower(cx, [&](const RtlNode& n) -> Expr {
    if (n.op == RtlOp::Word) return cx.extract(words.at(n.ref), n.hi, n.lo);
    if (n.op == RtlOp::Array) return arrays.at(n.ref);
    throw std::logic_error("guard variable inside the design");
  });

  for (unsigned w = 0; w < m.words.size(); ++w) {
    const Word& word = m.words[w];
    if (word.kind == WordKind::Reg)
      words[w] = word.init ? cx.bv(*word.init) : cx.var("bmc_init!" + word.name, Sort::bv(word.width));
    else
      words[w] = cx.zeros(word.width);
  }
  for (unsigned a = 0; a < m.arrays.size(); ++a)
    arrays[a] = cx.var(array_base_name(m.arrays[a].name), array_value_sort(m.arrays[a]));

  std::vector<Expr> oks;
  auto assume = [&](const TrajectoryTuple& tp) {
    ob.side.push_back(cx.limplies(tp.guard, cx.eq(cx.extract(words[tp.word], tp.hi, tp.lo), tp.vexpr)));
  };
  for (unsigned t = 0; t < T; ++t) {
    if (t > 0) {
      std::vector<Expr> next_words(m.words.size()), next_arrays(m.arrays.size());
      for (unsigned w = 0; w < m.words.size(); ++w)
        next_words[w] = m.words[w].kind == WordKind::Reg ? lower(m.reg_next[w]) : cx.zeros(m.words[w].width);
      for (unsigned a = 0; a < m.arrays.size(); ++a) next_arrays[a] = lower(m.array_next[a]);
      words = std::move(next_words);
      arrays = std::move(next_arrays);
      lower.clear();
    }
    for (unsigned w : m.inputs()) {
      const Word& word = m.words[w];
      std::vector<bool> covered(word.width, false);
      for (const auto& tp : spec.ants)
        if (tp.word == w && active(tp, t) && tp.guard.is_true())
          for (unsigned b = tp.lo; b <= tp.hi; ++b) covered[b] = true;
      Expr v = cx.zeros(word.width);
      if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
        v = cx.var("bmc_in!" + word.name + "!" + std::to_string(t), Sort::bv(word.width));
        ob.fresh_inputs.push_back(v);
      }
      for (const auto& tp : spec.ants)
        if (tp.word == w && active(tp, t))
          v = splice_expr(cx, v, tp.hi, tp.lo, cx.ite(tp.guard, tp.vexpr, cx.extract(v, tp.hi, tp.lo)));
      words[w] = v;
    }
    for (const auto& tp : spec.ants)
      if (active(tp, t) && m.words[tp.word].kind == WordKind::Reg) assume(tp);
    for (const auto& c : m.comb) words[c.word] = splice_expr(cx, words[c.word], c.hi, c.lo, lower(c.rhs));
    for (const auto& tp : spec.ants)
      if (active(tp, t) && m.words[tp.word].kind == WordKind::Wire) assume(tp);
    for (std::size_t i = 0; i < spec.cons.size(); ++i) {
      const auto& tp = spec.cons[i];
      if (!active(tp, t)) continue;
      Expr ok = cx.limplies(tp.guard, cx.eq(cx.extract(words[tp.word], tp.hi, tp.lo), tp.vexpr));
      ob.checks.push_back({label(m, tp.word, tp.hi, tp.lo, t), i, tp.word, tp.hi, tp.lo, t, ok});
      oks.push_back(ok);
    }
  }
  ob.constr = spec.constr;
  ob.no_antfail = cx.true_expr();
  ob.ok = cx.land(oks);
  ob.guard_vars = spec.vars;
  ob.frames = T;
  return ob;
}

// ---------------------------------------------------------------------------
// Checking

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::AntecedentFailure: return "antecedent-failure";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

VerifResult check(ExprContext& cx, const Obligation& ob, const CheckOptions& opt) {
  VerifResult r;
  struct Outcome {
    SmtScript script;
    SolverAnswer ans;
  };
  auto query = [&](const std::string& name, Query q) -> std::optional<Outcome> {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o{emit(cx, ob, q), {}};
    double emit_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.on_script) opt.on_script(name, o.script);
    if (opt.dry_run) return std::nullopt;
    o.ans = solve(o.script, opt.solver);
    r.queries.push_back({name, o.ans.status, o.ans.seconds, emit_s, o.script.assertion_count});
    return o;
  };
  auto adopt_model = [&](const Outcome& o) {
    Reconstruction rec = reconstruct(o.ans, o.script, ob);
    r.model = rec.env;
    r.defaulted = rec.defaulted;
    r.violated = rec.violated;
    r.antfail = rec.antfail;
    r.model_valid = rec.valid;
    if (!rec.valid) r.warnings.push_back("solver model does not satisfy the asserted formulas");
  };
  auto unknown = [&](const Outcome& o) {
    r.verdict = Verdict::Unknown;
    r.diagnostics = o.ans.diagnostics.empty() ? "solver answered unknown" : o.ans.diagnostics;
    return r;
  };

  if (ob.constr.is_false()) {
    r.verdict = Verdict::Pass;
    r.vacuous = true;
    r.warnings.push_back("constraint is unsatisfiable; the property holds vacuously");
    return r;
  }

  if (opt.policy == AntFailPolicy::Report && !ob.antfail.empty()) {
    auto o = query("antfail", Query::AntFail);
    if (o) {
      if (o->ans.status == SatStatus::Sat) {
        r.verdict = Verdict::AntecedentFailure;
        adopt_model(*o);
        return r;
      }
      if (o->ans.status == SatStatus::Unknown) return unknown(*o);
    }
  }

  if (ob.ok.is_true()) {
    r.verdict = Verdict::Pass;
  } else {
    auto o = query("negok", Query::NegOk);
    if (!o) {
      r.verdict = Verdict::Unknown;
      r.diagnostics = "dry run: scripts written, solver not called";
      return r;
    }
    if (o->ans.status == SatStatus::Sat) {
      r.verdict = Verdict::Fail;
      adopt_model(*o);
    } else if (o->ans.status == SatStatus::Unsat) {
      r.verdict = Verdict::Pass;
      auto c = query("consistency", Query::Consistency);
      if (c && c->ans.status == SatStatus::Unsat) {
        r.vacuous = true;
        r.warnings.push_back("constraints and antecedents are unsatisfiable; the property holds vacuously");
      }
    } else {
      return unknown(*o);
    }
  }

  if (opt.div_by_zero_query && !ob.div_by_zero.empty() && !opt.dry_run) {
    auto o = query("div-by-zero", Query::DivByZero);
    if (o && o->ans.status != SatStatus::Unknown) {
      r.div_by_zero_reachable = o->ans.status == SatStatus::Sat;
      if (*r.div_by_zero_reachable) r.warnings.push_back("a valid divisor can be zero; those runs were assumed away");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Replay

ReplayResult replay(const Module& m, const Spec& spec, const Obligation& ob, const Env& model) {
  ReplayResult res;
  Evaluator ev(&model);
  auto guard = [&](const TrajectoryTuple& tp) { return ev.eval_bool(tp.guard); };
  auto lookup = [&](const std::string& name) -> const Value* {
    auto it = model.find(name);
    return it == model.end() ? nullptr : &it->second;
  };
  auto splice_bv = [](const BitVector& base, unsigned hi, unsigned lo, const BitVector& part) {
    BigUint mask = width_mask(hi - lo + 1) << lo;
    return BitVector(base.width(), (base.value() & ~mask & width_mask(base.width())) | (part.value() << lo));
  };
  auto force = [&](const TrajectoryTuple& tp, BitVector& v) {
    if (guard(tp)) v = splice_bv(v, tp.hi, tp.lo, ev.eval_bv(tp.vexpr));
  };

  ConcreteSim sim(m);
  ConcreteState s = sim.initial_state(
      [&](unsigned w) {
        if (const Value* v = lookup("bmc_init!" + m.words[w].name)) return v->as_bv();
        return BitVector::zeros(m.words[w].width);
      },
      [&](unsigned a) -> std::shared_ptr<const ArrayValue> {
        if (const Value* v = lookup(array_base_name(m.arrays[a].name))) return v->array_ptr();
        return nullptr;
      });
  for (unsigned t = 0; t < ob.frames; ++t) {
    if (t > 0) s = sim.next_state(s);
    for (unsigned w : m.inputs()) {
      const Value* v = lookup("bmc_in!" + m.words[w].name + "!" + std::to_string(t));
      s.words[w] = v ? v->as_bv() : BitVector::zeros(m.words[w].width);
    }
    for (const auto& tp : spec.ants)
      if (active(tp, t) && m.words[tp.word].kind != WordKind::Wire) force(tp, s.words[tp.word]);
    sim.settle(s, [&](unsigned w, BitVector& v) {
      for (const auto& tp : spec.ants)
        if (tp.word == w && active(tp, t)) force(tp, v);
    });
    res.frames.push_back(s.words);
  }
  for (std::size_t i = 0; i < ob.checks.size(); ++i) {
    const CheckItem& c = ob.checks[i];
    const TrajectoryTuple& tp = spec.cons[c.tuple];
    if (!guard(tp)) continue;
    BitVector want = bv_extract(ev.eval_bv(tp.vexpr), c.hi - tp.lo, c.lo - tp.lo);
    BitVector got = bv_extract(res.frames[c.frame][c.word], c.hi, c.lo);
    if (want != got) res.mismatched.push_back(i);
  }
  return res;
}

}  // namespace wste
