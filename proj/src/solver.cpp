// SPDX-License-Identifier: Apache-2.0

#include "wste/solver.hpp"

#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace wste {

// ---------------------------------------------------------------------------
// Emission

namespace {

const std::unordered_set<std::string>& reserved_words() {
  static const std::unordered_set<std::string> words{
      "_",          "!",         "as",        "let",         "exists",      "forall",     "match",
      "par",        "assert",    "check-sat", "declare-fun", "define-fun",  "push",       "pop",
      "set-logic",  "get-model", "exit",      "true",        "false",       "not",        "and",
      "or",         "ite",       "select",    "store",       "concat",      "distinct",   "BINARY",
      "DECIMAL",    "HEXADECIMAL", "NUMERAL", "STRING",      "set-option",  "get-value",  "lambda"};
  return words;
}

bool simple_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || std::strchr("~!@$%^&*_-+=<>.?/", c) != nullptr;
}

const char* smt_op(Op op) {
  switch (op) {
    case Op::Add: return "bvadd";
    case Op::Sub: return "bvsub";
    case Op::Mul: return "bvmul";
    case Op::Udiv: return "bvudiv";
    case Op::Urem: return "bvurem";
    case Op::Concat: return "concat";
    case Op::BvNot: return "bvnot";
    case Op::BvAnd: return "bvand";
    case Op::BvOr: return "bvor";
    case Op::BvXor: return "bvxor";
    case Op::Shl:
    case Op::ShlConst: return "bvshl";
    case Op::Lshr:
    case Op::LshrConst: return "bvlshr";
    case Op::Eq: return "=";
    case Op::Ult: return "bvult";
    case Op::Ule: return "bvule";
    case Op::Ite: return "ite";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Read: return "select";
    case Op::Update: return "store";
    default: return nullptr;
  }
}

std::string bv_literal(const BitVector& v) { return "(_ bv" + v.to_decimal() + " " + std::to_string(v.width()) + ")"; }

class Printer {
 public:
  explicit Printer(const std::unordered_map<std::uint32_t, std::string>& names) : names_(names) {}

  std::string operator()(Expr e) const {
    std::string out;
    render(e, out, true);
    return out;
  }

  void render(Expr e, std::string& out, bool top) const {
    if (!top) {
      if (auto it = names_.find(e.id()); it != names_.end()) {
        out += it->second;
        return;
      }
    }
    switch (e.op()) {
      case Op::Var: out += smt_symbol(e.name()); return;
      case Op::BvConst: out += bv_literal(e.bv_value()); return;
      case Op::BoolConst: out += e.bool_value() ? "true" : "false"; return;
      case Op::Extract:
        out += "((_ extract " + std::to_string(e.hi()) + " " + std::to_string(e.lo()) + ") ";
        render(e.child(0), out, false);
        out += ")";
        return;
      case Op::ShlConst:
      case Op::LshrConst:
        out += "(";
        out += smt_op(e.op());
        out += " ";
        render(e.child(0), out, false);
        out += " " + bv_literal(BitVector::from_u64(e.width(), e.hi())) + ")";
        return;
      default: break;
    }
    out += "(";
    out += smt_op(e.op());
    for (Expr c : e.children()) {
      out += " ";
      render(c, out, false);
    }
    out += ")";
  }

 private:
  const std::unordered_map<std::uint32_t, std::string>& names_;
};

}  // namespace

std::string smt_symbol(const std::string& name) {
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0])) && !reserved_words().count(name);
  for (char c : name) simple = simple && simple_symbol_char(c);
  if (simple) return name;
  std::string q = "|";
  for (char c : name) q += (c == '|' || c == '\\') ? '_' : c;
  return q + "|";
}

SmtScript emit_script(std::span<const Expr> assertions, std::span<const std::pair<std::string, Expr>> named,
                      std::span<const Expr> declare) {
  SmtScript s;
  std::vector<Expr> roots;
  for (const auto& [n, e] : named) roots.push_back(e);
  for (Expr a : assertions)
    if (!a.is_true()) roots.push_back(a);

  // Parent counts and a deterministic post-order over all roots.
  std::unordered_map<std::uint32_t, unsigned> refs;
  std::vector<Expr> post;
  {
    std::unordered_set<std::uint32_t> seen;
    std::vector<std::pair<Expr, std::size_t>> stack;
    for (Expr r : roots) {
      if (seen.count(r.id())) continue;
      stack.push_back({r, 0});
      seen.insert(r.id());
      while (!stack.empty()) {
        auto& [e, i] = stack.back();
        if (i < e.num_children()) {
          Expr c = e.child(i++);
          ++refs[c.id()];
          if (seen.insert(c.id()).second) stack.push_back({c, 0});
        } else {
          post.push_back(e);
          stack.pop_back();
        }
      }
    }
  }

  std::unordered_map<std::uint32_t, std::string> names;
  for (const auto& [n, e] : named) names.emplace(e.id(), n);
  unsigned next = 0;
  std::vector<std::pair<std::string, Expr>> defs;
  for (Expr e : post) {
    bool leaf = e.op() == Op::Var || e.is_const();
    if (auto it = names.find(e.id()); it != names.end()) {
      defs.push_back({it->second, e});
    } else if (!leaf && refs[e.id()] >= 2) {
      std::string n = "_t" + std::to_string(next++);
      names.emplace(e.id(), n);
      defs.push_back({n, e});
    }
  }
  // Named roots that are leaves or repeated still need a definition.
  for (const auto& [n, e] : named) {
    bool found = false;
    for (const auto& d : defs) found = found || d.first == n;
    if (!found) defs.push_back({n, e});
  }

  std::ostringstream out;
  out << "(set-logic QF_ABV)\n(set-option :produce-models true)\n";
  std::vector<Expr> decls = free_vars(roots);
  {
    std::unordered_set<std::uint32_t> have;
    for (Expr v : decls) have.insert(v.id());
    for (Expr v : declare)
      if (have.insert(v.id()).second) decls.push_back(v);
  }
  for (Expr v : decls) {
    std::string sym = smt_symbol(v.name());
    s.symbols.emplace(sym, v);
    out << "(declare-fun " << sym << " () " << v.sort().to_string() << ")\n";
  }
  Printer print(names);
  for (const auto& [n, e] : defs) {
    // Render the body, not the name being defined.
    out << "(define-fun " << n << " () " << e.sort().to_string() << " ";
    std::string body;
    if (names.at(e.id()) == n)
      print.render(e, body, true);
    else
      body = names.at(e.id());
    out << body << ")\n";
  }
  for (Expr a : assertions) {
    if (a.is_true()) continue;
    out << "(assert " << (names.count(a.id()) ? names.at(a.id()) : print(a)) << ")\n";
    s.assertions.push_back(a);
  }
  out << "(check-sat)\n(get-model)\n";
  s.text = out.str();
  s.assertion_count = s.assertions.size();
  return s;
}

SmtScript emit(ExprContext& cx, const Obligation& ob, Query q) {
  std::vector<Expr> as{ob.constr};
  as.insert(as.end(), ob.side.begin(), ob.side.end());
  std::vector<std::pair<std::string, Expr>> named;
  switch (q) {
    case Query::AntFail: {
      std::vector<Expr> conds;
      for (const auto& a : ob.antfail) conds.push_back(a.cond);
      as.push_back(cx.lor(conds));
      break;
    }
    case Query::NegOk: {
      as.push_back(ob.no_antfail);
      std::vector<Expr> oks;
      for (std::size_t i = 0; i < ob.checks.size(); ++i) {
        named.push_back({"ok_" + std::to_string(i), ob.checks[i].ok});
        oks.push_back(ob.checks[i].ok);
      }
      as.push_back(cx.lnot(cx.land(oks)));
      break;
    }
    case Query::Consistency: as.push_back(ob.no_antfail); break;
    case Query::DivByZero: as.push_back(cx.lor(ob.div_by_zero)); break;
  }
  // Fresh BMC inputs are declared even outside the cone of influence so the
  // script shows one per undriven input and frame.
  return emit_script(as, named, ob.fresh_inputs);
}

std::string erase_widths(const std::string& script) {
  static const std::regex bv_sort(R"(\(_ BitVec \d+\))");
  static const std::regex bv_lit(R"(\(_ bv\d+ \d+\))");
  static const std::regex extract(R"(\(_ extract \d+ \d+\))");
  std::string s = std::regex_replace(script, bv_sort, "(_ BitVec W)");
  s = std::regex_replace(s, bv_lit, "(_ bvN W)");
  s = std::regex_replace(s, extract, "(_ extract H L)");
  return s;
}

// ---------------------------------------------------------------------------
// S-expressions

std::string SExpr::str() const {
  if (is_atom()) return atom;
  std::string s = "(";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) s += " ";
    s += list[i].str();
  }
  return s + ")";
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::vector<SExpr> top;
  std::vector<SExpr> stack;
  std::size_t i = 0;
  auto push = [&](SExpr e) {
    if (stack.empty())
      top.push_back(std::move(e));
    else
      stack.back().list.push_back(std::move(e));
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      stack.emplace_back();
      ++i;
    } else if (c == ')') {
      if (stack.empty()) throw std::runtime_error("unbalanced ')' in solver output");
      SExpr e = std::move(stack.back());
      stack.pop_back();
      push(std::move(e));
      ++i;
    } else if (c == '|' || c == '"') {
      std::size_t j = text.find(c, i + 1);
      if (j == std::string_view::npos) throw std::runtime_error("unterminated quoted symbol in solver output");
      push(SExpr{std::string(text.substr(i, j - i + 1)), {}});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')')
        ++j;
      push(SExpr{std::string(text.substr(i, j - i)), {}});
      i = j;
    }
  }
  if (!stack.empty()) throw std::runtime_error("unbalanced '(' in solver output");
  return top;
}

// ---------------------------------------------------------------------------
// Model values

namespace {

struct FunDef {
  std::vector<std::string> params;
  SExpr body;
};
using FunTable = std::map<std::string, FunDef>;
using Bindings = std::map<std::string, Value>;

Sort parse_sort(const SExpr& s) {
  if (s.is_atom() && s.atom == "Bool") return Sort::boolean();
  if (!s.is_atom() && s.list.size() == 3 && s.list[0].atom == "_" && s.list[1].atom == "BitVec")
    return Sort::bv(static_cast<unsigned>(std::stoul(s.list[2].atom)));
  if (!s.is_atom() && s.list.size() == 3 && s.list[0].atom == "Array") {
    Sort idx = parse_sort(s.list[1]);
    return Sort::array(idx.width(), parse_sort(s.list[2]));
  }
  throw std::runtime_error("unsupported sort in model: " + s.str());
}

BitVector parse_bv_atom(const std::string& a) {
  if (a.rfind("#b", 0) == 0) {
    BigUint v = 0;
    for (char c : a.substr(2)) v = v * 2 + (c == '1');
    return BitVector(static_cast<unsigned>(a.size() - 2), v);
  }
  if (a.rfind("#x", 0) == 0) {
    BigUint v = 0;
    for (char c : a.substr(2)) v = v * 16 + std::stoi(std::string(1, c), nullptr, 16);
    return BitVector(static_cast<unsigned>(4 * (a.size() - 2)), v);
  }
  throw std::runtime_error("not a bit-vector literal: " + a);
}

Value eval_model_term(const SExpr& t, const Bindings& env, std::shared_ptr<const FunTable> funs);

Value apply_fun(const FunDef& f, std::vector<Value> args, std::shared_ptr<const FunTable> funs) {
  Bindings b;
  for (std::size_t i = 0; i < f.params.size() && i < args.size(); ++i) b[f.params[i]] = std::move(args[i]);
  return eval_model_term(f.body, b, std::move(funs));
}

std::shared_ptr<const ArrayValue> array_from_fun(const Sort& sort, FunDef f, std::shared_ptr<const FunTable> funs) {
  return std::make_shared<ArrayValue>(sort, [f = std::move(f), funs](const BitVector& idx) {
    return apply_fun(f, {Value(idx)}, funs);
  });
}

Value eval_model_term(const SExpr& t, const Bindings& env, std::shared_ptr<const FunTable> funs) {
  if (t.is_atom()) {
    if (t.atom == "true") return Value(true);
    if (t.atom == "false") return Value(false);
    if (t.atom[0] == '#') return Value(parse_bv_atom(t.atom));
    if (auto it = env.find(t.atom); it != env.end()) return it->second;
    if (auto it = funs->find(t.atom); it != funs->end() && it->second.params.empty())
      return eval_model_term(it->second.body, {}, funs);
    throw std::runtime_error("unknown symbol in model term: " + t.atom);
  }
  const auto& l = t.list;
  if (l.empty()) throw std::runtime_error("empty model term");
  // (_ bvN W)
  if (l[0].is_atom() && l[0].atom == "_" && l.size() == 3 && l[1].atom.rfind("bv", 0) == 0)
    return Value(BitVector(static_cast<unsigned>(std::stoul(l[2].atom)), BigUint(l[1].atom.substr(2))));
  // ((as const S) v)
  if (!l[0].is_atom() && l[0].list.size() == 3 && l[0].list[0].atom == "as" && l[0].list[1].atom == "const") {
    Sort s = parse_sort(l[0].list[2]);
    return Value(ArrayValue::constant(s, eval_model_term(l[1], env, funs)));
  }
  auto arg = [&](std::size_t i) { return eval_model_term(l.at(i), env, funs); };
  // ((_ extract h l) x), ((_ zero_extend k) x)
  if (!l[0].is_atom() && l[0].list.size() >= 3 && l[0].list[0].atom == "_") {
    const auto& ix = l[0].list;
    if (ix[1].atom == "extract")
      return Value(bv_extract(arg(1).as_bv(), static_cast<unsigned>(std::stoul(ix[2].atom)),
                              static_cast<unsigned>(std::stoul(ix.at(3).atom))));
    if (ix[1].atom == "zero_extend") {
      BitVector x = arg(1).as_bv();
      return Value(bv_zext(x, x.width() + static_cast<unsigned>(std::stoul(ix[2].atom))));
    }
  }
  if (!l[0].is_atom()) throw std::runtime_error("unsupported model term: " + t.str());
  const std::string& f = l[0].atom;
  using BinOp = BitVector (*)(const BitVector&, const BitVector&);
  static const std::map<std::string, BinOp> binops = {
      {"bvadd", bv_add}, {"bvsub", bv_sub}, {"bvmul", bv_mul},   {"bvudiv", bv_udiv}, {"bvurem", bv_urem},
      {"bvand", bv_and}, {"bvor", bv_or},   {"bvxor", bv_xor},   {"concat", bv_concat},
      {"bvshl", [](const BitVector& a, const BitVector& b) { return bv_shl(a, b); }},
      {"bvlshr", [](const BitVector& a, const BitVector& b) { return bv_lshr(a, b); }}};
  if (auto it = binops.find(f); it != binops.end()) {
    BitVector acc = arg(1).as_bv();
    for (std::size_t i = 2; i < l.size(); ++i) acc = it->second(acc, arg(i).as_bv());
    return Value(acc);
  }
  if (f == "bvnot") return Value(bv_not(arg(1).as_bv()));
  if (f == "bvult") return Value(bv_ult(arg(1).as_bv(), arg(2).as_bv()));
  if (f == "bvule") return Value(bv_ule(arg(1).as_bv(), arg(2).as_bv()));
  if (f == "store") {
    Value a = arg(1);
    return Value(a.as_array().store(arg(2).as_bv(), arg(3)));
  }
  if (f == "select") return arg(1).as_array().read(arg(2).as_bv());
  if (f == "ite") return arg(1).as_bool() ? arg(2) : arg(3);
  if (f == "=") return Value(arg(1) == arg(2));
  if (f == "not") return Value(!arg(1).as_bool());
  if (f == "and" || f == "or") {
    bool is_and = f == "and";
    for (std::size_t i = 1; i < l.size(); ++i)
      if (arg(i).as_bool() != is_and) return Value(!is_and);
    return Value(is_and);
  }
  if (f == "let") {
    Bindings inner = env;
    for (const auto& b : l.at(1).list) inner[b.list.at(0).atom] = eval_model_term(b.list.at(1), env, funs);
    return eval_model_term(l.at(2), inner, funs);
  }
  if (f == "lambda") {
    // Only usable where an array is expected; the sort comes from the binder.
    FunDef fd;
    const auto& binders = l.at(1).list;
    for (const auto& b : binders) fd.params.push_back(b.list.at(0).atom);
    fd.body = l.at(2);
    Sort idx = parse_sort(binders.at(0).list.at(1));
    Bindings probe = env;
    probe[fd.params[0]] = Value(BitVector::zeros(idx.width()));
    Value sample = eval_model_term(fd.body, probe, funs);
    Sort el = sample.is_bool() ? Sort::boolean() : sample.is_bv() ? Sort::bv(sample.as_bv().width())
                                                                   : sample.as_array().sort();
    auto captured = env;
    return Value(std::make_shared<ArrayValue>(Sort::array(idx.width(), el), [fd, captured, funs](const BitVector& i) {
      Bindings b = captured;
      b[fd.params[0]] = Value(i);
      return eval_model_term(fd.body, b, funs);
    }));
  }
  if (f == "_" && l.size() == 3 && l[1].atom == "as-array") {
    auto it = funs->find(l[2].atom);
    if (it == funs->end()) throw std::runtime_error("as-array of unknown function " + l[2].atom);
    return Value(array_from_fun(Sort::boolean(), it->second, funs));
  }
  if (auto it = funs->find(f); it != funs->end()) {
    std::vector<Value> args;
    for (std::size_t i = 1; i < l.size(); ++i) args.push_back(arg(i));
    return apply_fun(it->second, std::move(args), funs);
  }
  throw std::runtime_error("unsupported model term: " + t.str());
}

}  // namespace

std::map<std::string, Value> parse_model(const std::vector<SExpr>& defs, const std::map<std::string, Expr>& symbols) {
  auto funs = std::make_shared<FunTable>();
  std::vector<std::pair<std::string, const SExpr*>> constants;
  for (const auto& d : defs) {
    if (d.is_atom() || d.list.size() != 5 || d.list[0].atom != "define-fun") continue;
    FunDef f;
    for (const auto& p : d.list[2].list) f.params.push_back(p.list.at(0).atom);
    f.body = d.list[4];
    (*funs)[d.list[1].atom] = f;
    if (f.params.empty()) constants.push_back({d.list[1].atom, &d.list[4]});
  }
  std::map<std::string, Value> out;
  for (const auto& [name, body] : constants) {
    auto sym = symbols.find(name);
    if (sym == symbols.end()) continue;
    try {
      Value v = eval_model_term(*body, {}, funs);
      const Sort& want = sym->second.sort();
      if (want.is_array() && v.is_array() && v.as_array().sort() != want) {
        // as-array values carry no sort of their own.
        auto inner = v.array_ptr();
        v = Value(std::make_shared<ArrayValue>(want, [inner](const BitVector& i) { return inner->read(i); }));
      }
      out.emplace(name, v);
    } catch (const std::exception&) {
      // Left out; reconstruct() defaults and flags it.
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Process driver

std::string default_solver_command() {
  if (const char* env = std::getenv("WSTE_SOLVER"); env && *env) return env;
  return "z3 -smt2 {}";
}

const char* status_name(SatStatus s) {
  switch (s) {
    case SatStatus::Sat: return "sat";
    case SatStatus::Unsat: return "unsat";
    case SatStatus::Unknown: return "unknown";
  }
  return "?";
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

struct ProcessResult {
  std::string output;
  int exit_code = -1;
  bool timed_out = false;
  std::string error;
};

ProcessResult run_shell(const std::string& cmd, std::chrono::milliseconds timeout) {
  ProcessResult r;
  int fds[2];
  if (pipe(fds) != 0) {
    r.error = std::string("pipe: ") + std::strerror(errno);
    return r;
  }
  pid_t pid = fork();
  if (pid < 0) {
    r.error = std::string("fork: ") + std::strerror(errno);
    close(fds[0]);
    close(fds[1]);
    return r;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(fds[1]);
  auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      r.timed_out = true;
      kill(-pid, SIGKILL);
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    int n = poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) continue;
    ssize_t got = read(fds[0], buf, sizeof buf);
    if (got <= 0) break;
    r.output.append(buf, static_cast<std::size_t>(got));
  }
  close(fds[0]);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  return r;
}

std::atomic<std::uint64_t> g_validated{0};
std::atomic<std::uint64_t> g_failures{0};

}  // namespace

SolverAnswer solve(const SmtScript& script, const SolverConfig& cfg) {
  SolverAnswer ans;
  auto t0 = std::chrono::steady_clock::now();
  char path[] = "/tmp/wste-XXXXXX.smt2";
  int fd = mkstemps(path, 5);
  if (fd < 0) {
    ans.diagnostics = std::string("cannot create script file: ") + std::strerror(errno);
    return ans;
  }
  {
    std::size_t off = 0;
    while (off < script.text.size()) {
      ssize_t n = write(fd, script.text.data() + off, script.text.size() - off);
      if (n <= 0) break;
      off += static_cast<std::size_t>(n);
    }
    close(fd);
  }
  std::string cmd = cfg.command.empty() ? default_solver_command() : cfg.command;
  if (auto pos = cmd.find("{}"); pos != std::string::npos)
    cmd.replace(pos, 2, shell_quote(path));
  else
    cmd += " " + shell_quote(path);

  ProcessResult pr = run_shell(cmd, cfg.timeout);
  std::remove(path);
  ans.raw = pr.output;
  ans.timed_out = pr.timed_out;
  ans.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!pr.error.empty()) {
    ans.diagnostics = pr.error;
    return ans;
  }
  if (pr.timed_out) {
    ans.diagnostics = "solver timed out after " + std::to_string(cfg.timeout.count()) + " ms";
    return ans;
  }
  std::vector<SExpr> out;
  try {
    out = parse_sexprs(pr.output);
  } catch (const std::exception& e) {
    ans.diagnostics = std::string("unparseable solver output: ") + e.what();
    return ans;
  }
  if (out.empty() || !out[0].is_atom()) {
    ans.diagnostics = "solver produced no verdict (exit code " + std::to_string(pr.exit_code) + "): " + pr.output;
    return ans;
  }
  const std::string& verdict = out[0].atom;
  if (verdict == "sat") {
    ans.status = SatStatus::Sat;
    if (out.size() > 1 && !out[1].is_atom()) {
      std::vector<SExpr> defs = out[1].list;
      if (!defs.empty() && defs[0].is_atom() && defs[0].atom == "model") defs.erase(defs.begin());
      ans.model = parse_model(defs, script.symbols);
    }
  } else if (verdict == "unsat") {
    ans.status = SatStatus::Unsat;
  } else {
    ans.diagnostics = "solver answered '" + verdict + "' (exit code " + std::to_string(pr.exit_code) + ")";
    if (pr.exit_code == 127) ans.diagnostics = "solver command not found: " + pr.output;
  }
  return ans;
}

namespace {

Value default_value(const Sort& s) {
  if (s.is_bool()) return Value(false);
  if (s.is_bv()) return Value(BitVector::zeros(s.width()));
  return Value(ArrayValue::constant(s, default_value(s.element())));
}

}  // namespace

Reconstruction reconstruct(const SolverAnswer& ans, const SmtScript& script, const Obligation& ob) {
  Reconstruction r;
  for (const auto& [sym, var] : script.symbols) {
    if (auto it = ans.model.find(sym); it != ans.model.end()) {
      r.env[var.name()] = it->second;
    } else {
      r.env[var.name()] = default_value(var.sort());
      r.defaulted.push_back(var.name());
    }
  }
  // Variables of the obligation outside this query get defaults too, so the
  // checks below can always be evaluated.
  std::vector<Expr> roots;
  for (const auto& c : ob.checks) roots.push_back(c.ok);
  for (const auto& a : ob.antfail) roots.push_back(a.cond);
  roots.insert(roots.end(), ob.guard_vars.begin(), ob.guard_vars.end());
  roots.insert(roots.end(), ob.witnesses.begin(), ob.witnesses.end());
  roots.insert(roots.end(), ob.fresh_inputs.begin(), ob.fresh_inputs.end());
  for (Expr v : free_vars(roots))
    if (!r.env.count(v.name())) r.env[v.name()] = default_value(v.sort());

  Evaluator ev(&r.env);
  for (Expr a : script.assertions) {
    bool ok = false;
    try {
      ok = ev.eval_bool(a);
    } catch (const std::exception&) {
      ok = false;
    }
    ++g_validated;
    if (!ok) {
      ++g_failures;
      r.valid = false;
    }
  }
  for (std::size_t i = 0; i < ob.checks.size(); ++i)
    if (!ev.eval_bool(ob.checks[i].ok)) r.violated.push_back(i);
  for (std::size_t i = 0; i < ob.antfail.size(); ++i)
    if (ev.eval_bool(ob.antfail[i].cond)) r.antfail.push_back(i);
  return r;
}

ValidationCounters model_validation_counters() { return {g_validated.load(), g_failures.load()}; }

}  // namespace wste
