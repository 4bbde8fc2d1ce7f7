// SPDX-License-Identifier: Apache-2.0

#include "wste/oracle.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include <omp.h>

namespace wste {

// ---------------------------------------------------------------------------
// Lattice

std::string LatticeValue::str() const {
  switch (kind) {
    case Kind::X: return "X";
    case Kind::Top: return "T";
    case Kind::Defined: return std::to_string(v);
  }
  return "?";
}

bool leq(const LatticeValue& a, const LatticeValue& b) {
  return a == b || a.kind == LatticeValue::Kind::X || b.kind == LatticeValue::Kind::Top;
}

LatticeValue join(const LatticeValue& a, const LatticeValue& b) {
  if (leq(a, b)) return b;
  if (leq(b, a)) return a;
  return LatticeValue::top();
}

std::vector<LatticeValue> atom_lattice(unsigned m) {
  std::vector<LatticeValue> out{LatticeValue::x()};
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << m); ++v) out.push_back(LatticeValue::defined(v));
  out.push_back(LatticeValue::top());
  return out;
}

LatticeStats lattice_stats(std::span<const unsigned> widths) {
  const std::size_t r = widths.size();
  // Elementary symmetric sums of the per-atom value counts.
  std::vector<BigUint> e(r + 1, 0);
  e[0] = 1;
  BigUint prod = 1;
  for (unsigned m : widths) {
    BigUint n = BigUint(1) << m;
    for (std::size_t i = r; i >= 1; --i) e[i] += e[i - 1] * n;
    prod *= n + 1;
  }
  LatticeStats s;
  s.height = static_cast<unsigned>(r + 1);
  s.size = prod + 1;
  s.level_sizes = e;
  s.level_sizes.push_back(1);
  return s;
}

LatticeStats enumerate_lattice(std::span<const unsigned> widths) {
  using Elem = std::vector<LatticeValue>;
  std::vector<Elem> elems{{}};
  for (unsigned m : widths) {
    std::vector<Elem> next;
    for (const auto& e : elems) {
      for (const auto& v : atom_lattice(m)) {
        if (v.kind == LatticeValue::Kind::Top) continue;
        Elem x = e;
        x.push_back(v);
        next.push_back(std::move(x));
      }
    }
    elems = std::move(next);
  }
  const std::size_t n = elems.size();
  auto below = [&](std::size_t a, std::size_t b) {  // a strictly below b; index n is Top
    if (a == b) return false;
    if (b == n) return true;
    if (a == n) return false;
    for (std::size_t j = 0; j < widths.size(); ++j)
      if (!leq(elems[a][j], elems[b][j])) return false;
    return true;
  };
  // Longest chain from bottom to each element; any linear extension works as
  // the processing order, and counting defined atoms gives one.
  std::vector<std::size_t> order(n + 1);
  for (std::size_t i = 0; i <= n; ++i) order[i] = i;
  auto defined = [&](std::size_t i) {
    if (i == n) return widths.size() + 1;
    return static_cast<std::size_t>(std::count_if(elems[i].begin(), elems[i].end(), [](const LatticeValue& v) {
      return v.kind == LatticeValue::Kind::Defined;
    }));
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return defined(a) < defined(b); });
  std::vector<unsigned> rank(n + 1, 0);
  for (std::size_t oi = 0; oi <= n; ++oi) {
    std::size_t b = order[oi];
    for (std::size_t oj = 0; oj < oi; ++oj) {
      std::size_t a = order[oj];
      if (below(a, b)) rank[b] = std::max(rank[b], rank[a] + 1);
    }
  }
  LatticeStats s;
  s.height = rank[n];
  s.size = BigUint(n + 1);
  s.level_sizes.assign(s.height + 1, 0);
  for (std::size_t i = 0; i <= n; ++i) s.level_sizes[rank[i]] += 1;
  return s;
}

// ---------------------------------------------------------------------------
// Ternary words and exact evaluation

TernaryWord TernaryWord::of(unsigned w, std::uint64_t v) { return {w, v & mask64(w), 0}; }
TernaryWord TernaryWord::all_x(unsigned w) { return {w, 0, mask64(w)}; }

TernaryWord TernaryWord::slice(unsigned q, unsigned p) const {
  unsigned w = q - p + 1;
  return {w, (val >> p) & mask64(w), (xmask >> p) & mask64(w)};
}

std::string TernaryWord::str() const {
  std::string s;
  for (unsigned i = width; i-- > 0;) s += (xmask >> i & 1) ? 'X' : ((val >> i & 1) ? '1' : '0');
  return s;
}

unsigned result_width(RtlOp op, std::span<const unsigned> widths) {
  switch (op) {
    case RtlOp::Eq:
    case RtlOp::Ult:
    case RtlOp::Ule: return 1;
    case RtlOp::Concat: return widths[0] + widths[1];
    case RtlOp::Ite: return widths[1];
    default: return widths[0];
  }
}

std::uint64_t concrete_op(RtlOp op, std::span<const std::uint64_t> x, std::span<const unsigned> widths, unsigned k) {
  unsigned w = result_width(op, widths);
  std::uint64_t m = mask64(w);
  auto shl = [&](std::uint64_t a, std::uint64_t d) { return d >= w ? 0 : (a << d) & m; };
  auto lshr = [&](std::uint64_t a, std::uint64_t d) { return d >= w ? 0 : a >> d; };
  switch (op) {
    case RtlOp::Slice: return x[0];
    case RtlOp::Concat: return (x[0] << widths[1] | x[1]) & m;
    case RtlOp::Not: return ~x[0] & m;
    case RtlOp::Add: return (x[0] + x[1]) & m;
    case RtlOp::Sub: return (x[0] - x[1]) & m;
    case RtlOp::Mul: return (x[0] * x[1]) & m;
    case RtlOp::Udiv: return x[1] == 0 ? m : x[0] / x[1];
    case RtlOp::Urem: return x[1] == 0 ? x[0] : x[0] % x[1];
    case RtlOp::And: return x[0] & x[1];
    case RtlOp::Or: return x[0] | x[1];
    case RtlOp::Xor: return x[0] ^ x[1];
    case RtlOp::Nand: return ~(x[0] & x[1]) & m;
    case RtlOp::Nor: return ~(x[0] | x[1]) & m;
    case RtlOp::Xnor: return ~(x[0] ^ x[1]) & m;
    case RtlOp::Shl: return shl(x[0], x[1]);
    case RtlOp::Lshr: return lshr(x[0], x[1]);
    case RtlOp::ShlConst: return shl(x[0], k);
    case RtlOp::LshrConst: return lshr(x[0], k);
    case RtlOp::Eq: return x[0] == x[1];
    case RtlOp::Ult: return x[0] < x[1];
    case RtlOp::Ule: return x[0] <= x[1];
    case RtlOp::Ite: return x[0] ? x[1] : x[2];
    default: break;
  }
  throw std::invalid_argument(std::string("no concrete semantics for ") + rtl_op_name(op));
}

std::optional<TernaryWord> eval_exact(RtlOp op, std::span<const TernaryWord> args, unsigned k, unsigned budget) {
  std::vector<std::pair<unsigned, unsigned>> xbits;  // (operand, bit)
  std::vector<unsigned> widths;
  std::vector<std::uint64_t> base;
  for (unsigned j = 0; j < args.size(); ++j) {
    widths.push_back(args[j].width);
    base.push_back(args[j].val & ~args[j].xmask & mask64(args[j].width));
    for (unsigned b = 0; b < args[j].width; ++b)
      if (args[j].xmask >> b & 1) xbits.push_back({j, b});
  }
  if (xbits.size() > budget)
    throw BudgetError("exact evaluation needs " + std::to_string(xbits.size()) + " X bits, budget is " +
                      std::to_string(budget));
  bool divides = op == RtlOp::Udiv || op == RtlOp::Urem;
  unsigned w = result_width(op, widths);
  bool any = false;
  std::uint64_t first = 0, diff = 0;
  std::vector<std::uint64_t> x(base.size());
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << xbits.size()); ++a) {
    x = base;
    for (std::size_t t = 0; t < xbits.size(); ++t)
      if (a >> t & 1) x[xbits[t].first] |= std::uint64_t{1} << xbits[t].second;
    if (divides && x[1] == 0) continue;
    std::uint64_t r = concrete_op(op, x, widths, k);
    if (!any) {
      first = r;
      any = true;
    } else {
      diff |= r ^ first;
    }
  }
  if (!any) return std::nullopt;
  return TernaryWord{w, first & ~diff, diff};
}

// ---------------------------------------------------------------------------
// Tape

namespace {

unsigned packed_width(const Sort& s, unsigned* ew) {
  if (s.is_bool()) return 1;
  if (s.is_bv()) return s.width();
  if (!s.element().is_bv()) throw std::invalid_argument("tape: nested arrays are not supported");
  unsigned total = s.element().width() << s.index_width();
  if (s.index_width() > 6 || total > 64) throw std::invalid_argument("tape: array does not fit in 64 bits");
  if (ew) *ew = s.element().width();
  return total;
}

}  // namespace

Tape::Tape(std::span<const Expr> inputs, std::span<const Expr> roots) {
  std::unordered_map<std::uint32_t, std::uint32_t> slot;
  for (Expr in : inputs) {
    if (!slot.count(in.id())) {
      auto s = static_cast<std::uint32_t>(slot.size());
      slot.emplace(in.id(), s);
      code_.push_back({Op::Var, packed_width(in.sort(), nullptr), 0, 0, 0, 0, 0, 0, 0});
    }
    input_slots_.push_back(slot.at(in.id()));
  }
  // Iterative post-order.
  std::vector<std::pair<Expr, bool>> stack;
  for (Expr r : roots) stack.push_back({r, false});
  while (!stack.empty()) {
    auto [e, expanded] = stack.back();
    stack.pop_back();
    if (slot.count(e.id())) continue;
    if (!expanded) {
      stack.push_back({e, true});
      for (Expr c : e.children())
        if (!slot.count(c.id())) stack.push_back({c, false});
      continue;
    }
    if (e.op() == Op::Var) throw std::invalid_argument("tape: unbound variable " + e.name());
    Ins ins{e.op(), 0, 0, 0, 0, 0, e.hi(), e.lo(), 0};
    ins.width = packed_width(e.sort(), &ins.ew);
    auto kids = e.children();
    if (kids.size() > 0) ins.a = slot.at(kids[0].id());
    if (kids.size() > 1) ins.b = slot.at(kids[1].id());
    if (kids.size() > 2) ins.c = slot.at(kids[2].id());
    if (e.op() == Op::BvConst) ins.k = e.bv_value().to_u64();
    if (e.op() == Op::BoolConst) ins.k = e.bool_value();
    if (e.op() == Op::Concat) ins.p0 = kids[1].width();
    if (e.op() == Op::Read || e.op() == Op::Update) packed_width(kids[0].sort(), &ins.ew);
    auto s = static_cast<std::uint32_t>(code_.size());
    slot.emplace(e.id(), s);
    code_.push_back(ins);
  }
  for (Expr r : roots) root_slots_.push_back(slot.at(r.id()));
}

void Tape::run(const std::uint64_t* in, std::uint64_t* out, std::vector<std::uint64_t>& v) const {
  v.resize(code_.size());
  for (std::size_t i = 0; i < input_slots_.size(); ++i) v[input_slots_[i]] = in[i];
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Ins& n = code_[i];
    const std::uint64_t m = mask64(n.width);
    std::uint64_t r = 0;
    std::uint64_t a = v[n.a], b = v[n.b], c = v[n.c];
    switch (n.op) {
      case Op::Var: continue;
      case Op::BvConst:
      case Op::BoolConst: r = n.k; break;
      case Op::Add: r = a + b; break;
      case Op::Sub: r = a - b; break;
      case Op::Mul: r = a * b; break;
      case Op::Udiv: r = b == 0 ? m : a / b; break;
      case Op::Urem: r = b == 0 ? a : a % b; break;
      case Op::Concat: r = a << n.p0 | b; break;
      case Op::Extract: r = a >> n.p1; break;
      case Op::BvNot: r = ~a; break;
      case Op::BvAnd: r = a & b; break;
      case Op::BvOr: r = a | b; break;
      case Op::BvXor: r = a ^ b; break;
      case Op::Shl: r = b >= n.width ? 0 : a << b; break;
      case Op::Lshr: r = b >= n.width ? 0 : a >> b; break;
      case Op::ShlConst: r = n.p0 >= n.width ? 0 : a << n.p0; break;
      case Op::LshrConst: r = n.p0 >= n.width ? 0 : a >> n.p0; break;
      case Op::Eq: r = a == b; break;
      case Op::Ult: r = a < b; break;
      case Op::Ule: r = a <= b; break;
      case Op::Ite: r = a ? b : c; break;
      case Op::Not: r = !a; break;
      case Op::And: r = a && b; break;
      case Op::Or: r = a || b; break;
      case Op::Read: r = a >> (b * n.ew); break;
      case Op::Update: {
        std::uint64_t em = mask64(n.ew) << (b * n.ew);
        r = (a & ~em) | ((c << (b * n.ew)) & em);
        break;
      }
    }
    v[i] = r & m;
  }
  for (std::size_t i = 0; i < root_slots_.size(); ++i) out[i] = v[root_slots_[i]];
}

// ---------------------------------------------------------------------------
// Soundness sweep

namespace {

std::vector<std::vector<unsigned>> all_cut_sets(unsigned w) {
  std::vector<std::vector<unsigned>> out;
  for (unsigned mask = 0; mask < (1u << (w - 1)); ++mask) {
    std::vector<unsigned> cuts;
    for (unsigned b = 1; b < w; ++b)
      if (mask >> (b - 1) & 1) cuts.push_back(b);
    out.push_back(std::move(cuts));
  }
  return out;
}

std::vector<std::pair<unsigned, unsigned>> pieces_of(unsigned w, const std::vector<unsigned>& cuts) {
  std::vector<std::pair<unsigned, unsigned>> out;  // (lo, width)
  unsigned lo = 0;
  for (unsigned c : cuts) {
    out.push_back({lo, c - lo});
    lo = c;
  }
  out.push_back({lo, w - lo});
  return out;
}

struct Slice {
  unsigned q, p;
};

// One instantiation of a template over fixed operand atomizations; the
// configuration space is every payload and inv flag of every piece.
struct Instance {
  std::vector<unsigned> widths;
  std::vector<std::vector<std::pair<unsigned, unsigned>>> pieces;
  std::vector<Slice> slices;
  unsigned out_width = 0;
  unsigned witness_bits = 0;
  std::size_t n_constraints = 0;
  std::unique_ptr<Tape> tape;
};

void record(SoundnessReport& rep, std::mutex& mu, const std::string& line) {
  std::lock_guard<std::mutex> lock(mu);
  if (rep.samples.size() < 8) rep.samples.push_back(line);
}

void sweep_instance(SoundnessReport& rep, RtlOp op, unsigned k, const Instance& in, bool parallel, std::mutex& mu) {
  // Mixed radix over (payload, inv) of each piece.
  std::vector<unsigned> radix_bits;
  for (const auto& ps : in.pieces)
    for (auto [lo, w] : ps) radix_bits.push_back(w + 1);
  unsigned total_bits = 0;
  for (unsigned b : radix_bits) total_bits += b;
  const std::int64_t n_configs = std::int64_t{1} << total_bits;
  const std::size_t n_inputs = radix_bits.size() * 2 + (in.witness_bits ? 1 : 0);
  const std::size_t n_slices = in.slices.size();
  const std::uint64_t n_witness = in.witness_bits ? (std::uint64_t{1} << in.witness_bits) : 1;

  std::uint64_t checks = 0, violations = 0, exact_mm = 0, imprecise = 0, configs = 0;
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : checks, violations, exact_mm, imprecise, configs) if (parallel)
  for (std::int64_t cfg = 0; cfg < n_configs; ++cfg) {
    std::vector<std::uint64_t> inputs(n_inputs), outs(n_slices * 2 + in.n_constraints), scratch;
    std::vector<TernaryWord> words;
    std::uint64_t rest = static_cast<std::uint64_t>(cfg);
    std::size_t slot = 0;
    bool all_valid = true;
    for (std::size_t j = 0; j < in.pieces.size(); ++j) {
      TernaryWord t{in.widths[j], 0, 0};
      for (auto [lo, w] : in.pieces[j]) {
        std::uint64_t payload = rest & mask64(w);
        rest >>= w;
        bool inv = rest & 1;
        rest >>= 1;
        inputs[slot++] = payload;
        inputs[slot++] = inv;
        t.val |= payload << lo;
        if (inv) {
          t.xmask |= mask64(w) << lo;
          all_valid = false;
        }
      }
      words.push_back(t);
    }
    auto exact = eval_exact(op, words, k, 64);
    if (!exact) continue;
    ++configs;
    for (std::uint64_t wi = 0; wi < n_witness; ++wi) {
      if (in.witness_bits) inputs[slot] = wi;
      in.tape->run(inputs.data(), outs.data(), scratch);
      bool admissible = true;
      for (std::size_t c = 0; c < in.n_constraints; ++c) admissible = admissible && outs[n_slices * 2 + c];
      if (!admissible) continue;
      for (std::size_t s = 0; s < n_slices; ++s) {
        ++checks;
        auto [q, p] = in.slices[s];
        TernaryWord want = exact->slice(q, p);
        bool inv = outs[2 * s];
        std::uint64_t val = outs[2 * s + 1];
        if (all_valid) {
          if (val != want.val) ++exact_mm;
          if (inv) ++imprecise;
        }
        if (!inv && (!want.defined() || want.val != val)) {
          ++violations;
          std::ostringstream line;
          line << rtl_op_name(op) << " m=" << in.widths[0] << " k=" << k << " slice=[" << q << ":" << p << "] args=";
          for (const auto& w : words) line << w.str() << ' ';
          if (in.witness_bits) line << "i=" << wi << ' ';
          line << "oracle=" << want.str() << " engine=" << TernaryWord::of(q - p + 1, val).str();
          record(rep, mu, line.str());
        }
      }
    }
  }
  rep.checks += checks;
  rep.violations += violations;
  rep.exact_mismatches += exact_mm;
  rep.imprecise += imprecise;
  rep.configs += configs;
}

void sweep_shapes(SoundnessReport& rep, RtlOp op, std::vector<unsigned> widths, unsigned k, ShiftMode mode,
                  bool parallel, std::mutex& mu) {
  std::vector<std::vector<std::vector<unsigned>>> choices;
  for (unsigned w : widths) choices.push_back(all_cut_sets(w));
  std::vector<std::size_t> pick(widths.size(), 0);
  for (;;) {
    ExprContext cx;
    SideConstraints side;
    TemplateEnv env(cx, side, mode);
    Instance in;
    in.widths = widths;
    std::vector<SymWord> words;
    std::vector<Expr> inputs;
    for (std::size_t j = 0; j < widths.size(); ++j) {
      auto ps = pieces_of(widths[j], choices[j][pick[j]]);
      std::vector<Piece> pcs;
      for (std::size_t t = 0; t < ps.size(); ++t) {
        std::string tag = std::to_string(j) + "_" + std::to_string(t);
        Expr v = cx.var("v" + tag, Sort::bv(ps[t].second));
        Expr i = cx.var("i" + tag, Sort::boolean());
        inputs.push_back(v);
        inputs.push_back(i);
        pcs.push_back({ps[t].first, {v, i}});
      }
      in.pieces.push_back(std::move(ps));
      words.emplace_back(std::move(pcs));
    }
    in.out_width = result_width(op, widths);
    std::vector<Expr> roots;
    for (unsigned q = 0; q < in.out_width; ++q) {
      for (unsigned p = 0; p <= q; ++p) {
        SymAtom r = apply_template(env, op, words, q, p, k);
        in.slices.push_back({q, p});
        roots.push_back(r.inv);
        roots.push_back(r.val);
      }
    }
    if (side.witnesses.size() > 1) throw std::logic_error("sweep expects at most one division witness");
    for (Expr c : side.constraints) roots.push_back(c);
    in.n_constraints = side.constraints.size();
    if (!side.witnesses.empty()) {
      inputs.push_back(side.witnesses[0]);
      in.witness_bits = side.witnesses[0].width();
    }
    in.tape = std::make_unique<Tape>(inputs, roots);
    sweep_instance(rep, op, k, in, parallel, mu);

    std::size_t j = 0;
    while (j < pick.size() && ++pick[j] == choices[j].size()) pick[j++] = 0;
    if (j == pick.size()) break;
  }
}

}  // namespace

SoundnessReport check_template_soundness(RtlOp op, unsigned m, ShiftMode mode, bool parallel) {
  SoundnessReport rep;
  rep.op = rtl_op_name(op);
  rep.width = m;
  std::mutex mu;
  switch (op) {
    case RtlOp::Not:
    case RtlOp::Slice: sweep_shapes(rep, op, {m}, 0, mode, parallel, mu); break;
    case RtlOp::ShlConst:
    case RtlOp::LshrConst:
      for (unsigned k = 0; k <= m; ++k) sweep_shapes(rep, op, {m}, k, mode, parallel, mu);
      break;
    case RtlOp::Concat:
      for (unsigned a = 1; a < m; ++a) sweep_shapes(rep, op, {a, m - a}, 0, mode, parallel, mu);
      break;
    case RtlOp::Ite: sweep_shapes(rep, op, {1, m, m}, 0, mode, parallel, mu); break;
    default: sweep_shapes(rep, op, {m, m}, 0, mode, parallel, mu); break;
  }
  return rep;
}

SoundnessReport check_array_soundness(unsigned m, unsigned max_updates, bool parallel) {
  SoundnessReport rep;
  rep.op = "array";
  rep.width = m;
  std::mutex mu;
  for (unsigned n_upd = 0; n_upd <= max_updates; ++n_upd) {
    for (bool init : {true, false}) {
      ExprContext cx;
      std::vector<Expr> inputs;
      SymArray arr = array_base(cx, "A", init, {1}, m);
      inputs.push_back(arr->val);
      for (unsigned u = 0; u < n_upd; ++u) {
        std::string tag = std::to_string(u);
        SymAtom idx{cx.var("ui" + tag, Sort::bv(1)), cx.var("uii" + tag, Sort::boolean())};
        SymAtom el{cx.var("ue" + tag, Sort::bv(m)), cx.var("uei" + tag, Sort::boolean())};
        inputs.insert(inputs.end(), {idx.val, idx.inv, el.val, el.inv});
        arr = array_update(cx, arr, idx, SymWord::of(el));
      }
      SymAtom ridx{cx.var("ri", Sort::bv(1)), cx.var("rii", Sort::boolean())};
      inputs.push_back(ridx.val);
      inputs.push_back(ridx.inv);
      std::vector<Expr> roots;
      std::vector<Slice> slices;
      for (unsigned q = 0; q < m; ++q)
        for (unsigned p = 0; p <= q; ++p) {
          SymAtom r = array_read(cx, arr, ridx, q, p);
          roots.push_back(r.inv);
          roots.push_back(r.val);
          slices.push_back({q, p});
        }
      Tape tape(inputs, roots);

      const unsigned bits = 2 * m + n_upd * (1 + 1 + m + 1) + 2;
      const std::int64_t n_configs = std::int64_t{1} << bits;
      std::uint64_t checks = 0, violations = 0, exact_mm = 0, imprecise = 0;
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : checks, violations, exact_mm, imprecise) if (parallel)
      for (std::int64_t cfg = 0; cfg < n_configs; ++cfg) {
        std::vector<std::uint64_t> in(inputs.size()), out(roots.size()), scratch;
        std::uint64_t rest = static_cast<std::uint64_t>(cfg);
        auto take = [&](unsigned w) {
          std::uint64_t v = rest & mask64(w);
          rest >>= w;
          return v;
        };
        std::size_t s = 0;
        std::uint64_t base = take(2 * m);
        in[s++] = base;
        struct Upd {
          std::uint64_t idx;
          bool idx_x;
          std::uint64_t el;
          bool el_x;
        };
        std::vector<Upd> upds;
        bool all_valid = init;
        for (unsigned u = 0; u < n_upd; ++u) {
          Upd d{take(1), take(1) != 0, take(m), false};
          d.el_x = take(1) != 0;
          in[s++] = d.idx;
          in[s++] = d.idx_x;
          in[s++] = d.el;
          in[s++] = d.el_x;
          all_valid = all_valid && !d.idx_x && !d.el_x;
          upds.push_back(d);
        }
        std::uint64_t ri = take(1);
        bool ri_x = take(1) != 0;
        all_valid = all_valid && !ri_x;
        in[s++] = ri;
        in[s++] = ri_x;
        tape.run(in.data(), out.data(), scratch);

        // Oracle: enumerate the index bits; element X bits are independent
        // of each other and of the indices, so per-path results combine by
        // agreement.
        std::vector<unsigned> xs;
        for (unsigned u = 0; u < n_upd; ++u)
          if (upds[u].idx_x) xs.push_back(u);
        bool have = false;
        TernaryWord acc{m, 0, 0};
        for (std::uint64_t a = 0; a < (std::uint64_t{1} << (xs.size() + (ri_x ? 1 : 0))); ++a) {
          std::vector<std::uint64_t> idx(n_upd);
          for (unsigned u = 0; u < n_upd; ++u) idx[u] = upds[u].idx;
          for (std::size_t t = 0; t < xs.size(); ++t) idx[xs[t]] = a >> t & 1;
          std::uint64_t r = ri_x ? (a >> xs.size() & 1) : ri;
          TernaryWord got = init ? TernaryWord::of(m, base >> (r * m)) : TernaryWord::all_x(m);
          for (unsigned u = n_upd; u-- > 0;)
            if (idx[u] == r) {
              got = upds[u].el_x ? TernaryWord::all_x(m) : TernaryWord::of(m, upds[u].el);
              break;
            }
          if (!have) {
            acc = got;
            have = true;
          } else {
            std::uint64_t diff = acc.xmask | got.xmask | (acc.val ^ got.val);
            acc.xmask = diff & mask64(m);
            acc.val &= ~acc.xmask;
          }
        }
        for (std::size_t k = 0; k < slices.size(); ++k) {
          ++checks;
          auto [q, p] = slices[k];
          TernaryWord want = acc.slice(q, p);
          bool inv = out[2 * k];
          std::uint64_t val = out[2 * k + 1];
          if (all_valid) {
            if (val != want.val) ++exact_mm;
            if (inv) ++imprecise;
          }
          if (!inv && (!want.defined() || want.val != val)) {
            ++violations;
            record(rep, mu,
                   "array m=" + std::to_string(m) + " updates=" + std::to_string(n_upd) + " cfg=" + std::to_string(cfg) +
                       " slice=[" + std::to_string(q) + ":" + std::to_string(p) + "]");
          }
        }
      }
      rep.configs += static_cast<std::uint64_t>(n_configs);
      rep.checks += checks;
      rep.violations += violations;
      rep.exact_mismatches += exact_mm;
      rep.imprecise += imprecise;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Concrete simulation

Sort array_value_sort(const ArrayInfo& a) { return array_sort(a.index_widths, a.elem_width); }

namespace {

Value zero_value(const Sort& s) {
  if (s.is_bool()) return Value(false);
  if (s.is_bv()) return Value(BitVector::zeros(s.width()));
  return Value(ArrayValue::constant(s, zero_value(s.element())));
}

BitVector splice(const BitVector& base, unsigned lo, const BitVector& part) {
  BigUint m = width_mask(part.width()) << lo;
  BigUint v = (base.value() & ~m & width_mask(base.width())) | (part.value() << lo);
  return BitVector(base.width(), v);
}

}  // namespace

ConcreteState ConcreteSim::initial_state(const std::function<BitVector(unsigned)>& reg_value,
                                         const std::function<std::shared_ptr<const ArrayValue>(unsigned)>& array_value) {
  ConcreteState s;
  for (unsigned w = 0; w < m_.words.size(); ++w) {
    const Word& word = m_.words[w];
    if (word.kind == WordKind::Reg && word.init)
      s.words.push_back(*word.init);
    else if (word.kind == WordKind::Reg && reg_value)
      s.words.push_back(reg_value(w));
    else
      s.words.push_back(BitVector::zeros(word.width));
  }
  for (unsigned a = 0; a < m_.arrays.size(); ++a) {
    if (array_value) {
      if (auto v = array_value(a)) {
        s.arrays.push_back(v);
        continue;
      }
    }
    s.arrays.push_back(zero_value(array_value_sort(m_.arrays[a])).array_ptr());
  }
  return s;
}

void ConcreteSim::settle(ConcreteState& s, const Force& force) {
  memo_.clear();
  array_memo_.clear();
  for (const auto& c : m_.comb) {
    BitVector v = eval(c.rhs, s);
    s.words[c.word] = splice(s.words[c.word], c.lo, v);
    if (force) force(c.word, s.words[c.word]);
  }
}

ConcreteState ConcreteSim::next_state(const ConcreteState& s) {
  ConcreteState n;
  for (unsigned w = 0; w < m_.words.size(); ++w) {
    if (m_.words[w].kind == WordKind::Reg)
      n.words.push_back(eval(m_.reg_next[w], s));
    else
      n.words.push_back(BitVector::zeros(m_.words[w].width));
  }
  for (unsigned a = 0; a < m_.arrays.size(); ++a) n.arrays.push_back(eval_array(m_.array_next[a], s).array_ptr());
  memo_.clear();
  array_memo_.clear();
  return n;
}

BitVector ConcreteSim::eval(const Rtl& e, const ConcreteState& s) {
  if (auto it = memo_.find(e->id); it != memo_.end()) return it->second;
  const auto& x = e->args;
  BitVector r;
  switch (e->op) {
    case RtlOp::Const: r = e->value; break;
    case RtlOp::Word: r = bv_extract(s.words.at(e->ref), e->hi, e->lo); break;
    case RtlOp::Var: throw std::logic_error("guard variable in design expression");
    case RtlOp::Slice: r = bv_extract(eval(x[0], s), e->hi, e->lo); break;
    case RtlOp::Concat: r = bv_concat(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::Not: r = bv_not(eval(x[0], s)); break;
    case RtlOp::Add: r = bv_add(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::Sub: r = bv_sub(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::Mul: r = bv_mul(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::Udiv: r = bv_udiv(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::Urem: r = bv_urem(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::And: r = bv_and(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::Or: r = bv_or(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::Xor: r = bv_xor(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::Nand: r = bv_not(bv_and(eval(x[0], s), eval(x[1], s))); break;
    case RtlOp::Nor: r = bv_not(bv_or(eval(x[0], s), eval(x[1], s))); break;
    case RtlOp::Xnor: r = bv_not(bv_xor(eval(x[0], s), eval(x[1], s))); break;
    case RtlOp::Shl: r = bv_shl(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::Lshr: r = bv_lshr(eval(x[0], s), eval(x[1], s)); break;
    case RtlOp::ShlConst: r = bv_shl(eval(x[0], s), e->hi); break;
    case RtlOp::LshrConst: r = bv_lshr(eval(x[0], s), e->hi); break;
    case RtlOp::Eq: r = BitVector::from_u64(1, eval(x[0], s) == eval(x[1], s)); break;
    case RtlOp::Ult: r = BitVector::from_u64(1, bv_ult(eval(x[0], s), eval(x[1], s))); break;
    case RtlOp::Ule: r = BitVector::from_u64(1, bv_ule(eval(x[0], s), eval(x[1], s))); break;
    case RtlOp::Ite: r = eval(x[0], s).is_zero() ? eval(x[2], s) : eval(x[1], s); break;
    case RtlOp::Read: r = eval_array(x[0], s).as_array().read(eval(x[1], s)).as_bv(); break;
    case RtlOp::Array:
    case RtlOp::Update: throw std::logic_error("array-valued expression used as a word");
  }
  memo_.emplace(e->id, r);
  return r;
}

Value ConcreteSim::eval_array(const Rtl& e, const ConcreteState& s) {
  if (auto it = array_memo_.find(e->id); it != array_memo_.end()) return it->second;
  Value r;
  switch (e->op) {
    case RtlOp::Array: r = Value(s.arrays.at(e->ref)); break;
    case RtlOp::Read: r = eval_array(e->args[0], s).as_array().read(eval(e->args[1], s)); break;
    case RtlOp::Update: {
      Value base = eval_array(e->args[0], s);
      BitVector idx = eval(e->args[1], s);
      Value el = e->args[2]->is_array() ? eval_array(e->args[2], s) : Value(eval(e->args[2], s));
      r = Value(base.as_array().store(idx, el));
      break;
    }
    default: throw std::logic_error(std::string("array-valued expression of kind ") + rtl_op_name(e->op));
  }
  array_memo_.emplace(e->id, r);
  return r;
}

// ---------------------------------------------------------------------------
// Exact X simulation over traces

std::string XValue::str() const {
  if (xmask.is_zero()) return "0x" + val.to_hex();
  std::string s;
  for (unsigned i = val.width(); i-- > 0;) s += xmask.bit(i) ? 'X' : (val.bit(i) ? '1' : '0');
  return "0b" + s;
}

namespace {

struct XBit {
  enum class Where : std::uint8_t { Input, Reg, Array } where;
  unsigned frame;
  unsigned id;
  unsigned bit;  // for arrays: entry * elem_width + bit
};

}  // namespace

XTrace simulate_x(const Module& m, const std::vector<std::map<unsigned, XValue>>& stimulus, unsigned frames,
                  unsigned budget, bool parallel) {
  std::vector<XBit> xbits;
  auto input_value = [&](unsigned t, unsigned w) -> XValue {
    if (t < stimulus.size())
      if (auto it = stimulus[t].find(w); it != stimulus[t].end()) return it->second;
    unsigned width = m.words[w].width;
    return {BitVector::zeros(width), BitVector::ones(width)};
  };
  for (unsigned t = 0; t < frames; ++t)
    for (unsigned w : m.inputs()) {
      XValue v = input_value(t, w);
      for (unsigned b = 0; b < v.xmask.width(); ++b)
        if (v.xmask.bit(b)) xbits.push_back({XBit::Where::Input, t, w, b});
    }
  for (unsigned w : m.registers())
    if (!m.words[w].init)
      for (unsigned b = 0; b < m.words[w].width; ++b) xbits.push_back({XBit::Where::Reg, 0, w, b});
  for (unsigned a = 0; a < m.arrays.size(); ++a) {
    if (m.arrays[a].initialized) continue;
    unsigned idx_bits = 0;
    for (unsigned iw : m.arrays[a].index_widths) idx_bits += iw;
    if (idx_bits > 16) throw BudgetError("uninitialized array '" + m.arrays[a].name + "' is too large to enumerate");
    for (unsigned b = 0; b < (m.arrays[a].elem_width << idx_bits); ++b) xbits.push_back({XBit::Where::Array, 0, a, b});
  }
  if (xbits.size() > budget)
    throw BudgetError("stimulus has " + std::to_string(xbits.size()) + " unknown bits, budget is " +
                      std::to_string(budget));

  auto run = [&](std::uint64_t assign) {
    ConcreteSim sim(m);
    std::vector<BigUint> reg_bits(m.words.size(), 0);
    std::vector<std::map<BigUint, BigUint>> arr_bits(m.arrays.size());  // entry -> value
    std::vector<std::vector<BigUint>> in_bits(frames, std::vector<BigUint>(m.words.size(), 0));
    for (std::size_t t = 0; t < xbits.size(); ++t) {
      if (!(assign >> t & 1)) continue;
      const XBit& x = xbits[t];
      BigUint one = 1;
      switch (x.where) {
        case XBit::Where::Input: in_bits[x.frame][x.id] |= one << x.bit; break;
        case XBit::Where::Reg: reg_bits[x.id] |= one << x.bit; break;
        case XBit::Where::Array: {
          unsigned ew = m.arrays[x.id].elem_width;
          arr_bits[x.id][BigUint(x.bit / ew)] |= one << (x.bit % ew);
          break;
        }
      }
    }
    auto arr_init = [&](unsigned a) -> std::shared_ptr<const ArrayValue> {
      if (m.arrays[a].initialized) return nullptr;
      // Flattened entries; index dimensions are peeled outermost first.
      const ArrayInfo& info = m.arrays[a];
      std::function<Value(const Sort&, std::size_t, BigUint)> build = [&](const Sort& s, std::size_t dim,
                                                                           BigUint prefix) -> Value {
        if (s.is_bv()) {
          auto it = arr_bits[a].find(prefix);
          return Value(BitVector(info.elem_width, it == arr_bits[a].end() ? BigUint(0) : it->second));
        }
        auto arr = ArrayValue::constant(s, zero_value(s.element()));
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << info.index_widths[dim]); ++i) {
          BigUint p = (prefix << info.index_widths[dim]) | i;
          arr = arr->store(BitVector::from_u64(info.index_widths[dim], i), build(s.element(), dim + 1, p));
        }
        return Value(arr);
      };
      return build(array_value_sort(info), 0, 0).array_ptr();
    };
    ConcreteState s = sim.initial_state(
        [&](unsigned w) { return BitVector(m.words[w].width, reg_bits[w]); }, arr_init);
    std::vector<std::vector<BitVector>> out;
    for (unsigned t = 0; t < frames; ++t) {
      for (unsigned w : m.inputs()) {
        XValue v = input_value(t, w);
        s.words[w] = BitVector(v.val.width(), (v.val.value() & ~v.xmask.value() & width_mask(v.val.width())) |
                                                  in_bits[t][w]);
      }
      sim.settle(s);
      out.push_back(s.words);
      if (t + 1 < frames) s = sim.next_state(s);
    }
    return out;
  };

  auto base = run(0);
  std::vector<std::vector<BigUint>> diff(frames, std::vector<BigUint>(m.words.size(), 0));
  const std::int64_t n = std::int64_t{1} << xbits.size();
#pragma omp parallel if (parallel)
  {
    std::vector<std::vector<BigUint>> local(frames, std::vector<BigUint>(m.words.size(), 0));
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t a = 1; a < n; ++a) {
      auto tr = run(static_cast<std::uint64_t>(a));
      for (unsigned t = 0; t < frames; ++t)
        for (unsigned w = 0; w < m.words.size(); ++w) local[t][w] |= tr[t][w].value() ^ base[t][w].value();
    }
#pragma omp critical
    for (unsigned t = 0; t < frames; ++t)
      for (unsigned w = 0; w < m.words.size(); ++w) diff[t][w] |= local[t][w];
  }
  XTrace out;
  for (unsigned t = 0; t < frames; ++t) {
    std::vector<XValue> row;
    for (unsigned w = 0; w < m.words.size(); ++w) {
      unsigned width = m.words[w].width;
      BitVector xm(width, diff[t][w]);
      row.push_back({BitVector(width, base[t][w].value() & ~diff[t][w] & width_mask(width)), xm});
    }
    out.frames.push_back(std::move(row));
  }
  return out;
}

}  // namespace wste
