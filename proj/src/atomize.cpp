// SPDX-License-Identifier: Apache-2.0

#include "wste/atomize.hpp"

#include <sstream>
#include <stdexcept>

namespace wste {

Atomization::Atomization(unsigned width) : width_(width) {
  if (width == 0) throw std::invalid_argument("atomization of a zero-width word");
}

void Atomization::add_cut(unsigned c) {
  if (c == 0 || c >= width_) return;
  cuts_.insert(c);
}

void Atomization::add_access(unsigned q, unsigned p) {
  if (p > q || q >= width_)
    throw std::out_of_range("access [" + std::to_string(q) + ":" + std::to_string(p) + "] outside width " +
                            std::to_string(width_));
  add_cut(p);
  add_cut(q + 1);
}

std::vector<Atom> Atomization::atoms() const {
  std::vector<Atom> out;
  unsigned lo = 0;
  for (unsigned c : cuts_) {
    out.push_back({c - 1, lo});
    lo = c;
  }
  out.push_back({width_ - 1, lo});
  return out;
}

unsigned Atomization::atom_of(unsigned bit) const {
  unsigned idx = 0;
  for (unsigned c : cuts_) {
    if (c > bit) break;
    ++idx;
  }
  return idx;
}

bool Atomization::aligned(unsigned q, unsigned p) const {
  bool lo_ok = p == 0 || cuts_.count(p);
  bool hi_ok = q + 1 == width_ || cuts_.count(q + 1);
  return lo_ok && hi_ok;
}

Atomization induce(unsigned m, unsigned q, unsigned p) {
  Atomization a(m);
  a.add_access(q, p);
  return a;
}

Atomization refine(const Atomization& a, const Atomization& b) {
  if (a.width() != b.width()) throw std::invalid_argument("refine: atomizations of different widths");
  Atomization r = a;
  for (unsigned c : b.cuts()) r.add_cut(c);
  return r;
}

unsigned AtomMap::largest_atom() const {
  unsigned best = 0;
  for (const auto& w : words)
    for (const auto& a : w.atoms()) best = std::max(best, a.width());
  return best;
}

std::size_t AtomMap::atom_count() const {
  std::size_t n = 0;
  for (const auto& w : words) n += w.cuts().size() + 1;
  return n;
}

std::vector<Access> collect_accesses(const Module& m) {
  std::vector<Access> out;
  auto reads = [&](const Rtl& root) {
    if (!root) return;
    walk(root, [&](const RtlNode& n) {
      if (n.op == RtlOp::Word) out.push_back({static_cast<unsigned>(n.ref), n.hi, n.lo});
    });
  };
  for (const auto& c : m.comb) {
    out.push_back({c.word, c.hi, c.lo});
    reads(c.rhs);
  }
  for (const auto& r : m.reg_next) reads(r);
  for (const auto& a : m.array_next) reads(a);
  return out;
}

AtomMap atomize_accesses(const std::vector<unsigned>& widths, std::span<const Access> accesses) {
  AtomMap map;
  for (unsigned w : widths) map.words.emplace_back(w);
  for (const auto& acc : accesses) {
    Atomization& a = map.words.at(acc.word);
    a = refine(a, induce(a.width(), acc.hi, acc.lo));
  }
  return map;
}

AtomMap atomize(const Module& m, std::span<const Access> extra) {
  std::vector<unsigned> widths;
  for (const auto& w : m.words) widths.push_back(w.width);
  std::vector<Access> all = collect_accesses(m);
  all.insert(all.end(), extra.begin(), extra.end());
  return atomize_accesses(widths, all);
}

std::string format_atom_table(const Module& m, const AtomMap& atoms) {
  std::ostringstream os;
  os << "word\twidth\tatoms\n";
  for (unsigned w = 0; w < m.words.size(); ++w) {
    os << m.words[w].name << "\t" << m.words[w].width << "\t";
    auto as = atoms.atoms(w);
    for (std::size_t i = as.size(); i-- > 0;) {
      os << as[i].hi << ":" << as[i].lo;
      if (i) os << " ";
    }
    os << "\n";
  }
  os << "largest atom\t" << atoms.largest_atom() << "\n";
  return os.str();
}

}  // namespace wste
