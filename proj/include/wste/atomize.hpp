// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "wste/ir.hpp"

namespace wste {

struct Atom {
  unsigned hi = 0;
  unsigned lo = 0;
  unsigned width() const { return hi - lo + 1; }
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Partition of an m-bit word into atoms, stored as the set of cut
/// positions c (1 <= c <= m-1): bits c-1 and c belong to different atoms.
class Atomization {
 public:
  explicit Atomization(unsigned width = 1);

  unsigned width() const { return width_; }
  const std::set<unsigned>& cuts() const { return cuts_; }

  /// Records an access w[q:p]: p and q+1 become cuts.
  void add_access(unsigned q, unsigned p);
  void add_cut(unsigned c);

  /// Atoms from least to most significant.
  std::vector<Atom> atoms() const;
  /// Index (in `atoms()` order) of the atom holding `bit`.
  unsigned atom_of(unsigned bit) const;
  /// True iff w[q:p] is a concatenation of whole atoms.
  bool aligned(unsigned q, unsigned p) const;

  friend bool operator==(const Atomization&, const Atomization&) = default;

 private:
  unsigned width_;
  std::set<unsigned> cuts_;
};

/// The atomization induced by a single access w[q:p] of an m-bit word.
Atomization induce(unsigned m, unsigned q, unsigned p);
/// Coarsest common refinement: union of the cut sets.
Atomization refine(const Atomization& a, const Atomization& b);

struct Access {
  unsigned word = 0;
  unsigned hi = 0;
  unsigned lo = 0;
};

struct AtomMap {
  std::vector<Atomization> words;  // by word id

  std::vector<Atom> atoms(unsigned word) const { return words[word].atoms(); }
  unsigned largest_atom() const;
  std::size_t atom_count() const;
};

/// Every slice access of the design: assignment targets and word reads in
/// combinational right-hand sides and next-state functions.
std::vector<Access> collect_accesses(const Module& m);

/// Atomization from an explicit access list (processed in order).
AtomMap atomize_accesses(const std::vector<unsigned>& widths, std::span<const Access> accesses);

/// Atomizes the design together with extra accesses (spec tuple references).
AtomMap atomize(const Module& m, std::span<const Access> extra = {});

/// Tab-separated table: word, width, atoms (msb:lsb, most significant first).
std::string format_atom_table(const Module& m, const AtomMap& atoms);

}  // namespace wste
