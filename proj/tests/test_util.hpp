// SPDX-License-Identifier: Apache-2.0
// Helpers shared by the test binaries: bundled file paths and a random
// design generator.

#pragma once

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef WSTE_SOURCE_DIR
#define WSTE_SOURCE_DIR "."
#endif

namespace wste::testing {

inline std::string source_path(const std::string& rel) { return std::string(WSTE_SOURCE_DIR) + "/" + rel; }

inline std::string read_source(const std::string& rel) {
  std::ifstream in(source_path(rel));
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline bool solver_available() { return std::system("command -v z3 >/dev/null 2>&1") == 0; }

struct Benchmark {
  std::string design;
  std::vector<std::string> specs;
};

inline const std::vector<Benchmark>& benchmarks() {
  static const std::vector<Benchmark> list = {
      {"designs/sad/sad.wdl",
       {"designs/sad/p1.spec", "designs/sad/p2.spec", "designs/sad/p3.spec", "designs/sad/p4.spec",
        "designs/sad/p5.spec", "designs/sad/p6.spec"}},
      {"designs/smul/smul.wdl", {"designs/smul/q1.spec", "designs/smul/q2.spec", "designs/smul/q3.spec"}},
      {"designs/demo/two_gate.wdl", {"designs/demo/two_gate.spec"}},
  };
  return list;
}

// Each seeded mutant with the property that exposes it.
struct Mutant {
  std::string design;
  std::string spec;
};

inline const std::vector<Mutant>& mutants() {
  static const std::vector<Mutant> list = {
      {"designs/sad/sad_m1.wdl", "designs/sad/p1.spec"},   {"designs/sad/sad_m2.wdl", "designs/sad/p1.spec"},
      {"designs/sad/sad_m3.wdl", "designs/sad/p2.spec"},   {"designs/smul/smul_m1.wdl", "designs/smul/q2.spec"},
      {"designs/smul/smul_m2.wdl", "designs/smul/q1.spec"}, {"designs/smul/smul_m3.wdl", "designs/smul/q1.spec"},
  };
  return list;
}

// ---------------------------------------------------------------------------
// Random WDL designs: inputs, registers and wires of widths 1..12, wires
// assigned whole or in two slices, expressions over slices of earlier words.

struct RandomDesignOptions {
  bool division = true;
  bool var_shift = true;
  bool enables = true;
  int depth = 2;
};

class RandomDesign {
 public:
  RandomDesign(unsigned seed, RandomDesignOptions opt = {}) : rng_(seed), opt_(opt) {}

  std::string generate() {
    std::ostringstream os;
    int ni = pick(2, 4), nr = pick(1, 3), nw = pick(2, 5);
    for (int i = 0; i < ni; ++i) add_word(os, "input", "i" + std::to_string(i));
    for (int i = 0; i < nr; ++i) add_word(os, "reg", "r" + std::to_string(i));
    std::vector<std::pair<std::string, unsigned>> wires;
    for (int i = 0; i < nw; ++i) {
      std::string n = "w" + std::to_string(i);
      unsigned w = static_cast<unsigned>(pick(1, 12));
      os << "wire " << n << ":" << w << ";\n";
      wires.push_back({n, w});
    }
    // Wires are assigned in order and may read inputs, registers and
    // earlier wires.
    for (const auto& [n, w] : wires) {
      if (w >= 2 && coin()) {
        unsigned mid = static_cast<unsigned>(pick(1, static_cast<int>(w) - 1));
        os << n << "[" << w - 1 << ":" << mid << "] = " << expr(w - mid, opt_.depth) << ";\n";
        os << n << "[" << mid - 1 << ":0] = " << expr(mid, opt_.depth) << ";\n";
      } else {
        os << n << " = " << expr(w, opt_.depth) << ";\n";
      }
      readable_.push_back({n, w});
    }
    for (const auto& [n, w] : regs_) {
      if (opt_.enables && coin()) {
        os << "if (" << expr(1, 0) << ") " << n << " <= " << expr(w, opt_.depth) << ";\n";
      } else {
        os << n << " <= " << expr(w, opt_.depth) << ";\n";
      }
    }
    return os.str();
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return pick(0, 1) == 1; }

  void add_word(std::ostringstream& os, const std::string& kind, const std::string& n) {
    unsigned w = static_cast<unsigned>(pick(1, 12));
    os << kind << " " << n << ":" << w;
    if (kind == "reg" && coin()) os << " = " << pick(0, (1 << std::min(w, 10u)) - 1);
    os << ";\n";
    readable_.push_back({n, w});
    if (kind == "reg") regs_.push_back({n, w});
  }

  std::string leaf(unsigned w) {
    if (pick(0, 5) == 0) return std::to_string(w) + "'d" + std::to_string(pick(0, (1 << std::min(w, 10u)) - 1));
    const auto& [n, ww] = readable_[static_cast<std::size_t>(pick(0, static_cast<int>(readable_.size()) - 1))];
    if (ww == w) return n;
    if (ww > w) {
      unsigned lo = static_cast<unsigned>(pick(0, static_cast<int>(ww - w)));
      if (w == 1) return n + "[" + std::to_string(lo) + "]";
      return n + "[" + std::to_string(lo + w - 1) + ":" + std::to_string(lo) + "]";
    }
    return "{" + std::to_string(w - ww) + "'d0, " + n + "}";
  }

  std::string expr(unsigned w, int depth) {
    if (depth <= 0) return leaf(w);
    switch (pick(0, 11)) {
      case 0: return "(" + expr(w, depth - 1) + " + " + expr(w, depth - 1) + ")";
      case 1: return "(" + expr(w, depth - 1) + " - " + expr(w, depth - 1) + ")";
      case 2: return "(" + expr(w, depth - 1) + " & " + expr(w, depth - 1) + ")";
      case 3: return "(" + expr(w, depth - 1) + " | " + expr(w, depth - 1) + ")";
      case 4: return "(" + expr(w, depth - 1) + " ^ " + expr(w, depth - 1) + ")";
      case 5: return "(" + expr(w, depth - 1) + " * " + expr(w, depth - 1) + ")";
      case 6: return "(" + expr(1, depth - 1) + " ? " + expr(w, depth - 1) + " : " + expr(w, depth - 1) + ")";
      case 7:
        if (w >= 2) {
          unsigned hi = static_cast<unsigned>(pick(1, static_cast<int>(w) - 1));
          return "{" + expr(hi, depth - 1) + ", " + expr(w - hi, depth - 1) + "}";
        }
        return "~" + expr(w, depth - 1);
      case 8: return "(" + expr(w, depth - 1) + (coin() ? " << " : " >> ") + std::to_string(pick(0, w)) + ")";
      case 9:
        if (opt_.var_shift) return "(" + expr(w, depth - 1) + (coin() ? " << " : " >> ") + leaf(w) + ")";
        return leaf(w);
      case 10:
        if (opt_.division) return "(" + expr(w, depth - 1) + (coin() ? " / " : " % ") + expr(w, depth - 1) + ")";
        return leaf(w);
      default:
        if (w == 1) {
          unsigned k = static_cast<unsigned>(pick(1, 8));
          const char* ops[] = {" == ", " < ", " <= ", " != "};
          return "(" + expr(k, depth - 1) + ops[pick(0, 3)] + expr(k, depth - 1) + ")";
        }
        return leaf(w);
    }
  }

  std::mt19937 rng_;
  RandomDesignOptions opt_;
  std::vector<std::pair<std::string, unsigned>> readable_;
  std::vector<std::pair<std::string, unsigned>> regs_;
};

}  // namespace wste::testing
