// SPDX-License-Identifier: Apache-2.0
// Serial reference vs OpenMP kernels, plus obligation construction across
// word widths.

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "wste/oracle.hpp"
#include "wste/ste.hpp"

using namespace wste;

namespace {

std::string read(const std::string& rel) {
  std::ifstream in(std::string(WSTE_SOURCE_DIR) + "/" + rel);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Args: {width, parallel}
void BM_SoundnessAdd(benchmark::State& st) {
  for (auto _ : st) {
    SoundnessReport r = check_template_soundness(RtlOp::Add, static_cast<unsigned>(st.range(0)), ShiftMode::StrictSound,
                                                 st.range(1) != 0);
    benchmark::DoNotOptimize(r.checks);
  }
}
BENCHMARK(BM_SoundnessAdd)->Args({3, 0})->Args({3, 1})->Args({4, 0})->Args({4, 1})->Unit(benchmark::kMillisecond);

void BM_SoundnessMul(benchmark::State& st) {
  for (auto _ : st) {
    SoundnessReport r = check_template_soundness(RtlOp::Mul, static_cast<unsigned>(st.range(0)), ShiftMode::StrictSound,
                                                 st.range(1) != 0);
    benchmark::DoNotOptimize(r.checks);
  }
}
BENCHMARK(BM_SoundnessMul)->Args({3, 0})->Args({3, 1})->Unit(benchmark::kMillisecond);

// Exact X simulation of the serial multiplier: x at frame 0 and the
// uninitialized datapath registers are unknown (15 bits).
void BM_SimulateX(benchmark::State& st) {
  Module m = load_module(read("designs/smul/smul.wdl"), "smul", {{"W", 3}, {"CW", 3}});
  std::vector<std::map<unsigned, XValue>> stim(8);
  auto known = [](unsigned w, std::uint64_t v) { return XValue{BitVector::from_u64(w, v), BitVector::zeros(w)}; };
  for (unsigned t = 0; t < stim.size(); ++t) {
    stim[t][m.find_word("start")] = known(1, t == 0);
    stim[t][m.find_word("stall")] = known(1, 0);
    stim[t][m.find_word("y")] = known(3, 5);
    stim[t][m.find_word("x")] = known(3, 0);
  }
  stim[0][m.find_word("x")] = XValue{BitVector::zeros(3), BitVector::from_u64(3, 7)};
  for (auto _ : st) {
    XTrace tr = simulate_x(m, stim, 8, 15, st.range(0) != 0);
    benchmark::DoNotOptimize(tr.frames.size());
  }
}
BENCHMARK(BM_SimulateX)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Script generation for the first SAD property; should be flat in W.
void BM_SadP1Emit(benchmark::State& st) {
  std::string design = read("designs/sad/sad.wdl"), spec = read("designs/sad/p1.spec");
  for (auto _ : st) {
    ExprContext cx;
    Module m = load_module(design, "sad", {{"W", static_cast<std::uint64_t>(st.range(0))}});
    Spec s = parse_spec(spec, m, cx);
    SmtScript sc = emit(cx, run_ste(cx, m, s).ob, Query::NegOk);
    benchmark::DoNotOptimize(sc.text.size());
  }
}
BENCHMARK(BM_SadP1Emit)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
