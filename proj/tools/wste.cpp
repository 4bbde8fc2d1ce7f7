// SPDX-License-Identifier: Apache-2.0
// wste: command-line driver (verify, atomize, simulate).

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wste/oracle.hpp"
#include "wste/ste.hpp"
#include "wste/stimulus.hpp"

using namespace wste;
using json = nlohmann::ordered_json;

namespace {

enum Exit : int { kPass = 0, kFail = 1, kAntFail = 2, kUnknown = 3, kUsage = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ParamOverrides parse_params(const std::vector<std::string>& items) {
  ParamOverrides out;
  for (const auto& it : items) {
    auto eq = it.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("parameter override must be NAME=VALUE, got '" + it + "'");
    try {
      out[it.substr(0, eq)] = BigUint(it.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("parameter value is not a number: '" + it + "'");
    }
  }
  return out;
}

// Source errors carry line:col; prefix the file they came from.
template <class F>
auto with_path(const std::string& path, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const SourceError& e) {
    throw UsageError(path + ":" + e.what());
  }
}

Module load(const std::string& path, const std::vector<std::string>& params) {
  std::string text = read_file(path);
  ParamOverrides ov = parse_params(params);
  return with_path(path, [&] { return load_module(text, "top", ov); });
}

class Stopwatch {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

json params_json(const Module& m) {
  json j = json::object();
  for (const auto& [k, v] : m.params) j[k] = v.str();
  return j;
}

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string design, spec, mode = "ste", antfail = "report", shift = "strict-sound", solver, dump, format = "human";
  unsigned frames = 0;
  double timeout = 60;
  std::vector<std::string> params;
  bool no_solve = false, div_by_zero = false;
};

int cmd_verify(const VerifyArgs& a) {
  Stopwatch sw;
  json timings = json::object();
  ExprContext cx;
  Module m = load(a.design, a.params);
  std::string spec_text = read_file(a.spec);
  Spec spec = with_path(a.spec, [&] { return parse_spec(spec_text, m, cx); });
  timings["parse"] = sw.lap();
  AtomMap atoms = atomize(m, spec.accesses());
  timings["atomize"] = sw.lap();

  SteOptions so;
  so.shift_mode = a.shift == "paper-faithful" ? ShiftMode::PaperFaithful : ShiftMode::StrictSound;
  Obligation ob = a.mode == "bmc" ? run_bmc(cx, m, spec, a.frames) : run_ste(cx, m, spec, a.frames, so).ob;
  timings["simulate"] = sw.lap();

  CheckOptions co;
  co.policy = a.antfail == "assume" ? AntFailPolicy::Assume : AntFailPolicy::Report;
  co.solver.command = a.solver.empty() ? default_solver_command() : a.solver;
  co.solver.timeout = std::chrono::milliseconds(static_cast<long long>(a.timeout * 1000));
  co.dry_run = a.no_solve;
  co.div_by_zero_query = a.div_by_zero;
  std::vector<std::string> dumped;
  if (!a.dump.empty()) {
    co.on_script = [&](const std::string& name, const SmtScript& s) {
      std::string path = a.dump + "." + name + ".smt2";
      std::ofstream(path) << s.text;
      dumped.push_back(path);
    };
  }
  sw.lap();
  VerifResult r = check(cx, ob, co);
  double check_total = sw.lap();
  double solve = 0, emit_s = 0;
  for (const auto& q : r.queries) {
    solve += q.seconds;
    emit_s += q.emit_seconds;
  }
  timings["emit"] = a.no_solve ? check_total : emit_s;
  timings["solve"] = solve;

  std::optional<ReplayResult> rep;
  if (r.verdict == Verdict::Fail) {
    rep = replay(m, spec, ob, r.model);
    timings["replay"] = sw.lap();
  }
  // Confirmed: a valid model, and replay reproduces every violated check.
  bool confirmed = rep && r.model_valid && !r.violated.empty();
  if (confirmed)
    for (auto i : r.violated)
      confirmed = confirmed && std::find(rep->mismatched.begin(), rep->mismatched.end(), i) != rep->mismatched.end();

  int code = kUnknown;
  switch (r.verdict) {
    case Verdict::Pass: code = kPass; break;
    case Verdict::Fail: code = kFail; break;
    case Verdict::AntecedentFailure: code = kAntFail; break;
    case Verdict::Unknown: code = kUnknown; break;
  }

  // Counterexample variables: guard variables, division witnesses, BMC inputs.
  std::vector<Expr> shown = ob.guard_vars;
  shown.insert(shown.end(), ob.witnesses.begin(), ob.witnesses.end());
  shown.insert(shown.end(), ob.fresh_inputs.begin(), ob.fresh_inputs.end());
  bool has_model = r.verdict == Verdict::Fail || r.verdict == Verdict::AntecedentFailure;
  auto check_status = [&](std::size_t i) -> std::string {
    if (r.verdict == Verdict::Pass) return "holds";
    if (r.verdict == Verdict::Fail)
      return std::find(r.violated.begin(), r.violated.end(), i) != r.violated.end() ? "violated" : "holds-in-model";
    return "unknown";
  };

  if (a.format == "json") {
    json j;
    j["schema"] = "wste-report/1";
    j["command"] = "verify";
    j["design"] = a.design;
    j["spec"] = a.spec;
    j["params"] = params_json(m);
    j["mode"] = a.mode;
    j["antfail_policy"] = a.antfail;
    j["shift_mode"] = a.shift;
    j["frames"] = ob.frames;
    j["verdict"] = verdict_name(r.verdict);
    j["exit_code"] = code;
    j["vacuous"] = r.vacuous;
    j["warnings"] = r.warnings;
    j["diagnostics"] = r.diagnostics;
    j["atoms"] = {{"count", atoms.atom_count()}, {"largest", atoms.largest_atom()}};
    json checks = json::array();
    for (std::size_t i = 0; i < ob.checks.size(); ++i)
      checks.push_back({{"label", ob.checks[i].label}, {"status", check_status(i)}});
    j["checks"] = checks;
    if (has_model) {
      json cex;
      json vals = json::object();
      for (Expr v : shown)
        if (auto it = r.model.find(v.name()); it != r.model.end()) vals[v.name()] = it->second.to_string();
      cex["assignment"] = vals;
      cex["defaulted"] = r.defaulted;
      json viol = json::array(), af = json::array();
      for (auto i : r.violated) viol.push_back(ob.checks[i].label);
      for (auto i : r.antfail) af.push_back(ob.antfail[i].label);
      cex["violated"] = viol;
      cex["antecedent_failures"] = af;
      cex["model_valid"] = r.model_valid;
      if (rep) {
        json mm = json::array();
        for (auto i : rep->mismatched) mm.push_back(ob.checks[i].label);
        cex["replay"] = {{"confirmed", confirmed}, {"mismatched", mm}};
      }
      j["counterexample"] = cex;
    } else {
      j["counterexample"] = nullptr;
    }
    json qs = json::array();
    for (const auto& q : r.queries)
      qs.push_back({{"name", q.name}, {"status", status_name(q.status)}, {"assertions", q.assertions},
                    {"seconds", q.seconds}});
    j["queries"] = qs;
    j["div_by_zero_reachable"] = r.div_by_zero_reachable ? json(*r.div_by_zero_reachable) : json(nullptr);
    j["smt_files"] = dumped;
    j["timings"] = timings;
    emit_json(j);
    return code;
  }

  std::cout << "design   " << a.design;
  if (!m.params.empty()) {
    std::cout << " (";
    bool first = true;
    for (const auto& [k, v] : m.params) {
      std::cout << (first ? "" : ", ") << k << "=" << v;
      first = false;
    }
    std::cout << ")";
  }
  std::cout << "\nspec     " << a.spec << "\n";
  std::cout << "mode     " << a.mode << ", " << ob.frames << " frames, antfail=" << a.antfail << ", shift=" << a.shift
            << "\n";
  std::cout << "atoms    " << atoms.atom_count() << " (largest " << atoms.largest_atom() << " bits)\n";
  std::cout << "verdict  " << verdict_name(r.verdict) << (r.vacuous ? " (vacuous)" : "") << "\n";
  for (const auto& w : r.warnings) std::cout << "warning  " << w << "\n";
  if (!r.diagnostics.empty()) std::cout << "diag     " << r.diagnostics << "\n";
  std::cout << "\nchecks\n";
  for (std::size_t i = 0; i < ob.checks.size(); ++i)
    std::cout << "  " << ob.checks[i].label << "\t" << check_status(i) << "\n";
  if (has_model) {
    std::cout << "\ncounterexample\n";
    for (Expr v : shown)
      if (auto it = r.model.find(v.name()); it != r.model.end())
        std::cout << "  " << v.name() << "\t= " << it->second.to_string() << "\n";
    for (auto i : r.violated) std::cout << "  violated\t" << ob.checks[i].label << "\n";
    for (auto i : r.antfail) std::cout << "  antecedent failure\t" << ob.antfail[i].label << "\n";
    if (!r.model_valid) std::cout << "  model does not satisfy the script\n";
    if (rep) {
      std::cout << "  replay\t" << (confirmed ? "confirmed" : "not confirmed");
      for (auto i : rep->mismatched) std::cout << " " << ob.checks[i].label;
      std::cout << "\n";
    }
  }
  for (const auto& p : dumped) std::cout << "smt      " << p << "\n";
  std::cout << "\ntimings (s)";
  for (const auto& [k, v] : timings.items()) std::cout << "  " << k << " " << v.get<double>();
  std::cout << "\n";
  return code;
}

// ---------------------------------------------------------------------------

int cmd_atomize(const std::string& design, const std::string& spec_path, const std::vector<std::string>& params,
                const std::string& format) {
  ExprContext cx;
  Module m = load(design, params);
  std::vector<Access> extra;
  if (!spec_path.empty()) {
    std::string text = read_file(spec_path);
    extra = with_path(spec_path, [&] { return parse_spec(text, m, cx); }).accesses();
  }
  AtomMap atoms = atomize(m, extra);
  if (format == "json") {
    json words = json::array();
    for (unsigned w = 0; w < m.words.size(); ++w) {
      json list = json::array();
      auto at = atoms.atoms(w);
      for (auto it = at.rbegin(); it != at.rend(); ++it) list.push_back({it->hi, it->lo});
      words.push_back({{"word", m.words[w].name}, {"width", m.words[w].width}, {"atoms", list}});
    }
    emit_json({{"schema", "wste-atoms/1"},
               {"design", design},
               {"params", params_json(m)},
               {"words", words},
               {"atom_count", atoms.atom_count()},
               {"largest_atom", atoms.largest_atom()}});
    return kPass;
  }
  std::cout << format_atom_table(m, atoms);
  std::cout << "atom count\t" << atoms.atom_count() << "\n";
  return kPass;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& design, const std::string& stim_path, unsigned frames, unsigned budget,
                 const std::vector<std::string>& params, const std::string& format) {
  Module m = load(design, params);
  std::string text = read_file(stim_path);
  auto stim = with_path(stim_path, [&] { return parse_stimulus(text, m); });
  if (frames == 0) frames = static_cast<unsigned>(stim.size());
  if (frames > stim.size())
    throw UsageError("stimulus has " + std::to_string(stim.size()) + " frames, " + std::to_string(frames) +
                     " requested");
  XTrace tr;
  try {
    tr = simulate_x(m, stim, frames, budget);
  } catch (const BudgetError& e) {
    throw UsageError(std::string(e.what()) + " (raise --budget or drive more inputs)");
  }
  if (format == "json") {
    json fr = json::array();
    for (const auto& f : tr.frames) {
      json row = json::object();
      for (unsigned w = 0; w < m.words.size(); ++w) row[m.words[w].name] = f[w].str();
      fr.push_back(row);
    }
    emit_json({{"schema", "wste-trace/1"}, {"design", design}, {"frames", fr}});
    return kPass;
  }
  std::cout << "frame";
  for (const auto& w : m.words) std::cout << "\t" << w.name;
  std::cout << "\n";
  for (std::size_t t = 0; t < tr.frames.size(); ++t) {
    std::cout << t;
    for (const auto& v : tr.frames[t]) std::cout << "\t" << v.str();
    std::cout << "\n";
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word-level symbolic trajectory evaluation"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"human", "json"};

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check a trajectory spec against a design");
  verify->add_option("design", va.design, "WDL design file")->required();
  verify->add_option("spec", va.spec, "Spec file")->required();
  verify->add_option("--mode", va.mode, "ste or bmc")->check(CLI::IsMember({"ste", "bmc"}));
  verify->add_option("--frames", va.frames, "Frames to simulate (default: last spec frame)");
  verify->add_option("--antfail", va.antfail, "report or assume")->check(CLI::IsMember({"report", "assume"}));
  verify->add_option("--shift", va.shift, "Variable shift rule")
      ->check(CLI::IsMember({"strict-sound", "paper-faithful"}));
  verify->add_option("--solver", va.solver, "Solver command, {} is the script path (default $WSTE_SOLVER or z3)");
  verify->add_option("--timeout", va.timeout, "Solver timeout in seconds")->check(CLI::PositiveNumber);
  verify->add_option("--dump-smt", va.dump, "Write each query to PREFIX.<query>.smt2");
  verify->add_option("-P,--param", va.params, "Parameter override NAME=VALUE");
  verify->add_flag("--no-solve", va.no_solve, "Build and dump scripts without running the solver");
  verify->add_flag("--div-by-zero", va.div_by_zero, "Also ask whether a valid divisor can be zero");
  verify->add_option("--format", va.format, "human or json")->check(CLI::IsMember(formats));

  std::string a_design, a_spec, a_format = "human";
  std::vector<std::string> a_params;
  auto* atom = app.add_subcommand("atomize", "Print the atomization of a design");
  atom->add_option("design", a_design, "WDL design file")->required();
  atom->add_option("spec", a_spec, "Optional spec whose slices also refine the atoms");
  atom->add_option("-P,--param", a_params, "Parameter override NAME=VALUE");
  atom->add_option("--format", a_format, "human or json")->check(CLI::IsMember(formats));

  std::string s_design, s_stim, s_format = "human";
  unsigned s_frames = 0, s_budget = 12;
  std::vector<std::string> s_params;
  auto* sim = app.add_subcommand("simulate", "Exact X simulation of a stimulus");
  sim->add_option("design", s_design, "WDL design file")->required();
  sim->add_option("stimulus", s_stim, "Stimulus file")->required();
  sim->add_option("--frames", s_frames, "Frames (default: stimulus length)");
  sim->add_option("--budget", s_budget, "Maximum number of enumerated X bits");
  sim->add_option("-P,--param", s_params, "Parameter override NAME=VALUE");
  sim->add_option("--format", s_format, "human or json")->check(CLI::IsMember(formats));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    if (*verify) return cmd_verify(va);
    if (*atom) return cmd_atomize(a_design, a_spec, a_params, a_format);
    if (*sim) return cmd_simulate(s_design, s_stim, s_frames, s_budget, s_params, s_format);
  } catch (const SourceError& e) {
    std::cerr << "wste: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "wste: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "wste: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "wste: internal error: " << e.what() << "\n";
    return kUnknown;
  }
  return kUsage;
}
