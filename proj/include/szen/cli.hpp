// szen :: command-line driver
//
// parse -> compile -> prove -> render. Traces go to `out`, diagnostics to
// `err`. Exit status: 0 proof, 1 no proof or timeout, 2 bad input.

#ifndef SZEN_CLI_HPP_
#define SZEN_CLI_HPP_

#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include "szen/compiler.hpp"
#include "szen/render.hpp"
#include "szen/tableau.hpp"
#include "szen/tptp.hpp"

namespace szen {

struct RunOptions {
  std::string input;
  std::vector<std::string> include_dirs;
  double timeout_seconds = 30.0;
  std::size_t max_steps = 10000;
  bool cut = false;
  TraceLevel trace = TraceLevel::Trace;
  bool list_rules = false;
  bool stats = false;
  bool detect_relations = true;
  bool legend = false;
  std::string tag = "szen";
};

enum ExitCode : int { kExitProof = 0, kExitNoProof = 1, kExitInputError = 2 };

inline int run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.timeout_seconds <= 0 || opts.max_steps == 0) {
    err << "szen: --timeout and --max-steps must be positive\n";
    return kExitInputError;
  }
  Problem problem;
  try {
    problem = load_problem(opts.input, opts.include_dirs);
  } catch (const std::exception& e) {
    err << "szen: " << e.what() << "\n";
    return kExitInputError;
  }
  const auto* conj = problem.conjecture();
  if (!conj) {
    err << "szen: " << opts.input << ": no conjecture\n";
    return kExitInputError;
  }

  BuildOptions bo;
  bo.detect_relations = opts.detect_relations;
  Theory th = build_theory(problem, opts.tag, bo);
  if (opts.list_rules) out << theory_to_string(th);

  SearchConfig cfg;
  cfg.timeout_seconds = opts.timeout_seconds;
  cfg.max_rule_applications = opts.max_steps;
  cfg.cut_enabled = opts.cut;
  ProofResult res = prove(th, conj->formula, cfg);

  RenderOptions ro;
  ro.level = opts.trace;
  ro.tag = th.tag;
  ro.legend = opts.legend;
  out << render_text(res, problem, ro);

  if (opts.stats) {
    const auto& s = res.stats;
    out << "% rule applications: " << s.rule_applications << "\n"
        << "% branches: " << s.branches << "\n"
        << "% attempts: " << s.attempts << "\n"
        << "% depth bound: " << s.max_depth_bound << "\n"
        << "% budget exhausted: " << (s.budget_hit ? "yes" : "no") << "\n"
        << "% seconds: " << s.wall_seconds << "\n";
  }
  return res.proved() ? kExitProof : kExitNoProof;
}

}  // namespace szen

#endif  // SZEN_CLI_HPP_
