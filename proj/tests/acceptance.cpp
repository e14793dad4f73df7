// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "support.hpp"

using namespace szen;
using namespace szen::testing;

namespace {

// Wall-clock limits, in seconds.
constexpr double kClassifyLimit = 0.1;
constexpr double kSmallProofLimit = 5.0;
constexpr double kGeometryLimit = 30.0;
constexpr double kInclusionLimit = 0.1;
constexpr int kInclusionMaxApplications = 3;
constexpr int kBranchSemanticsCases = 200;
constexpr int kPropositionalCases = 500;
constexpr int kEqualityCases = 100;
constexpr int kInvariantCases = 1000;
constexpr double kMissRate = 0.05;

struct Verdict {
  bool ok;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

struct Run {
  Problem problem;
  Theory theory;
  ProofResult result;
  RenderedTrace trace;
  double seconds = 0;
};

Run solve(const std::string& file, const std::string& tag) {
  Run r;
  auto t0 = std::chrono::steady_clock::now();
  r.problem = load_problem(fixture(file));
  r.theory = build_theory(r.problem, tag);
  r.result = prove(r.theory, r.problem.conjecture()->formula);
  r.seconds = seconds_since(t0);
  RenderOptions o;
  o.tag = r.theory.tag;
  r.trace = render(r.result, r.problem, o);
  return r;
}

bool compiled(const Theory& th, const std::string& name) {
  const auto* rep = th.find_report(name);
  return rep && rep->compiled;
}

bool regular(const Theory& th, const std::string& name, RegularReason why) {
  const auto* rep = th.find_report(name);
  return rep && !rep->compiled && rep->reason == why;
}

Verdict puzzle_classification() {
  auto t0 = std::chrono::steady_clock::now();
  auto th = build_theory(load_problem(fixture("puzzle132.p")), "szen");
  double s = seconds_since(t0);
  bool ok = true;
  for (const char* n : {"capital_city_type", "washington_type", "usa_type", "country_capital_type", "crime_axiom"})
    ok = ok && compiled(th, n);
  ok = ok && regular(th, "usa_capital_axiom", RegularReason::EqualityLhs);
  ok = ok && regular(th, "beautiful_capital_axiom", RegularReason::Overlap);
  return {ok && s < kClassifyLimit, "5 compiled, 2 regular in " + fmt(s)};
}

Verdict geometry_classification() {
  auto t0 = std::chrono::steady_clock::now();
  auto th = build_theory(load_problem(fixture("geometry170.p")), "szen");
  double s = seconds_since(t0);
  bool ok = compiled(th, "ci2") && compiled(th, "ax2") && compiled(th, "a4");
  ok = ok && regular(th, "ci1", RegularReason::Overlap) && th.find_report("ci1")->overlaps_with == "ci2";
  ok = ok && regular(th, "cu1", RegularReason::Shape);
  return {ok && s < kClassifyLimit, "ci2/ax2/a4 compiled, ci1 overlap, cu1 regular in " + fmt(s)};
}

// The displayed trace of the puzzle has three leaves; see README.
Verdict puzzle_proof() {
  auto r = solve("puzzle132.p", "szen");
  auto sk = skeleton_of(r.trace);
  bool ok = r.result.proved() && r.seconds < kSmallProofLimit;
  for (const char* rule : {"NotAnd", "All", "Imply", "P-NotP", "Axiom", "Extension/szen/usa_type",
                           "Extension/szen/crime_axiom", "Extension/szen/capital_city_type",
                           "Extension/szen/washington_type"})
    ok = ok && sk.rules.count(rule) > 0;
  ok = ok && sk.leaves == 3;
  return {ok, std::to_string(sk.leaves) + " leaves in " + fmt(r.seconds)};
}

Verdict drest_proof() {
  auto r = solve("b_drest.p", "b");
  bool ok = r.result.proved() && r.seconds < kSmallProofLimit;
  int leaves = 0;
  for (const auto& s : r.trace.steps) {
    if (!s.children.empty()) continue;
    ++leaves;
    bool pair = s.rule == "Axiom" && s.hypotheses.size() == 2;
    for (const auto& [id, text] : s.hypotheses)
      pair = pair && text.find("b_in ") != std::string::npos && text.find("(b_BIG)") != std::string::npos;
    ok = ok && pair;
  }
  ok = ok && leaves == 2;
  return {ok, std::to_string(leaves) + " closing b_BIG pairs in " + fmt(r.seconds)};
}

Verdict geometry_proof() {
  auto r = solve("geometry170.p", "szen");
  auto sk = skeleton_of(r.trace);
  bool six = false;
  for (const auto& s : r.trace.steps) six = six || (s.rule == "DisjTree" && s.children.size() == 6);
  bool ok = r.result.proved() && r.seconds < kGeometryLimit && six && sk.rules.count("Extension/szen/a4") >= 2 &&
            sk.rules.count("Extension/szen/not_ax2") > 0 && sk.rules.count("Extension/szen/ci2ctrp") > 0;
  return {ok, std::to_string(r.result.stats.rule_applications) + " applications in " + fmt(r.seconds)};
}

Verdict inclusion_proof() {
  auto r = solve("inclusion.p", "szen");
  long apps = r.result.stats.rule_applications;
  bool ok = r.result.proved() && apps <= kInclusionMaxApplications && r.seconds < kInclusionLimit;
  return {ok, std::to_string(apps) + " applications in " + fmt(r.seconds)};
}

Verdict branch_semantics() {
  std::mt19937 rng(7);
  int checked = 0, wrong = 0;
  for (int i = 0; checked < kBranchSemanticsCases * 3 / 2; ++i) {
    int atoms = 1 + static_cast<int>(rng() % 5);
    auto phi = random_prop(rng, atoms, 3);
    auto prrs = derive_prrs(classify_axiom(equiv(atom("t"), phi)), "ax");
    for (const auto& rule : compile_prr(prrs.at(0))) {
      bool positive = rule.polarity == Polarity::Positive;
      for_each_assignment(atom_names(atoms), [&](const auto& v) {
        bool any = false;
        for (const auto& b : rule.branches) {
          bool all = true;
          for (const auto& lit : b) all = all && eval_prop(lit, v);
          any = any || all;
        }
        wrong += any != (positive ? eval_prop(phi, v) : !eval_prop(phi, v));
      });
      ++checked;
    }
  }
  return {wrong == 0 && checked >= kBranchSemanticsCases,
          std::to_string(checked) + " rules, " + std::to_string(wrong) + " disagreements"};
}

struct OracleTally {
  int cases = 0, valid = 0, missed = 0, unsound = 0;
  Verdict verdict(int min_cases) const {
    bool ok = unsound == 0 && cases >= min_cases && missed <= kMissRate * std::max(valid, 1);
    return {ok, std::to_string(cases) + " cases, " + std::to_string(valid) + " valid, " + std::to_string(missed) +
                    " missed, " + std::to_string(unsound) + " unsound"};
  }
  void record(bool expected, const Theory& th, const ProofResult& r) {
    ++cases;
    valid += expected;
    missed += expected && !r.proved();
    unsound += r.proved() && (!expected || check_proof(*r.tree, *r.table, th.relations).has_value());
  }
};

Verdict propositional_oracle() {
  std::mt19937 rng(2024);
  OracleTally t;
  for (int i = 0; i < kPropositionalCases; ++i) {
    int atoms = 1 + static_cast<int>(rng() % 6);
    std::vector<Formula> axioms;
    for (int k = static_cast<int>(rng() % 4); k > 0; --k) axioms.push_back(random_prop(rng, atoms, 2));
    auto goal = random_prop(rng, atoms, 3);
    auto th = build_theory(make_problem(axioms, goal), "szen");
    t.record(entails(axioms, goal, atoms), th, prove(th, goal));
  }
  return t.verdict(kPropositionalCases);
}

Verdict equality_oracle() {
  std::mt19937 rng(99);
  OracleTally t;
  for (int i = 0; i < kEqualityCases; ++i) {
    std::vector<Formula> lits;
    for (int k = 1 + static_cast<int>(rng() % 5); k > 0; --k) {
      auto a = ground_term(rng, 4), b = ground_term(rng, 4);
      lits.push_back(rng() % 4 ? eq(a, b) : neg(eq(a, b)));
    }
    auto goal = eq(ground_term(rng, 4), ground_term(rng, 4));
    auto th = build_theory(make_problem(lits, goal), "szen");
    t.record(ground_entails(lits, goal), th, prove(th, goal));
  }
  return t.verdict(kEqualityCases);
}

bool children_extend_parent(const ProofNode& n) {
  for (const auto& c : n.children) {
    if (c.formulas.size() < n.formulas.size()) return false;
    if (!std::equal(n.formulas.begin(), n.formulas.end(), c.formulas.begin())) return false;
    if (!children_extend_parent(c)) return false;
  }
  return true;
}

Verdict invariants() {
  std::mt19937 rng(31);
  int unifier = 0, search = 0, pruning = 0, proofs = 0;
  TermGen gen{rng};
  for (int i = 0; i < kInvariantCases; ++i) {
    auto a = gen.formula(2), b = gen.formula(2);
    if (auto s = unify(a, b)) {
      auto sa = substitute(a, *s), sb = substitute(b, *s);
      unifier += alpha_equal(sa, sb) && alpha_equal(substitute(sa, *s), sa);
    } else {
      ++unifier;
    }
  }
  for (int i = 0; i < kInvariantCases; ++i) {
    int atoms = 1 + static_cast<int>(rng() % 4);
    std::vector<Formula> axioms;
    for (int k = static_cast<int>(rng() % 3); k > 0; --k) axioms.push_back(random_prop(rng, atoms, 2));
    auto goal = random_prop(rng, atoms, 2);
    auto th = build_theory(make_problem(axioms, goal), "szen");
    auto table = std::make_shared<FormulaTable>();
    Branch b = initial_branch(th, goal, *table);
    const Branch before = b;
    SearchStats stats;
    auto r = prove_branch(th, b, table, SearchConfig{}, stats);
    bool ok = b == before;
    if (r.proved()) {
      ++proofs;
      ok = ok && children_extend_parent(*r.tree) && !check_proof(*r.tree, *r.table, th.relations);
      ProofNode tree = *r.tree;
      prune(tree);
      pruning += !check_proof(tree, *r.table, th.relations);
    } else {
      ++pruning;
    }
    search += ok;
  }
  bool ok = unifier == kInvariantCases && search == kInvariantCases && pruning == kInvariantCases;
  return {ok, "unifier " + std::to_string(unifier) + ", search " + std::to_string(search) + ", pruning " +
                  std::to_string(pruning) + " of " + std::to_string(kInvariantCases) + " (" + std::to_string(proofs) +
                  " proofs)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"puzzle classification", puzzle_classification},
      {"geometry classification", geometry_classification},
      {"puzzle proof skeleton", puzzle_proof},
      {"domain restriction proof", drest_proof},
      {"geometry proof", geometry_proof},
      {"inclusion proof", inclusion_proof},
      {"branch semantics", branch_semantics},
      {"propositional oracle", propositional_oracle},
      {"ground equality oracle", equality_oracle},
      {"invariants", invariants},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.ok;
    std::printf("%s %2zu %s: %s\n", v.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
