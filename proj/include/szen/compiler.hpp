// szen :: superdeduction rule compiler
//
// Eligible theory axioms are oriented into proposition rewrite rules and each
// rule is compiled into a tableau rule by saturating its right-hand side with
// the closure, analytic and metavariable-gamma rules.

#ifndef SZEN_COMPILER_HPP_
#define SZEN_COMPILER_HPP_

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "szen/logic.hpp"
#include "szen/tptp.hpp"

namespace szen {

enum class Polarity { Positive, Negative };

// A proposition rewrite rule lhs -> rhs, standing for the closed axiom
// forall params (lhs <=> rhs). `lhs` is an atom or a negated atom.
struct PropositionRewriteRule {
  std::string name;
  std::string axiom;
  Formula lhs;
  Formula rhs;
  std::vector<std::string> params;
  // Equivalences yield a positive and a negative rule; everything else only the positive one.
  bool both_polarities = false;
  // Oriented along an implication from its atomic premise (forward chaining).
  bool forward = false;
};

enum class AxiomForm { Equiv, AtomicImpl, ImplLeftAtomic, ImplRightAtomic, UniversalAtom, Regular };
enum class RegularReason { None, Shape, EqualityLhs, Overlap, RelationProperty };

inline const char* form_name(AxiomForm f) {
  switch (f) {
    case AxiomForm::Equiv: return "equivalence";
    case AxiomForm::AtomicImpl: return "atomic-implication";
    case AxiomForm::ImplLeftAtomic: return "implication-left-atomic";
    case AxiomForm::ImplRightAtomic: return "implication-right-atomic";
    case AxiomForm::UniversalAtom: return "universal-atom";
    case AxiomForm::Regular: return "regular";
  }
  return "?";
}

inline const char* reason_name(RegularReason r) {
  switch (r) {
    case RegularReason::None: return "none";
    case RegularReason::Shape: return "shape";
    case RegularReason::EqualityLhs: return "equality-lhs";
    case RegularReason::Overlap: return "overlap";
    case RegularReason::RelationProperty: return "relation-property";
  }
  return "?";
}

struct AxiomClassification {
  AxiomForm form = AxiomForm::Regular;
  RegularReason reason = RegularReason::Shape;
  // The designated atomic side P and the other side (phi or P').
  Formula atom;
  Formula other;
  std::vector<std::string> prefix;  // stripped universal prefix

  bool regular() const noexcept { return form == AxiomForm::Regular; }
};

struct SuperRule {
  std::string name;   // display name, rendered as Extension/<tag>/<name>
  std::string axiom;  // originating axiom
  Polarity polarity = Polarity::Positive;
  Formula trigger;    // literal pattern over params
  std::vector<std::vector<Formula>> branches;
  std::vector<int> metavars;  // schema metavariable ids
  std::vector<Term> epsilons;
  std::vector<std::string> params;
  bool has_inst_variant = false;
  bool forward = false;

  std::size_t fresh_metavars() const noexcept { return metavars.size(); }
  bool branching() const noexcept { return branches.size() > 1; }
  // All branches reduce to False.
  bool closing() const {
    for (const auto& b : branches)
      if (!(b.size() == 1 && b[0]->kind() == Kind::False)) return false;
    return true;
  }
};

struct RelationFlags {
  bool reflexive = false;
  bool symmetric = false;
  bool transitive = false;
};

class RelationProperties {
public:
  void set(const std::string& pred, RelationFlags f) { flags_[pred] = f; }
  RelationFlags& at(const std::string& pred) { return flags_[pred]; }

  // Equality is always reflexive, symmetric and transitive.
  RelationFlags of(const Formula& atom) const {
    if (atom->kind() == Kind::Eq) return {true, true, true};
    if (atom->kind() != Kind::Atom || atom->arity() != 2) return {};
    auto it = flags_.find(atom->name());
    return it == flags_.end() ? RelationFlags{} : it->second;
  }
  const std::map<std::string, RelationFlags>& all() const noexcept { return flags_; }

private:
  std::map<std::string, RelationFlags> flags_;
};

struct AxiomReport {
  std::string name;
  AxiomClassification classification;
  bool compiled = false;
  RegularReason reason = RegularReason::None;
  std::string overlaps_with;  // rule name, when demoted for overlap
  std::vector<std::string> rules;
};

struct Theory {
  std::string tag;
  std::vector<SuperRule> rules;
  std::vector<AnnotatedFormula> residual_axioms;
  std::vector<AnnotatedFormula> compiled_axioms;
  RelationProperties relations;
  std::vector<AxiomReport> report;

  const AxiomReport* find_report(const std::string& axiom) const {
    for (const auto& r : report)
      if (r.name == axiom) return &r;
    return nullptr;
  }
};

struct BuildOptions {
  bool detect_relations = true;
};

// ---------------------------------------------------------------------------
// Classification

inline Formula negate_literal(const Formula& lit) {
  return lit->kind() == Kind::Not ? lit->body() : neg(lit);
}

inline AxiomClassification classify_axiom(const Formula& f) {
  AxiomClassification c;
  Formula m = f;
  while (m->kind() == Kind::Forall) {
    c.prefix.push_back(m->name());
    m = m->body();
  }
  auto regular = [&](RegularReason r) {
    c.form = AxiomForm::Regular;
    c.reason = r;
    return c;
  };
  auto set = [&](AxiomForm form, Formula atom_side, Formula other) {
    c.form = form;
    c.reason = RegularReason::None;
    c.atom = std::move(atom_side);
    c.other = std::move(other);
    return c;
  };
  auto is_plain_atom = [](const Formula& x) { return x->kind() == Kind::Atom; };

  switch (m->kind()) {
    case Kind::Equiv: {
      const Formula& l = m->lhs();
      const Formula& r = m->rhs();
      if (is_plain_atom(l)) return set(AxiomForm::Equiv, l, r);
      if (is_plain_atom(r)) return set(AxiomForm::Equiv, r, l);
      if (is_atomic(l) || is_atomic(r)) return regular(RegularReason::EqualityLhs);
      return regular(RegularReason::Shape);
    }
    case Kind::Implies: {
      const Formula& l = m->lhs();
      const Formula& r = m->rhs();
      if (is_atomic(l) && is_literal(r)) {
        if (l->kind() == Kind::Eq || literal_atom(r)->kind() == Kind::Eq) return regular(RegularReason::EqualityLhs);
        return set(AxiomForm::AtomicImpl, l, r);
      }
      if (is_atomic(l)) {
        if (l->kind() == Kind::Eq) return regular(RegularReason::EqualityLhs);
        return set(AxiomForm::ImplLeftAtomic, l, r);
      }
      if (is_atomic(r)) {
        if (r->kind() == Kind::Eq) return regular(RegularReason::EqualityLhs);
        return set(AxiomForm::ImplRightAtomic, r, l);
      }
      return regular(RegularReason::Shape);
    }
    case Kind::Atom:
      return set(AxiomForm::UniversalAtom, m, nullptr);
    case Kind::Eq:
      return regular(RegularReason::EqualityLhs);
    default:
      return regular(RegularReason::Shape);
  }
}

namespace detail {

inline std::vector<std::string> sorted_params(const Formula& a, const Formula& b, const std::vector<std::string>& prefix) {
  auto fa = free_variables(a);
  if (b) {
    auto fb = free_variables(b);
    fa.insert(fb.begin(), fb.end());
  }
  // Keep quantifier order for readability.
  std::vector<std::string> out;
  for (const auto& v : prefix)
    if (fa.count(v) && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  for (const auto& v : fa)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

inline Formula strip_double_negation(Formula f) {
  while (f->kind() == Kind::Not && f->body()->kind() == Kind::Not) f = f->body()->body();
  return f;
}

}  // namespace detail

inline std::vector<PropositionRewriteRule> derive_prrs(const AxiomClassification& c, const std::string& name) {
  if (c.regular()) throw std::invalid_argument("derive_prrs: axiom '" + name + "' is not eligible");
  auto params = detail::sorted_params(c.atom, c.other, c.prefix);
  auto rule = [&](std::string rule_name, Formula lhs, Formula rhs, bool both, bool forward = false) {
    return PropositionRewriteRule{std::move(rule_name), name, detail::strip_double_negation(std::move(lhs)),
                                  std::move(rhs), params, both, forward};
  };
  switch (c.form) {
    case AxiomForm::Equiv:
      return {rule(name, c.atom, c.other, true)};
    case AxiomForm::AtomicImpl: {
      // P => P' gives P -> P' and the converse ~P' -> ~P. A converse whose
      // trigger is a positive atom (P' negated) is named <name>ctrp.
      std::string converse = literal_positive(c.other) ? name : name + "ctrp";
      return {rule(name, c.atom, c.other, false, true), rule(converse, neg(c.other), neg(c.atom), false)};
    }
    case AxiomForm::ImplLeftAtomic:
      return {rule(name, c.atom, c.other, false, true)};
    case AxiomForm::ImplRightAtomic:
      return {rule(name, neg(c.atom), neg(c.other), false)};
    case AxiomForm::UniversalAtom:
      return {rule(name, neg(c.atom), bot(), false)};
    case AxiomForm::Regular:
      break;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Rule computation by saturation

namespace detail {

class Saturator {
public:
  struct Result {
    std::vector<std::vector<Formula>> branches;
    std::vector<int> metavars;
    std::vector<Term> epsilons;
  };

  Result run(const Formula& root) {
    Leaf leaf;
    leaf.pending.push_back(root);
    saturate(std::move(leaf));
    return std::move(result_);
  }

private:
  struct Leaf {
    std::vector<Formula> pending;
    std::vector<Formula> literals;
  };

  int fresh_meta() {
    int id = static_cast<int>(result_.metavars.size());
    result_.metavars.push_back(id);
    return id;
  }

  Term epsilon_for(const std::string& bound, const Formula& body) {
    Term e = eps(bound, body);
    bool seen = false;
    for (const auto& x : result_.epsilons) seen = seen || alpha_equal(x, e);
    if (!seen) result_.epsilons.push_back(e);
    return e;
  }

  static bool closes(const std::vector<Formula>& lits, const Formula& f) {
    const Formula& a = literal_atom(f);
    bool pos = literal_positive(f);
    if (!pos && a->kind() == Kind::Eq && alpha_equal(a->lhs(), a->rhs())) return true;
    for (const auto& g : lits) {
      if (literal_positive(g) == pos) continue;
      const Formula& b = literal_atom(g);
      if (alpha_equal(a, b)) return true;
      if (a->kind() == Kind::Eq && b->kind() == Kind::Eq && alpha_equal(a->lhs(), b->rhs()) &&
          alpha_equal(a->rhs(), b->lhs()))
        return true;
    }
    return false;
  }

  void finish(Leaf& leaf) { result_.branches.push_back(std::move(leaf.literals)); }

  void saturate(Leaf leaf) {
    while (!leaf.pending.empty()) {
      Formula f = leaf.pending.front();
      leaf.pending.erase(leaf.pending.begin());
      const Kind k = f->kind();
      if (k == Kind::True) continue;
      if (k == Kind::False) {
        result_.branches.push_back({bot()});
        return;
      }
      if (is_literal(f)) {
        bool dup = false;
        for (const auto& g : leaf.literals) dup = dup || alpha_equal(f, g);
        if (dup) continue;
        leaf.literals.push_back(f);
        // A leaf closed by complementary literals keeps its literals.
        if (closes(leaf.literals, f)) return finish(leaf);
        continue;
      }
      switch (k) {
        case Kind::And:
          leaf.pending.push_back(f->lhs());
          leaf.pending.push_back(f->rhs());
          continue;
        case Kind::Or:
          return split(leaf, {f->lhs()}, {f->rhs()});
        case Kind::Implies:
          return split(leaf, {neg(f->lhs())}, {f->rhs()});
        case Kind::Equiv:
          return split(leaf, {neg(f->lhs()), neg(f->rhs())}, {f->lhs(), f->rhs()});
        case Kind::Exists:
          leaf.pending.push_back(instantiate(*f, epsilon_for(f->name(), f->body())));
          continue;
        case Kind::Forall:
          leaf.pending.push_back(instantiate(*f, meta(fresh_meta())));
          continue;
        case Kind::Not:
          break;
        default:
          assert(false);
          continue;
      }
      const Formula& g = f->body();
      switch (g->kind()) {
        case Kind::True:
          result_.branches.push_back({bot()});
          return;
        case Kind::False:
          continue;
        case Kind::Not:
          leaf.pending.push_back(g->body());
          continue;
        case Kind::Or:
          leaf.pending.push_back(neg(g->lhs()));
          leaf.pending.push_back(neg(g->rhs()));
          continue;
        case Kind::Implies:
          leaf.pending.push_back(g->lhs());
          leaf.pending.push_back(neg(g->rhs()));
          continue;
        case Kind::And:
          return split(leaf, {neg(g->lhs())}, {neg(g->rhs())});
        case Kind::Equiv:
          return split(leaf, {neg(g->lhs()), g->rhs()}, {g->lhs(), neg(g->rhs())});
        case Kind::Forall:
          leaf.pending.push_back(neg(instantiate(*g, epsilon_for(g->name(), neg(g->body())))));
          continue;
        case Kind::Exists:
          leaf.pending.push_back(neg(instantiate(*g, meta(fresh_meta()))));
          continue;
        default:
          assert(false);
          continue;
      }
    }
    finish(leaf);
  }

  void split(const Leaf& leaf, std::vector<Formula> left, std::vector<Formula> right) {
    Leaf l = leaf, r = leaf;
    for (auto& f : left) l.pending.push_back(std::move(f));
    for (auto& f : right) r.pending.push_back(std::move(f));
    saturate(std::move(l));
    saturate(std::move(r));
  }

  Result result_;
};

}  // namespace detail

inline SuperRule compile_superrule(const PropositionRewriteRule& r, Polarity polarity = Polarity::Positive) {
  SuperRule out;
  out.axiom = r.axiom;
  out.polarity = polarity;
  out.params = r.params;
  Formula root;
  if (polarity == Polarity::Positive) {
    out.name = r.name;
    out.trigger = r.lhs;
    root = r.rhs;
  } else {
    out.name = "not_" + r.name;
    out.trigger = detail::strip_double_negation(neg(r.lhs));
    root = neg(r.rhs);
  }
  auto sat = detail::Saturator().run(root);
  out.branches = std::move(sat.branches);
  out.metavars = std::move(sat.metavars);
  out.epsilons = std::move(sat.epsilons);
  out.has_inst_variant = !out.metavars.empty();
  out.forward = r.forward && polarity == Polarity::Positive;
  return out;
}

inline std::vector<SuperRule> compile_prr(const PropositionRewriteRule& r) {
  std::vector<SuperRule> out{compile_superrule(r, Polarity::Positive)};
  if (r.both_polarities) out.push_back(compile_superrule(r, Polarity::Negative));
  return out;
}

// ---------------------------------------------------------------------------
// Theory construction

namespace detail {

inline bool triggers_overlap(const Formula& a, const Formula& b) {
  return unify(rename_free_vars(a, "@1"), rename_free_vars(b, "@2"), UnifyMode::Schema).has_value();
}

enum class RelationKind { None, Reflexive, Symmetric, Transitive };

inline std::pair<RelationKind, std::string> relation_property(const Formula& f) {
  Formula m = f;
  while (m->kind() == Kind::Forall) m = m->body();
  // Locate the predicate symbol.
  Formula probe = m;
  if (probe->kind() == Kind::Implies) probe = probe->rhs();
  if (probe->kind() != Kind::Atom || probe->arity() != 2) return {RelationKind::None, {}};
  const std::string& r = probe->name();
  auto R = [&](const char* x, const char* y) { return atom(r, {var(x), var(y)}); };
  if (alpha_equal(f, forall("X", R("X", "X")))) return {RelationKind::Reflexive, r};
  if (alpha_equal(f, forall(std::vector<std::string>{"X", "Y"}, implies(R("X", "Y"), R("Y", "X"))))) return {RelationKind::Symmetric, r};
  if (alpha_equal(f, forall(std::vector<std::string>{"X", "Y", "Z"}, implies(conj(R("X", "Y"), R("Y", "Z")), R("X", "Z")))))
    return {RelationKind::Transitive, r};
  return {RelationKind::None, {}};
}

}  // namespace detail

// Classifies, orients and compiles the axioms of `p` in declaration order.
// An axiom any of whose rule triggers unifies with the trigger of an already
// accepted rule is kept as a regular axiom instead.
inline Theory build_theory(const Problem& p, const std::string& tag, const BuildOptions& opts = {}) {
  Theory th;
  th.tag = tag;
  for (const auto& af : p.formulas) {
    if (af.role == Role::Conjecture) continue;
    AxiomReport rep;
    rep.name = af.name;
    if (opts.detect_relations) {
      auto [kind, rel] = detail::relation_property(af.formula);
      if (kind != detail::RelationKind::None) {
        auto& fl = th.relations.at(rel);
        if (kind == detail::RelationKind::Reflexive) fl.reflexive = true;
        if (kind == detail::RelationKind::Symmetric) fl.symmetric = true;
        if (kind == detail::RelationKind::Transitive) fl.transitive = true;
        rep.classification = classify_axiom(af.formula);
        rep.reason = RegularReason::RelationProperty;
        th.residual_axioms.push_back(af);
        th.report.push_back(std::move(rep));
        continue;
      }
    }
    rep.classification = classify_axiom(af.formula);
    if (rep.classification.regular()) {
      rep.reason = rep.classification.reason;
      th.residual_axioms.push_back(af);
      th.report.push_back(std::move(rep));
      continue;
    }
    std::vector<SuperRule> candidate;
    for (const auto& prr : derive_prrs(rep.classification, af.name))
      for (auto& r : compile_prr(prr)) {
        // Names inside the tag's namespace keep their prefix: b_eq gives b_not_eq.
        const std::string ns = tag + "_";
        if (r.polarity == Polarity::Negative && !tag.empty() && r.axiom.rfind(ns, 0) == 0)
          r.name = ns + "not_" + r.axiom.substr(ns.size());
        candidate.push_back(std::move(r));
      }
    for (const auto& r : candidate) {
      for (const auto& accepted : th.rules) {
        if (detail::triggers_overlap(r.trigger, accepted.trigger)) {
          rep.reason = RegularReason::Overlap;
          rep.overlaps_with = accepted.name;
          break;
        }
      }
      if (rep.reason == RegularReason::Overlap) break;
    }
    if (rep.reason == RegularReason::Overlap) {
      th.residual_axioms.push_back(af);
    } else {
      rep.compiled = true;
      for (auto& r : candidate) {
        rep.rules.push_back(r.name);
        th.rules.push_back(std::move(r));
      }
      th.compiled_axioms.push_back(af);
    }
    th.report.push_back(std::move(rep));
  }
  return th;
}

// ---------------------------------------------------------------------------
// Rule dump

inline std::string schema_to_string(const Formula& f) { return to_string(f); }

inline std::string rule_to_string(const SuperRule& r) {
  std::ostringstream os;
  os << "rule " << r.name << " (axiom " << r.axiom << ", "
     << (r.polarity == Polarity::Positive ? "positive" : "negative") << ")\n";
  os << "  trigger: " << schema_to_string(r.trigger) << "\n";
  os << "  branches: ";
  for (std::size_t i = 0; i < r.branches.size(); ++i) {
    if (i) os << " | ";
    for (std::size_t j = 0; j < r.branches[i].size(); ++j) {
      if (j) os << ", ";
      os << schema_to_string(r.branches[i][j]);
    }
  }
  os << "\n";
  if (r.has_inst_variant) os << "  metavariables: " << r.fresh_metavars() << " (instantiation variant " << r.name << "_inst)\n";
  return os.str();
}

inline std::string theory_to_string(const Theory& th) {
  std::ostringstream os;
  os << "% theory " << th.tag << ": " << th.rules.size() << " rules, " << th.residual_axioms.size()
     << " regular axioms\n";
  os << "% overlap notion: trigger unification\n";
  for (const auto& r : th.rules) os << rule_to_string(r);
  for (const auto& rep : th.report) {
    if (rep.compiled) continue;
    os << "regular " << rep.name << " (" << reason_name(rep.reason);
    if (!rep.overlaps_with.empty()) os << " with " << rep.overlaps_with;
    os << ")\n";
  }
  for (const auto& [pred, fl] : th.relations.all()) {
    os << "relation " << pred << ":";
    if (fl.reflexive) os << " reflexive";
    if (fl.symmetric) os << " symmetric";
    if (fl.transitive) os << " transitive";
    os << "\n";
  }
  os << "% transitivity rules mint no terms; each (relation, negated relation) pair is applied once per branch\n";
  return os.str();
}

}  // namespace szen

#endif  // SZEN_COMPILER_HPP_
