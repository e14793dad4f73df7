// szen :: tableau proof search
//
// Strict depth-first, non-destructive search. A Branch is a value; every rule
// application copies it, so siblings never see each other's formulas.
// Metavariables are never substituted in place: when a failed subtree
// suggests a term for one, the node that introduced it re-derives an
// instance from its own (unchanged) parent branch.

#ifndef SZEN_TABLEAU_HPP_
#define SZEN_TABLEAU_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "szen/compiler.hpp"
#include "szen/logic.hpp"

namespace szen {

enum class Rule : std::uint8_t {
  // closure
  CloseFalse, CloseNotTrue, Close, CloseRefl, CloseSym,
  // alpha
  NotNot, And, NotOr, NotImply,
  // beta
  Or, NotAnd, Imply, Equiv, NotEquiv,
  // delta
  Ex, NotAll,
  // gamma
  AllM, NotExM, AllInst, NotExInst,
  // relational
  Pred, Fun, Sym, NotRefl, Trans, TransSym, TransEq, TransEqSym,
  // superdeduction
  Super, SuperInst,
  Cut
};

inline bool is_closure(Rule r) { return r <= Rule::CloseSym; }
inline bool is_gamma(Rule r) { return r >= Rule::AllM && r <= Rule::NotExInst; }
inline bool is_relational(Rule r) { return r >= Rule::Pred && r <= Rule::TransEqSym; }
inline bool is_extension(Rule r) { return r == Rule::Super || r == Rule::SuperInst; }

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::CloseFalse: return "False";
    case Rule::CloseNotTrue: return "NotTrue";
    case Rule::Close: return "Axiom";
    case Rule::CloseRefl: return "Refl";
    case Rule::CloseSym: return "Sym";
    case Rule::NotNot: return "NotNot";
    case Rule::And: return "And";
    case Rule::NotOr: return "NotOr";
    case Rule::NotImply: return "NotImply";
    case Rule::Or: return "Or";
    case Rule::NotAnd: return "NotAnd";
    case Rule::Imply: return "Imply";
    case Rule::Equiv: return "Equiv";
    case Rule::NotEquiv: return "NotEquiv";
    case Rule::Ex: return "Ex";
    case Rule::NotAll: return "NotAll";
    case Rule::AllM: case Rule::AllInst: return "All";
    case Rule::NotExM: case Rule::NotExInst: return "NotEx";
    case Rule::Pred: return "P-NotP";
    case Rule::Fun: return "Fun";
    case Rule::Sym: return "SymSplit";
    case Rule::NotRefl: return "NotRefl";
    case Rule::Trans: return "Trans";
    case Rule::TransSym: return "TransSym";
    case Rule::TransEq: return "TransEq";
    case Rule::TransEqSym: return "TransEqSym";
    case Rule::Super: case Rule::SuperInst: return "Extension";
    case Rule::Cut: return "Cut";
  }
  return "?";
}

struct SearchConfig {
  std::size_t max_rule_applications = 10000;
  double timeout_seconds = 30.0;
  bool cut_enabled = false;
  // Instances derived per quantified formula along one branch, and
  // instantiation attempts per metavariable-introducing node.
  int instantiation_limit = 4;
  int initial_depth = 24;
  // Before opening more quantifiers, hand usable closing bindings back to
  // the nodes that introduced their metavariables.
  bool eager_instantiation = true;
  // Retry with the compiled axioms also placed on the branch when the
  // superdeduction-only search is exhausted.
  bool unfold_fallback = true;
};

struct SearchStats {
  std::size_t rule_applications = 0;
  std::size_t branches = 0;
  double wall_seconds = 0;
  int attempts = 0;
  int max_depth_bound = 0;
  bool budget_hit = false;
};

// Formulas interned by alpha-equivalence class; ids are stable for one search.
class FormulaTable {
public:
  int intern(const Formula& f) {
    auto key = canonical_key(f);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(formulas_.size());
    formulas_.push_back(f);
    ids_.emplace(std::move(key), id);
    return id;
  }
  std::optional<int> find(const Formula& f) const {
    auto it = ids_.find(canonical_key(f));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const Formula& at(int id) const { return formulas_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const noexcept { return formulas_.size(); }

private:
  std::vector<Formula> formulas_;
  std::unordered_map<std::string, int> ids_;
};

struct RuleInstance {
  Rule rule = Rule::Close;
  std::string name;  // super rule name for extensions, otherwise rule_name(rule)
  std::vector<int> principal;
  std::vector<std::vector<Formula>> children;
  std::optional<Substitution> instantiation;
  int super_index = -1;
  std::vector<Term> params;    // parameter instances of a super rule
  std::vector<int> new_metas;  // metavariables minted by this application
  int gamma_round = 0;         // instance count of the principal when gamma-M fired
};

// Key marking a rule/formula combination as already applied on a branch.
struct ConsumedKey {
  int a;
  int b;
  Rule rule;
  int extra;
  auto operator<=>(const ConsumedKey&) const = default;
};

class Branch {
public:
  const std::vector<int>& formulas() const noexcept { return order_; }
  bool contains(int id) const { return present_.count(id) > 0; }
  std::size_t size() const noexcept { return order_.size(); }
  int position(int id) const {
    auto it = std::find(order_.begin(), order_.end(), id);
    return it == order_.end() ? -1 : static_cast<int>(it - order_.begin());
  }
  bool consumed(const ConsumedKey& k) const { return consumed_.count(k) > 0; }
  const std::set<ConsumedKey>& consumed_set() const noexcept { return consumed_; }
  const std::map<int, int>& metavar_origins() const noexcept { return metavar_origins_; }
  int instances(int id) const {
    auto it = instances_.find(id);
    return it == instances_.end() ? 0 : it->second;
  }

  // Returns true when the formula was new.
  bool add(int id) {
    if (!present_.insert(id).second) return false;
    order_.push_back(id);
    return true;
  }
  void consume(const ConsumedKey& k) { consumed_.insert(k); }
  void note_meta(int meta, int origin) { metavar_origins_[meta] = origin; }
  void count_instance(int id) { ++instances_[id]; }

  bool operator==(const Branch&) const = default;

private:
  std::vector<int> order_;
  std::set<int> present_;
  std::set<ConsumedKey> consumed_;
  std::map<int, int> metavar_origins_;
  std::map<int, int> instances_;
};

struct ProofNode {
  std::vector<int> formulas;  // branch at this node, insertion order
  std::vector<int> added;     // formulas new relative to the parent
  RuleInstance rule;
  std::vector<ProofNode> children;
  std::vector<int> shown;     // filled by prune()

  bool leaf() const noexcept { return children.empty(); }
};

enum class ProofStatus { Proof, Exhausted, Timeout };

inline const char* status_name(ProofStatus s) {
  switch (s) {
    case ProofStatus::Proof: return "PROOF-FOUND";
    case ProofStatus::Exhausted: return "NO-PROOF";
    case ProofStatus::Timeout: return "TIMEOUT";
  }
  return "?";
}

struct ProofResult {
  ProofStatus status = ProofStatus::Exhausted;
  std::optional<ProofNode> tree;
  SearchStats stats;
  std::shared_ptr<FormulaTable> table;
  Formula conjecture;

  bool proved() const noexcept { return status == ProofStatus::Proof; }
};

// A suggested metavariable binding: applying `unifier` would close something.
struct Instantiation {
  int formula;  // origin formula of the metavariable
  int meta;
  Term term;
  Substitution unifier;
};

class MetaSupply {
public:
  explicit MetaSupply(int next = 0) : next_(next) {}
  int fresh() { return next_++; }
  int peek() const noexcept { return next_; }

private:
  int next_;
};

namespace detail {

inline bool has_positive_equality(const Branch& b, const FormulaTable& t) {
  for (int id : b.formulas())
    if (t.at(id)->kind() == Kind::Eq) return true;
  return false;
}

inline int max_meta(const Branch& b) {
  int m = -1;
  for (const auto& [id, origin] : b.metavar_origins()) m = std::max(m, id);
  return m;
}

inline Formula neq(Term a, Term b) { return neg(eq(std::move(a), std::move(b))); }

// Binary relation literal pieces: relation atom with two arguments.
inline bool binary(const Formula& a) {
  return (a->kind() == Kind::Atom || a->kind() == Kind::Eq) && a->arity() == 2;
}
inline bool same_relation(const Formula& a, const Formula& b) {
  return a->kind() == b->kind() && a->name() == b->name() && a->arity() == b->arity();
}
inline Formula relation_atom(const Formula& like, Term x, Term y) {
  if (like->kind() == Kind::Eq) return eq(std::move(x), std::move(y));
  return atom(like->name(), {std::move(x), std::move(y)});
}

}  // namespace detail

// First applicable closure, in the order False, not-True, complementary pair,
// irreflexivity, symmetry; oldest formulas first.
inline std::optional<RuleInstance> detect_closure(const Branch& b, const FormulaTable& t,
                                                  const RelationProperties& rel = {}) {
  auto make = [](Rule r, std::vector<int> ids) {
    RuleInstance ri;
    ri.rule = r;
    ri.name = rule_name(r);
    ri.principal = std::move(ids);
    return ri;
  };
  for (int id : b.formulas())
    if (t.at(id)->kind() == Kind::False) return make(Rule::CloseFalse, {id});
  for (int id : b.formulas()) {
    const auto& f = t.at(id);
    if (f->kind() == Kind::Not && f->body()->kind() == Kind::True) return make(Rule::CloseNotTrue, {id});
  }
  for (int id : b.formulas()) {
    const auto& f = t.at(id);
    if (!is_literal(f)) continue;
    auto other = t.find(literal_positive(f) ? neg(f) : f->body());
    if (other && b.contains(*other)) {
      // Report the pair when its second member appears; positive first.
      if (b.position(*other) > b.position(id)) continue;
      return literal_positive(f) ? make(Rule::Close, {id, *other}) : make(Rule::Close, {*other, id});
    }
  }
  for (int id : b.formulas()) {
    const auto& f = t.at(id);
    if (f->kind() != Kind::Not || !detail::binary(f->body())) continue;
    const auto& a = f->body();
    if (rel.of(a).reflexive && alpha_equal(a->arg(0), a->arg(1))) return make(Rule::CloseRefl, {id});
  }
  for (int id : b.formulas()) {
    const auto& f = t.at(id);
    if (!detail::binary(f) || !rel.of(f).symmetric) continue;
    auto other = t.find(neg(detail::relation_atom(f, f->arg(1), f->arg(0))));
    if (other && b.contains(*other)) return make(Rule::CloseSym, {id, *other});
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rule candidates

// Priority classes, highest first.
enum class RuleClass : std::uint8_t { Closure, Alpha, Linear, Delta, Beta, Relational, GammaM, Forward, Cut };

namespace detail {

inline RuleInstance make_instance(Rule r, std::vector<int> principal, std::vector<std::vector<Formula>> children) {
  RuleInstance ri;
  ri.rule = r;
  ri.name = rule_name(r);
  ri.principal = std::move(principal);
  ri.children = std::move(children);
  return ri;
}

inline ConsumedKey key_of(const RuleInstance& ri) {
  switch (ri.rule) {
    case Rule::Super:
    case Rule::SuperInst:
      return {ri.principal.at(0), ri.super_index, Rule::Super, 0};
    case Rule::AllM:
    case Rule::AllInst:
    case Rule::NotExM:
    case Rule::NotExInst:
      return {ri.principal.at(0), -1, Rule::AllM, ri.gamma_round};
    case Rule::Cut:
      return {ri.principal.empty() ? -1 : ri.principal[0], -1, Rule::Cut, 0};
    default:
      return {ri.principal.at(0), ri.principal.size() > 1 ? ri.principal[1] : -1, ri.rule, 0};
  }
}

// Analytic rule (alpha, beta or delta) for one formula, if any.
inline std::optional<RuleInstance> analytic(int id, const Formula& f) {
  using V = std::vector<std::vector<Formula>>;
  switch (f->kind()) {
    case Kind::And: return make_instance(Rule::And, {id}, V{{f->lhs(), f->rhs()}});
    case Kind::Or: return make_instance(Rule::Or, {id}, V{{f->lhs()}, {f->rhs()}});
    case Kind::Implies: return make_instance(Rule::Imply, {id}, V{{neg(f->lhs())}, {f->rhs()}});
    case Kind::Equiv:
      return make_instance(Rule::Equiv, {id}, V{{neg(f->lhs()), neg(f->rhs())}, {f->lhs(), f->rhs()}});
    case Kind::Exists: return make_instance(Rule::Ex, {id}, V{{instantiate(*f, eps(f->name(), f->body()))}});
    case Kind::Not: break;
    default: return std::nullopt;
  }
  const Formula& g = f->body();
  switch (g->kind()) {
    case Kind::Not: return make_instance(Rule::NotNot, {id}, V{{g->body()}});
    case Kind::Or: return make_instance(Rule::NotOr, {id}, V{{neg(g->lhs()), neg(g->rhs())}});
    case Kind::Implies: return make_instance(Rule::NotImply, {id}, V{{g->lhs(), neg(g->rhs())}});
    case Kind::And: return make_instance(Rule::NotAnd, {id}, V{{neg(g->lhs())}, {neg(g->rhs())}});
    case Kind::Equiv:
      return make_instance(Rule::NotEquiv, {id}, V{{neg(g->lhs()), g->rhs()}, {g->lhs(), neg(g->rhs())}});
    case Kind::Forall:
      return make_instance(Rule::NotAll, {id}, V{{neg(instantiate(*g, eps(g->name(), neg(g->body()))))}});
    default: return std::nullopt;
  }
}

inline RuleClass analytic_class(Rule r) {
  switch (r) {
    case Rule::NotNot: case Rule::And: case Rule::NotOr: case Rule::NotImply: return RuleClass::Alpha;
    case Rule::Ex: case Rule::NotAll: return RuleClass::Delta;
    default: return RuleClass::Beta;
  }
}

inline RuleClass super_class(const SuperRule& r) {
  if (r.forward) return RuleClass::Forward;
  return r.branching() ? RuleClass::Beta : RuleClass::Linear;
}

// Instance of super rule `r` triggered by literal `id`, or nullopt when the
// trigger does not match. Rule parameters bind by matching only.
inline std::optional<RuleInstance> super_instance(const SuperRule& r, int index, int id, const Formula& lit,
                                                  MetaSupply& ms) {
  Substitution s;
  if (!match(r.trigger, lit, s)) return std::nullopt;
  RuleInstance ri;
  ri.rule = Rule::Super;
  ri.name = r.name;
  ri.super_index = index;
  ri.principal = {id};
  for (const auto& p : r.params) {
    if (s.find(VarKey::of_var(p))) continue;
    int m = ms.fresh();
    s.bind(VarKey::of_var(p), meta(m, id));
    ri.new_metas.push_back(m);
  }
  for (int k : r.metavars) {
    int m = ms.fresh();
    s.bind(VarKey::of_meta(k), meta(m, id));
    ri.new_metas.push_back(m);
  }
  for (const auto& p : r.params) ri.params.push_back(*s.find(VarKey::of_var(p)));
  for (const auto& br : r.branches) {
    std::vector<Formula> out;
    for (const auto& f : br) out.push_back(substitute(f, s));
    ri.children.push_back(std::move(out));
  }
  return ri;
}

inline void relational_for_pair(int pid, const Formula& p, int nid, const Formula& na, const RelationProperties& rel,
                                bool eq_present, std::vector<RuleInstance>& out) {
  using V = std::vector<std::vector<Formula>>;
  const Formula& q = na->body();
  // pred
  if (eq_present && p->kind() == Kind::Atom && q->kind() == Kind::Atom && p->name() == q->name() &&
      p->arity() == q->arity() && p->arity() > 0) {
    V ch;
    for (std::size_t i = 0; i < p->arity(); ++i)
      if (!alpha_equal(p->arg(i), q->arg(i))) ch.push_back({neq(p->arg(i), q->arg(i))});
    if (!ch.empty()) out.push_back(make_instance(Rule::Pred, {pid, nid}, std::move(ch)));
  }
  if (!binary(p) || !binary(q)) return;
  const Term &s = p->arg(0), &t = p->arg(1), &u = q->arg(0), &v = q->arg(1);
  if (same_relation(p, q)) {
    auto fl = rel.of(p);
    bool is_eq = p->kind() == Kind::Eq;
    auto R = [&](Term x, Term y) { return relation_atom(p, std::move(x), std::move(y)); };
    auto uniq = [](std::vector<Formula> fs) {
      std::vector<Formula> o;
      for (auto& f : fs) {
        bool dup = false;
        for (auto& g : o) dup = dup || alpha_equal(f, g);
        if (!dup) o.push_back(std::move(f));
      }
      return o;
    };
    if (fl.symmetric && (is_eq || eq_present))
      out.push_back(make_instance(Rule::Sym, {pid, nid}, V{{neq(t, u)}, {neq(s, v)}}));
    if (fl.transitive && fl.symmetric)
      out.push_back(make_instance(Rule::TransSym, {pid, nid},
                                  V{uniq({neq(v, s), neg(R(v, s))}), uniq({neq(t, u), neg(R(t, u))})}));
    else if (fl.transitive)
      out.push_back(make_instance(Rule::Trans, {pid, nid}, V{{neq(u, s), neg(R(u, s))}, {neq(t, v), neg(R(t, v))}}));
  }
  if (p->kind() == Kind::Eq && q->kind() == Kind::Atom) {
    auto fl = rel.of(q);
    if (!fl.transitive) return;
    auto R = [&](Term x, Term y) { return relation_atom(q, std::move(x), std::move(y)); };
    if (fl.symmetric)
      out.push_back(make_instance(Rule::TransEqSym, {pid, nid},
                                  V{{neq(v, s), neg(R(v, s))}, {neg(R(v, s)), neg(R(t, u))}, {neq(t, u), neg(R(t, u))}}));
    else
      out.push_back(make_instance(Rule::TransEq, {pid, nid},
                                  V{{neq(u, s), neg(R(u, s))}, {neg(R(u, s)), neg(R(t, v))}, {neq(t, v), neg(R(t, v))}}));
  }
}

inline void relational_single(int nid, const Formula& na, const RelationProperties& rel, bool eq_present,
                              std::vector<RuleInstance>& out) {
  using V = std::vector<std::vector<Formula>>;
  const Formula& q = na->body();
  if (!eq_present) return;
  if (q->kind() == Kind::Eq) {
    const Term &l = q->lhs(), &r = q->rhs();
    if (l->kind() == Kind::App && r->kind() == Kind::App && l->name() == r->name() && l->arity() == r->arity() &&
        l->arity() > 0 && !alpha_equal(l, r)) {
      V ch;
      for (std::size_t i = 0; i < l->arity(); ++i)
        if (!alpha_equal(l->arg(i), r->arg(i))) ch.push_back({neq(l->arg(i), r->arg(i))});
      out.push_back(make_instance(Rule::Fun, {nid}, std::move(ch)));
    }
    return;
  }
  if (binary(q) && rel.of(q).reflexive && !alpha_equal(q->arg(0), q->arg(1)))
    out.push_back(make_instance(Rule::NotRefl, {nid}, V{{neq(q->arg(0), q->arg(1))}}));
}

// Would adding `f` to `b` close it at once?
inline bool closes_with(const Branch& b, const FormulaTable& t, const RelationProperties& rel, const Formula& f) {
  if (f->kind() == Kind::False) return true;
  if (!is_literal(f)) return false;
  const auto& a = literal_atom(f);
  if (!literal_positive(f) && binary(a) && rel.of(a).reflexive && alpha_equal(a->arg(0), a->arg(1))) return true;
  auto other = t.find(literal_positive(f) ? neg(f) : a);
  if (other && b.contains(*other)) return true;
  if (binary(a) && rel.of(a).symmetric) {
    auto flipped = relation_atom(a, a->arg(1), a->arg(0));
    auto sym = t.find(literal_positive(f) ? neg(flipped) : flipped);
    if (sym && b.contains(*sym)) return true;
  }
  return false;
}

inline int open_children(const Branch& b, const FormulaTable& t, const RelationProperties& rel, const RuleInstance& ri) {
  int open = 0;
  for (const auto& ch : ri.children) {
    bool closed = false;
    for (const auto& f : ch) closed = closed || closes_with(b, t, rel, f);
    if (!closed) ++open;
  }
  return open;
}

inline void collect_atoms(const Formula& f, std::vector<Formula>& out) {
  switch (f->kind()) {
    case Kind::Atom:
    case Kind::Eq:
      if (is_closed(f)) out.push_back(f);
      return;
    case Kind::True:
    case Kind::False:
      return;
    default:
      for (const auto& a : f->args()) collect_atoms(a, out);
  }
}

}  // namespace detail

// Candidates of one priority class, oldest principal formula first. Instances
// are stamped with fresh metavariables drawn from `ms`.
inline std::vector<RuleInstance> rules_of_class(RuleClass cls, const Branch& b, const Theory& th, const FormulaTable& t,
                                                MetaSupply& ms, const SearchConfig& cfg = {}) {
  std::vector<RuleInstance> out;
  auto fresh = [&](const RuleInstance& ri) { return !b.consumed(detail::key_of(ri)); };
  const auto& ids = b.formulas();
  switch (cls) {
    case RuleClass::Closure: {
      if (auto c = detect_closure(b, t, th.relations)) out.push_back(std::move(*c));
      break;
    }
    case RuleClass::Alpha:
    case RuleClass::Linear:
    case RuleClass::Delta:
    case RuleClass::Beta:
    case RuleClass::Forward: {
      for (int id : ids) {
        const auto& f = t.at(id);
        if (cls != RuleClass::Forward) {
          if (auto a = detail::analytic(id, f); a && detail::analytic_class(a->rule) == cls && fresh(*a))
            out.push_back(std::move(*a));
        }
        if (!is_literal(f)) continue;
        for (std::size_t i = 0; i < th.rules.size(); ++i) {
          const auto& r = th.rules[i];
          if (detail::super_class(r) != cls || b.consumed({id, static_cast<int>(i), Rule::Super, 0})) continue;
          MetaSupply probe(ms.peek());
          if (auto ri = detail::super_instance(r, static_cast<int>(i), id, f, probe)) {
            ri = detail::super_instance(r, static_cast<int>(i), id, f, ms);
            out.push_back(std::move(*ri));
          }
        }
      }
      break;
    }
    case RuleClass::Relational: {
      bool eq_present = detail::has_positive_equality(b, t);
      struct Cand { int hi, lo; RuleInstance ri; };
      std::vector<Cand> cs;
      for (std::size_t j = 0; j < ids.size(); ++j) {
        const auto& nf = t.at(ids[j]);
        if (nf->kind() != Kind::Not || !is_atomic(nf->body())) continue;
        std::vector<RuleInstance> tmp;
        detail::relational_single(ids[j], nf, th.relations, eq_present, tmp);
        for (auto& ri : tmp) cs.push_back({static_cast<int>(j), static_cast<int>(j), std::move(ri)});
        for (std::size_t i = 0; i < ids.size(); ++i) {
          const auto& pf = t.at(ids[i]);
          if (!is_atomic(pf)) continue;
          tmp.clear();
          detail::relational_for_pair(ids[i], pf, ids[j], nf, th.relations, eq_present, tmp);
          int hi = static_cast<int>(std::max(i, j)), lo = static_cast<int>(std::min(i, j));
          for (auto& ri : tmp) cs.push_back({hi, lo, std::move(ri)});
        }
      }
      // Fewest children left open after a one-step closure check first.
      std::vector<int> open(cs.size());
      for (std::size_t k = 0; k < cs.size(); ++k) open[k] = detail::open_children(b, t, th.relations, cs[k].ri);
      std::vector<std::size_t> order(cs.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::tuple(open[x], cs[x].hi, cs[x].lo) < std::tuple(open[y], cs[y].hi, cs[y].lo);
      });
      std::vector<Cand> sorted;
      for (auto k : order) sorted.push_back(std::move(cs[k]));
      cs = std::move(sorted);
      for (auto& c : cs)
        if (fresh(c.ri)) out.push_back(std::move(c.ri));
      break;
    }
    case RuleClass::GammaM: {
      for (int id : ids) {
        const auto& f = t.at(id);
        bool all = f->kind() == Kind::Forall;
        bool notex = f->kind() == Kind::Not && f->body()->kind() == Kind::Exists;
        if (!all && !notex) continue;
        int round = b.instances(id);
        if (round >= cfg.instantiation_limit) continue;
        if (b.consumed({id, -1, Rule::AllM, round})) continue;
        int m = ms.fresh();
        const Formula& q = all ? f : f->body();
        Formula inst = instantiate(*q, meta(m, id));
        auto ri = detail::make_instance(all ? Rule::AllM : Rule::NotExM, {id}, {{all ? inst : neg(inst)}});
        ri.new_metas = {m};
        ri.gamma_round = round;
        out.push_back(std::move(ri));
      }
      break;
    }
    case RuleClass::Cut: {
      if (!cfg.cut_enabled) break;
      for (int id : ids) {
        std::vector<Formula> atoms;
        detail::collect_atoms(t.at(id), atoms);
        for (const auto& a : atoms) {
          auto pa = t.find(a), na = t.find(neg(a));
          if ((pa && b.contains(*pa)) || (na && b.contains(*na))) continue;
          auto ri = detail::make_instance(Rule::Cut, {}, {{a}, {neg(a)}});
          out.push_back(std::move(ri));
        }
      }
      break;
    }
  }
  return out;
}

inline constexpr RuleClass kRuleClasses[] = {RuleClass::Closure,    RuleClass::Alpha,  RuleClass::Linear, RuleClass::Delta,
                                             RuleClass::Beta,       RuleClass::Relational, RuleClass::GammaM,
                                             RuleClass::Forward,    RuleClass::Cut};

// All applicable rules, in priority order.
inline std::vector<RuleInstance> applicable_rules(const Branch& b, const Theory& th, const FormulaTable& t,
                                                  const SearchConfig& cfg = {}) {
  MetaSupply ms(detail::max_meta(b) + 1);
  std::vector<RuleInstance> out;
  for (auto cls : kRuleClasses) {
    auto part = rules_of_class(cls, b, th, t, ms, cfg);
    for (auto& r : part) out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instantiation proposals

namespace detail {

inline Substitution metas_only(const Substitution& s) {
  Substitution out;
  for (const auto& [k, v] : s.bindings())
    if (k.is_meta) out.bind(k, v);
  return out;
}

}  // namespace detail

// Metavariable bindings that would close the branch or enable a super rule.
inline std::vector<Instantiation> propose_instantiations(const Branch& b, const Theory& th, const FormulaTable& t) {
  std::vector<Substitution> found;
  std::set<std::string> seen;
  auto offer = [&](const std::optional<Substitution>& s) {
    if (!s) return;
    Substitution m = detail::metas_only(*s);
    if (m.empty()) return;
    std::string key;
    for (const auto& [k, v] : m.bindings()) key += std::to_string(k.id) + "=" + canonical_key(v) + ";";
    if (seen.insert(key).second) found.push_back(std::move(m));
  };
  const auto& ids = b.formulas();
  for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
    const auto& f = t.at(*it);
    if (!is_literal(f) || !has_metas(f)) continue;
    const Formula& a = literal_atom(f);
    bool pos = literal_positive(f);
    for (int other : ids) {
      if (other == *it) continue;
      const auto& g = t.at(other);
      if (!is_literal(g) || literal_positive(g) == pos) continue;
      const Formula& c = literal_atom(g);
      if (!detail::same_relation(a, c) && !(a->kind() == Kind::Atom && c->kind() == Kind::Atom &&
                                             a->name() == c->name()))
        continue;
      offer(unify(a, c));
      if (detail::binary(a) && detail::same_relation(a, c) && th.relations.of(a).symmetric)
        offer(unify(a, detail::relation_atom(c, c->arg(1), c->arg(0))));
    }
    if (!pos && detail::binary(a) && th.relations.of(a).reflexive) offer(unify(a->arg(0), a->arg(1)));
    for (const auto& r : th.rules) {
      if (literal_positive(r.trigger) != pos) continue;
      offer(unify(rename_free_vars(r.trigger, "@r"), f, UnifyMode::Schema));
    }
  }
  std::vector<Instantiation> out;
  for (const auto& s : found) {
    for (const auto& [k, v] : s.bindings()) {
      auto it = b.metavar_origins().find(k.id);
      if (it == b.metavar_origins().end()) continue;
      out.push_back({it->second, k.id, v, s});
    }
  }
  return out;
}


// ---------------------------------------------------------------------------
// Search

namespace detail {

struct SearchAbort {
  bool timeout;
};

class Prover {
public:
  Prover(const Theory& th, const SearchConfig& cfg, FormulaTable& table, SearchStats& stats,
         std::chrono::steady_clock::time_point deadline, MetaSupply& metas)
      : th_(th), cfg_(cfg), t_(table), stats_(stats), deadline_(deadline), metas_(metas) {}

  struct Outcome {
    std::optional<ProofNode> node;
    std::vector<Substitution> proposals;
  };

  int bound = 0;
  bool bound_hit = false;

  Outcome search(const Branch& b, int depth) {
    ++stats_.branches;
    if ((stats_.branches & 255) == 0 && std::chrono::steady_clock::now() > deadline_) throw SearchAbort{true};
    if (auto c = detect_closure(b, t_, th_.relations)) {
      ProofNode n;
      n.formulas = b.formulas();
      n.rule = std::move(*c);
      return {std::move(n), {}};
    }
    if (depth >= bound) {
      bound_hit = true;
      return fail(b);
    }
    for (auto cls : kRuleClasses) {
      if (cls == RuleClass::Closure) continue;
      if (cls == RuleClass::GammaM && cfg_.eager_instantiation) {
        // A binding that closes something now beats opening more quantifiers.
        Outcome o = usable_proposals(b);
        if (!o.proposals.empty()) return o;
      }
      auto cands = rules_of_class(cls, b, th_, t_, metas_, cfg_);
      if (!cands.empty()) {
        return expand(b, std::move(cands.front()), depth);
      }
    }
    return fail(b);
  }

private:
  Outcome fail(const Branch& b) {
    Outcome o;
    for (auto& p : propose_instantiations(b, th_, t_)) push_unique(o.proposals, p.unifier);
    return o;
  }

  // Proposals whose terms only mention metavariables older than the one they bind.
  Outcome usable_proposals(const Branch& b) {
    Outcome o;
    for (auto& p : propose_instantiations(b, th_, t_)) {
      bool ok = admissible(p.term, b);
      for (int m : free_symbols(p.term).metas) ok = ok && m < p.meta;
      if (ok && !stale(p.meta, p.term, b)) push_unique(o.proposals, p.unifier);
    }
    return o;
  }

  // True when instantiating the quantifier that introduced `meta` with `term`
  // gives a formula the branch already has.
  bool stale(int meta, const Term& term, const Branch& b) const {
    auto it = b.metavar_origins().find(meta);
    if (it == b.metavar_origins().end() || it->second < 0) return false;
    const Formula& q = t_.at(it->second);
    Formula inst;
    if (q->kind() == Kind::Forall) inst = instantiate(*q, term);
    else if (q->kind() == Kind::Not && q->body()->kind() == Kind::Exists) inst = neg(instantiate(*q->body(), term));
    else return false;
    auto id = t_.find(inst);
    return id && b.contains(*id);
  }

  static std::string key_of_subst(const Substitution& s) {
    std::string k;
    for (const auto& [v, term] : s.bindings()) k += std::to_string(v.id) + "=" + canonical_key(term) + ";";
    return k;
  }

  static void push_unique(std::vector<Substitution>& v, const Substitution& s) {
    constexpr std::size_t kMaxProposals = 64;
    if (v.size() >= kMaxProposals) return;
    auto k = key_of_subst(s);
    for (const auto& x : v)
      if (key_of_subst(x) == k) return;
    v.push_back(s);
  }

  Branch extend(const Branch& b, const RuleInstance& ri, std::size_t child, std::vector<int>& added) {
    Branch c = b;
    c.consume(key_of(ri));
    if (ri.rule == Rule::AllInst || ri.rule == Rule::NotExInst) c.count_instance(ri.principal.at(0));
    int origin = ri.principal.empty() ? -1 : ri.principal[0];
    for (int m : ri.new_metas) c.note_meta(m, origin);
    for (const auto& f : ri.children.at(child)) {
      int id = t_.intern(f);
      if (c.add(id)) added.push_back(id);
    }
    return c;
  }

  Outcome run(const Branch& b, const RuleInstance& ri, int depth) {
    if (++stats_.rule_applications > cfg_.max_rule_applications) {
      stats_.budget_hit = true;
      throw SearchAbort{false};
    }
    ProofNode n;
    n.formulas = b.formulas();
    n.rule = ri;
    for (std::size_t i = 0; i < ri.children.size(); ++i) {
      std::vector<int> added;
      Branch c = extend(b, ri, i, added);
      Outcome o = search(c, depth + 1);
      if (!o.node) return {std::nullopt, std::move(o.proposals)};
      o.node->added = std::move(added);
      n.children.push_back(std::move(*o.node));
    }
    return {std::move(n), {}};
  }

  // A term may replace a metavariable only if every metavariable in it
  // already lives on the branch above the node that introduced it.
  static bool admissible(const Term& term, const Branch& b) {
    auto fs = free_symbols(term);
    if (!fs.vars.empty()) return false;
    for (int m : fs.metas)
      if (!b.metavar_origins().count(m)) return false;
    return true;
  }

  static RuleInstance instantiate_node(const RuleInstance& ri, const Substitution& s) {
    RuleInstance out = ri;
    for (auto& ch : out.children)
      for (auto& f : ch) f = substitute(f, s);
    for (auto& p : out.params) p = substitute(p, s);
    out.new_metas.clear();
    for (int m : ri.new_metas)
      if (!s.find(VarKey::of_meta(m))) out.new_metas.push_back(m);
    out.instantiation = ri.instantiation ? ri.instantiation->then(s) : s;
    if (out.rule == Rule::AllM) out.rule = Rule::AllInst;
    if (out.rule == Rule::NotExM) out.rule = Rule::NotExInst;
    if (out.rule == Rule::Super) out.rule = Rule::SuperInst;
    if (out.rule == Rule::SuperInst) out.name = ri.name;
    return out;
  }

  bool adds_nothing(const Branch& b, const RuleInstance& ri) const {
    for (const auto& ch : ri.children)
      for (const auto& f : ch) {
        auto id = t_.find(f);
        if (!id || !b.contains(*id)) return false;
      }
    return true;
  }

  Outcome expand(const Branch& b, RuleInstance ri, int depth) {
    Outcome first = run(b, ri, depth);
    if (first.node || ri.new_metas.empty()) return first;
    std::vector<Substitution> pending = std::move(first.proposals);
    std::set<std::string> tried;
    int attempts = 0;
    for (std::size_t i = 0; i < pending.size() && attempts < cfg_.instantiation_limit; ++i) {
      Substitution s;
      bool usable = true;
      for (int m : ri.new_metas) {
        if (const Term* v = pending[i].find(VarKey::of_meta(m))) {
          if (!admissible(*v, b)) usable = false;
          s.bind(VarKey::of_meta(m), *v);
        }
      }
      if (s.empty() || !usable || !tried.insert(key_of_subst(s)).second) continue;
      RuleInstance inst = instantiate_node(ri, s);
      if (adds_nothing(b, inst)) continue;
      ++attempts;
      Outcome o = expand(b, std::move(inst), depth);
      if (o.node) return o;
      for (auto& p : o.proposals) push_unique(pending, p);
    }
    // Pass up what concerns metavariables introduced above this node.
    Outcome out;
    for (const auto& p : pending) {
      Substitution above;
      for (const auto& [k, v] : p.bindings())
        if (b.metavar_origins().count(k.id)) above.bind(k, v);
      if (!above.empty()) push_unique(out.proposals, above);
    }
    return out;
  }

  const Theory& th_;
  const SearchConfig& cfg_;
  FormulaTable& t_;
  SearchStats& stats_;
  std::chrono::steady_clock::time_point deadline_;
  MetaSupply& metas_;
};

inline void collect_used(const ProofNode& n, std::set<int>& used) {
  for (int id : n.rule.principal) used.insert(id);
  for (const auto& c : n.children) collect_used(c, used);
}

inline std::set<int> used_ids(const ProofNode& n) {
  std::set<int> u;
  collect_used(n, u);
  return u;
}

// Recomputes the formula lists top-down from the rule additions.
inline void recompute(ProofNode& n, const FormulaTable& t) {
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    auto& c = n.children[i];
    c.formulas = n.formulas;
    c.added.clear();
    std::set<int> present(n.formulas.begin(), n.formulas.end());
    for (const auto& f : n.rule.children.at(i)) {
      int id = *t.find(f);
      if (present.insert(id).second) {
        c.formulas.push_back(id);
        c.added.push_back(id);
      }
    }
    recompute(c, t);
  }
}

// Replaces a node by one of its children when that child's subtree never
// uses what the node added for it.
inline bool bypass(ProofNode& n) {
  bool changed = false;
  for (auto& c : n.children) changed = bypass(c) || changed;
  for (bool again = true; again && !n.leaf();) {
    again = false;
    for (auto& c : n.children) {
      auto used = used_ids(c);
      bool needed = false;
      for (int id : c.added) needed = needed || used.count(id) > 0;
      if (needed) continue;
      auto keep_added = n.added;
      auto keep_formulas = n.formulas;
      ProofNode replacement = std::move(c);
      n = std::move(replacement);
      n.added = std::move(keep_added);
      n.formulas = std::move(keep_formulas);
      again = changed = true;
      break;
    }
  }
  return changed;
}

}  // namespace detail

// Removes rule applications whose results the proof never uses.
inline void simplify_proof(ProofNode& root, const FormulaTable& t) {
  while (detail::bypass(root)) detail::recompute(root, t);
  detail::recompute(root, t);
}

inline Branch initial_branch(const Theory& th, const Formula& conjecture, FormulaTable& t,
                             bool with_compiled_axioms = false) {
  Branch b;
  b.add(t.intern(neg(conjecture)));
  for (const auto& af : th.residual_axioms) b.add(t.intern(af.formula));
  if (with_compiled_axioms)
    for (const auto& af : th.compiled_axioms) b.add(t.intern(af.formula));
  return b;
}

// Searches from an explicit branch. `b` is only read.
inline ProofResult prove_branch(const Theory& th, const Branch& b, std::shared_ptr<FormulaTable> table,
                                const SearchConfig& cfg, SearchStats& stats) {
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  auto deadline = start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(cfg.timeout_seconds));
  ProofResult res;
  res.table = table;
  MetaSupply metas(detail::max_meta(b) + 1);
  detail::Prover prover(th, cfg, *table, stats, deadline, metas);
  ++stats.attempts;
  try {
    for (int bound = std::max(1, cfg.initial_depth);; bound *= 2) {
      prover.bound = bound;
      prover.bound_hit = false;
      stats.max_depth_bound = bound;
      auto o = prover.search(b, 0);
      if (o.node) {
        o.node->added = b.formulas();
        simplify_proof(*o.node, *table);
        res.status = ProofStatus::Proof;
        res.tree = std::move(o.node);
        break;
      }
      if (!prover.bound_hit || static_cast<std::size_t>(bound) > cfg.max_rule_applications) break;
    }
  } catch (const detail::SearchAbort& a) {
    res.status = a.timeout ? ProofStatus::Timeout : ProofStatus::Exhausted;
  }
  stats.wall_seconds += std::chrono::duration<double>(clock::now() - start).count();
  return res;
}

inline ProofResult prove(const Theory& th, const Formula& conjecture, const SearchConfig& cfg = {}) {
  SearchStats stats;
  auto table = std::make_shared<FormulaTable>();
  Branch b = initial_branch(th, conjecture, *table);
  ProofResult res = prove_branch(th, b, table, cfg, stats);
  if (res.status == ProofStatus::Exhausted && !stats.budget_hit && cfg.unfold_fallback &&
      !th.compiled_axioms.empty()) {
    SearchConfig rest = cfg;
    rest.timeout_seconds = std::max(0.0, cfg.timeout_seconds - stats.wall_seconds);
    Branch full = initial_branch(th, conjecture, *table, true);
    res = prove_branch(th, full, table, rest, stats);
  }
  res.stats = stats;
  res.conjecture = conjecture;
  return res;
}

// ---------------------------------------------------------------------------
// Structural check of a closed tree

inline bool closure_holds(const RuleInstance& ri, const std::vector<int>& formulas, const FormulaTable& t,
                          const RelationProperties& rel) {
  auto on = [&](int id) { return std::find(formulas.begin(), formulas.end(), id) != formulas.end(); };
  for (int id : ri.principal)
    if (!on(id)) return false;
  const auto& p = ri.principal;
  switch (ri.rule) {
    case Rule::CloseFalse:
      return p.size() == 1 && t.at(p[0])->kind() == Kind::False;
    case Rule::CloseNotTrue:
      return p.size() == 1 && t.at(p[0])->kind() == Kind::Not && t.at(p[0])->body()->kind() == Kind::True;
    case Rule::Close:
      return p.size() == 2 && t.at(p[1])->kind() == Kind::Not && alpha_equal(t.at(p[0]), t.at(p[1])->body());
    case Rule::CloseRefl: {
      if (p.size() != 1 || t.at(p[0])->kind() != Kind::Not) return false;
      const auto& a = t.at(p[0])->body();
      return detail::binary(a) && rel.of(a).reflexive && alpha_equal(a->arg(0), a->arg(1));
    }
    case Rule::CloseSym: {
      if (p.size() != 2 || t.at(p[1])->kind() != Kind::Not) return false;
      const auto& a = t.at(p[0]);
      const auto& c = t.at(p[1])->body();
      return detail::binary(a) && rel.of(a).symmetric && detail::same_relation(a, c) &&
             alpha_equal(a->arg(0), c->arg(1)) && alpha_equal(a->arg(1), c->arg(0));
    }
    default:
      return false;
  }
}

// Every leaf is a valid closure and every child's formulas are exactly its
// parent's plus the rule's additions. Returns an explanation on failure.
inline std::optional<std::string> check_proof(const ProofNode& n, const FormulaTable& t, const RelationProperties& rel) {
  if (n.leaf()) {
    if (!is_closure(n.rule.rule)) return "leaf without closure rule";
    if (!closure_holds(n.rule, n.formulas, t, rel)) return std::string("closure precondition fails for ") + n.rule.name;
    return std::nullopt;
  }
  if (is_closure(n.rule.rule)) return "closure rule with children";
  if (n.children.size() != n.rule.children.size()) return "child count mismatch at " + n.rule.name;
  for (int id : n.rule.principal)
    if (std::find(n.formulas.begin(), n.formulas.end(), id) == n.formulas.end())
      return "principal formula missing at " + n.rule.name;
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    std::vector<int> expect = n.formulas;
    for (const auto& f : n.rule.children[i]) {
      auto id = t.find(f);
      if (!id) return "unknown formula added by " + n.rule.name;
      if (std::find(expect.begin(), expect.end(), *id) == expect.end()) expect.push_back(*id);
    }
    if (expect != n.children[i].formulas) return "child formulas differ from parent plus additions at " + n.rule.name;
    if (auto e = check_proof(n.children[i], t, rel)) return e;
  }
  return std::nullopt;
}

}  // namespace szen

#endif  // SZEN_TABLEAU_HPP_
