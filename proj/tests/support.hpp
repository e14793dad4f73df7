// Shared generators and oracles for the test suites.
#ifndef SZEN_TESTS_SUPPORT_HPP_
#define SZEN_TESTS_SUPPORT_HPP_

#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "szen/szen.hpp"

#ifndef SZEN_FIXTURES
#define SZEN_FIXTURES "fixtures"
#endif

namespace szen::testing {

inline std::string fixture(const std::string& name) { return std::string(SZEN_FIXTURES) + "/" + name; }

// ---------------------------------------------------------------------------
// Propositional formulas over 0-ary atoms p0..p(n-1)

inline Formula prop_atom(int i) { return atom("p" + std::to_string(i)); }

inline Formula random_prop(std::mt19937& rng, int atoms, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 6);
  std::uniform_int_distribution<int> which(0, atoms - 1);
  switch (pick(rng)) {
    case 0: return prop_atom(which(rng));
    case 1: return neg(random_prop(rng, atoms, depth - 1));
    case 2: return conj(random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1));
    case 3: return disj(random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1));
    case 4: return implies(random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1));
    case 5: return equiv(random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1));
    default: return prop_atom(which(rng));
  }
}

// Truth value under an assignment keyed by atom name.
inline bool eval_prop(const Formula& f, const std::map<std::string, bool>& v) {
  switch (f->kind()) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: return v.at(f->name());
    case Kind::Not: return !eval_prop(f->body(), v);
    case Kind::And: return eval_prop(f->lhs(), v) && eval_prop(f->rhs(), v);
    case Kind::Or: return eval_prop(f->lhs(), v) || eval_prop(f->rhs(), v);
    case Kind::Implies: return !eval_prop(f->lhs(), v) || eval_prop(f->rhs(), v);
    case Kind::Equiv: return eval_prop(f->lhs(), v) == eval_prop(f->rhs(), v);
    default: throw std::logic_error("eval_prop: not propositional");
  }
}

inline void for_each_assignment(const std::vector<std::string>& names,
                                const std::function<void(const std::map<std::string, bool>&)>& fn) {
  for (unsigned mask = 0; mask < (1u << names.size()); ++mask) {
    std::map<std::string, bool> v;
    for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = (mask >> i) & 1u;
    fn(v);
  }
}

inline std::vector<std::string> atom_names(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("p" + std::to_string(i));
  return out;
}

// Brute-force entailment: every model of the axioms satisfies the goal.
inline bool entails(const std::vector<Formula>& axioms, const Formula& goal, int atoms) {
  bool ok = true;
  for_each_assignment(atom_names(atoms), [&](const auto& v) {
    for (const auto& a : axioms)
      if (!eval_prop(a, v)) return;
    if (!eval_prop(goal, v)) ok = false;
  });
  return ok;
}

inline Problem make_problem(const std::vector<Formula>& axioms, const Formula& goal) {
  Problem p;
  for (std::size_t i = 0; i < axioms.size(); ++i)
    p.formulas.push_back({"ax" + std::to_string(i), Role::Axiom, axioms[i], {}});
  p.formulas.push_back({"goal", Role::Conjecture, goal, {}});
  return p;
}

// ---------------------------------------------------------------------------
// Ground equality over constants c0..c3 and one unary function f

inline Term ground_term(std::mt19937& rng, int constants) {
  std::uniform_int_distribution<int> c(0, constants - 1);
  std::bernoulli_distribution nested(0.3);
  Term t = app("c" + std::to_string(c(rng)));
  if (nested(rng)) t = app("f", {t});
  return t;
}

// Congruence closure by naive fixpoint over the finite set of subterms.
class CongruenceOracle {
public:
  void add_term(const Term& t) {
    auto k = canonical_key(t);
    if (index_.count(k)) return;
    for (const auto& a : t->args()) add_term(a);
    index_[k] = static_cast<int>(terms_.size());
    terms_.push_back(t);
    parent_.push_back(static_cast<int>(parent_.size()));
  }
  void merge(const Term& a, const Term& b) {
    add_term(a);
    add_term(b);
    unite(id(a), id(b));
    close();
  }
  bool equal(const Term& a, const Term& b) {
    add_term(a);
    add_term(b);
    close();
    return find(id(a)) == find(id(b));
  }

private:
  int id(const Term& t) const { return index_.at(canonical_key(t)); }
  int find(int x) { return parent_[x] == x ? x : parent_[x] = find(parent_[x]); }
  void unite(int a, int b) { parent_[find(a)] = find(b); }
  void close() {
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < terms_.size(); ++i)
        for (std::size_t j = i + 1; j < terms_.size(); ++j) {
          const auto& s = terms_[i];
          const auto& t = terms_[j];
          if (s->kind() != Kind::App || t->kind() != Kind::App || s->name() != t->name() || s->arity() != t->arity() ||
              s->arity() == 0 || find(i) == find(j))
            continue;
          bool args = true;
          for (std::size_t k = 0; k < s->arity(); ++k) args = args && find(id(s->arg(k))) == find(id(t->arg(k)));
          if (args) {
            unite(i, j);
            changed = true;
          }
        }
    }
  }
  std::map<std::string, int> index_;
  std::vector<Term> terms_;
  std::vector<int> parent_;
};

// Literals are equations or disequations; the goal is an equation.
inline bool ground_entails(const std::vector<Formula>& lits, const Formula& goal) {
  CongruenceOracle cc;
  for (const auto& l : lits)
    if (l->kind() == Kind::Eq) cc.merge(l->lhs(), l->rhs());
  for (const auto& l : lits)
    if (l->kind() == Kind::Not && cc.equal(l->body()->lhs(), l->body()->rhs())) return true;
  return cc.equal(goal->lhs(), goal->rhs());
}

// ---------------------------------------------------------------------------
// First-order terms for the logic-core property tests

struct TermGen {
  std::mt19937& rng;
  int metas = 3;
  int vars = 3;

  Term term(int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 4);
    std::uniform_int_distribution<int> small(0, 2);
    switch (pick(rng)) {
      case 0: return meta(small(rng) % metas);
      case 1: return var(std::string(1, static_cast<char>('X' + small(rng) % vars)));
      case 2: return app(std::string(1, static_cast<char>('a' + small(rng))));
      case 3: return app("f", {term(depth - 1)});
      default: return app("g", {term(depth - 1), term(depth - 1)});
    }
  }

  Term ground(int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 2);
    std::uniform_int_distribution<int> small(0, 2);
    switch (pick(rng)) {
      case 0: return app(std::string(1, static_cast<char>('a' + small(rng))));
      case 1: return app("f", {ground(depth - 1)});
      default: return app("g", {ground(depth - 1), ground(depth - 1)});
    }
  }

  Formula formula(int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    std::uniform_int_distribution<int> small(0, 2);
    switch (pick(rng)) {
      case 0: return atom("p", {term(1)});
      case 1: return atom("q", {term(1), term(1)});
      case 2: return neg(formula(depth - 1));
      case 3: return conj(formula(depth - 1), formula(depth - 1));
      case 4: return implies(formula(depth - 1), formula(depth - 1));
      case 5: return forall(std::string(1, static_cast<char>('X' + small(rng) % vars)), formula(depth - 1));
      default: return exists(std::string(1, static_cast<char>('X' + small(rng) % vars)), formula(depth - 1));
    }
  }
};

}  // namespace szen::testing

#endif  // SZEN_TESTS_SUPPORT_HPP_
