// szen :: logic core
//
// Terms and formulas share one immutable node type. Bound names are kept for
// rendering; comparison and hashing go through alpha_equal / canonical_key,
// which ignore the choice of bound names.

#ifndef SZEN_LOGIC_HPP_
#define SZEN_LOGIC_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace szen {

enum class Kind : std::uint8_t {
  // terms
  Var, Meta, App, Eps,
  // formulas
  Atom, Eq, True, False, Not, And, Or, Implies, Equiv, Forall, Exists
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;
using Term = ExprPtr;
using Formula = ExprPtr;

class Expr {
public:
  Expr(Kind kind, std::string name, std::vector<ExprPtr> args, int id = -1, int origin = -1)
      : kind_(kind), name_(std::move(name)), args_(std::move(args)), id_(id), origin_(origin) {}

  Kind kind() const noexcept { return kind_; }
  // Symbol of App/Atom, name of Var, bound name of Eps/Forall/Exists.
  const std::string& name() const noexcept { return name_; }
  std::span<const ExprPtr> args() const noexcept { return args_; }
  const ExprPtr& arg(std::size_t i) const { return args_.at(i); }
  std::size_t arity() const noexcept { return args_.size(); }
  // Metavariable id and the hypothesis that introduced it (-1 for rule schemas).
  int meta_id() const noexcept { return id_; }
  int origin() const noexcept { return origin_; }

  // Body of a binder (Eps, Forall, Exists) or operand of Not.
  const ExprPtr& body() const { return args_.at(0); }
  const ExprPtr& lhs() const { return args_.at(0); }
  const ExprPtr& rhs() const { return args_.at(1); }

  bool is_term() const noexcept { return kind_ <= Kind::Eps; }
  bool is_binder() const noexcept {
    return kind_ == Kind::Eps || kind_ == Kind::Forall || kind_ == Kind::Exists;
  }

private:
  Kind kind_;
  std::string name_;
  std::vector<ExprPtr> args_;
  int id_;
  int origin_;
};

// ---------------------------------------------------------------------------
// Construction

inline Term var(std::string name) { return std::make_shared<Expr>(Kind::Var, std::move(name), std::vector<ExprPtr>{}); }
inline Term meta(int id, int origin = -1) { return std::make_shared<Expr>(Kind::Meta, "", std::vector<ExprPtr>{}, id, origin); }
inline Term app(std::string symbol, std::vector<Term> args = {}) {
  return std::make_shared<Expr>(Kind::App, std::move(symbol), std::move(args));
}
inline Term eps(std::string bound, Formula body) {
  return std::make_shared<Expr>(Kind::Eps, std::move(bound), std::vector<ExprPtr>{std::move(body)});
}
inline Formula atom(std::string pred, std::vector<Term> args = {}) {
  return std::make_shared<Expr>(Kind::Atom, std::move(pred), std::move(args));
}
inline Formula eq(Term l, Term r) { return std::make_shared<Expr>(Kind::Eq, "=", std::vector<ExprPtr>{std::move(l), std::move(r)}); }
inline Formula top() { return std::make_shared<Expr>(Kind::True, "", std::vector<ExprPtr>{}); }
inline Formula bot() { return std::make_shared<Expr>(Kind::False, "", std::vector<ExprPtr>{}); }
inline Formula neg(Formula f) { return std::make_shared<Expr>(Kind::Not, "", std::vector<ExprPtr>{std::move(f)}); }
inline Formula conj(Formula a, Formula b) { return std::make_shared<Expr>(Kind::And, "", std::vector<ExprPtr>{std::move(a), std::move(b)}); }
inline Formula disj(Formula a, Formula b) { return std::make_shared<Expr>(Kind::Or, "", std::vector<ExprPtr>{std::move(a), std::move(b)}); }
inline Formula implies(Formula a, Formula b) { return std::make_shared<Expr>(Kind::Implies, "", std::vector<ExprPtr>{std::move(a), std::move(b)}); }
inline Formula equiv(Formula a, Formula b) { return std::make_shared<Expr>(Kind::Equiv, "", std::vector<ExprPtr>{std::move(a), std::move(b)}); }
inline Formula forall(std::string v, Formula body) { return std::make_shared<Expr>(Kind::Forall, std::move(v), std::vector<ExprPtr>{std::move(body)}); }
inline Formula exists(std::string v, Formula body) { return std::make_shared<Expr>(Kind::Exists, std::move(v), std::vector<ExprPtr>{std::move(body)}); }

inline Formula forall(const std::vector<std::string>& vs, Formula body) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = forall(*it, std::move(body));
  return body;
}

// Rebuilds `e` with new children, keeping kind, name and ids.
inline ExprPtr with_args(const Expr& e, std::vector<ExprPtr> args) {
  return std::make_shared<Expr>(e.kind(), e.name(), std::move(args), e.meta_id(), e.origin());
}
inline ExprPtr with_binder(const Expr& e, std::string bound, ExprPtr body) {
  return std::make_shared<Expr>(e.kind(), std::move(bound), std::vector<ExprPtr>{std::move(body)});
}

inline bool is_atomic(const Formula& f) { return f->kind() == Kind::Atom || f->kind() == Kind::Eq; }
inline bool is_literal(const Formula& f) {
  return is_atomic(f) || (f->kind() == Kind::Not && is_atomic(f->body()));
}
// The atom of a literal, and its sign.
inline const Formula& literal_atom(const Formula& f) { return f->kind() == Kind::Not ? f->body() : f; }
inline bool literal_positive(const Formula& f) { return f->kind() != Kind::Not; }

// ---------------------------------------------------------------------------
// Variable keys and substitutions

struct VarKey {
  bool is_meta = false;
  int id = -1;
  std::string name;

  static VarKey of_var(std::string n) { return {false, -1, std::move(n)}; }
  static VarKey of_meta(int i) { return {true, i, {}}; }
  static VarKey of(const Expr& t) {
    return t.kind() == Kind::Meta ? of_meta(t.meta_id()) : of_var(t.name());
  }
  auto operator<=>(const VarKey&) const = default;
};

struct FreeSymbols {
  std::set<std::string> vars;
  std::set<int> metas;
};

namespace detail {

inline void collect_free(const ExprPtr& e, std::vector<std::string>& bound, FreeSymbols& out) {
  switch (e->kind()) {
    case Kind::Var:
      for (auto it = bound.rbegin(); it != bound.rend(); ++it)
        if (*it == e->name()) return;
      out.vars.insert(e->name());
      return;
    case Kind::Meta:
      out.metas.insert(e->meta_id());
      return;
    case Kind::Eps:
    case Kind::Forall:
    case Kind::Exists:
      bound.push_back(e->name());
      collect_free(e->body(), bound, out);
      bound.pop_back();
      return;
    default:
      for (const auto& a : e->args()) collect_free(a, bound, out);
  }
}

}  // namespace detail

inline FreeSymbols free_symbols(const ExprPtr& e) {
  FreeSymbols out;
  std::vector<std::string> bound;
  detail::collect_free(e, bound, out);
  return out;
}

// Named variables with a free occurrence. Metavariables are reported by free_symbols.
inline std::set<std::string> free_variables(const ExprPtr& e) { return free_symbols(e).vars; }

inline bool has_metas(const ExprPtr& e) { return !free_symbols(e).metas.empty(); }

inline bool is_closed(const ExprPtr& e) { return free_symbols(e).vars.empty(); }

// Does variable key `k` occur free in `e`?
inline bool occurs(const VarKey& k, const ExprPtr& e) {
  auto fs = free_symbols(e);
  return k.is_meta ? fs.metas.count(k.id) > 0 : fs.vars.count(k.name) > 0;
}

class Substitution;
ExprPtr substitute(const ExprPtr& e, const Substitution& s);

class Substitution {
public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const VarKey, Term>> init) : map_(init) {}

  bool empty() const noexcept { return map_.empty(); }
  std::size_t size() const noexcept { return map_.size(); }
  const Term* find(const VarKey& k) const {
    auto it = map_.find(k);
    return it == map_.end() ? nullptr : &it->second;
  }
  void bind(VarKey k, Term t) { map_.insert_or_assign(std::move(k), std::move(t)); }
  void erase(const VarKey& k) { map_.erase(k); }
  const std::map<VarKey, Term>& bindings() const noexcept { return map_; }

  // Free symbols of all bound terms.
  FreeSymbols range_symbols() const {
    FreeSymbols out;
    for (const auto& [k, t] : map_) {
      auto fs = free_symbols(t);
      out.vars.insert(fs.vars.begin(), fs.vars.end());
      out.metas.insert(fs.metas.begin(), fs.metas.end());
    }
    return out;
  }

  // (after ∘ *this): apply *this first, then `after`.
  Substitution then(const Substitution& after) const {
    Substitution out;
    for (const auto& [k, t] : map_) out.map_.insert_or_assign(k, substitute(t, after));
    for (const auto& [k, t] : after.map_)
      if (!map_.count(k)) out.map_.insert_or_assign(k, t);
    for (auto it = out.map_.begin(); it != out.map_.end();) {
      const auto& t = *it->second;
      bool trivial = (t.kind() == Kind::Var && !it->first.is_meta && t.name() == it->first.name) ||
                     (t.kind() == Kind::Meta && it->first.is_meta && t.meta_id() == it->first.id);
      it = trivial ? out.map_.erase(it) : std::next(it);
    }
    return out;
  }

private:
  std::map<VarKey, Term> map_;
};

// ---------------------------------------------------------------------------
// Capture-avoiding substitution

namespace detail {

inline std::string fresh_name(const std::string& base, const std::function<bool(const std::string&)>& taken) {
  std::string n = base + "'";
  while (taken(n)) n += "'";
  return n;
}

inline ExprPtr subst_rec(const ExprPtr& e, const Substitution& s) {
  if (s.empty()) return e;
  switch (e->kind()) {
    case Kind::Var:
    case Kind::Meta: {
      const Term* t = s.find(VarKey::of(*e));
      return t ? *t : e;
    }
    case Kind::True:
    case Kind::False:
      return e;
    case Kind::Eps:
    case Kind::Forall:
    case Kind::Exists: {
      Substitution inner = s;
      inner.erase(VarKey::of_var(e->name()));
      // Only bindings for variables free in the body matter.
      auto body_fs = free_symbols(e->body());
      Substitution relevant;
      for (const auto& [k, t] : inner.bindings()) {
        bool live = k.is_meta ? body_fs.metas.count(k.id) > 0 : body_fs.vars.count(k.name) > 0;
        if (live) relevant.bind(k, t);
      }
      if (relevant.empty()) return e;
      auto range = relevant.range_symbols();
      std::string bound = e->name();
      if (range.vars.count(bound)) {
        std::string renamed = fresh_name(bound, [&](const std::string& n) {
          return range.vars.count(n) > 0 || body_fs.vars.count(n) > 0;
        });
        relevant.bind(VarKey::of_var(bound), var(renamed));
        bound = renamed;
      }
      return with_binder(*e, bound, subst_rec(e->body(), relevant));
    }
    default: {
      std::vector<ExprPtr> args;
      args.reserve(e->arity());
      bool changed = false;
      for (const auto& a : e->args()) {
        args.push_back(subst_rec(a, s));
        changed = changed || args.back() != a;
      }
      return changed ? with_args(*e, std::move(args)) : e;
    }
  }
}

}  // namespace detail

inline ExprPtr substitute(const ExprPtr& e, const Substitution& s) { return detail::subst_rec(e, s); }

// Body of a binder with its bound variable replaced by `t`.
inline ExprPtr instantiate(const Expr& binder, const Term& t) {
  return substitute(binder.body(), Substitution{{VarKey::of_var(binder.name()), t}});
}

// ---------------------------------------------------------------------------
// Alpha-equivalence and canonical keys

namespace detail {

// Index of `name` in the binder stack counted from the innermost binder, or -1.
inline int bound_index(const std::vector<std::string>& env, const std::string& name) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i] == name) return static_cast<int>(env.size() - 1 - i);
  return -1;
}

inline bool alpha_rec(const ExprPtr& a, const ExprPtr& b, std::vector<std::string>& ea, std::vector<std::string>& eb) {
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case Kind::Var: {
      int ia = bound_index(ea, a->name()), ib = bound_index(eb, b->name());
      if (ia != ib) return false;
      return ia >= 0 || a->name() == b->name();
    }
    case Kind::Meta:
      return a->meta_id() == b->meta_id();
    case Kind::Eps:
    case Kind::Forall:
    case Kind::Exists: {
      ea.push_back(a->name());
      eb.push_back(b->name());
      bool r = alpha_rec(a->body(), b->body(), ea, eb);
      ea.pop_back();
      eb.pop_back();
      return r;
    }
    default:
      if (a->name() != b->name() || a->arity() != b->arity()) return false;
      for (std::size_t i = 0; i < a->arity(); ++i)
        if (!alpha_rec(a->arg(i), b->arg(i), ea, eb)) return false;
      return true;
  }
}

inline void key_rec(const ExprPtr& e, std::vector<std::string>& env, std::string& out) {
  switch (e->kind()) {
    case Kind::Var: {
      int i = bound_index(env, e->name());
      if (i >= 0) out += "#" + std::to_string(i);
      else out += "$" + e->name();
      return;
    }
    case Kind::Meta: out += "?" + std::to_string(e->meta_id()); return;
    case Kind::True: out += "T"; return;
    case Kind::False: out += "F"; return;
    case Kind::Eps:
    case Kind::Forall:
    case Kind::Exists:
      out += e->kind() == Kind::Eps ? "e(" : e->kind() == Kind::Forall ? "A(" : "E(";
      env.push_back(e->name());
      key_rec(e->body(), env, out);
      env.pop_back();
      out += ")";
      return;
    default:
      out += static_cast<char>('a' + static_cast<int>(e->kind()));
      out += e->name();
      out += "(";
      for (std::size_t i = 0; i < e->arity(); ++i) {
        if (i) out += ",";
        key_rec(e->arg(i), env, out);
      }
      out += ")";
  }
}

}  // namespace detail

inline bool alpha_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  std::vector<std::string> ea, eb;
  return detail::alpha_rec(a, b, ea, eb);
}

// A string that is equal for two expressions iff they are alpha-equal.
inline std::string canonical_key(const ExprPtr& e) {
  std::string out;
  std::vector<std::string> env;
  detail::key_rec(e, env, out);
  return out;
}

// ---------------------------------------------------------------------------
// Unification

enum class UnifyMode {
  MetasOnly,  // metavariables are unknowns; named variables are rigid
  Schema      // free named variables (rule parameters) are unknowns too
};

namespace detail {

inline bool is_unknown(const Expr& t, UnifyMode mode) {
  return t.kind() == Kind::Meta || (mode == UnifyMode::Schema && t.kind() == Kind::Var);
}

inline ExprPtr walk(const ExprPtr& t, const Substitution& s) {
  ExprPtr cur = t;
  while (cur->kind() == Kind::Var || cur->kind() == Kind::Meta) {
    const Term* b = s.find(VarKey::of(*cur));
    if (!b) break;
    cur = *b;
  }
  return cur;
}

inline bool unify_rec(const ExprPtr& a0, const ExprPtr& b0, Substitution& s, UnifyMode mode) {
  ExprPtr a = walk(a0, s), b = walk(b0, s);
  if (a == b) return true;
  bool ua = is_unknown(*a, mode), ub = is_unknown(*b, mode);
  if (ua && ub && VarKey::of(*a) == VarKey::of(*b)) return true;
  if (ua || ub) {
    const ExprPtr& v = ua ? a : b;
    const ExprPtr& t = ua ? b : a;
    ExprPtr resolved = substitute(t, s);
    VarKey k = VarKey::of(*v);
    if (occurs(k, resolved)) return false;
    s.bind(k, resolved);
    return true;
  }
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case Kind::Var:
      return a->name() == b->name();
    case Kind::Meta:
      return a->meta_id() == b->meta_id();
    case Kind::Eps:
      return alpha_equal(substitute(a, s), substitute(b, s));
    case Kind::App:
    case Kind::Atom:
    case Kind::Eq:
    case Kind::Not:
      if (a->name() != b->name() || a->arity() != b->arity()) return false;
      for (std::size_t i = 0; i < a->arity(); ++i)
        if (!unify_rec(a->arg(i), b->arg(i), s, mode)) return false;
      return true;
    default:
      return alpha_equal(substitute(a, s), substitute(b, s));
  }
}

}  // namespace detail

// Most general unifier of two terms or literals, idempotent, or nullopt.
inline std::optional<Substitution> unify(const ExprPtr& a, const ExprPtr& b, UnifyMode mode = UnifyMode::MetasOnly) {
  Substitution s;
  if (!detail::unify_rec(a, b, s, mode)) return std::nullopt;
  // Resolve the triangular form.
  Substitution out;
  for (const auto& [k, t] : s.bindings()) {
    ExprPtr r = t;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      ExprPtr next = substitute(r, s);
      if (next == r || alpha_equal(next, r)) break;
      r = next;
    }
    out.bind(k, r);
  }
  return out;
}

// One-way matching: free named variables of `pattern` bind, `target` is rigid.
inline bool match(const ExprPtr& pattern, const ExprPtr& target, Substitution& s) {
  switch (pattern->kind()) {
    case Kind::Var: {
      VarKey k = VarKey::of_var(pattern->name());
      if (const Term* b = s.find(k)) return alpha_equal(*b, target);
      s.bind(k, target);
      return true;
    }
    case Kind::Meta:
      return target->kind() == Kind::Meta && target->meta_id() == pattern->meta_id();
    case Kind::Eps:
    case Kind::Forall:
    case Kind::Exists:
      return target->kind() == pattern->kind() && alpha_equal(substitute(pattern, s), target);
    default:
      if (pattern->kind() != target->kind() || pattern->name() != target->name() ||
          pattern->arity() != target->arity())
        return false;
      for (std::size_t i = 0; i < pattern->arity(); ++i)
        if (!match(pattern->arg(i), target->arg(i), s)) return false;
      return true;
  }
}

// Renames the free named variables of `e` by appending `suffix`.
inline ExprPtr rename_free_vars(const ExprPtr& e, const std::string& suffix) {
  Substitution s;
  for (const auto& v : free_variables(e)) s.bind(VarKey::of_var(v), var(v + suffix));
  return substitute(e, s);
}

// ---------------------------------------------------------------------------
// Plain-text debug rendering (fof-like)

inline std::string to_string(const ExprPtr& e);

namespace detail {

inline void print_rec(const ExprPtr& e, std::ostringstream& os) {
  auto list = [&](std::span<const ExprPtr> args) {
    if (args.empty()) return;
    os << "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) os << ",";
      print_rec(args[i], os);
    }
    os << ")";
  };
  auto bin = [&](const char* op) {
    os << "(";
    print_rec(e->lhs(), os);
    os << " " << op << " ";
    print_rec(e->rhs(), os);
    os << ")";
  };
  switch (e->kind()) {
    case Kind::Var: os << e->name(); break;
    case Kind::Meta: os << "?" << e->meta_id(); break;
    case Kind::App:
    case Kind::Atom: os << e->name(); list(e->args()); break;
    case Kind::Eps: os << "@[" << e->name() << "]:"; print_rec(e->body(), os); break;
    case Kind::Eq: print_rec(e->lhs(), os); os << " = "; print_rec(e->rhs(), os); break;
    case Kind::True: os << "$true"; break;
    case Kind::False: os << "$false"; break;
    case Kind::Not:
      if (e->body()->kind() == Kind::Eq) {
        print_rec(e->body()->lhs(), os);
        os << " != ";
        print_rec(e->body()->rhs(), os);
      } else {
        os << "~ ";
        print_rec(e->body(), os);
      }
      break;
    case Kind::And: bin("&"); break;
    case Kind::Or: bin("|"); break;
    case Kind::Implies: bin("=>"); break;
    case Kind::Equiv: bin("<=>"); break;
    case Kind::Forall: os << "(! [" << e->name() << "] : "; print_rec(e->body(), os); os << ")"; break;
    case Kind::Exists: os << "(? [" << e->name() << "] : "; print_rec(e->body(), os); os << ")"; break;
  }
}

}  // namespace detail

inline std::string to_string(const ExprPtr& e) {
  std::ostringstream os;
  detail::print_rec(e, os);
  return os.str();
}

}  // namespace szen

#endif  // SZEN_LOGIC_HPP_
