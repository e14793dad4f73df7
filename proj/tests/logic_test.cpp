#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "support.hpp"

using namespace szen;
using szen::testing::TermGen;

namespace {

constexpr int kCases = 1000;

Term c(const std::string& n) { return app(n); }

// A two-element structure with random tables for a, b, c, f, g, p, q.
struct Model {
  std::map<std::string, int> consts;
  int f[2];
  int g[2][2];
  bool p[2];
  bool q[2][2];

  explicit Model(std::mt19937& rng) {
    std::bernoulli_distribution coin;
    for (const char* n : {"a", "b", "c", "d", "usa"}) consts[n] = coin(rng);
    for (int i = 0; i < 2; ++i) {
      f[i] = coin(rng);
      p[i] = coin(rng);
      for (int j = 0; j < 2; ++j) g[i][j] = coin(rng), q[i][j] = coin(rng);
    }
  }

  using Env = std::map<VarKey, int>;

  int term(const Term& t, const Env& env) const {
    switch (t->kind()) {
      case Kind::Var:
      case Kind::Meta: return env.at(VarKey::of(*t));
      case Kind::App:
        if (t->arity() == 0) return consts.at(t->name());
        if (t->name() == "f") return f[term(t->arg(0), env)];
        return g[term(t->arg(0), env)][term(t->arg(1), env)];
      default: throw std::logic_error("no epsilon in model tests");
    }
  }

  bool holds(const Formula& x, Env env) const {
    switch (x->kind()) {
      case Kind::True: return true;
      case Kind::False: return false;
      case Kind::Atom:
        if (x->name() == "p") return p[term(x->arg(0), env)];
        return q[term(x->arg(0), env)][term(x->arg(1), env)];
      case Kind::Eq: return term(x->lhs(), env) == term(x->rhs(), env);
      case Kind::Not: return !holds(x->body(), env);
      case Kind::And: return holds(x->lhs(), env) && holds(x->rhs(), env);
      case Kind::Or: return holds(x->lhs(), env) || holds(x->rhs(), env);
      case Kind::Implies: return !holds(x->lhs(), env) || holds(x->rhs(), env);
      case Kind::Equiv: return holds(x->lhs(), env) == holds(x->rhs(), env);
      case Kind::Forall:
      case Kind::Exists: {
        bool any = false, all = true;
        for (int v = 0; v < 2; ++v) {
          env[VarKey::of_var(x->name())] = v;
          bool h = holds(x->body(), env);
          any = any || h;
          all = all && h;
        }
        return x->kind() == Kind::Forall ? all : any;
      }
      default: throw std::logic_error("bad formula");
    }
  }
};

std::vector<Model::Env> all_envs() {
  std::vector<VarKey> keys = {VarKey::of_var("X"), VarKey::of_var("Y"), VarKey::of_var("Z"),
                              VarKey::of_meta(0), VarKey::of_meta(1), VarKey::of_meta(2)};
  std::vector<Model::Env> out;
  for (unsigned m = 0; m < (1u << keys.size()); ++m) {
    Model::Env e;
    for (std::size_t i = 0; i < keys.size(); ++i) e[keys[i]] = (m >> i) & 1u;
    out.push_back(e);
  }
  return out;
}

// Renames every binder, keeping the structure.
Formula rename_bound(const Formula& f, const std::string& suffix, std::map<std::string, std::string> env = {}) {
  switch (f->kind()) {
    case Kind::Var: {
      auto it = env.find(f->name());
      return it == env.end() ? f : var(it->second);
    }
    case Kind::Forall:
    case Kind::Exists:
    case Kind::Eps: {
      std::string fresh = f->name() + suffix;
      env[f->name()] = fresh;
      return with_binder(*f, fresh, rename_bound(f->body(), suffix, env));
    }
    default: {
      std::vector<ExprPtr> args;
      for (const auto& a : f->args()) args.push_back(rename_bound(a, suffix, env));
      return args.empty() ? f : with_args(*f, std::move(args));
    }
  }
}

Substitution random_meta_subst(TermGen& gen, bool ground) {
  Substitution s;
  std::bernoulli_distribution coin;
  for (int m = 0; m < 3; ++m)
    if (coin(gen.rng)) s.bind(VarKey::of_meta(m), ground ? gen.ground(2) : gen.term(2));
  return s;
}

}  // namespace

TEST(FreeVariables, InclusionBodyHasSetParameters) {
  auto body = forall("x", implies(atom("in", {var("x"), var("a")}), atom("in", {var("x"), var("b")})));
  EXPECT_EQ(free_variables(body), (std::set<std::string>{"a", "b"}));
}

TEST(FreeVariables, TrueIsClosed) { EXPECT_TRUE(free_variables(top()).empty()); }

TEST(FreeVariables, ShadowedOccurrenceIsBound) {
  auto f = conj(atom("P", {var("x")}), forall("x", atom("Q", {var("x")})));
  EXPECT_EQ(free_variables(f), (std::set<std::string>{"x"}));
}

TEST(Substitute, GammaInstanceOfBody) {
  auto all = forall("x", atom("P", {var("x")}));
  EXPECT_TRUE(alpha_equal(instantiate(*all, c("t")), atom("P", {c("t")})));
}

TEST(Substitute, EmptySubstitutionIsIdentity) {
  auto f = forall("x", atom("P", {var("x"), var("y")}));
  EXPECT_EQ(substitute(f, {}), f);
}

TEST(Substitute, AvoidsCapture) {
  auto f = forall("y", atom("P", {var("x"), var("y")}));
  auto g = substitute(f, {{VarKey::of_var("x"), app("g", {var("y")})}});
  ASSERT_EQ(g->kind(), Kind::Forall);
  EXPECT_NE(g->name(), "y");
  EXPECT_TRUE(alpha_equal(g, forall("y2", atom("P", {app("g", {var("y")}), var("y2")}))));
}

TEST(AlphaEqual, EpsilonUpToRenaming) {
  auto mk = [](const std::string& v) {
    return eps(v, neg(implies(atom("in", {var(v), c("a")}), atom("in", {var(v), c("b")}))));
  };
  EXPECT_TRUE(alpha_equal(mk("x"), mk("y")));
  EXPECT_EQ(canonical_key(mk("x")), canonical_key(mk("y")));
}

TEST(AlphaEqual, Basics) {
  EXPECT_TRUE(alpha_equal(atom("P", {c("c")}), atom("P", {c("c")})));
  EXPECT_FALSE(alpha_equal(forall("x", atom("P", {var("x"), c("c")})), forall("x", atom("P", {var("x"), c("d")}))));
  // A bound and a free occurrence differ.
  EXPECT_FALSE(alpha_equal(forall("x", atom("P", {var("x")})), forall("y", atom("P", {var("x")}))));
}

TEST(Unify, SchemaVariableAgainstConstant) {
  auto s = unify(app("capital_city", {var("X")}), app("capital_city", {c("usa")}), UnifyMode::Schema);
  ASSERT_TRUE(s);
  ASSERT_TRUE(s->find(VarKey::of_var("X")));
  EXPECT_TRUE(alpha_equal(*s->find(VarKey::of_var("X")), c("usa")));
}

TEST(Unify, IdenticalTermsGiveEmpty) {
  auto t = app("f", {meta(0), c("a")});
  auto s = unify(t, t);
  ASSERT_TRUE(s);
  EXPECT_TRUE(s->empty());
}

TEST(Unify, OccursCheck) {
  EXPECT_FALSE(unify(var("X"), app("f", {var("X")}), UnifyMode::Schema));
  EXPECT_FALSE(unify(meta(0), app("f", {meta(0)})));
}

TEST(Unify, RigidVariablesInMetaMode) {
  EXPECT_FALSE(unify(var("X"), c("a")));
  EXPECT_TRUE(unify(meta(3), c("a")));
}

// ---------------------------------------------------------------------------
// Property tests

TEST(LogicProperties, SubstitutionLemmaInTwoElementModels) {
  std::mt19937 rng(101);
  TermGen gen{rng};
  auto envs = all_envs();
  for (int i = 0; i < kCases; ++i) {
    Model m(rng);
    auto f = gen.formula(3);
    std::uniform_int_distribution<int> pick(0, 2);
    auto x = VarKey::of_var(std::string(1, static_cast<char>('X' + pick(rng))));
    auto t = gen.term(2);
    auto g = substitute(f, {{x, t}});
    for (const auto& env : {envs[static_cast<std::size_t>(i) % envs.size()], envs[(i * 7 + 3) % envs.size()]}) {
      auto shifted = env;
      shifted[x] = m.term(t, env);
      ASSERT_EQ(m.holds(g, env), m.holds(f, shifted)) << to_string(f) << " [" << to_string(t) << "]";
    }
  }
}

TEST(LogicProperties, UnifierEqualisesBothSides) {
  std::mt19937 rng(202);
  TermGen gen{rng};
  int unified = 0;
  for (int i = 0; i < kCases; ++i) {
    auto a = gen.term(3), b = gen.term(3);
    auto s = unify(a, b);
    ASSERT_EQ(s.has_value(), unify(b, a).has_value());
    if (!s) continue;
    ++unified;
    auto sa = substitute(a, *s), sb = substitute(b, *s);
    ASSERT_TRUE(alpha_equal(sa, sb)) << to_string(a) << " ~ " << to_string(b);
    // Idempotent.
    ASSERT_TRUE(alpha_equal(substitute(sa, *s), sa));
  }
  EXPECT_GT(unified, 50);
}

TEST(LogicProperties, UnifierIsMostGeneral) {
  std::mt19937 rng(303);
  TermGen gen{rng};
  for (int i = 0; i < kCases; ++i) {
    auto a = gen.term(3);
    auto theta = random_meta_subst(gen, true);
    // theta grounds some metavariables; ground the rest to keep b meta-free.
    for (int m = 0; m < 3; ++m)
      if (!theta.find(VarKey::of_meta(m))) theta.bind(VarKey::of_meta(m), gen.ground(1));
    auto b = substitute(a, theta);
    auto s = unify(a, b);
    ASSERT_TRUE(s) << to_string(a) << " vs " << to_string(b);
    ASSERT_TRUE(alpha_equal(substitute(substitute(a, *s), theta), substitute(a, theta)));
  }
}

TEST(LogicProperties, CompositionMatchesSequentialApplication) {
  std::mt19937 rng(404);
  TermGen gen{rng};
  for (int i = 0; i < kCases; ++i) {
    auto e = (i % 2) ? gen.term(3) : gen.formula(2);
    auto s1 = random_meta_subst(gen, false);
    auto s2 = random_meta_subst(gen, false);
    auto lhs = substitute(e, s1.then(s2));
    auto rhs = substitute(substitute(e, s1), s2);
    ASSERT_TRUE(alpha_equal(lhs, rhs)) << to_string(e);
  }
}

TEST(LogicProperties, AlphaEquivalenceIsAnEquivalence) {
  std::mt19937 rng(505);
  TermGen gen{rng};
  for (int i = 0; i < kCases; ++i) {
    auto f = gen.formula(3);
    auto g = rename_bound(f, "1");
    auto h = rename_bound(g, "2");
    ASSERT_TRUE(alpha_equal(f, f));
    ASSERT_TRUE(alpha_equal(f, g));
    ASSERT_TRUE(alpha_equal(g, f));
    ASSERT_TRUE(alpha_equal(g, h));
    ASSERT_TRUE(alpha_equal(f, h));
    ASSERT_EQ(canonical_key(f), canonical_key(h));
    auto other = gen.formula(3);
    ASSERT_EQ(alpha_equal(f, other), canonical_key(f) == canonical_key(other));
    ASSERT_EQ(alpha_equal(f, other), alpha_equal(other, f));
  }
}
