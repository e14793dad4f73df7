// szen :: proof rendering
//
// Turns a closed ProofNode tree into the numbered trace format:
//
//      1. H0: (-. ((beautiful (washington)) /\ (has_crime (washington))))
//         ### [NotAnd H0] --> 2 3
//
// Hypothesis and term ids come from one counter and are handed out lazily,
// in print order. Steps are numbered when their parent's rule line is
// printed, then visited depth-first.

#ifndef SZEN_RENDER_HPP_
#define SZEN_RENDER_HPP_

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "szen/logic.hpp"
#include "szen/tableau.hpp"
#include "szen/tptp.hpp"

namespace szen {

enum class TraceLevel { Trace, Skeleton, Status };

struct RenderOptions {
  TraceLevel level = TraceLevel::Trace;
  std::string tag = "szen";
  bool legend = false;  // list what each T_n stands for
  std::size_t width = 72;
};

struct RenderedStep {
  int number = 0;
  std::vector<std::pair<int, std::string>> hypotheses;
  std::string rule;       // label, e.g. "Extension/szen/a4"
  std::vector<int> ids;   // hypothesis/term ids on the rule line
  int hidden = 0;         // step numbers swallowed by a compressed run
  std::vector<int> children;
  int depth = 0;
};

struct RenderedTrace {
  std::string header;
  std::string status;
  std::vector<RenderedStep> steps;
  std::vector<std::pair<int, std::string>> legend;

  std::string text(std::size_t width = 72) const;
  std::string skeleton() const;
};

// Fills `shown` on every node: the formulas it adds that some rule in its
// subtree refers to.
inline void prune(ProofNode& n) {
  for (auto& c : n.children) prune(c);
  auto used = detail::used_ids(n);
  n.shown.clear();
  for (int id : n.added)
    if (used.count(id)) n.shown.push_back(id);
}

class IdAllocator {
public:
  int formula(const Formula& f) { return get("f:" + canonical_key(f)); }
  int term(const Term& t) {
    int id = get("t:" + canonical_key(t));
    if (!terms_.count(id)) terms_.emplace(id, t);
    return id;
  }
  const std::map<int, Term>& terms() const noexcept { return terms_; }

private:
  int get(const std::string& key) {
    auto [it, inserted] = ids_.emplace(key, next_);
    if (inserted) ++next_;
    return it->second;
  }
  std::map<std::string, int> ids_;
  std::map<int, Term> terms_;
  int next_ = 0;
};

namespace detail {

inline void trace_term(const Term& t, IdAllocator& ids, std::string& out) {
  switch (t->kind()) {
    case Kind::Var: out += t->name(); return;
    case Kind::Meta:
    case Kind::Eps: out += "T_" + std::to_string(ids.term(t)); return;
    default: break;
  }
  out += "(" + t->name();
  for (const auto& a : t->args()) {
    out += ' ';
    trace_term(a, ids, out);
  }
  out += ")";
}

inline void trace_formula(const Formula& f, IdAllocator& ids, std::string& out) {
  auto binary = [&](const char* op) {
    out += "(";
    trace_formula(f->lhs(), ids, out);
    out += std::string(" ") + op + " ";
    trace_formula(f->rhs(), ids, out);
    out += ")";
  };
  switch (f->kind()) {
    case Kind::True: out += "True"; return;
    case Kind::False: out += "False"; return;
    case Kind::Atom:
      out += "(" + f->name();
      for (const auto& a : f->args()) {
        out += ' ';
        trace_term(a, ids, out);
      }
      out += ")";
      return;
    case Kind::Eq:
      out += "(";
      trace_term(f->lhs(), ids, out);
      out += " = ";
      trace_term(f->rhs(), ids, out);
      out += ")";
      return;
    case Kind::Not:
      if (f->body()->kind() == Kind::Eq) {
        out += "(";
        trace_term(f->body()->lhs(), ids, out);
        out += " != ";
        trace_term(f->body()->rhs(), ids, out);
        out += ")";
        return;
      }
      out += "(-. ";
      trace_formula(f->body(), ids, out);
      out += ")";
      return;
    case Kind::And: binary("/\\"); return;
    case Kind::Or: binary("\\/"); return;
    case Kind::Implies: binary("=>"); return;
    case Kind::Equiv: binary("<=>"); return;
    case Kind::Forall:
    case Kind::Exists:
      out += f->kind() == Kind::Forall ? "(All " : "(Ex ";
      out += f->name() + ", ";
      trace_formula(f->body(), ids, out);
      out += ")";
      return;
    default: trace_term(f, ids, out); return;
  }
}

// Breaks after binary connectives so that no line passes `width` when avoidable.
inline std::string wrap(const std::string& text, std::size_t first_col, std::size_t indent, std::size_t width) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    for (const char* op : {" /\\ ", " \\/ ", " => ", " <=> "}) {
      std::string o(op);
      if (text.compare(i, o.size(), o) == 0) {
        pieces.push_back(text.substr(start, i + o.size() - 1 - start));
        start = i + o.size();
        i = start - 1;
        break;
      }
    }
  }
  pieces.push_back(text.substr(start));
  std::string out;
  std::size_t col = first_col;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& p = pieces[k];
    if (k > 0) {
      if (col + 1 + p.size() > width) {
        out += "\n" + std::string(indent, ' ');
        col = indent;
      } else {
        out += ' ';
        ++col;
      }
    }
    out += p;
    col += p.size();
  }
  return out;
}

inline bool is_alpha_rule(Rule r) {
  return r == Rule::NotNot || r == Rule::And || r == Rule::NotOr || r == Rule::NotImply;
}
inline bool is_disjunctive(Rule r) { return r == Rule::Or || r == Rule::Imply || r == Rule::NotAnd; }

inline bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

// One displayed step, before numbering.
struct Plan {
  const ProofNode* node = nullptr;
  std::vector<int> shown;
  std::string label;  // overrides the node's own rule label
  int hidden = 0;
  bool closes_itself = false;  // extension whose only child is a False leaf
  bool reversed = false;
  std::vector<Plan> children;
};

inline std::vector<int> visible(const std::vector<int>& added, const ProofNode& n) {
  auto used = used_ids(n);
  std::vector<int> out;
  for (int id : added)
    if (used.count(id) && !contains(out, id)) out.push_back(id);
  return out;
}

inline void append(std::vector<int>& acc, const std::vector<int>& more) {
  for (int id : more)
    if (!contains(acc, id)) acc.push_back(id);
}

inline void gather_disjuncts(const ProofNode& n, const std::vector<int>& acc,
                             std::vector<std::pair<const ProofNode*, std::vector<int>>>& leaves) {
  for (const auto& c : n.children) {
    auto a = acc;
    append(a, c.added);
    if (is_disjunctive(c.rule.rule) && !c.rule.principal.empty() && contains(c.added, c.rule.principal[0]))
      gather_disjuncts(c, a, leaves);
    else
      leaves.emplace_back(&c, std::move(a));
  }
}

inline Plan plan_step(const ProofNode& n, const std::vector<int>& added, bool parent_extension, bool root);

inline std::vector<Plan> plan_children(const ProofNode& n) {
  std::vector<Plan> out;
  for (const auto& c : n.children) out.push_back(plan_step(c, c.added, is_extension(n.rule.rule), false));
  return out;
}

inline Plan plan_step(const ProofNode& n, const std::vector<int>& added, bool parent_extension, bool root) {
  Plan p;
  p.node = &n;
  p.shown = visible(added, n);
  p.reversed = parent_extension && is_closure(n.rule.rule);

  if (root && n.rule.rule == Rule::NotAll) {
    // Skolemization prefix: one step for the ¬∀ run, one number per
    // following α step, a nested conjunction chain counting once.
    const ProofNode* cur = &n;
    std::vector<int> acc;
    while (cur->rule.rule == Rule::NotAll && cur->children.size() == 1) {
      cur = &cur->children[0];
      append(acc, cur->added);
    }
    int hidden = 0;
    const ProofNode* prev = nullptr;
    while (is_alpha_rule(cur->rule.rule) && cur->children.size() == 1) {
      bool chained = prev && prev->rule.rule == Rule::And && cur->rule.rule == Rule::And &&
                     contains(prev->children[0].added, cur->rule.principal.at(0));
      if (!chained) ++hidden;
      prev = cur;
      cur = &cur->children[0];
      append(acc, cur->added);
    }
    p.label = "NotAllEx";
    p.hidden = hidden;
    p.children.push_back(plan_step(*cur, acc, false, false));
    return p;
  }

  if (is_disjunctive(n.rule.rule)) {
    std::vector<std::pair<const ProofNode*, std::vector<int>>> leaves;
    gather_disjuncts(n, {}, leaves);
    if (leaves.size() >= 3) {
      p.label = "DisjTree";
      for (auto& [leaf, acc] : leaves) p.children.push_back(plan_step(*leaf, acc, false, false));
      return p;
    }
  }

  if (is_extension(n.rule.rule) && n.children.size() == 1 && n.children[0].leaf() &&
      n.children[0].rule.rule == Rule::CloseFalse) {
    p.closes_itself = true;
    return p;
  }

  p.children = plan_children(n);
  return p;
}

class Printer {
public:
  Printer(const FormulaTable& t, const RenderOptions& o) : t_(t), o_(o) {}

  void emit(const Plan& p, int number, int depth, RenderedTrace& out) {
    RenderedStep s;
    s.number = number;
    s.depth = depth;
    auto shown = p.shown;
    if (p.reversed) std::reverse(shown.begin(), shown.end());
    for (int fid : shown) {
      const auto& f = t_.at(fid);
      int h = ids_.formula(f);
      std::string text;
      trace_formula(f, ids_, text);
      s.hypotheses.emplace_back(h, std::move(text));
    }
    rule_line(p, s);
    s.hidden = p.hidden;
    next_ += p.hidden;
    for (std::size_t i = 0; i < p.children.size(); ++i) s.children.push_back(next_++);
    auto kids = s.children;
    out.steps.push_back(std::move(s));
    for (std::size_t i = 0; i < p.children.size(); ++i) emit(p.children[i], kids[i], depth + 1, out);
  }

  int next_ = 2;
  IdAllocator ids_;

private:
  int fid(int table_id) { return ids_.formula(t_.at(table_id)); }

  void rule_line(const Plan& p, RenderedStep& s) {
    const auto& ri = p.node->rule;
    if (!p.label.empty()) {
      s.rule = p.label;
      if (!ri.principal.empty()) s.ids.push_back(fid(ri.principal[0]));
      return;
    }
    if (is_extension(ri.rule)) {
      s.rule = "Extension/" + o_.tag + "/" + ri.name;
      s.ids.push_back(fid(ri.principal.at(0)));
      std::set<std::string> seen;
      for (const auto& branch : ri.children)
        for (const auto& f : branch) {
          if (f->kind() == Kind::False || !seen.insert(canonical_key(f)).second) continue;
          s.ids.push_back(ids_.formula(f));
        }
      for (const auto& term : ri.params) s.ids.push_back(ids_.term(term));
      return;
    }
    s.rule = rule_name(ri.rule);
    if (is_closure(ri.rule) || ri.rule == Rule::Pred) {
      auto pr = ri.principal;
      std::stable_sort(pr.begin(), pr.end(), [&](int a, int b) {
        return literal_positive(t_.at(a)) && !literal_positive(t_.at(b));
      });
      for (int id : pr) s.ids.push_back(fid(id));
      return;
    }
    if (!ri.principal.empty()) s.ids.push_back(fid(ri.principal[0]));
  }

  const FormulaTable& t_;
  const RenderOptions& o_;
};

}  // namespace detail

inline std::string RenderedTrace::text(std::size_t width) const {
  std::ostringstream os;
  os << header << "\n" << status << "\n";
  for (const auto& s : steps) {
    char num[16];
    std::snprintf(num, sizeof num, "%4d. ", s.number);
    std::string lead = num;
    for (const auto& [h, f] : s.hypotheses) {
      std::string tag = "H" + std::to_string(h) + ": ";
      std::size_t col = lead.size() + tag.size();
      os << lead << tag << detail::wrap(f, col, col + 2, width) << "\n";
      lead = std::string(6, ' ');
    }
    os << lead << "### [" << s.rule;
    for (int id : s.ids) os << " H" << id;
    os << "]";
    if (!s.children.empty()) {
      os << " -->";
      if (s.hidden > 0) os << " [...]";
      for (int c : s.children) os << " " << c;
    }
    os << "\n";
  }
  for (const auto& [id, text] : legend) os << "(* T_" << id << " := " << text << " *)\n";
  return os.str();
}

inline std::string RenderedTrace::skeleton() const {
  std::ostringstream os;
  for (const auto& s : steps) os << std::string(2 * s.depth, ' ') << s.rule << "\n";
  return os.str();
}

inline std::string conjecture_header(const Problem& p) {
  const auto* c = p.conjecture();
  if (!c) return "% no conjecture";
  return "fof(" + c->name + ", conjecture,\n  " + to_fof(c->formula) + ").";
}

inline RenderedTrace render(const ProofResult& res, const Problem& problem, const RenderOptions& o = {}) {
  RenderedTrace out;
  out.header = conjecture_header(problem);
  out.status = std::string("(* ") + status_name(res.status) + " *)";
  if (!res.proved() || !res.tree || o.level == TraceLevel::Status) return out;
  auto plan = detail::plan_step(*res.tree, res.tree->added, false, true);
  detail::Printer pr(*res.table, o);
  pr.emit(plan, 1, 0, out);
  if (o.legend)
    for (const auto& [id, term] : pr.ids_.terms())
      if (term->kind() == Kind::Eps) {
        std::string body;
        detail::trace_formula(term->body(), pr.ids_, body);
        out.legend.emplace_back(id, "(eps " + term->name() + ", " + body + ")");
      } else if (term->kind() == Kind::Meta) {
        out.legend.emplace_back(id, "metavariable ?" + std::to_string(term->meta_id()));
      }
  return out;
}

// Rule labels with multiplicity and the number of leaf steps.
struct Skeleton {
  std::multiset<std::string> rules;
  int leaves = 0;
};

inline Skeleton skeleton_of(const RenderedTrace& t) {
  Skeleton s;
  for (const auto& st : t.steps) {
    s.rules.insert(st.rule);
    if (st.children.empty()) ++s.leaves;
  }
  return s;
}

inline std::string render_text(const ProofResult& res, const Problem& problem, const RenderOptions& o = {}) {
  auto t = render(res, problem, o);
  if (o.level == TraceLevel::Status || !res.proved()) return t.header + "\n" + t.status + "\n";
  if (o.level == TraceLevel::Skeleton) return t.header + "\n" + t.status + "\n" + t.skeleton();
  return t.text(o.width);
}

}  // namespace szen

#endif  // SZEN_RENDER_HPP_
