// szen :: TPTP fof front end

#ifndef SZEN_TPTP_HPP_
#define SZEN_TPTP_HPP_

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "szen/logic.hpp"

namespace szen {

enum class Role { Axiom, Hypothesis, Conjecture };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::Axiom: return "axiom";
    case Role::Hypothesis: return "hypothesis";
    case Role::Conjecture: return "conjecture";
  }
  return "?";
}

struct SourceLocation {
  std::string file;
  int line = 0;
  int column = 0;
};

inline std::string to_string(const SourceLocation& loc) {
  return loc.file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

struct AnnotatedFormula {
  std::string name;
  Role role = Role::Axiom;
  Formula formula;
  SourceLocation source;
};

struct IncludeDirective {
  std::string file;
  // Index into Problem::formulas where the included formulas are spliced.
  std::size_t position = 0;
  SourceLocation source;
};

struct Problem {
  std::vector<AnnotatedFormula> formulas;
  std::vector<IncludeDirective> includes;  // unresolved
  std::vector<std::string> include_paths;
  std::string origin;

  const AnnotatedFormula* conjecture() const {
    for (const auto& f : formulas)
      if (f.role == Role::Conjecture) return &f;
    return nullptr;
  }
  std::vector<AnnotatedFormula> axioms() const {
    std::vector<AnnotatedFormula> out;
    for (const auto& f : formulas)
      if (f.role != Role::Conjecture) out.push_back(f);
    return out;
  }
};

class ParseError : public std::runtime_error {
public:
  ParseError(SourceLocation loc, const std::string& msg, std::vector<std::string> expected = {})
      : std::runtime_error(format(loc, msg, expected)), location_(std::move(loc)), expected_(std::move(expected)) {}

  const SourceLocation& location() const noexcept { return location_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  static std::string format(const SourceLocation& loc, const std::string& msg, const std::vector<std::string>& expected) {
    std::string s = to_string(loc) + ": " + msg;
    if (!expected.empty()) {
      s += " (expected one of:";
      for (const auto& e : expected) s += " " + e;
      s += ")";
    }
    return s;
  }
  SourceLocation location_;
  std::vector<std::string> expected_;
};

class IncludeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

enum class Tok {
  End, LowerWord, UpperWord, Quoted, DollarWord, Number,
  LParen, RParen, LBrack, RBrack, Comma, Colon, Dot,
  Not, And, Or, Implies, RevImplies, Equiv, Xor, Nor, Nand,
  Eq, Neq, Forall, Exists
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::LowerWord: return "lower_word";
    case Tok::UpperWord: return "Variable";
    case Tok::Quoted: return "'quoted'";
    case Tok::DollarWord: return "$word";
    case Tok::Number: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Not: return "'~'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Implies: return "'=>'";
    case Tok::RevImplies: return "'<='";
    case Tok::Equiv: return "'<=>'";
    case Tok::Xor: return "'<~>'";
    case Tok::Nor: return "'~|'";
    case Tok::Nand: return "'~&'";
    case Tok::Eq: return "'='";
    case Tok::Neq: return "'!='";
    case Tok::Forall: return "'!'";
    case Tok::Exists: return "'?'";
  }
  return "?";
}

class Lexer {
public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '$') {
        std::size_t start = pos_;
        advance();
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) advance();
        t.text = std::string(text_.substr(start, pos_ - start));
        t.kind = c == '$' ? Tok::DollarWord : std::isupper(static_cast<unsigned char>(c)) ? Tok::UpperWord : Tok::LowerWord;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
        t.text = std::string(text_.substr(start, pos_ - start));
        t.kind = Tok::Number;
      } else if (c == '\'') {
        advance();
        std::string s;
        while (pos_ < text_.size() && text_[pos_] != '\'') {
          if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
          s += text_[pos_];
          advance();
        }
        if (pos_ >= text_.size()) throw ParseError({file_, t.line, t.column}, "unterminated quoted atom");
        advance();
        t.text = s;
        t.kind = Tok::Quoted;
      } else {
        t.kind = punct(t);
      }
      out.push_back(std::move(t));
    }
  }

private:
  bool starts(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space_and_comments() {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
      if (starts("%")) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (starts("/*")) {
        int l = line_, c = col_;
        advance(2);
        while (pos_ < text_.size() && !starts("*/")) advance();
        if (pos_ >= text_.size()) throw ParseError({file_, l, c}, "unterminated comment");
        advance(2);
      } else {
        return;
      }
    }
  }

  Tok punct(Token& t) {
    static const std::pair<std::string_view, Tok> table[] = {
        {"<=>", Tok::Equiv}, {"<~>", Tok::Xor}, {"=>", Tok::Implies}, {"<=", Tok::RevImplies},
        {"~|", Tok::Nor},    {"~&", Tok::Nand}, {"!=", Tok::Neq},     {"~", Tok::Not},
        {"&", Tok::And},     {"|", Tok::Or},    {"=", Tok::Eq},       {"!", Tok::Forall},
        {"?", Tok::Exists},  {"(", Tok::LParen}, {")", Tok::RParen},  {"[", Tok::LBrack},
        {"]", Tok::RBrack},  {",", Tok::Comma}, {":", Tok::Colon},    {".", Tok::Dot}};
    for (const auto& [s, k] : table) {
      if (starts(s)) {
        t.text = std::string(s);
        advance(s.size());
        return k;
      }
    }
    throw ParseError({file_, line_, col_}, std::string("unexpected character '") + text_[pos_] + "'");
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
public:
  Parser(std::vector<Token> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

  Problem parse_file() {
    Problem p;
    p.origin = file_;
    while (peek().kind != Tok::End) {
      const Token& head = expect(Tok::LowerWord);
      if (head.text == "fof") {
        p.formulas.push_back(parse_fof(head));
      } else if (head.text == "include") {
        expect(Tok::LParen);
        const Token& f = expect(Tok::Quoted);
        if (peek().kind == Tok::Comma) {
          // Formula selection lists are accepted and ignored.
          next();
          skip_balanced_brackets();
        }
        expect(Tok::RParen);
        expect(Tok::Dot);
        p.includes.push_back({f.text, p.formulas.size(), loc(head)});
      } else {
        throw ParseError(loc(head), "unsupported annotated formula kind '" + head.text + "'", {"fof", "include"});
      }
    }
    return p;
  }

  Formula parse_single_formula() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail_expected({Tok::End});
    return f;
  }

private:
  AnnotatedFormula parse_fof(const Token& head) {
    AnnotatedFormula af;
    af.source = loc(head);
    expect(Tok::LParen);
    const Token& name = next();
    if (name.kind != Tok::LowerWord && name.kind != Tok::Quoted && name.kind != Tok::Number)
      fail_at(name, "bad formula name", {tok_name(Tok::LowerWord)});
    af.name = name.text;
    expect(Tok::Comma);
    const Token& role = expect(Tok::LowerWord);
    static const std::map<std::string, Role> roles = {
        {"axiom", Role::Axiom},      {"hypothesis", Role::Hypothesis}, {"definition", Role::Axiom},
        {"assumption", Role::Axiom}, {"lemma", Role::Axiom},           {"theorem", Role::Axiom},
        {"conjecture", Role::Conjecture}};
    auto it = roles.find(role.text);
    if (it == roles.end()) fail_at(role, "unsupported formula role '" + role.text + "'", {"axiom", "hypothesis", "conjecture"});
    af.role = it->second;
    expect(Tok::Comma);
    bound_.clear();
    af.formula = formula();
    if (peek().kind == Tok::Comma) {
      next();
      skip_annotations();
    }
    expect(Tok::RParen);
    expect(Tok::Dot);
    return af;
  }

  void skip_annotations() {
    int depth = 0;
    while (peek().kind != Tok::End) {
      Tok k = peek().kind;
      if (depth == 0 && k == Tok::RParen) return;
      if (k == Tok::LParen || k == Tok::LBrack) ++depth;
      if (k == Tok::RParen || k == Tok::RBrack) --depth;
      next();
    }
  }

  void skip_balanced_brackets() {
    expect(Tok::LBrack);
    int depth = 1;
    while (depth > 0) {
      const Token& t = next();
      if (t.kind == Tok::End) fail_expected({Tok::RBrack});
      if (t.kind == Tok::LBrack) ++depth;
      if (t.kind == Tok::RBrack) --depth;
    }
  }

  // <formula> ::= <unitary> | <unitary> <binop> <unitary> | <unitary> (& <unitary>)+ | (| ...)+
  Formula formula() {
    Formula lhs = unitary();
    Tok k = peek().kind;
    switch (k) {
      case Tok::And:
      case Tok::Or: {
        std::vector<Formula> parts{lhs};
        while (peek().kind == k) {
          next();
          parts.push_back(unitary());
        }
        Formula acc = parts.back();
        for (std::size_t i = parts.size() - 1; i-- > 0;)
          acc = k == Tok::And ? conj(parts[i], acc) : disj(parts[i], acc);
        return acc;
      }
      case Tok::Implies: next(); return implies(lhs, unitary());
      case Tok::RevImplies: next(); return implies(unitary(), lhs);
      case Tok::Equiv: next(); return equiv(lhs, unitary());
      case Tok::Xor: next(); return neg(equiv(lhs, unitary()));
      case Tok::Nor: next(); return neg(disj(lhs, unitary()));
      case Tok::Nand: next(); return neg(conj(lhs, unitary()));
      default: return lhs;
    }
  }

  Formula unitary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not: next(); return neg(unitary());
      case Tok::Forall:
      case Tok::Exists: return quantified();
      case Tok::LParen: {
        next();
        Formula f = formula();
        expect(Tok::RParen);
        return f;
      }
      default: return atomic();
    }
  }

  Formula quantified() {
    const Token& q = next();
    expect(Tok::LBrack);
    std::vector<std::string> vars;
    for (;;) {
      vars.push_back(expect(Tok::UpperWord).text);
      if (peek().kind == Tok::Comma) {
        next();
        continue;
      }
      expect(Tok::RBrack);
      break;
    }
    expect(Tok::Colon);
    for (const auto& v : vars) bound_.push_back(v);
    Formula body = unitary();
    bound_.resize(bound_.size() - vars.size());
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      body = q.kind == Tok::Forall ? forall(*it, body) : exists(*it, body);
    return body;
  }

  Formula atomic() {
    const Token& t = peek();
    if (t.kind == Tok::DollarWord) {
      if (t.text == "$true") { next(); return top(); }
      if (t.text == "$false") { next(); return bot(); }
      fail_at(t, "unsupported defined word '" + t.text + "'", {"$true", "$false"});
    }
    if (t.kind != Tok::LowerWord && t.kind != Tok::Quoted && t.kind != Tok::UpperWord && t.kind != Tok::Number)
      fail_expected({Tok::Not, Tok::Forall, Tok::Exists, Tok::LParen, Tok::LowerWord, Tok::UpperWord, Tok::DollarWord});
    const Token& start = t;
    Term lhs = term();
    if (peek().kind == Tok::Eq || peek().kind == Tok::Neq) {
      bool negated = next().kind == Tok::Neq;
      Term rhs = term();
      Formula e = eq(lhs, rhs);
      return negated ? neg(e) : e;
    }
    if (lhs->kind() != Kind::App) fail_at(start, "a variable cannot be used as a formula", {"'='", "'!='"});
    return atom(lhs->name(), {lhs->args().begin(), lhs->args().end()});
  }

  Term term() {
    const Token& t = next();
    if (t.kind == Tok::UpperWord) {
      if (std::find(bound_.begin(), bound_.end(), t.text) == bound_.end())
        fail_at(t, "unbound variable '" + t.text + "'");
      return var(t.text);
    }
    if (t.kind != Tok::LowerWord && t.kind != Tok::Quoted && t.kind != Tok::Number)
      fail_at(t, std::string("unexpected ") + tok_name(t.kind), {tok_name(Tok::LowerWord), tok_name(Tok::UpperWord)});
    std::vector<Term> args;
    if (peek().kind == Tok::LParen) {
      next();
      for (;;) {
        args.push_back(term());
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        expect(Tok::RParen);
        break;
      }
    }
    return app(t.text, std::move(args));
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  const Token& expect(Tok k) {
    if (peek().kind != k) fail_expected({k});
    return next();
  }
  SourceLocation loc(const Token& t) const { return {file_, t.line, t.column}; }

  [[noreturn]] void fail_at(const Token& t, const std::string& msg, std::vector<std::string> expected = {}) const {
    throw ParseError(loc(t), msg, std::move(expected));
  }
  [[noreturn]] void fail_expected(std::initializer_list<Tok> ks) const {
    std::vector<std::string> names;
    for (Tok k : ks) names.emplace_back(tok_name(k));
    const Token& t = peek();
    throw ParseError(loc(t), std::string("unexpected ") + tok_name(t.kind) + (t.text.empty() ? "" : " '" + t.text + "'"), names);
  }

  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IncludeError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// Parses fof text. Include directives are recorded, not expanded.
inline void validate_problem(const Problem& p);

inline Problem parse_problem(std::string_view text, const std::string& origin = "<input>") {
  detail::Lexer lex(text, origin);
  detail::Parser parser(lex.run(), origin);
  Problem p = parser.parse_file();
  validate_problem(p);
  return p;
}

// Parses a single closed fof formula.
inline Formula parse_formula(std::string_view text) {
  detail::Lexer lex(text, "<formula>");
  detail::Parser parser(lex.run(), "<formula>");
  return parser.parse_single_formula();
}

// Rejects duplicate names, multiple conjectures and inconsistent symbol arities.
inline void validate_problem(const Problem& p) {
  std::set<std::string> names;
  const AnnotatedFormula* conjecture = nullptr;
  std::map<std::pair<std::string, bool>, std::pair<std::size_t, SourceLocation>> arity;
  std::function<void(const ExprPtr&, const SourceLocation&)> walk = [&](const ExprPtr& e, const SourceLocation& at) {
    if (e->kind() == Kind::App || e->kind() == Kind::Atom) {
      auto key = std::make_pair(e->name(), e->kind() == Kind::Atom);
      auto [it, fresh] = arity.try_emplace(key, e->arity(), at);
      if (!fresh && it->second.first != e->arity())
        throw ParseError(at, "symbol '" + e->name() + "' used with arity " + std::to_string(e->arity()) +
                                 " here and " + std::to_string(it->second.first) + " at " + to_string(it->second.second));
    }
    for (const auto& a : e->args()) walk(a, at);
  };
  for (const auto& f : p.formulas) {
    if (!names.insert(f.name).second) throw ParseError(f.source, "duplicate formula name '" + f.name + "'");
    if (f.role == Role::Conjecture) {
      if (conjecture)
        throw ParseError(f.source, "more than one conjecture (first is '" + conjecture->name + "' at " +
                                       to_string(conjecture->source) + ")");
      conjecture = &f;
    }
    walk(f.formula, f.source);
  }
}

namespace detail {

inline Problem resolve_rec(const Problem& p, const std::vector<std::string>& include_dirs,
                           std::vector<std::filesystem::path>& stack) {
  Problem out;
  out.origin = p.origin;
  out.include_paths = include_dirs;
  std::size_t next_inc = 0;
  auto splice_includes_at = [&](std::size_t pos) {
    while (next_inc < p.includes.size() && p.includes[next_inc].position == pos) {
      const auto& inc = p.includes[next_inc++];
      std::vector<std::filesystem::path> candidates;
      std::filesystem::path base = std::filesystem::path(p.origin).parent_path();
      candidates.push_back(base / inc.file);
      for (const auto& d : include_dirs) candidates.push_back(std::filesystem::path(d) / inc.file);
      std::filesystem::path found;
      for (const auto& c : candidates) {
        std::error_code ec;
        if (std::filesystem::is_regular_file(c, ec)) {
          found = c;
          break;
        }
      }
      if (found.empty()) {
        std::string msg = to_string(inc.source) + ": include file '" + inc.file + "' not found; searched:";
        for (const auto& c : candidates) msg += " " + c.parent_path().string();
        throw IncludeError(msg);
      }
      auto canon = std::filesystem::weakly_canonical(found);
      if (std::find(stack.begin(), stack.end(), canon) != stack.end()) {
        std::string msg = to_string(inc.source) + ": include cycle:";
        for (const auto& s : stack) msg += " " + s.string() + " ->";
        msg += " " + canon.string();
        throw IncludeError(msg);
      }
      Problem sub = parse_problem(read_file(found), found.string());
      stack.push_back(canon);
      Problem resolved = resolve_rec(sub, include_dirs, stack);
      stack.pop_back();
      for (auto& f : resolved.formulas) out.formulas.push_back(std::move(f));
    }
  };
  for (std::size_t i = 0; i < p.formulas.size(); ++i) {
    splice_includes_at(i);
    out.formulas.push_back(p.formulas[i]);
  }
  splice_includes_at(p.formulas.size());
  return out;
}

}  // namespace detail

// Expands include directives depth-first in place. Search order: directory of
// the including file, then `include_dirs` in order.
inline Problem resolve_includes(const Problem& p, const std::vector<std::string>& include_dirs = {}) {
  std::vector<std::filesystem::path> stack;
  std::error_code ec;
  if (!p.origin.empty() && std::filesystem::exists(p.origin, ec))
    stack.push_back(std::filesystem::weakly_canonical(p.origin));
  Problem out = detail::resolve_rec(p, include_dirs.empty() ? p.include_paths : include_dirs, stack);
  validate_problem(out);
  return out;
}

inline Problem load_problem(const std::string& path, const std::vector<std::string>& include_dirs = {}) {
  Problem p = parse_problem(detail::read_file(path), path);
  p.include_paths = include_dirs;
  return resolve_includes(p, include_dirs);
}

// fof text for a parsed formula.
inline std::string to_fof(const Formula& f) { return to_string(f); }

inline std::string to_fof(const AnnotatedFormula& af) {
  return "fof(" + af.name + ", " + role_name(af.role) + ", " + to_fof(af.formula) + ").";
}

inline std::string to_fof(const Problem& p) {
  std::string out;
  for (const auto& f : p.formulas) out += to_fof(f) + "\n";
  return out;
}

}  // namespace szen

#endif  // SZEN_TPTP_HPP_
