#include "acheck/frontend.hpp"

#include <cctype>
#include <map>
#include <set>

namespace acheck {

namespace {

// --- lexer -------------------------------------------------------------------

struct Token {
  enum class Kind : uint8_t { Ident, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  SourcePos pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  uint32_t line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (; n > 0 && i < src.size(); --n, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    const SourcePos pos{line, col};
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
    } else if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
    } else if (src.substr(i, 2) == "/*") {
      advance(2);
      while (i < src.size() && src.substr(i, 2) != "*/") advance(1);
      if (i >= src.size()) throw ParseError(pos, "unterminated comment");
      advance(2);
    } else if (ident_start(c)) {
      const std::size_t start = i;
      while (i < src.size() && ident_char(src[i])) advance(1);
      out.push_back({Token::Kind::Ident, std::string(src.substr(start, i - start)), pos});
    } else if (c == '"') {
      std::string text;
      advance(1);
      while (true) {
        if (i >= src.size() || src[i] == '\n') throw ParseError(pos, "unterminated string");
        if (src[i] == '"') break;
        if (src[i] == '\\' && i + 1 < src.size()) advance(1);
        text += src[i];
        advance(1);
      }
      advance(1);
      out.push_back({Token::Kind::String, std::move(text), pos});
    } else {
      static const char* const kPuncts[] = {"->", "/\\", "\\/", ":=", "(", ")", ",", ".", ":", ";", "="};
      bool matched = false;
      for (const char* p : kPuncts) {
        const std::string_view pv(p);
        if (src.substr(i, pv.size()) == pv) {
          out.push_back({Token::Kind::Punct, std::string(pv), pos});
          advance(pv.size());
          matched = true;
          break;
        }
      }
      if (!matched) throw ParseError(pos, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::Kind::End, "", {line, col}});
  return out;
}

// --- parser ------------------------------------------------------------------

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw{"Kind", "Type", "Define", "Theorem", "by", "ship", "forall",
                                        "exists", "true", "false", "type", "prop"};
  return kw.count(s) > 0;
}

bool clause_variable_name(const std::string& s) {
  return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

struct CtorInfo {
  std::vector<std::string> args;
  std::string result;
};

class Parser {
public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  TheoremFile parse() {
    TheoremFile file;
    while (peek().kind != Token::Kind::End) {
      const Token& t = peek();
      if (t.kind == Token::Kind::Ident && t.text == "Kind") file.decls.push_back(kind_decl());
      else if (t.kind == Token::Kind::Ident && t.text == "Type") file.decls.push_back(type_decl());
      else if (t.kind == Token::Kind::Ident && t.text == "Define") file.decls.push_back(define_decl());
      else if (t.kind == Token::Kind::Ident && t.text == "Theorem") file.decls.push_back(theorem_decl());
      else throw ParseError(t.pos, "expected a declaration, found '" + t.text + "'");
    }
    return file;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_punct(std::string_view p) const { return peek().kind == Token::Kind::Punct && peek().text == p; }
  bool at_word(std::string_view w) const { return peek().kind == Token::Kind::Ident && peek().text == w; }

  void expect_punct(std::string_view p) {
    if (!at_punct(p)) throw ParseError(peek().pos, "expected '" + std::string(p) + "'" + found());
    next();
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) throw ParseError(peek().pos, "expected '" + std::string(w) + "'" + found());
    next();
  }
  std::string found() const {
    return peek().kind == Token::Kind::End ? ", found end of file" : ", found '" + peek().text + "'";
  }

  std::string name() {
    if (peek().kind != Token::Kind::Ident || is_keyword(peek().text))
      throw ParseError(peek().pos, "expected a name" + found());
    return next().text;
  }

  std::vector<std::string> names() {
    std::vector<std::string> out{name()};
    while (at_punct(",")) {
      next();
      out.push_back(name());
    }
    return out;
  }

  void fresh_symbol(const std::string& n, SourcePos pos) {
    if (ctors_.count(n) || preds_.count(n) || kinds_.count(n))
      throw ParseError(pos, "'" + n + "' is already declared");
  }

  std::string sort(bool allow_prop) {
    const SourcePos pos = peek().pos;
    if (allow_prop && at_word("prop")) return next().text;
    const std::string s = name();
    if (!kinds_.count(s)) throw ParseError(pos, "unknown type '" + s + "'");
    return s;
  }

  KindDecl kind_decl() {
    KindDecl d;
    d.pos = next().pos;
    d.names = names();
    expect_word("type");
    expect_punct(".");
    for (const auto& n : d.names) {
      fresh_symbol(n, d.pos);
      kinds_.insert(n);
    }
    return d;
  }

  TypeDecl type_decl() {
    TypeDecl d;
    d.pos = next().pos;
    d.names = names();
    std::vector<std::string> sorts{sort(false)};
    while (at_punct("->")) {
      next();
      sorts.push_back(sort(false));
    }
    expect_punct(".");
    d.result = sorts.back();
    sorts.pop_back();
    d.arg_sorts = std::move(sorts);
    for (const auto& n : d.names) {
      fresh_symbol(n, d.pos);
      ctors_[n] = {d.arg_sorts, d.result};
    }
    return d;
  }

  DefineDecl define_decl() {
    DefineDecl d;
    d.pos = next().pos;
    const SourcePos name_pos = peek().pos;
    d.name = name();
    fresh_symbol(d.name, name_pos);
    expect_punct(":");
    std::vector<std::string> sorts{sort(true)};
    while (at_punct("->")) {
      next();
      sorts.push_back(sort(true));
    }
    if (sorts.back() != "prop") throw ParseError(name_pos, "a definition must have result type prop");
    sorts.pop_back();
    for (const auto& s : sorts)
      if (s == "prop") throw ParseError(name_pos, "prop is not an argument type");
    d.arg_sorts = sorts;
    preds_[d.name] = sorts;
    expect_word("by");
    while (!at_punct(".")) {
      Clause c;
      c.head = unary();
      if (c.head.kind != SFormula::Kind::Atom || c.head.pred != d.name)
        throw ParseError(c.head.pos, "clause head must be an atom of '" + d.name + "'");
      if (at_punct(":=")) {
        next();
        c.body = formula();
      }
      check_clause(c);
      d.clauses.push_back(std::move(c));
      if (at_punct(".")) break;
      expect_punct(";");
    }
    next();
    return d;
  }

  TheoremDecl theorem_decl() {
    TheoremDecl d;
    d.pos = next().pos;
    const SourcePos name_pos = peek().pos;
    d.name = name();
    if (!theorems_.insert(d.name).second) throw ParseError(name_pos, "duplicate theorem '" + d.name + "'");
    expect_punct(":");
    d.statement = formula();
    expect_punct(".");
    Scope scope;
    check_formula(d.statement, scope, false);
    if (at_word("ship")) {
      next();
      if (peek().kind != Token::Kind::String) throw ParseError(peek().pos, "expected a certificate string" + found());
      d.ship = next().text;
      expect_punct(".");
    }
    return d;
  }

  // formula := binder | imp
  SFormula formula() {
    if (at_word("forall") || at_word("exists")) return binder();
    SFormula lhs = disjunction();
    if (!at_punct("->")) return lhs;
    next();
    SFormula f;
    f.kind = SFormula::Kind::Imp;
    f.pos = lhs.pos;
    f.subs = {std::move(lhs), formula()};
    return f;
  }

  SFormula binder() {
    SFormula f;
    f.pos = peek().pos;
    f.kind = next().text == "forall" ? SFormula::Kind::All : SFormula::Kind::Ex;
    while (!at_punct(",")) f.binders.push_back(name());
    if (f.binders.empty()) throw ParseError(f.pos, "quantifier without variables");
    next();
    f.subs = {formula()};
    return f;
  }

  SFormula disjunction() {
    SFormula lhs = conjunction();
    if (!at_punct("\\/")) return lhs;
    next();
    SFormula f;
    f.kind = SFormula::Kind::Or;
    f.pos = lhs.pos;
    f.subs = {std::move(lhs), disjunction()};
    return f;
  }

  SFormula conjunction() {
    SFormula lhs = unary();
    if (!at_punct("/\\")) return lhs;
    next();
    SFormula f;
    f.kind = SFormula::Kind::And;
    f.pos = lhs.pos;
    f.subs = {std::move(lhs), conjunction()};
    return f;
  }

  SFormula unary() {
    const SourcePos pos = peek().pos;
    if (at_word("forall") || at_word("exists")) return binder();
    if (at_word("true") || at_word("false")) {
      SFormula f;
      f.kind = next().text == "true" ? SFormula::Kind::True : SFormula::Kind::False;
      f.pos = pos;
      return f;
    }
    if (at_punct("(")) {
      // Either a parenthesized term on the left of '=' or a parenthesized formula.
      const std::size_t save = pos_;
      try {
        STerm t = term();
        if (at_punct("=")) return equation(std::move(t));
      } catch (const ParseError&) {
      }
      pos_ = save;
      next();
      SFormula f = formula();
      expect_punct(")");
      return f;
    }
    STerm t = term();
    if (at_punct("=")) return equation(std::move(t));
    if (!preds_.count(t.head)) {
      if (ctors_.count(t.head) || clause_variable_name(t.head))
        throw ParseError(t.pos, "expected a formula, found the term '" + t.head + "'");
      throw ParseError(t.pos, "unknown predicate '" + t.head + "'");
    }
    SFormula f;
    f.kind = SFormula::Kind::Atom;
    f.pos = t.pos;
    f.pred = t.head;
    f.terms = std::move(t.args);
    return f;
  }

  SFormula equation(STerm lhs) {
    next();
    SFormula f;
    f.kind = SFormula::Kind::Eq;
    f.pos = lhs.pos;
    f.terms = {std::move(lhs), term()};
    return f;
  }

  // term := '(' term ')' | name arg*
  STerm term() {
    if (at_punct("(")) {
      next();
      STerm t = term();
      expect_punct(")");
      return t;
    }
    STerm t;
    t.pos = peek().pos;
    t.head = name();
    while (true) {
      if (at_punct("(")) {
        next();
        t.args.push_back(term());
        expect_punct(")");
      } else if (peek().kind == Token::Kind::Ident && !is_keyword(peek().text)) {
        STerm a;
        a.pos = peek().pos;
        a.head = next().text;
        t.args.push_back(std::move(a));
      } else {
        break;
      }
    }
    return t;
  }

  // --- scoping and sorts ----------------------------------------------------

  struct Var {
    std::string name;
    std::string sort;  // empty while unknown
  };
  using Scope = std::vector<Var>;

  Var* lookup(Scope& scope, const std::string& n) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->name == n) return &*it;
    return nullptr;
  }

  static void unify_sort(std::string& have, const std::string& want, const STerm& t) {
    if (want.empty()) return;
    if (have.empty()) {
      have = want;
    } else if (have != want) {
      throw ParseError(t.pos, "'" + t.head + "' has type " + have + " but " + want + " is expected");
    }
  }

  std::string check_term(const STerm& t, const std::string& want, Scope& scope, bool clause) {
    if (Var* v = lookup(scope, t.head)) {
      if (!t.args.empty()) throw ParseError(t.pos, "variable '" + t.head + "' applied to arguments");
      unify_sort(v->sort, want, t);
      return v->sort;
    }
    if (auto it = ctors_.find(t.head); it != ctors_.end()) {
      const CtorInfo& c = it->second;
      if (t.args.size() != c.args.size())
        throw ParseError(t.pos, "'" + t.head + "' expects " + std::to_string(c.args.size()) + " argument(s), given " +
                                    std::to_string(t.args.size()));
      for (std::size_t i = 0; i < t.args.size(); ++i) check_term(t.args[i], c.args[i], scope, clause);
      std::string have = c.result;
      unify_sort(have, want, t);
      return have;
    }
    if (clause && clause_variable_name(t.head)) {
      if (!t.args.empty()) throw ParseError(t.pos, "variable '" + t.head + "' applied to arguments");
      scope.push_back({t.head, want});
      return want;
    }
    throw ParseError(t.pos, "unknown symbol '" + t.head + "'");
  }

  void check_formula(const SFormula& f, Scope& scope, bool clause) {
    switch (f.kind) {
      case SFormula::Kind::True:
      case SFormula::Kind::False: return;
      case SFormula::Kind::Eq: {
        std::string s = check_term(f.terms[0], "", scope, clause);
        const std::string r = check_term(f.terms[1], s, scope, clause);
        if (s.empty() && !r.empty()) check_term(f.terms[0], r, scope, clause);
        return;
      }
      case SFormula::Kind::Atom: {
        const auto& sorts = preds_.at(f.pred);
        if (f.terms.size() != sorts.size())
          throw ParseError(f.pos, "'" + f.pred + "' expects " + std::to_string(sorts.size()) + " argument(s), given " +
                                      std::to_string(f.terms.size()));
        for (std::size_t i = 0; i < sorts.size(); ++i) check_term(f.terms[i], sorts[i], scope, clause);
        return;
      }
      case SFormula::Kind::And:
      case SFormula::Kind::Or:
      case SFormula::Kind::Imp:
        check_formula(f.subs[0], scope, clause);
        check_formula(f.subs[1], scope, clause);
        return;
      case SFormula::Kind::All:
      case SFormula::Kind::Ex: {
        const std::size_t mark = scope.size();
        for (const auto& b : f.binders) scope.push_back({b, ""});
        check_formula(f.subs[0], scope, clause);
        scope.resize(mark);
        return;
      }
    }
  }

  void check_clause(const Clause& c) {
    Scope scope;
    check_formula(c.head, scope, true);
    if (c.body) check_formula(*c.body, scope, true);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> kinds_;
  std::map<std::string, CtorInfo> ctors_;
  std::map<std::string, std::vector<std::string>> preds_;
  std::set<std::string> theorems_;
};

// --- printer -----------------------------------------------------------------

void print_term(std::string& out, const STerm& t, bool nested) {
  if (nested && !t.args.empty()) out += "(";
  out += t.head;
  for (const auto& a : t.args) {
    out += " ";
    print_term(out, a, true);
  }
  if (nested && !t.args.empty()) out += ")";
}

void print_formula(std::string& out, const SFormula& f, bool top) {
  switch (f.kind) {
    case SFormula::Kind::True: out += "true"; return;
    case SFormula::Kind::False: out += "false"; return;
    case SFormula::Kind::Eq:
      print_term(out, f.terms[0], true);
      out += " = ";
      print_term(out, f.terms[1], true);
      return;
    case SFormula::Kind::Atom:
      out += f.pred;
      for (const auto& a : f.terms) {
        out += " ";
        print_term(out, a, true);
      }
      return;
    case SFormula::Kind::And:
    case SFormula::Kind::Or:
    case SFormula::Kind::Imp: {
      const char* op = f.kind == SFormula::Kind::And ? " /\\ " : f.kind == SFormula::Kind::Or ? " \\/ " : " -> ";
      if (!top) out += "(";
      print_formula(out, f.subs[0], false);
      out += op;
      print_formula(out, f.subs[1], false);
      if (!top) out += ")";
      return;
    }
    case SFormula::Kind::All:
    case SFormula::Kind::Ex:
      if (!top) out += "(";
      out += f.kind == SFormula::Kind::All ? "forall" : "exists";
      for (const auto& b : f.binders) out += " " + b;
      out += ", ";
      print_formula(out, f.subs[0], true);
      if (!top) out += ")";
      return;
  }
}

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? std::string(sep) : "") + xs[i];
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

TheoremFile parse_file(std::string_view text) { return Parser(text).parse(); }

std::string print_file(const TheoremFile& file) {
  std::string out;
  for (const auto& d : file.decls) {
    if (const auto* k = std::get_if<KindDecl>(&d)) {
      out += "Kind " + join(k->names, ", ") + " type.\n";
    } else if (const auto* t = std::get_if<TypeDecl>(&d)) {
      std::vector<std::string> sorts = t->arg_sorts;
      sorts.push_back(t->result);
      out += "Type " + join(t->names, ", ") + " " + join(sorts, " -> ") + ".\n";
    } else if (const auto* def = std::get_if<DefineDecl>(&d)) {
      std::vector<std::string> sorts = def->arg_sorts;
      sorts.push_back("prop");
      out += "Define " + def->name + " : " + join(sorts, " -> ") + " by";
      for (std::size_t i = 0; i < def->clauses.size(); ++i) {
        out += i ? " ;\n  " : "\n  ";
        print_formula(out, def->clauses[i].head, true);
        if (def->clauses[i].body) {
          out += " := ";
          print_formula(out, *def->clauses[i].body, true);
        }
      }
      out += ".\n";
    } else if (const auto* th = std::get_if<TheoremDecl>(&d)) {
      out += "Theorem " + th->name + " : ";
      print_formula(out, th->statement, true);
      out += ".\n";
      if (th->ship) out += "  ship " + quote(*th->ship) + ".\n";
    }
  }
  return out;
}

}  // namespace acheck
