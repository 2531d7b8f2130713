#pragma once

// Theorem files: a small Abella-like dialect.
//
//   Kind nat type.
//   Type z nat.
//   Type s nat -> nat.
//   Define plus : nat -> nat -> nat -> prop by
//     plus z N N ;
//     plus (s N) M (s P) := plus N M P.
//   Theorem plus0com : forall N, is_nat N -> plus N z N.
//     ship "(induction 1 0 1)".
//
// In clauses, identifiers starting with an upper-case letter or `_` that
// are not constructors are clause variables.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "acheck/fpc.hpp"
#include "acheck/kernel.hpp"
#include "acheck/syntax.hpp"

namespace acheck {

struct SourcePos {
  uint32_t line = 0;
  uint32_t col = 0;
};

class ParseError : public std::runtime_error {
public:
  ParseError(SourcePos pos, const std::string& what)
      : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + what), pos_(pos) {}
  SourcePos pos() const { return pos_; }

private:
  SourcePos pos_;
};

// --- surface syntax (positions do not take part in equality) --------------

struct STerm {
  std::string head;  // variable or constructor
  std::vector<STerm> args;
  SourcePos pos;

  friend bool operator==(const STerm& a, const STerm& b) { return a.head == b.head && a.args == b.args; }
};

struct SFormula {
  enum class Kind : uint8_t { Eq, And, Or, Imp, All, Ex, Atom, True, False };

  Kind kind = Kind::True;
  std::vector<std::string> binders;  // All / Ex
  std::vector<STerm> terms;          // Eq: two sides; Atom: arguments
  std::string pred;                  // Atom
  std::vector<SFormula> subs;        // And / Or / Imp: two; All / Ex: one
  SourcePos pos;

  friend bool operator==(const SFormula& a, const SFormula& b) {
    return a.kind == b.kind && a.binders == b.binders && a.terms == b.terms && a.pred == b.pred && a.subs == b.subs;
  }
};

struct KindDecl {
  std::vector<std::string> names;
  SourcePos pos;
  friend bool operator==(const KindDecl& a, const KindDecl& b) { return a.names == b.names; }
};

struct TypeDecl {
  std::vector<std::string> names;
  std::vector<std::string> arg_sorts;
  std::string result;
  SourcePos pos;
  friend bool operator==(const TypeDecl& a, const TypeDecl& b) {
    return a.names == b.names && a.arg_sorts == b.arg_sorts && a.result == b.result;
  }
};

struct Clause {
  SFormula head;  // an Atom of the defined predicate
  std::optional<SFormula> body;
  friend bool operator==(const Clause&, const Clause&) = default;
};

struct DefineDecl {
  std::string name;
  std::vector<std::string> arg_sorts;
  std::vector<Clause> clauses;
  SourcePos pos;
  friend bool operator==(const DefineDecl& a, const DefineDecl& b) {
    return a.name == b.name && a.arg_sorts == b.arg_sorts && a.clauses == b.clauses;
  }
};

struct TheoremDecl {
  std::string name;
  SFormula statement;
  std::optional<std::string> ship;
  SourcePos pos;
  friend bool operator==(const TheoremDecl& a, const TheoremDecl& b) {
    return a.name == b.name && a.statement == b.statement && a.ship == b.ship;
  }
};

using Decl = std::variant<KindDecl, TypeDecl, DefineDecl, TheoremDecl>;

struct TheoremFile {
  std::vector<Decl> decls;
  friend bool operator==(const TheoremFile&, const TheoremFile&) = default;
};

/// Parses and checks scoping, arities and sorts. Throws ParseError.
TheoremFile parse_file(std::string_view text);

std::string print_file(const TheoremFile& file);

// --- elaboration -----------------------------------------------------------

struct TheoremEntry {
  Sym name;
  Formula statement;
  std::optional<std::string> ship;
  SourcePos pos;
};

struct Theory {
  Signature sig;
  DefTable defs;
  std::vector<TheoremEntry> theorems;
};

/// Throws ParseError (e.g. non-positive recursion).
Theory elaborate(const TheoremFile& file);

/// Clark completion of the clauses of `d`. `defs` holds the definitions
/// declared before it.
Definition compile_definition(const DefineDecl& d, const Signature& sig, const DefTable& defs);

// --- sessions --------------------------------------------------------------

struct SessionOptions {
  ResourceLimits limits;
  bool stop_on_failure = false;
};

struct TheoremResult {
  Sym name;
  Formula statement;
  Verdict verdict = Verdict::Rejected;
  std::optional<TraceNode> trace;
  uint64_t steps = 0;
  std::string diagnostic;
  std::size_t lemmas_available = 0;  // prefix of the session's lemma table in scope
};

struct SessionResult {
  std::vector<TheoremResult> theorems;
  LemmaTable lemmas;  // every accepted theorem, in order
};

/// Checks the theorems in order. Each accepted theorem becomes a lemma for
/// the ones after it.
SessionResult run_session(const Theory& theory, const FpcDefinition& fpc, const SessionOptions& options = {});

}  // namespace acheck
