#pragma once

// Terms, formulas and least-fixed-point definitions.
//
// Bound variables inside formula bodies are positional (de Bruijn) indices.
// Outside of binders, variables are either eigenvariables (scoped constants
// introduced by forall-right / exists-left) or metavariables (unification
// variables). Both carry a globally unique id and a scope level.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace acheck {

/// Thrown when a term or formula operation is applied outside its contract.
/// Seeing one of these from the kernel means a bug, not a bad certificate.
class StructuralError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Interned identifier. Equal names give equal symbols.
class Sym {
public:
  Sym() = default;
  static Sym intern(std::string_view name);

  const std::string& name() const;
  uint32_t id() const { return id_; }
  bool valid() const { return id_ != 0; }

  friend bool operator==(Sym, Sym) = default;
  friend auto operator<=>(Sym, Sym) = default;

private:
  explicit Sym(uint32_t id) : id_(id) {}
  uint32_t id_ = 0;
};

class Term {
public:
  enum class Kind : uint8_t { BVar, EVar, MVar, App };

  Term() = default;

  static Term bvar(uint32_t index);
  static Term evar(uint64_t id, uint32_t level);
  static Term mvar(uint64_t id, uint32_t level);
  static Term app(Sym head, std::vector<Term> args = {});

  explicit operator bool() const { return node_ != nullptr; }

  Kind kind() const;
  bool is_bvar() const { return kind() == Kind::BVar; }
  bool is_evar() const { return kind() == Kind::EVar; }
  bool is_mvar() const { return kind() == Kind::MVar; }
  bool is_app() const { return kind() == Kind::App; }

  uint32_t index() const;   // BVar
  uint64_t var_id() const;  // EVar / MVar
  uint32_t level() const;   // EVar / MVar
  Sym head() const;         // App
  std::span<const Term> args() const;

  bool has_bvar() const;
  bool has_evar() const;
  bool has_mvar() const;
  std::size_t depth() const;

  bool same_node(const Term& o) const { return node_ == o.node_; }
  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

enum class Polarity : uint8_t { Pos, Neg };

class Formula {
public:
  enum class Kind : uint8_t { Eq, And, Or, Imp, All, Ex, Mu, True, False };

  Formula() = default;

  static Formula eq(Term l, Term r);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula imp(Formula a, Formula b);
  static Formula all(Formula body);
  static Formula ex(Formula body);
  static Formula mu(Sym def, std::vector<Term> args);
  static Formula tt();
  static Formula ff();

  explicit operator bool() const { return node_ != nullptr; }

  Kind kind() const;
  const Term& lhs() const;           // Eq
  const Term& rhs() const;           // Eq
  const Formula& left() const;       // And / Or / Imp
  const Formula& right() const;      // And / Or / Imp
  const Formula& body() const;       // All / Ex
  Sym def() const;                   // Mu
  std::span<const Term> args() const;  // Mu

  bool has_bvar() const;
  bool has_evar() const;
  bool has_mvar() const;

  bool same_node(const Formula& o) const { return node_ == o.node_; }
  friend bool operator==(const Formula& a, const Formula& b);

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// A formula under `arity` leading binders: slot j is bound to the
/// de Bruijn index arity-1-j at the top of `body`.
struct Abstraction {
  uint32_t arity = 0;
  Formula body;

  Formula apply(std::span<const Term> args) const;
  friend bool operator==(const Abstraction&, const Abstraction&) = default;
};

/// A named least fixed point. Inside `body`, recursive occurrences are
/// Mu atoms whose def is `name`.
struct Definition {
  Sym name;
  std::vector<Sym> arg_sorts;  // may be empty when sorts are not tracked
  Abstraction body;

  uint32_t arity() const { return body.arity; }
};

class DefTable {
public:
  void add(Definition def);
  const Definition* find(Sym name) const;
  const Definition& at(Sym name) const;
  const std::vector<Definition>& all() const { return defs_; }
  std::size_t size() const { return defs_.size(); }

private:
  std::vector<Definition> defs_;
  std::unordered_map<uint32_t, std::size_t> by_name_;
};

struct ConstructorSig {
  Sym name;
  std::vector<Sym> arg_sorts;
  Sym result;
};

/// Sorts and term constructors. Predicates live in DefTable.
class Signature {
public:
  void add_sort(Sym sort);
  void add_constructor(ConstructorSig c);
  bool has_sort(Sym sort) const;
  const ConstructorSig* constructor(Sym name) const;
  const std::vector<Sym>& sorts() const { return sorts_; }
  const std::vector<ConstructorSig>& constructors() const { return ctors_; }

private:
  std::vector<Sym> sorts_;
  std::vector<ConstructorSig> ctors_;
};

// --- binding and substitution -------------------------------------------

/// Instantiates the outermost binder of an All/Ex formula with `t`.
Formula open_binder(const Formula& f, const Term& t);

/// Fills the slots of a body that sits under `args.size()` binders.
Formula instantiate(const Formula& body, std::span<const Term> args);

/// Adds `amount` to every BVar in `t`.
Term shift(const Term& t, uint32_t amount);

/// Turns eigenvariable `evar_id` into the innermost bound variable of a new
/// binder around `f`. Loose indices of `f` are shifted to make room.
Formula abstract_evar(const Formula& f, uint64_t evar_id);

/// B(mu B) t: the body of `d` with its slots filled by `args`.
Formula unfold_mu(const Definition& d, std::span<const Term> args);

/// B S t: like unfold_mu, but each recursive occurrence `d u` is replaced by
/// `self(u)`. The argument terms handed to `self` may mention bound
/// variables of the surrounding body.
Formula unfold_with(const Definition& d, std::span<const Term> args,
                    const std::function<Formula(std::span<const Term>)>& self);

/// Applies `fn` to every term in `f`. `fn` receives the binder depth.
Formula map_terms(const Formula& f,
                  const std::function<Term(const Term&, uint32_t depth)>& fn);

Term replace_evars(const Term& t, const std::unordered_map<uint64_t, Term>& sub);
Formula replace_evars(const Formula& f,
                      const std::unordered_map<uint64_t, Term>& sub);

/// Eigenvariables in first-occurrence order, appended to `out` without
/// duplicates.
void collect_evars(const Term& t, std::vector<Term>& out);
void collect_evars(const Formula& f, std::vector<Term>& out);
bool occurs_evar(const Term& t, uint64_t evar_id);
bool occurs_evar(const Formula& f, uint64_t evar_id);

/// True when some BVar is not captured by a binder inside `f`.
bool has_loose_bvars(const Formula& f);

Polarity polarity_of(const Formula& f);

Term fresh_evar(uint32_t level);
Term fresh_mvar(uint32_t level);

// --- printing -------------------------------------------------------------

/// Pretty printer. With `canonical` set, eigen- and metavariables are named
/// by first occurrence (E1, E2, ... / ?1, ?2, ...) so output is stable
/// across runs.
class Printer {
public:
  explicit Printer(bool canonical = false) : canonical_(canonical) {}

  std::string term(const Term& t, uint32_t depth = 0) const;
  std::string formula(const Formula& f, uint32_t depth = 0) const;
  std::string abstraction(const Abstraction& a) const;

private:
  std::string var_name(const Term& t) const;
  void term_into(std::string& out, const Term& t, uint32_t depth, bool nested) const;
  void formula_into(std::string& out, const Formula& f, uint32_t depth) const;

  bool canonical_;
  mutable std::map<std::pair<int, uint64_t>, std::size_t> names_;
  mutable std::size_t next_e_ = 0;
  mutable std::size_t next_m_ = 0;
};

std::string to_string(const Term& t);
std::string to_string(const Formula& f);

}  // namespace acheck
