#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace acheck;
using namespace testing;

namespace {

// Independent reference: formulas with named binders and substitution by
// name. Converting back to indices must agree with the library.
struct NamedTerm {
  std::string var;  // non-empty for a bound variable
  Term leaf;        // eigen- or metavariable
  Sym head;
  std::vector<NamedTerm> args;
};

struct NamedFormula {
  Formula::Kind kind;
  std::string binder;
  std::vector<NamedTerm> terms;
  Sym def;
  std::vector<NamedFormula> subs;
};

struct Namer {
  int next = 0;
  std::string fresh() { return "v" + std::to_string(next++); }
};

NamedTerm to_named(const Term& t, const std::vector<std::string>& scope) {
  NamedTerm n;
  switch (t.kind()) {
    case Term::Kind::BVar: n.var = scope.at(scope.size() - 1 - t.index()); break;
    case Term::Kind::EVar:
    case Term::Kind::MVar: n.leaf = t; break;
    case Term::Kind::App:
      n.head = t.head();
      for (const auto& a : t.args()) n.args.push_back(to_named(a, scope));
      break;
  }
  return n;
}

NamedFormula to_named(const Formula& f, std::vector<std::string>& scope, Namer& namer) {
  NamedFormula n{f.kind(), {}, {}, {}, {}};
  switch (f.kind()) {
    case Formula::Kind::Eq: n.terms = {to_named(f.lhs(), scope), to_named(f.rhs(), scope)}; break;
    case Formula::Kind::Mu:
      n.def = f.def();
      for (const auto& a : f.args()) n.terms.push_back(to_named(a, scope));
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp:
      n.subs = {to_named(f.left(), scope, namer), to_named(f.right(), scope, namer)};
      break;
    case Formula::Kind::All:
    case Formula::Kind::Ex:
      n.binder = namer.fresh();
      scope.push_back(n.binder);
      n.subs = {to_named(f.body(), scope, namer)};
      scope.pop_back();
      break;
    default: break;
  }
  return n;
}

Term from_named(const NamedTerm& n, const std::vector<std::string>& scope) {
  if (!n.var.empty()) {
    for (std::size_t i = scope.size(); i-- > 0;)
      if (scope[i] == n.var) return Term::bvar(static_cast<uint32_t>(scope.size() - 1 - i));
    FAIL("unbound name " << n.var);
  }
  if (n.leaf) return n.leaf;
  std::vector<Term> args;
  for (const auto& a : n.args) args.push_back(from_named(a, scope));
  return Term::app(n.head, std::move(args));
}

Formula from_named(const NamedFormula& n, std::vector<std::string>& scope) {
  switch (n.kind) {
    case Formula::Kind::Eq: return Formula::eq(from_named(n.terms[0], scope), from_named(n.terms[1], scope));
    case Formula::Kind::Mu: {
      std::vector<Term> args;
      for (const auto& a : n.terms) args.push_back(from_named(a, scope));
      return Formula::mu(n.def, std::move(args));
    }
    case Formula::Kind::And: return Formula::conj(from_named(n.subs[0], scope), from_named(n.subs[1], scope));
    case Formula::Kind::Or: return Formula::disj(from_named(n.subs[0], scope), from_named(n.subs[1], scope));
    case Formula::Kind::Imp: return Formula::imp(from_named(n.subs[0], scope), from_named(n.subs[1], scope));
    case Formula::Kind::All:
    case Formula::Kind::Ex: {
      scope.push_back(n.binder);
      Formula body = from_named(n.subs[0], scope);
      scope.pop_back();
      return n.kind == Formula::Kind::All ? Formula::all(body) : Formula::ex(body);
    }
    case Formula::Kind::True: return Formula::tt();
    case Formula::Kind::False: return Formula::ff();
  }
  return Formula::tt();
}

NamedTerm embed(const Term& closed) { return to_named(closed, {}); }

void substitute(NamedTerm& n, const std::string& name, const NamedTerm& value) {
  if (n.var == name) {
    n = value;
    return;
  }
  for (auto& a : n.args) substitute(a, name, value);
}

void substitute(NamedFormula& n, const std::string& name, const NamedTerm& value) {
  for (auto& t : n.terms) substitute(t, name, value);
  for (auto& s : n.subs) substitute(s, name, value);
}

// Random syntax over z/s/pair, is_nat/plus atoms and a few fixed variables.
struct Gen {
  std::mt19937 rng;
  std::vector<Term> leaves{fresh_evar(1), fresh_evar(2), fresh_mvar(1)};

  explicit Gen(unsigned seed) : rng(seed) {}
  unsigned pick(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng); }

  Term term(uint32_t scope, int depth) {
    const unsigned choice = pick(depth > 0 ? 5 : 3);
    if (choice == 0 && scope > 0) return Term::bvar(pick(scope));
    if (choice == 1) return leaves[pick(static_cast<unsigned>(leaves.size()))];
    if (choice == 2 || depth <= 0) return zero();
    if (choice == 3) return succ(term(scope, depth - 1));
    return Term::app(Sym::intern("pair"), {term(scope, depth - 1), term(scope, depth - 1)});
  }

  Formula formula(uint32_t scope, int depth) {
    const unsigned choice = depth > 0 ? pick(9) : pick(3);
    switch (choice) {
      case 0: return Formula::eq(term(scope, 2), term(scope, 2));
      case 1: return atom("is_nat", {term(scope, 2)});
      case 2: return atom("plus", {term(scope, 2), term(scope, 1), term(scope, 2)});
      case 3: return Formula::conj(formula(scope, depth - 1), formula(scope, depth - 1));
      case 4: return Formula::disj(formula(scope, depth - 1), formula(scope, depth - 1));
      case 5: return Formula::imp(formula(scope, depth - 1), formula(scope, depth - 1));
      case 6: return Formula::all(formula(scope + 1, depth - 1));
      case 7: return Formula::ex(formula(scope + 1, depth - 1));
      default: return pick(2) ? Formula::tt() : Formula::ff();
    }
  }

  Term closed_term(int depth) { return term(0, depth); }
};

}  // namespace

TEST_CASE("symbols are interned") {
  CHECK(Sym::intern("plus") == Sym::intern("plus"));
  CHECK_FALSE(Sym::intern("plus") == Sym::intern("is_nat"));
  CHECK(Sym::intern("plus").name() == "plus");
}

TEST_CASE("constants have depth one and successors add one") {
  CHECK(zero().depth() == 1);
  CHECK(numeral(3).depth() == 4);
}

TEST_CASE("opening a binder agrees with named substitution") {
  Gen gen(7);
  for (int i = 0; i < 500; ++i) {
    const Formula body = gen.formula(1, 4);
    const Term value = gen.closed_term(3);
    const Formula quantified = gen.pick(2) ? Formula::all(body) : Formula::ex(body);

    std::vector<std::string> scope;
    Namer namer;
    NamedFormula named = to_named(quantified, scope, namer);
    NamedFormula inner = named.subs[0];
    substitute(inner, named.binder, embed(value));
    const Formula expected = from_named(inner, scope);

    CHECK(open_binder(quantified, value) == expected);
  }
}

TEST_CASE("named round trip is the identity") {
  Gen gen(11);
  for (int i = 0; i < 200; ++i) {
    const Formula f = gen.formula(0, 5);
    std::vector<std::string> scope;
    Namer namer;
    const NamedFormula n = to_named(f, scope, namer);
    CHECK(from_named(n, scope) == f);
  }
}

TEST_CASE("instantiate fills slots outermost first") {
  Gen gen(13);
  for (int i = 0; i < 300; ++i) {
    const Formula body = gen.formula(2, 3);
    const Term a = gen.closed_term(2), b = gen.closed_term(2);
    const Term args[] = {a, b};
    const Formula stepwise = open_binder(open_binder(Formula::all(Formula::all(body)), a), b);
    CHECK(instantiate(body, args) == stepwise);
  }
}

TEST_CASE("eigenvariable substitutions compose") {
  // f[e1 := t1][e2 := t2] = f[e1 := t1[e2 := t2], e2 := t2]
  Gen gen(17);
  const Term e1 = gen.leaves[0], e2 = gen.leaves[1];
  for (int i = 0; i < 300; ++i) {
    const Formula f = gen.formula(0, 4);
    const Term t1 = gen.closed_term(2), t2 = succ(zero());
    const Formula twice = replace_evars(replace_evars(f, {{e1.var_id(), t1}}), {{e2.var_id(), t2}});
    const Formula once = replace_evars(f, {{e1.var_id(), replace_evars(t1, {{e2.var_id(), t2}})}, {e2.var_id(), t2}});
    CHECK(twice == once);
  }
}

TEST_CASE("abstracting an eigenvariable and reopening with it is the identity") {
  Gen gen(19);
  for (int i = 0; i < 300; ++i) {
    const Formula f = gen.formula(0, 4);
    const Term e = gen.leaves[0];
    const Formula abstracted = abstract_evar(f, e.var_id());
    CHECK_FALSE(occurs_evar(abstracted, e.var_id()));
    CHECK(open_binder(Formula::all(abstracted), e) == f);
  }
}

TEST_CASE("abstracting under binders shifts loose indices") {
  const Term e = fresh_evar(1);
  // exists x. plus x e x, with e abstracted: exists x. plus x #1 x under a new binder
  const Formula f = Formula::ex(atom("plus", {Term::bvar(0), e, Term::bvar(0)}));
  const Formula g = abstract_evar(f, e.var_id());
  CHECK(g == Formula::ex(atom("plus", {Term::bvar(0), Term::bvar(1), Term::bvar(0)})));
}

TEST_CASE("shift moves every bound variable") {
  const Term t = Term::app(Sym::intern("pair"), {Term::bvar(0), succ(Term::bvar(2))});
  CHECK(shift(t, 3) == Term::app(Sym::intern("pair"), {Term::bvar(3), succ(Term::bvar(5))}));
  CHECK(shift(numeral(2), 4) == numeral(2));
}

TEST_CASE("unfolding plus gives its clause completion") {
  const Theory th = plus_theory();
  const Definition& plus = th.defs.at(Sym::intern("plus"));
  const Term a = fresh_evar(1), b = fresh_evar(1), c = fresh_evar(1);
  const Term args[] = {a, b, c};

  // (a = z /\ b = c) \/ exists n p, a = s n /\ c = s p /\ plus n b p
  const Term n = Term::bvar(1), p = Term::bvar(0);
  const Formula base = Formula::conj(Formula::eq(a, zero()), Formula::eq(b, c));
  const Formula step = Formula::ex(Formula::ex(Formula::conj(
      Formula::eq(a, succ(n)), Formula::conj(Formula::eq(c, succ(p)), atom("plus", {n, b, p})))));
  CHECK(unfold_mu(plus, args) == Formula::disj(base, step));
}

TEST_CASE("unfold_with replaces recursive occurrences") {
  const Theory th = plus_theory();
  const Definition& is_nat = th.defs.at(Sym::intern("is_nat"));
  const Term x = fresh_evar(1);
  const Term args[] = {x};
  const Formula f = unfold_with(is_nat, args, [](std::span<const Term> u) { return Formula::eq(u[0], u[0]); });
  const Term k = Term::bvar(0);
  CHECK(f == Formula::disj(Formula::eq(x, zero()), Formula::ex(Formula::conj(Formula::eq(x, succ(k)), Formula::eq(k, k)))));
}

TEST_CASE("polarity of connectives") {
  const Term x = zero();
  CHECK(polarity_of(Formula::eq(x, x)) == Polarity::Pos);
  CHECK(polarity_of(Formula::conj(Formula::tt(), Formula::tt())) == Polarity::Pos);
  CHECK(polarity_of(Formula::disj(Formula::tt(), Formula::tt())) == Polarity::Pos);
  CHECK(polarity_of(Formula::ex(Formula::tt())) == Polarity::Pos);
  CHECK(polarity_of(atom("is_nat", {x})) == Polarity::Pos);
  CHECK(polarity_of(Formula::tt()) == Polarity::Pos);
  CHECK(polarity_of(Formula::ff()) == Polarity::Pos);
  CHECK(polarity_of(Formula::imp(Formula::tt(), Formula::tt())) == Polarity::Neg);
  CHECK(polarity_of(Formula::all(Formula::tt())) == Polarity::Neg);
}

TEST_CASE("fresh variables are distinct") {
  std::set<uint64_t> ids;
  for (int i = 0; i < 1000; ++i) {
    ids.insert(fresh_evar(0).var_id());
    ids.insert(fresh_mvar(0).var_id());
  }
  CHECK(ids.size() == 2000);
}

TEST_CASE("evar collection follows first occurrence") {
  const Term a = fresh_evar(1), b = fresh_evar(1);
  std::vector<Term> out;
  collect_evars(atom("plus", {b, a, b}), out);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == b);
  CHECK(out[1] == a);
}

TEST_CASE("canonical printing names variables by first occurrence") {
  const Term a = fresh_evar(1), m = fresh_mvar(1);
  Printer p(true);
  CHECK(p.formula(atom("plus", {a, m, succ(a)})) == "plus E1 ?1 (s E1)");
}

TEST_CASE("loose bound variables are detected") {
  CHECK(has_loose_bvars(atom("is_nat", {Term::bvar(0)})));
  CHECK_FALSE(has_loose_bvars(Formula::all(atom("is_nat", {Term::bvar(0)}))));
}
