#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace acheck;
using namespace testing;

namespace {

// Textbook Robinson unification over metavariables, ignoring scope levels.
// Scope is checked afterwards on the fully applied substitution.
struct Robinson {
  std::map<uint64_t, Term> sub;

  Term apply(const Term& t) const {
    if (t.is_mvar()) {
      auto it = sub.find(t.var_id());
      return it == sub.end() ? t : apply(it->second);
    }
    if (!t.is_app()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(apply(a));
    return Term::app(t.head(), std::move(args));
  }

  static bool occurs(uint64_t id, const Term& t) {
    if (t.is_mvar()) return t.var_id() == id;
    if (!t.is_app()) return false;
    for (const auto& a : t.args())
      if (occurs(id, a)) return true;
    return false;
  }

  bool unify(const Term& a0, const Term& b0) {
    const Term a = apply(a0), b = apply(b0);
    if (a == b) return true;
    if (a.is_mvar()) {
      if (occurs(a.var_id(), b)) return false;
      sub[a.var_id()] = b;
      return true;
    }
    if (b.is_mvar()) return unify(b, a);
    if (!a.is_app() || !b.is_app() || a.head() != b.head() || a.args().size() != b.args().size()) return false;
    for (std::size_t i = 0; i < a.args().size(); ++i)
      if (!unify(a.args()[i], b.args()[i])) return false;
    return true;
  }
};

uint32_t max_evar_level(const Term& t) {
  if (t.is_evar()) return t.level();
  uint32_t m = 0;
  if (t.is_app())
    for (const auto& a : t.args()) m = std::max(m, max_evar_level(a));
  return m;
}

// Equal up to a bijective renaming of metavariables.
bool alpha_equal(const Term& a, const Term& b, std::map<uint64_t, uint64_t>& fwd, std::map<uint64_t, uint64_t>& back) {
  if (a.is_mvar() && b.is_mvar()) {
    const auto i = fwd.emplace(a.var_id(), b.var_id()).first;
    const auto j = back.emplace(b.var_id(), a.var_id()).first;
    return i->second == b.var_id() && j->second == a.var_id();
  }
  if (a.is_app() && b.is_app()) {
    if (a.head() != b.head() || a.args().size() != b.args().size()) return false;
    for (std::size_t k = 0; k < a.args().size(); ++k)
      if (!alpha_equal(a.args()[k], b.args()[k], fwd, back)) return false;
    return true;
  }
  return a == b;
}

struct Gen {
  std::mt19937 rng;
  std::vector<Term> mvars, evars;

  explicit Gen(unsigned seed) : rng(seed) {
    for (uint32_t l = 0; l < 3; ++l) {
      mvars.push_back(fresh_mvar(l));
      mvars.push_back(fresh_mvar(l));
      evars.push_back(fresh_evar(l));
    }
  }
  unsigned pick(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng); }

  Term term(int depth) {
    switch (depth > 0 ? pick(6) : pick(3)) {
      case 0: return mvars[pick(static_cast<unsigned>(mvars.size()))];
      case 1: return evars[pick(static_cast<unsigned>(evars.size()))];
      case 2: return zero();
      case 3: return succ(term(depth - 1));
      default: return Term::app(Sym::intern("pair"), {term(depth - 1), term(depth - 1)});
    }
  }
};

}  // namespace

TEST_CASE("unification agrees with Robinson plus a scope check") {
  Gen gen(3);
  int agreed_success = 0;
  for (int i = 0; i < 3000; ++i) {
    std::vector<std::pair<Term, Term>> eqs;
    const unsigned n = 1 + gen.pick(3);
    for (unsigned k = 0; k < n; ++k) eqs.emplace_back(gen.term(3), gen.term(3));

    Robinson oracle;
    bool expected = true;
    for (const auto& [a, b] : eqs) expected = expected && oracle.unify(a, b);
    if (expected) {
      for (const auto& m : gen.mvars)
        if (max_evar_level(oracle.apply(m)) > m.level()) expected = false;
    }

    BindingStore store;
    bool actual = true;
    for (const auto& [a, b] : eqs) actual = actual && store.unify(a, b);

    REQUIRE(actual == expected);
    if (!actual) continue;
    ++agreed_success;
    std::map<uint64_t, uint64_t> fwd, back;
    for (const auto& m : gen.mvars) CHECK(alpha_equal(store.resolve(m), oracle.apply(m), fwd, back));
    for (const auto& [a, b] : eqs) CHECK(store.resolve(a) == store.resolve(b));
  }
  CHECK(agreed_success > 100);
}

TEST_CASE("unification is symmetric") {
  Gen gen(5);
  for (int i = 0; i < 2000; ++i) {
    const Term a = gen.term(3), b = gen.term(3);
    BindingStore left, right;
    const bool l = left.unify(a, b), r = right.unify(b, a);
    REQUIRE(l == r);
    if (!l) continue;
    std::map<uint64_t, uint64_t> fwd, back;
    CHECK(alpha_equal(left.resolve(a), right.resolve(a), fwd, back));
  }
}

TEST_CASE("brute force: the unifier is more general than any ground unifier") {
  // Every ground instance that equates the two terms factors through the mgu.
  Gen gen(23);
  const std::vector<Term> values = {zero(), numeral(1), Term::app(Sym::intern("pair"), {zero(), zero()})};
  const Term x = fresh_mvar(0), y = fresh_mvar(0);
  for (int i = 0; i < 300; ++i) {
    // terms over x, y and constructors only
    std::function<Term(int)> term = [&](int depth) -> Term {
      switch (depth > 0 ? gen.pick(5) : gen.pick(3)) {
        case 0: return x;
        case 1: return y;
        case 2: return zero();
        case 3: return succ(term(depth - 1));
        default: return Term::app(Sym::intern("pair"), {term(depth - 1), term(depth - 1)});
      }
    };
    const Term a = term(3), b = term(3);
    BindingStore mgu;
    const bool unifiable = mgu.unify(a, b);
    bool some_ground = false;
    for (const auto& vx : values)
      for (const auto& vy : values) {
        BindingStore g;
        REQUIRE(g.unify(x, vx));
        REQUIRE(g.unify(y, vy));
        if (g.resolve(a) != g.resolve(b)) continue;
        some_ground = true;
        // The ground solution is an instance of the mgu.
        BindingStore inst;
        CHECK(inst.unify(mgu.resolve(x), vx));
        CHECK(inst.unify(mgu.resolve(y), vy));
      }
    if (some_ground) CHECK(unifiable);
  }
}

TEST_CASE("a failed unification leaves the store untouched") {
  Gen gen(29);
  for (int i = 0; i < 1000; ++i) {
    BindingStore store;
    store.unify(gen.term(2), gen.term(2));
    const BindingStore before = store;
    if (!store.unify(gen.term(3), gen.term(3))) CHECK(store == before);
  }
}

TEST_CASE("randomized mark/undo sequences restore earlier states exactly") {
  Gen gen(31);
  BindingStore store;
  std::vector<std::pair<Checkpoint, BindingStore>> marks;
  std::vector<std::pair<Term, Term>> log;  // successful unifications since the start
  std::vector<std::size_t> log_at_mark;
  for (int op = 0; op < 1000; ++op) {
    const unsigned kind = gen.pick(10);
    if (kind < 6) {
      const Term a = gen.term(2), b = gen.term(2);
      if (store.unify(a, b)) log.emplace_back(a, b);
    } else if (kind < 8 || marks.empty()) {
      marks.emplace_back(store.mark(), store);
      log_at_mark.push_back(log.size());
    } else {
      const std::size_t k = gen.pick(static_cast<unsigned>(marks.size()));
      store.undo(marks[k].first);
      REQUIRE(store == marks[k].second);
      log.resize(log_at_mark[k]);
      marks.resize(k);
      log_at_mark.resize(k);
    }
    // A scratch replay of the surviving unifications gives the same bindings.
    if (op % 50 == 0) {
      BindingStore scratch;
      for (const auto& [a, b] : log) REQUIRE(scratch.unify(a, b));
      for (const auto& m : gen.mvars) CHECK(scratch.resolve(m) == store.resolve(m));
    }
  }
}

TEST_CASE("resolve is idempotent") {
  Gen gen(37);
  BindingStore store;
  for (int i = 0; i < 50; ++i) store.unify(gen.term(2), gen.term(2));
  for (int i = 0; i < 200; ++i) {
    const Term t = gen.term(3);
    CHECK(store.resolve(store.resolve(t)) == store.resolve(t));
  }
}

TEST_CASE("scope: a metavariable cannot capture a younger eigenvariable") {
  const Term old_m = fresh_mvar(0), young = fresh_evar(1);
  BindingStore store;
  CHECK_FALSE(store.unify(old_m, young));
  CHECK_FALSE(store.unify(old_m, succ(young)));
  // ...nor through a younger metavariable that gets lowered.
  const Term young_m = fresh_mvar(1);
  REQUIRE(store.unify(old_m, succ(young_m)));
  CHECK_FALSE(store.unify(young_m, young));
  CHECK(store.unify(young_m, zero()));
}

TEST_CASE("occurs check") {
  const Term m = fresh_mvar(0);
  BindingStore store;
  CHECK_FALSE(store.unify(m, succ(m)));
  CHECK(store.size() == 0);
}

TEST_CASE("eigenvariable unification for equality on the left") {
  const Term a = fresh_evar(1), b = fresh_evar(1);
  CHECK(unify_eigen(zero(), succ(a)).clash);
  CHECK(unify_eigen(a, succ(a)).clash);
  const EigenUnifier u = unify_eigen(succ(a), succ(succ(b)));
  REQUIRE_FALSE(u.clash);
  CHECK(replace_evars(a, u.subst) == succ(b));
  CHECK_THROWS_AS(unify_eigen(fresh_mvar(0), zero()), StructuralError);
}
