#pragma once

// Shared helpers for the test suites.

#include <fstream>
#include <sstream>
#include <string>

#include "acheck/frontend.hpp"
#include "acheck/kernel.hpp"
#include "acheck/outline.hpp"
#include "acheck/syntax.hpp"
#include "acheck/unify.hpp"

namespace testing {

using namespace acheck;

inline const char* const kPlusPrelude = R"(
Kind nat type.
Type z nat.
Type s nat -> nat.
Define is_nat : nat -> prop by
  is_nat z ;
  is_nat (s N) := is_nat N.
Define plus : nat -> nat -> nat -> prop by
  plus z N N ;
  plus (s N) M (s P) := plus N M P.
)";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

inline std::string corpus_file() { return std::string(ACHECK_CORPUS_DIR) + "/plus.thm"; }

inline Theory corpus_theory() { return elaborate(parse_file(read_file(corpus_file()))); }

inline Theory plus_theory(const std::string& theorems = "") { return elaborate(parse_file(kPlusPrelude + theorems)); }

/// Elaborates one closed statement against the plus prelude.
inline Formula statement(const std::string& text) {
  return plus_theory("Theorem goal : " + text + ".").theorems.at(0).statement;
}

inline Term zero() { return Term::app(Sym::intern("z")); }
inline Term succ(Term t) { return Term::app(Sym::intern("s"), {std::move(t)}); }
inline Term numeral(unsigned k) {
  Term t = zero();
  while (k-- > 0) t = succ(t);
  return t;
}

inline Formula atom(const char* pred, std::vector<Term> args) { return Formula::mu(Sym::intern(pred), std::move(args)); }

inline Cert outline(uint32_t d, uint32_t ua, uint32_t us) {
  Outline o;
  o.decides = d;
  o.unfold_left = ua;
  o.unfold_right = us;
  return outline_cert(o);
}

inline LemmaTable lemmas_of(const Theory& th, std::initializer_list<const char*> names) {
  LemmaTable out;
  for (const char* n : names)
    for (const auto& t : th.theorems)
      if (t.name.name() == n) out.push_back({t.name, t.statement});
  return out;
}

inline const TheoremEntry& theorem(const Theory& th, const std::string& name) {
  for (const auto& t : th.theorems)
    if (t.name.name() == name) return t;
  throw std::out_of_range(name);
}


/// Every rule allowed; each expert step costs one unit of fuel. Clerks are
/// free. No induction.
class CountingFpc final : public FpcDefinition {
public:
  struct Fuel final : CertNode {
    uint32_t left = 0;
    uint32_t hyps = 0;
  };

  static Cert fuel(uint32_t n) {
    auto f = std::make_shared<Fuel>();
    f->left = n;
    return f;
  }
  static uint32_t left(const Cert& c) { return static_cast<const Fuel&>(*c).left; }

  std::string_view name() const override { return "counting"; }

  std::vector<std::pair<Cert, Index>> store_clerk(const Cert& c) const override {
    auto f = std::make_shared<Fuel>(static_cast<const Fuel&>(*c));
    ++f->hyps;
    return {{f, Index::hyp(f->hyps)}};
  }
  std::vector<std::pair<Cert, Index>> decide_expert(const Cert& c, std::span<const Index> candidates) const override {
    std::vector<std::pair<Cert, Index>> out;
    if (const Cert n = spend(c))
      for (const auto& i : candidates) out.emplace_back(n, i);
    return out;
  }
  std::vector<Cert> decide_right_expert(const Cert& c) const override { return list(spend(c)); }
  std::vector<std::pair<Cert, Side>> or_expert(const Cert& c) const override {
    const Cert n = spend(c);
    if (!n) return {};
    return {{n, Side::Left}, {n, Side::Right}};
  }
  std::vector<std::pair<Cert, TermChoice>> some_expert(const Cert& c) const override {
    const Cert n = spend(c);
    if (!n) return {};
    return {{n, std::nullopt}};
  }
  std::vector<std::pair<Cert, Cert>> and_expert(const Cert& c) const override {
    const Cert n = spend(c);
    if (!n) return {};
    return {{n, n}};
  }
  std::vector<Cert> unfold_left_expert(const Cert& c) const override { return list(spend(c)); }
  std::vector<Cert> unfold_right_expert(const Cert& c) const override { return list(spend(c)); }
  std::vector<InductionChoice> ind_expert(const Cert&) const override { return {}; }
  std::vector<InitialChoice> initial_expert(const Cert& c) const override {
    if (!spend(c)) return {};
    return {AnyFrozen{}};
  }

private:
  static Cert spend(const Cert& c) {
    const auto& f = static_cast<const Fuel&>(*c);
    if (f.left == 0) return nullptr;
    auto n = std::make_shared<Fuel>(f);
    --n->left;
    return n;
  }
  static std::vector<Cert> list(Cert c) {
    if (!c) return {};
    return {std::move(c)};
  }
};

}  // namespace testing
