#include "acheck/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace acheck {

std::vector<Term> term_universe(const Signature& sig, Sym sort, std::size_t max_depth) {
  // by_depth[s][d]: terms of sort s with depth exactly d+1
  std::map<Sym, std::vector<std::vector<Term>>> by_depth;
  for (const auto& s : sig.sorts()) by_depth[s].resize(max_depth);
  for (std::size_t d = 0; d < max_depth; ++d) {
    for (const auto& c : sig.constructors()) {
      // Every combination of arguments of depth < d+1, at least one of depth d.
      std::vector<std::vector<Term>> pools;
      for (const auto& a : c.arg_sorts) {
        std::vector<Term> pool;
        for (std::size_t k = 0; k < d; ++k)
          pool.insert(pool.end(), by_depth[a][k].begin(), by_depth[a][k].end());
        pools.push_back(std::move(pool));
      }
      if (c.arg_sorts.empty()) {
        if (d == 0) by_depth[c.result][0].push_back(Term::app(c.name));
        continue;
      }
      std::vector<std::size_t> idx(pools.size(), 0);
      if (std::any_of(pools.begin(), pools.end(), [](const auto& p) { return p.empty(); })) continue;
      while (true) {
        std::vector<Term> args;
        std::size_t deepest = 0;
        for (std::size_t i = 0; i < pools.size(); ++i) {
          args.push_back(pools[i][idx[i]]);
          deepest = std::max(deepest, args.back().depth());
        }
        if (deepest == d) by_depth[c.result][d].push_back(Term::app(c.name, std::move(args)));
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == pools[i].size()) idx[i++] = 0;
        if (i == idx.size()) break;
      }
    }
  }
  std::vector<Term> out;
  for (const auto& level : by_depth[sort]) out.insert(out.end(), level.begin(), level.end());
  return out;
}

namespace {

using Tuple = std::vector<Term>;
using Facts = std::map<Sym, std::set<Tuple>>;

class Evaluator {
public:
  Evaluator(const Facts& facts, const std::vector<Term>& all_terms) : facts_(facts), all_(all_terms) {}

  bool holds(const Formula& f) const {
    switch (f.kind()) {
      case Formula::Kind::True: return true;
      case Formula::Kind::False: return false;
      case Formula::Kind::Eq: return f.lhs() == f.rhs();
      case Formula::Kind::And: return holds(f.left()) && holds(f.right());
      case Formula::Kind::Or: return holds(f.left()) || holds(f.right());
      case Formula::Kind::Imp: return !holds(f.left()) || holds(f.right());
      case Formula::Kind::Ex:
        return std::any_of(all_.begin(), all_.end(), [&](const Term& t) { return holds(open_binder(f, t)); });
      case Formula::Kind::All:
        return std::all_of(all_.begin(), all_.end(), [&](const Term& t) { return holds(open_binder(f, t)); });
      case Formula::Kind::Mu: {
        auto it = facts_.find(f.def());
        return it != facts_.end() && it->second.count(Tuple(f.args().begin(), f.args().end())) > 0;
      }
    }
    return false;
  }

private:
  const Facts& facts_;
  const std::vector<Term>& all_;
};

void for_each_tuple(const std::vector<const std::vector<Term>*>& pools, const std::function<void(const Tuple&)>& fn) {
  for (const auto* p : pools)
    if (p->empty()) return;
  std::vector<std::size_t> idx(pools.size(), 0);
  Tuple t(pools.size());
  while (true) {
    for (std::size_t i = 0; i < pools.size(); ++i) t[i] = (*pools[i])[idx[i]];
    fn(t);
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == pools[i]->size()) idx[i++] = 0;
    if (i == idx.size()) return;
  }
}

}  // namespace

Truth eval_ground(const Signature& sig, const DefTable& defs, const Formula& atom, uint32_t fuel,
                  std::optional<std::size_t> depth_bound) {
  if (!atom || atom.kind() != Formula::Kind::Mu || atom.has_evar() || atom.has_mvar() || atom.has_bvar())
    throw std::invalid_argument("eval_ground expects a ground fixed-point atom");
  std::size_t bound = 1;
  for (const auto& a : atom.args()) bound = std::max(bound, a.depth() + 1);
  if (depth_bound) bound = std::max(*depth_bound, bound - 1);

  std::map<Sym, std::vector<Term>> universe;
  std::vector<Term> all_terms;
  for (const auto& s : sig.sorts()) {
    universe[s] = term_universe(sig, s, bound);
    all_terms.insert(all_terms.end(), universe[s].begin(), universe[s].end());
  }

  const Tuple goal(atom.args().begin(), atom.args().end());
  Facts facts;
  for (uint32_t round = 0; round < fuel; ++round) {
    Facts derived = facts;
    bool changed = false;
    const Evaluator eval(facts, all_terms);
    for (const auto& d : defs.all()) {
      std::vector<const std::vector<Term>*> pools;
      for (uint32_t i = 0; i < d.arity(); ++i)
        pools.push_back(i < d.arg_sorts.size() ? &universe[d.arg_sorts[i]] : &all_terms);
      auto& known = derived[d.name];
      for_each_tuple(pools, [&](const Tuple& t) {
        if (known.count(t)) return;
        if (eval.holds(d.body.apply(t))) {
          known.insert(t);
          changed = true;
        }
      });
    }
    facts = std::move(derived);
    if (facts[atom.def()].count(goal)) return Truth::True;
    if (!changed) return Truth::False;
  }
  return Truth::Unknown;
}

}  // namespace acheck
