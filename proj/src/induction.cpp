#include "acheck/kernel.hpp"

namespace acheck {

namespace {

const Formula& target_atom(const AsyncSeq& seq, std::size_t target) {
  if (target >= seq.workbench.size()) throw StructuralError("induction target out of range");
  const Formula& atom = seq.workbench[target];
  if (atom.kind() != Formula::Kind::Mu) throw StructuralError("induction target is not a fixed point");
  return atom;
}

Formula equations(std::span<const Term> xs, std::span<const Term> ts) {
  Formula out;
  for (std::size_t i = xs.size(); i-- > 0;) {
    Formula e = Formula::eq(xs[i], ts[i]);
    out = out ? Formula::conj(e, out) : e;
  }
  return out;
}

}  // namespace

std::optional<Abstraction> synthesize_obvious_invariant(const AsyncSeq& seq, std::size_t target) {
  const Formula& atom = target_atom(seq, target);
  if (atom.has_mvar() || seq.rhs.has_mvar()) return std::nullopt;
  std::vector<Formula> rest;
  for (std::size_t i = 0; i < seq.workbench.size(); ++i) {
    if (i == target) continue;
    if (seq.workbench[i].has_mvar()) return std::nullopt;
    rest.push_back(seq.workbench[i]);
  }

  Formula g = seq.rhs;
  for (auto it = rest.rbegin(); it != rest.rend(); ++it) g = Formula::imp(*it, g);

  const auto args = atom.args();
  std::vector<Term> xs;
  for (std::size_t i = 0; i < args.size(); ++i) xs.push_back(fresh_evar(0));
  if (!xs.empty()) g = Formula::imp(equations(xs, args), g);

  std::vector<Term> zs;
  for (const auto& t : args) collect_evars(t, zs);
  for (const auto& f : rest) collect_evars(f, zs);
  collect_evars(seq.rhs, zs);
  for (auto it = zs.rbegin(); it != zs.rend(); ++it) g = Formula::all(abstract_evar(g, it->var_id()));
  for (const auto& x : xs) g = abstract_evar(g, x.var_id());
  return Abstraction{static_cast<uint32_t>(xs.size()), g};
}

InductionPremises apply_explicit_induction(const DefTable& defs, const AsyncSeq& seq, std::size_t target,
                                           const Abstraction& invariant) {
  const Formula& atom = target_atom(seq, target);
  const Definition& d = defs.at(atom.def());
  if (invariant.arity != d.arity()) throw StructuralError("invariant arity differs from the definition's");

  InductionPremises out;
  out.main = seq;
  out.main.workbench[target] = invariant.apply(atom.args());
  for (uint32_t i = 0; i < d.arity(); ++i) out.fresh.push_back(fresh_evar(seq.level + 1));
  out.invariance.workbench = {unfold_with(d, out.fresh, [&](std::span<const Term> u) { return invariant.apply(u); })};
  out.invariance.rhs = invariant.apply(out.fresh);
  out.invariance.level = seq.level + 1;
  return out;
}

AsyncSeq obvious_invariance_premise(const Definition& def, const Abstraction& invariant,
                                    std::span<const Term> fresh, uint32_t level) {
  if (invariant.arity != def.arity() || fresh.size() != def.arity())
    throw StructuralError("invariant arity differs from the definition's");
  AsyncSeq out;
  out.workbench = {unfold_with(def, fresh, [&](std::span<const Term> u) {
    return Formula::conj(Formula::mu(def.name, std::vector<Term>(u.begin(), u.end())), invariant.apply(u));
  })};
  out.rhs = invariant.apply(fresh);
  out.level = level;
  return out;
}

}  // namespace acheck
