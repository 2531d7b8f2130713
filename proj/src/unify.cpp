#include "acheck/unify.hpp"

#include <algorithm>

namespace acheck {

Checkpoint BindingStore::mark() const {
  if (trail_.empty()) return {0, 0};
  return {trail_.size(), trail_.back().stamp};
}

void BindingStore::undo(Checkpoint cp) {
  if (cp.position > trail_.size()) throw StructuralError("stale checkpoint: trail already undone past it");
  if (cp.position > 0 && trail_[cp.position - 1].stamp != cp.stamp)
    throw StructuralError("stale checkpoint: trail was rewritten since it was taken");
  while (trail_.size() > cp.position) {
    const Entry& e = trail_.back();
    if (!e.lowering)
      bindings_.erase(e.id);
    else if (e.had_previous)
      lowered_[e.id] = e.previous_level;
    else
      lowered_.erase(e.id);
    trail_.pop_back();
  }
}

Term BindingStore::walk(const Term& t) const {
  Term cur = t;
  while (cur.is_mvar()) {
    auto it = bindings_.find(cur.var_id());
    if (it == bindings_.end()) break;
    cur = it->second;
  }
  return cur;
}

Term BindingStore::resolve(const Term& t) const {
  if (!t.has_mvar() || bindings_.empty()) return t;
  Term w = walk(t);
  if (w.is_mvar()) return w;
  if (!w.is_app() || !w.has_mvar()) return w;
  std::vector<Term> args;
  args.reserve(w.args().size());
  bool changed = false;
  for (const auto& a : w.args()) {
    args.push_back(resolve(a));
    changed |= !args.back().same_node(a);
  }
  return changed ? Term::app(w.head(), std::move(args)) : w;
}

Formula BindingStore::resolve(const Formula& f) const {
  if (!f.has_mvar() || bindings_.empty()) return f;
  return map_terms(f, [&](const Term& t, uint32_t) { return resolve(t); });
}

std::optional<Term> BindingStore::binding(uint64_t mvar_id) const {
  auto it = bindings_.find(mvar_id);
  if (it == bindings_.end()) return std::nullopt;
  return it->second;
}

uint32_t BindingStore::level_of(const Term& mvar) const {
  auto it = lowered_.find(mvar.var_id());
  return it == lowered_.end() ? mvar.level() : it->second;
}

bool operator==(const BindingStore& a, const BindingStore& b) {
  if (a.trail_.size() != b.trail_.size() || a.bindings_.size() != b.bindings_.size() ||
      a.lowered_ != b.lowered_)
    return false;
  for (std::size_t i = 0; i < a.trail_.size(); ++i)
    if (a.trail_[i].id != b.trail_[i].id || a.trail_[i].lowering != b.trail_[i].lowering) return false;
  for (const auto& [id, t] : a.bindings_) {
    auto it = b.bindings_.find(id);
    if (it == b.bindings_.end() || !(it->second == t)) return false;
  }
  return true;
}

bool BindingStore::unify(const Term& a, const Term& b) {
  Checkpoint cp = mark();
  if (unify_rec(a, b)) return true;
  undo(cp);
  return false;
}

bool BindingStore::unify_rec(const Term& a, const Term& b) {
  Term x = walk(a), y = walk(b);
  if (x.same_node(y)) return true;
  if (x.is_bvar() || y.is_bvar()) throw StructuralError("unify on a term with a loose bound variable");
  if (x.is_mvar() && y.is_mvar()) {
    if (x.var_id() == y.var_id()) return true;
    // Bind the more deeply scoped variable so the survivor has the wider scope.
    if (level_of(x) < level_of(y)) std::swap(x, y);
    return bind(x, y);
  }
  if (x.is_mvar()) return bind(x, y);
  if (y.is_mvar()) return bind(y, x);
  if (x.is_evar() || y.is_evar()) return x.is_evar() && y.is_evar() && x.var_id() == y.var_id();
  if (x.head() != y.head() || x.args().size() != y.args().size()) return false;
  for (std::size_t i = 0; i < x.args().size(); ++i)
    if (!unify_rec(x.args()[i], y.args()[i])) return false;
  return true;
}

bool BindingStore::occurs_or_escapes(uint64_t id, uint32_t level, const Term& t, std::vector<Term>& to_lower) const {
  Term w = walk(t);
  switch (w.kind()) {
    case Term::Kind::BVar: throw StructuralError("binding a metavariable to a loose bound variable");
    case Term::Kind::EVar: return w.level() > level;
    case Term::Kind::MVar:
      if (w.var_id() == id) return true;
      if (level_of(w) > level &&
          std::none_of(to_lower.begin(), to_lower.end(), [&](const Term& m) { return m.var_id() == w.var_id(); }))
        to_lower.push_back(w);
      return false;
    case Term::Kind::App:
      for (const auto& a : w.args())
        if (occurs_or_escapes(id, level, a, to_lower)) return true;
      return false;
  }
  return false;
}

bool BindingStore::bind(const Term& mvar, const Term& value) {
  std::vector<Term> to_lower;
  const uint32_t level = level_of(mvar);
  if (occurs_or_escapes(mvar.var_id(), level, value, to_lower)) return false;
  // Metavariables of narrower scope inside the value inherit this scope.
  for (const auto& m : to_lower) {
    auto it = lowered_.find(m.var_id());
    Entry e{m.var_id(), next_stamp_++, true, it == lowered_.end() ? 0u : it->second, it != lowered_.end()};
    lowered_[m.var_id()] = level;
    trail_.push_back(e);
  }
  bindings_.emplace(mvar.var_id(), value);
  trail_.push_back({mvar.var_id(), next_stamp_++, false, 0, false});
  return true;
}

namespace {

Term apply_subst(const Term& t, const std::unordered_map<uint64_t, Term>& s) { return replace_evars(t, s); }

bool eigen_rec(const Term& a, const Term& b, std::unordered_map<uint64_t, Term>& s) {
  Term x = apply_subst(a, s), y = apply_subst(b, s);
  if (x.has_mvar() || y.has_mvar()) throw StructuralError("equality-left on a term with metavariables");
  if (x == y) return true;
  if (!x.is_evar() && y.is_evar()) std::swap(x, y);
  if (x.is_evar()) {
    if (occurs_evar(y, x.var_id())) return false;
    std::unordered_map<uint64_t, Term> one{{x.var_id(), y}};
    for (auto& [id, t] : s) t = replace_evars(t, one);
    s.emplace(x.var_id(), y);
    return true;
  }
  if (!x.is_app() || !y.is_app()) throw StructuralError("equality-left on a term with a loose bound variable");
  if (x.head() != y.head() || x.args().size() != y.args().size()) return false;
  for (std::size_t i = 0; i < x.args().size(); ++i)
    if (!eigen_rec(x.args()[i], y.args()[i], s)) return false;
  return true;
}

}  // namespace

EigenUnifier unify_eigen(const Term& a, const Term& b) {
  EigenUnifier out;
  if (!eigen_rec(a, b, out.subst)) {
    out.clash = true;
    out.subst.clear();
  }
  return out;
}

}  // namespace acheck
