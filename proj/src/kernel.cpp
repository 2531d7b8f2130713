#include "acheck/kernel.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "acheck/unify.hpp"

namespace acheck {

namespace {

struct OutOfSteps {};
struct Cut {
  uint64_t id;
};

// Proves whatever is left to do after the current subgoal.
using Cont = std::function<bool()>;

bool is_frozen(const StoreEntry& e) { return e.formula.kind() == Formula::Kind::Mu; }

TraceNode* emit(TraceNode* slot, Rule rule, Formula principal, std::size_t children,
                std::vector<Term> terms = {}, std::optional<Index> index = std::nullopt) {
  *slot = TraceNode{rule, std::move(principal), std::move(terms), index, std::nullopt,
                    std::vector<TraceNode>(children)};
  return slot;
}

/// The workbench with its first formula replaced by `front`.
AsyncSeq replace_front(const AsyncSeq& s, std::initializer_list<Formula> front) {
  AsyncSeq out;
  out.hyps = s.hyps;
  out.workbench.reserve(s.workbench.size() + front.size());
  out.workbench.insert(out.workbench.end(), front.begin(), front.end());
  out.workbench.insert(out.workbench.end(), s.workbench.begin() + 1, s.workbench.end());
  out.rhs = s.rhs;
  out.rhs_stored = s.rhs_stored;
  out.level = s.level;
  return out;
}

AsyncSeq map_seq(const AsyncSeq& s, const std::function<Formula(const Formula&)>& fn) {
  AsyncSeq out = s;
  for (auto& h : out.hyps) h.formula = fn(h.formula);
  for (auto& f : out.workbench) f = fn(f);
  out.rhs = fn(out.rhs);
  return out;
}

bool seq_has_mvar(const AsyncSeq& s) {
  for (const auto& h : s.hyps)
    if (h.formula.has_mvar()) return true;
  for (const auto& f : s.workbench)
    if (f.has_mvar()) return true;
  return s.rhs.has_mvar();
}

void resolve_trace(TraceNode& n, const BindingStore& store) {
  if (n.principal) n.principal = store.resolve(n.principal);
  for (auto& t : n.terms) t = store.resolve(t);
  if (n.invariant) n.invariant->body = store.resolve(n.invariant->body);
  for (auto& c : n.children) resolve_trace(c, store);
}

class Search {
public:
  Search(const DefTable& defs, const LemmaTable& lemmas, const FpcDefinition& fpc, const ResourceLimits& limits)
      : defs_(defs), lemmas_(lemmas), fpc_(fpc), limits_(limits) {}

  bool run(const Sequent& seq, const Cert& cert, TraceNode* root) {
    const Cont done = [] { return true; };
    return std::visit([&](const auto& s) { return solve(s, cert, root, done); }, seq);
  }

  BindingStore store;
  uint64_t steps = 0;
  uint64_t hygiene_violations = 0;

private:
  // Remembers the store at a choice point. Undoing to the mark must give
  // back exactly the store the choice point found; with hygiene checks on,
  // that is compared against a full copy.
  class ChoicePoint {
  public:
    explicit ChoicePoint(Search& s) : s_(s), cp_(s.store.mark()) {
      if (s.limits_.hygiene_checks) snapshot_ = s.store;
    }
    void restore() {
      s_.store.undo(cp_);
      if (snapshot_ && !(s_.store == *snapshot_)) ++s_.hygiene_violations;
    }

  private:
    Search& s_;
    Checkpoint cp_;
    std::optional<BindingStore> snapshot_;
  };

  template <class Alts, class Fn>
  bool each(const Alts& alts, Fn&& fn) {
    if (alts.empty()) return false;
    ChoicePoint cp(*this);
    for (const auto& a : alts) {
      if (fn(a)) return true;
      cp.restore();
    }
    return false;
  }

  void tick() {
    if (++steps > limits_.max_steps) throw OutOfSteps{};
  }

  Term witness(const TermChoice& choice, uint32_t level) const {
    if (!choice) return fresh_mvar(level);
    if (choice->has_bvar()) throw StructuralError("expert supplied a term with a loose bound variable");
    return *choice;
  }

  bool index_taken(const AsyncSeq& s, const Index& idx) const {
    if (idx.is_lemma()) return true;
    for (const auto& h : s.hyps)
      if (h.index == idx) return true;
    return false;
  }

  std::optional<Formula> lookup(const std::vector<StoreEntry>& hyps, const Index& idx) const {
    if (idx.is_lemma()) {
      for (const auto& l : lemmas_)
        if (l.name == idx.lemma) return l.formula;
      return std::nullopt;
    }
    for (const auto& h : hyps)
      if (h.index == idx) return h.formula;
    return std::nullopt;
  }

  bool ground(const Formula& f) const { return !f.has_mvar() || !store.resolve(f).has_mvar(); }
  bool ground(const std::vector<StoreEntry>& hyps) const {
    return std::all_of(hyps.begin(), hyps.end(), [&](const StoreEntry& h) { return ground(h.formula); });
  }
  bool ground(const AsyncSeq& s) const {
    return ground(s.hyps) && ground(s.rhs) &&
           std::all_of(s.workbench.begin(), s.workbench.end(), [&](const Formula& f) { return ground(f); });
  }
  bool ground(const LeftFocusSeq& s) const { return ground(s.hyps) && ground(s.focus) && ground(s.goal); }
  bool ground(const RightFocusSeq& s) const { return ground(s.hyps) && ground(s.focus); }

  // A subgoal without metavariables shares nothing with the rest of the
  // proof. Once the continuation has failed after one proof of it, no other
  // proof of it can help, so the remaining alternatives are cut.
  template <class Seq>
  bool solve(const Seq& s, const Cert& c, TraceNode* slot, const Cont& k) {
    tick();
    if (!ground(s)) return step(s, c, slot, k);
    const uint64_t id = ++next_cut_;
    const Checkpoint cp = store.mark();
    const Cont guarded = [&k, id] {
      if (k()) return true;
      throw Cut{id};
    };
    try {
      return step(s, c, slot, guarded);
    } catch (const Cut& cut) {
      if (cut.id != id) throw;
      store.undo(cp);
      return false;
    }
  }

  // --- invertible phase ---------------------------------------------------

  bool step(const AsyncSeq& s, const Cert& c, TraceNode* slot, const Cont& k) {
    if (!s.workbench.empty()) return async_left(s, c, slot, k);
    if (!s.rhs_stored) return async_right(s, c, slot, k);
    return decide(s, c, slot, k);
  }

  bool async_left(const AsyncSeq& s, const Cert& c, TraceNode* slot, const Cont& k) {
    const Formula f = s.workbench.front();
    switch (f.kind()) {
      case Formula::Kind::True:
        return each(fpc_.true_left_clerk(c), [&](const Cert& c1) {
          emit(slot, Rule::TrueL, f, 1);
          return solve(replace_front(s, {}), c1, &slot->children[0], k);
        });
      case Formula::Kind::False:
        return each(fpc_.false_left_clerk(c), [&](const Cert&) {
          emit(slot, Rule::FalseL, f, 0);
          return k();
        });
      case Formula::Kind::And:
        return each(fpc_.and_left_clerk(c), [&](const Cert& c1) {
          emit(slot, Rule::AndL, f, 1);
          return solve(replace_front(s, {f.left(), f.right()}), c1, &slot->children[0], k);
        });
      case Formula::Kind::Or:
        return each(fpc_.or_left_clerk(c), [&](const std::pair<Cert, Cert>& cs) {
          TraceNode* n = emit(slot, Rule::OrL, f, 2);
          const AsyncSeq second = replace_front(s, {f.right()});
          return solve(replace_front(s, {f.left()}), cs.first, &n->children[0],
                       [&] { return solve(second, cs.second, &n->children[1], k); });
        });
      case Formula::Kind::Ex:
        return each(fpc_.exists_left_clerk(c), [&](const Cert& c1) {
          Term y = fresh_evar(s.level + 1);
          emit(slot, Rule::ExL, f, 1, {y});
          AsyncSeq p = replace_front(s, {open_binder(f, y)});
          p.level = s.level + 1;
          return solve(p, c1, &slot->children[0], k);
        });
      case Formula::Kind::Eq: return eq_left(s, c, slot, k);
      case Formula::Kind::Mu: return mu_left(s, c, slot, k);
      case Formula::Kind::Imp:
      case Formula::Kind::All:
        return each(fpc_.store_clerk(c), [&](const std::pair<Cert, Index>& ci) {
          if (index_taken(s, ci.second)) return false;
          emit(slot, Rule::StoreL, f, 1, {}, ci.second);
          AsyncSeq p = replace_front(s, {});
          p.hyps.push_back({ci.second, f});
          return solve(p, ci.first, &slot->children[0], k);
        });
    }
    return false;
  }

  bool eq_left(const AsyncSeq& s0, const Cert& c, TraceNode* slot, const Cont& k) {
    return each(fpc_.eq_left_clerk(c), [&](const Cert& c1) {
      // Eigenvariables get instantiated here; that is only sound once no
      // metavariable can still depend on them.
      const AsyncSeq s = map_seq(s0, [&](const Formula& f) { return store.resolve(f); });
      if (seq_has_mvar(s)) return false;
      const Formula eq = s.workbench.front();
      const EigenUnifier u = unify_eigen(eq.lhs(), eq.rhs());
      if (u.clash) {
        emit(slot, Rule::EqL, eq, 0);
        return k();
      }
      emit(slot, Rule::EqL, eq, 1);
      AsyncSeq p = map_seq(replace_front(s, {}), [&](const Formula& f) { return replace_evars(f, u.subst); });
      return solve(p, c1, &slot->children[0], k);
    });
  }

  bool mu_left(const AsyncSeq& s, const Cert& c, TraceNode* slot, const Cont& k) {
    const Formula atom = s.workbench.front();
    const Definition& d = defs_.at(atom.def());
    ChoicePoint cp(*this);

    for (const auto& [c1, idx] : fpc_.store_clerk(c)) {
      if (index_taken(s, idx)) continue;
      emit(slot, Rule::Freeze, atom, 1, {}, idx);
      AsyncSeq p = replace_front(s, {});
      p.hyps.push_back({idx, atom});
      if (solve(p, c1, &slot->children[0], k)) return true;
      cp.restore();
    }

    for (const auto& c1 : fpc_.unfold_left_expert(c)) {
      emit(slot, Rule::UnfoldL, atom, 1);
      if (solve(replace_front(s, {unfold_mu(d, atom.args())}), c1, &slot->children[0], k)) return true;
      cp.restore();
    }

    for (const auto& alt : fpc_.ind_expert(c)) {
      if (std::holds_alternative<ObviousInvariant>(alt.invariant)) {
        const AsyncSeq r = map_seq(s, [&](const Formula& f) { return store.resolve(f); });
        const auto inv = synthesize_obvious_invariant(r, 0);
        if (!inv) continue;
        std::vector<Term> ys;
        for (uint32_t i = 0; i < d.arity(); ++i) ys.push_back(fresh_evar(s.level + 1));
        TraceNode* n = emit(slot, Rule::ObviousInd, r.workbench.front(), 1, ys);
        n->invariant = *inv;
        if (solve(obvious_invariance_premise(d, *inv, ys, s.level + 1), alt.invariance, &n->children[0], k))
          return true;
      } else {
        const Abstraction& inv = std::get<Abstraction>(alt.invariant);
        const InductionPremises prem = apply_explicit_induction(defs_, s, 0, inv);
        TraceNode* n = emit(slot, Rule::Ind, atom, 2, prem.fresh);
        n->invariant = inv;
        if (solve(prem.main, alt.left, &n->children[0],
                  [&] { return solve(prem.invariance, alt.invariance, &n->children[1], k); }))
          return true;
      }
      cp.restore();
    }
    return false;
  }

  bool async_right(const AsyncSeq& s, const Cert& c, TraceNode* slot, const Cont& k) {
    const Formula r = s.rhs;
    switch (r.kind()) {
      case Formula::Kind::Imp:
        return each(fpc_.imp_right_clerk(c), [&](const Cert& c1) {
          emit(slot, Rule::ImpR, r, 1);
          AsyncSeq p = s;
          p.workbench = {r.left()};
          p.rhs = r.right();
          return solve(p, c1, &slot->children[0], k);
        });
      case Formula::Kind::All:
        return each(fpc_.all_right_clerk(c), [&](const Cert& c1) {
          Term y = fresh_evar(s.level + 1);
          emit(slot, Rule::AllR, r, 1, {y});
          AsyncSeq p = s;
          p.rhs = open_binder(r, y);
          p.level = s.level + 1;
          return solve(p, c1, &slot->children[0], k);
        });
      default: {
        emit(slot, Rule::StoreR, r, 1);
        AsyncSeq p = s;
        p.rhs_stored = true;
        return solve(p, c, &slot->children[0], k);
      }
    }
  }

  bool decide(const AsyncSeq& s, const Cert& c, TraceNode* slot, const Cont& k) {
    ChoicePoint cp(*this);
    for (const auto& c1 : fpc_.decide_right_expert(c)) {
      emit(slot, Rule::DecideR, s.rhs, 1);
      if (solve(RightFocusSeq{s.hyps, s.rhs, s.level}, c1, &slot->children[0], k)) return true;
      cp.restore();
    }

    std::vector<Index> candidates;
    for (const auto& l : lemmas_)
      if (polarity_of(l.formula) == Polarity::Neg) candidates.push_back(Index::lemma_name(l.name));
    for (const auto& h : s.hyps)
      if (polarity_of(h.formula) == Polarity::Neg) candidates.push_back(h.index);

    for (const auto& [c1, idx] : fpc_.decide_expert(c, candidates)) {
      const auto f = lookup(s.hyps, idx);
      if (!f || polarity_of(*f) != Polarity::Neg) continue;
      emit(slot, Rule::Decide, *f, 1, {}, idx);
      if (solve(LeftFocusSeq{s.hyps, *f, s.rhs, s.level}, c1, &slot->children[0], k)) return true;
      cp.restore();
    }
    return false;
  }

  // --- left focus ---------------------------------------------------------

  bool step(const LeftFocusSeq& s, const Cert& c, TraceNode* slot, const Cont& k) {
    const Formula& f = s.focus;
    switch (f.kind()) {
      case Formula::Kind::All:
        return each(fpc_.some_expert(c), [&](const std::pair<Cert, TermChoice>& ct) {
          Term t = witness(ct.second, s.level);
          emit(slot, Rule::AllL, f, 1, {t});
          return solve(LeftFocusSeq{s.hyps, open_binder(f, t), s.goal, s.level}, ct.first, &slot->children[0], k);
        });
      case Formula::Kind::Imp:
        return each(fpc_.imp_left_expert(c), [&](const std::pair<Cert, Cert>& cs) {
          TraceNode* n = emit(slot, Rule::ImpL, f, 2);
          const LeftFocusSeq rest{s.hyps, f.right(), s.goal, s.level};
          return solve(RightFocusSeq{s.hyps, f.left(), s.level}, cs.first, &n->children[0],
                       [&] { return solve(rest, cs.second, &n->children[1], k); });
        });
      default: {
        emit(slot, Rule::ReleaseL, f, 1);
        AsyncSeq p{s.hyps, {f}, s.goal, true, s.level};
        return solve(p, c, &slot->children[0], k);
      }
    }
  }

  // --- right focus --------------------------------------------------------

  bool step(const RightFocusSeq& s, const Cert& c, TraceNode* slot, const Cont& k) {
    const Formula& f = s.focus;
    switch (f.kind()) {
      case Formula::Kind::True:
        return each(fpc_.true_expert(c), [&](const Cert&) {
          emit(slot, Rule::TrueR, f, 0);
          return k();
        });
      case Formula::Kind::False: return false;
      case Formula::Kind::And:
        return each(fpc_.and_expert(c), [&](const std::pair<Cert, Cert>& cs) {
          TraceNode* n = emit(slot, Rule::AndR, f, 2);
          const RightFocusSeq second{s.hyps, f.right(), s.level};
          return solve(RightFocusSeq{s.hyps, f.left(), s.level}, cs.first, &n->children[0],
                       [&] { return solve(second, cs.second, &n->children[1], k); });
        });
      case Formula::Kind::Or:
        return each(fpc_.or_expert(c), [&](const std::pair<Cert, Side>& cs) {
          const bool left = cs.second == Side::Left;
          emit(slot, left ? Rule::OrR1 : Rule::OrR2, f, 1);
          return solve(RightFocusSeq{s.hyps, left ? f.left() : f.right(), s.level}, cs.first, &slot->children[0], k);
        });
      case Formula::Kind::Ex:
        return each(fpc_.some_expert(c), [&](const std::pair<Cert, TermChoice>& ct) {
          Term t = witness(ct.second, s.level);
          emit(slot, Rule::ExR, f, 1, {t});
          return solve(RightFocusSeq{s.hyps, open_binder(f, t), s.level}, ct.first, &slot->children[0], k);
        });
      case Formula::Kind::Eq: {
        ChoicePoint cp(*this);
        if (!store.unify(f.lhs(), f.rhs())) return false;
        emit(slot, Rule::EqR, f, 0);
        if (k()) return true;
        cp.restore();
        return false;
      }
      case Formula::Kind::Mu: return mu_right(s, c, slot, k);
      case Formula::Kind::Imp:
      case Formula::Kind::All: {
        emit(slot, Rule::ReleaseR, f, 1);
        AsyncSeq p{s.hyps, {}, f, false, s.level};
        return solve(p, c, &slot->children[0], k);
      }
    }
    return false;
  }

  bool unify_args(std::span<const Term> a, std::span<const Term> b) {
    const Checkpoint cp = store.mark();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!store.unify(a[i], b[i])) {
        store.undo(cp);
        return false;
      }
    }
    return true;
  }

  bool mu_right(const RightFocusSeq& s, const Cert& c, TraceNode* slot, const Cont& k) {
    const Formula& f = s.focus;
    ChoicePoint cp(*this);
    for (const auto& choice : fpc_.initial_expert(c)) {
      const Index* named = std::get_if<Index>(&choice);
      for (const auto& h : s.hyps) {
        if (!is_frozen(h) || h.formula.def() != f.def()) continue;
        if (named && !(*named == h.index)) continue;
        if (!unify_args(h.formula.args(), f.args())) continue;
        emit(slot, Rule::Init, f, 0, {}, h.index);
        if (k()) return true;
        cp.restore();
      }
    }
    const Definition& d = defs_.at(f.def());
    for (const auto& c1 : fpc_.unfold_right_expert(c)) {
      emit(slot, Rule::UnfoldR, f, 1);
      if (solve(RightFocusSeq{s.hyps, unfold_mu(d, f.args()), s.level}, c1, &slot->children[0], k)) return true;
      cp.restore();
    }
    return false;
  }

  const DefTable& defs_;
  const LemmaTable& lemmas_;
  const FpcDefinition& fpc_;
  const ResourceLimits& limits_;
  uint64_t next_cut_ = 0;
};

}  // namespace

CheckResult check(const DefTable& defs, const LemmaTable& lemmas, const Formula& goal, const Cert& cert,
                  const FpcDefinition& fpc, const ResourceLimits& limits) {
  if (!goal || has_loose_bvars(goal) || goal.has_evar() || goal.has_mvar())
    throw std::invalid_argument("goal is not closed");
  AsyncSeq s;
  s.rhs = goal;
  return check_sequent(defs, lemmas, s, cert, fpc, limits);
}

CheckResult check_sequent(const DefTable& defs, const LemmaTable& lemmas, const Sequent& seq, const Cert& cert,
                          const FpcDefinition& fpc, const ResourceLimits& limits) {
  CheckResult out;
  std::vector<Sym> names;
  for (const auto& l : lemmas) names.push_back(l.name);
  if (auto err = fpc.validate(cert, names)) {
    out.diagnostic = *err;
    return out;
  }

  uint64_t spent = 0;
  for (const Cert& attempt : fpc.schedule(cert)) {
    ResourceLimits left = limits;
    left.max_steps = limits.max_steps - spent;
    Search search(defs, lemmas, fpc, left);
    TraceNode root;
    bool ok = false;
    try {
      ok = search.run(seq, attempt, &root);
    } catch (const OutOfSteps&) {
      out.verdict = Verdict::OutOfBudget;
      out.steps = spent + search.steps;
      out.hygiene_violations += search.hygiene_violations;
      out.diagnostic = "step limit of " + std::to_string(limits.max_steps) + " exceeded";
      return out;
    }
    spent += search.steps;
    out.steps = spent;
    out.hygiene_violations += search.hygiene_violations;
    if (!ok) continue;
    resolve_trace(root, search.store);
    out.verdict = Verdict::Accepted;
    out.trace = std::move(root);
    return out;
  }
  out.diagnostic = "no proof within the certificate's bounds";
  return out;
}

}  // namespace acheck
