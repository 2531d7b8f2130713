#include "acheck/kernel.hpp"

#include <algorithm>

#include "acheck/unify.hpp"

namespace acheck {

namespace {

bool evar_occurs_in(const std::vector<StoreEntry>& hyps, const std::vector<Formula>& wb, const Formula& rhs,
                    uint64_t id) {
  for (const auto& h : hyps)
    if (occurs_evar(h.formula, id)) return true;
  for (const auto& f : wb)
    if (occurs_evar(f, id)) return true;
  return rhs && occurs_evar(rhs, id);
}

// Deterministic re-application of recorded rules. No FPC, no search, no
// unification beyond the equality-left mgu which is itself deterministic.
class Replayer {
public:
  Replayer(const DefTable& defs, const LemmaTable& lemmas) : defs_(defs), lemmas_(lemmas) {}

  bool run(const Sequent& s, const TraceNode& n) {
    try {
      return std::visit([&](const auto& seq) { return replay(seq, n); }, s);
    } catch (const StructuralError& e) {
      return fail(std::string("malformed record: ") + e.what());
    }
  }

  std::string diagnostic;

private:
  bool fail(std::string msg) {
    if (diagnostic.empty()) diagnostic = std::move(msg);
    return false;
  }

  bool expect(const TraceNode& n, Rule rule, const Formula& principal, std::size_t children, std::size_t terms = 0) {
    if (n.rule != rule)
      return fail("expected " + std::string(rule_name(rule)) + ", found " + std::string(rule_name(n.rule)));
    if (!n.principal || !(n.principal == principal))
      return fail(std::string(rule_name(rule)) + ": principal formula does not match " + to_string(principal));
    if (n.children.size() != children) return fail(std::string(rule_name(rule)) + ": wrong number of premises");
    if (n.terms.size() != terms) return fail(std::string(rule_name(rule)) + ": wrong number of terms");
    for (const auto& t : n.terms)
      if (!t || t.has_bvar()) return fail(std::string(rule_name(rule)) + ": term with a loose bound variable");
    return true;
  }

  // Every term must be a distinct eigenvariable not yet in the sequent.
  bool fresh(const TraceNode& n, const AsyncSeq& s) {
    for (std::size_t i = 0; i < n.terms.size(); ++i) {
      const Term& y = n.terms[i];
      if (!y.is_evar()) return fail(std::string(rule_name(n.rule)) + ": expected an eigenvariable");
      if (evar_occurs_in(s.hyps, s.workbench, s.rhs, y.var_id()))
        return fail(std::string(rule_name(n.rule)) + ": eigenvariable is not fresh");
      for (std::size_t j = 0; j < i; ++j)
        if (n.terms[j] == y) return fail(std::string(rule_name(n.rule)) + ": eigenvariables not distinct");
    }
    return true;
  }

  bool index_free(const AsyncSeq& s, const TraceNode& n) {
    if (!n.index || n.index->is_lemma()) return fail(std::string(rule_name(n.rule)) + ": missing hypothesis index");
    for (const auto& h : s.hyps)
      if (h.index == *n.index) return fail(std::string(rule_name(n.rule)) + ": index already in use");
    return true;
  }

  static AsyncSeq replace_front(const AsyncSeq& s, std::initializer_list<Formula> front) {
    AsyncSeq out = s;
    out.workbench.erase(out.workbench.begin());
    out.workbench.insert(out.workbench.begin(), front.begin(), front.end());
    return out;
  }

  bool replay(const AsyncSeq& s, const TraceNode& n) {
    if (!s.workbench.empty()) return replay_left(s, n);
    if (!s.rhs_stored) {
      const Formula& r = s.rhs;
      switch (r.kind()) {
        case Formula::Kind::Imp: {
          if (!expect(n, Rule::ImpR, r, 1)) return false;
          AsyncSeq p = s;
          p.workbench = {r.left()};
          p.rhs = r.right();
          return replay(p, n.children[0]);
        }
        case Formula::Kind::All: {
          if (!expect(n, Rule::AllR, r, 1, 1) || !fresh(n, s)) return false;
          AsyncSeq p = s;
          p.rhs = open_binder(r, n.terms[0]);
          return replay(p, n.children[0]);
        }
        default: {
          if (!expect(n, Rule::StoreR, r, 1)) return false;
          AsyncSeq p = s;
          p.rhs_stored = true;
          return replay(p, n.children[0]);
        }
      }
    }
    if (n.rule == Rule::DecideR) {
      if (!expect(n, Rule::DecideR, s.rhs, 1)) return false;
      return replay(RightFocusSeq{s.hyps, s.rhs, s.level}, n.children[0]);
    }
    if (n.rule != Rule::Decide) return fail("expected a decide at the border, found " + std::string(rule_name(n.rule)));
    if (!n.index) return fail("decide: missing index");
    std::optional<Formula> f;
    if (n.index->is_lemma()) {
      for (const auto& l : lemmas_)
        if (l.name == n.index->lemma) f = l.formula;
    } else {
      for (const auto& h : s.hyps)
        if (h.index == *n.index) f = h.formula;
    }
    if (!f) return fail("decide: unknown index " + n.index->to_string());
    if (polarity_of(*f) != Polarity::Neg) return fail("decide: stored formula is not negative");
    if (!expect(n, Rule::Decide, *f, 1)) return false;
    return replay(LeftFocusSeq{s.hyps, *f, s.rhs, s.level}, n.children[0]);
  }

  bool replay_left(const AsyncSeq& s, const TraceNode& n) {
    const Formula f = s.workbench.front();
    switch (f.kind()) {
      case Formula::Kind::True:
        return expect(n, Rule::TrueL, f, 1) && replay(replace_front(s, {}), n.children[0]);
      case Formula::Kind::False: return expect(n, Rule::FalseL, f, 0);
      case Formula::Kind::And:
        return expect(n, Rule::AndL, f, 1) && replay(replace_front(s, {f.left(), f.right()}), n.children[0]);
      case Formula::Kind::Or:
        return expect(n, Rule::OrL, f, 2) && replay(replace_front(s, {f.left()}), n.children[0]) &&
               replay(replace_front(s, {f.right()}), n.children[1]);
      case Formula::Kind::Ex: {
        if (!expect(n, Rule::ExL, f, 1, 1) || !fresh(n, s)) return false;
        return replay(replace_front(s, {open_binder(f, n.terms[0])}), n.children[0]);
      }
      case Formula::Kind::Eq: {
        const bool has_mvar = f.has_mvar() || s.rhs.has_mvar() ||
                              std::any_of(s.hyps.begin(), s.hyps.end(), [](const StoreEntry& h) { return h.formula.has_mvar(); }) ||
                              std::any_of(s.workbench.begin(), s.workbench.end(), [](const Formula& g) { return g.has_mvar(); });
        if (has_mvar) return fail("eqL: sequent still has metavariables");
        const EigenUnifier u = unify_eigen(f.lhs(), f.rhs());
        if (!expect(n, Rule::EqL, f, u.clash ? 0 : 1)) return false;
        if (u.clash) return true;
        AsyncSeq p = replace_front(s, {});
        for (auto& h : p.hyps) h.formula = replace_evars(h.formula, u.subst);
        for (auto& g : p.workbench) g = replace_evars(g, u.subst);
        p.rhs = replace_evars(p.rhs, u.subst);
        return replay(p, n.children[0]);
      }
      case Formula::Kind::Imp:
      case Formula::Kind::All: {
        if (!expect(n, Rule::StoreL, f, 1) || !index_free(s, n)) return false;
        AsyncSeq p = replace_front(s, {});
        p.hyps.push_back({*n.index, f});
        return replay(p, n.children[0]);
      }
      case Formula::Kind::Mu: return replay_mu_left(s, n);
    }
    return fail("unknown formula");
  }

  bool replay_mu_left(const AsyncSeq& s, const TraceNode& n) {
    const Formula f = s.workbench.front();
    const Definition* d = defs_.find(f.def());
    if (!d) return fail("unknown definition " + f.def().name());
    switch (n.rule) {
      case Rule::Freeze: {
        if (!expect(n, Rule::Freeze, f, 1) || !index_free(s, n)) return false;
        AsyncSeq p = replace_front(s, {});
        p.hyps.push_back({*n.index, f});
        return replay(p, n.children[0]);
      }
      case Rule::UnfoldL:
        return expect(n, Rule::UnfoldL, f, 1) && replay(replace_front(s, {unfold_mu(*d, f.args())}), n.children[0]);
      case Rule::ObviousInd: {
        if (!expect(n, Rule::ObviousInd, f, 1, d->arity()) || !fresh(n, s)) return false;
        const auto inv = synthesize_obvious_invariant(s, 0);
        if (!inv) return fail("obviousInd: no invariant for this sequent");
        if (n.invariant && !(*n.invariant == *inv)) return fail("obviousInd: recorded invariant differs");
        return replay(obvious_invariance_premise(*d, *inv, n.terms, s.level + 1), n.children[0]);
      }
      case Rule::Ind: {
        if (!expect(n, Rule::Ind, f, 2, d->arity()) || !fresh(n, s)) return false;
        if (!n.invariant || n.invariant->arity != d->arity()) return fail("ind: missing or ill-sized invariant");
        const Abstraction& inv = *n.invariant;
        AsyncSeq main = s;
        main.workbench[0] = inv.apply(f.args());
        AsyncSeq step;
        step.workbench = {unfold_with(*d, n.terms, [&](std::span<const Term> u) { return inv.apply(u); })};
        step.rhs = inv.apply(n.terms);
        return replay(main, n.children[0]) && replay(step, n.children[1]);
      }
      default: return fail("fixed point on the left: unexpected " + std::string(rule_name(n.rule)));
    }
  }

  bool replay(const LeftFocusSeq& s, const TraceNode& n) {
    const Formula& f = s.focus;
    switch (f.kind()) {
      case Formula::Kind::All:
        return expect(n, Rule::AllL, f, 1, 1) &&
               replay(LeftFocusSeq{s.hyps, open_binder(f, n.terms[0]), s.goal, s.level}, n.children[0]);
      case Formula::Kind::Imp:
        return expect(n, Rule::ImpL, f, 2) && replay(RightFocusSeq{s.hyps, f.left(), s.level}, n.children[0]) &&
               replay(LeftFocusSeq{s.hyps, f.right(), s.goal, s.level}, n.children[1]);
      default:
        return expect(n, Rule::ReleaseL, f, 1) &&
               replay(AsyncSeq{s.hyps, {f}, s.goal, true, s.level}, n.children[0]);
    }
  }

  bool replay(const RightFocusSeq& s, const TraceNode& n) {
    const Formula& f = s.focus;
    switch (f.kind()) {
      case Formula::Kind::True: return expect(n, Rule::TrueR, f, 0);
      case Formula::Kind::False: return fail("false cannot be proved");
      case Formula::Kind::And:
        return expect(n, Rule::AndR, f, 2) && replay(RightFocusSeq{s.hyps, f.left(), s.level}, n.children[0]) &&
               replay(RightFocusSeq{s.hyps, f.right(), s.level}, n.children[1]);
      case Formula::Kind::Or: {
        const bool left = n.rule == Rule::OrR1;
        if (!expect(n, left ? Rule::OrR1 : Rule::OrR2, f, 1)) return false;
        return replay(RightFocusSeq{s.hyps, left ? f.left() : f.right(), s.level}, n.children[0]);
      }
      case Formula::Kind::Ex:
        return expect(n, Rule::ExR, f, 1, 1) &&
               replay(RightFocusSeq{s.hyps, open_binder(f, n.terms[0]), s.level}, n.children[0]);
      case Formula::Kind::Eq:
        if (!expect(n, Rule::EqR, f, 0)) return false;
        return f.lhs() == f.rhs() || fail("eqR: sides differ: " + to_string(f));
      case Formula::Kind::Mu: {
        if (n.rule == Rule::Init) {
          if (!expect(n, Rule::Init, f, 0)) return false;
          if (!n.index) return fail("init: missing index");
          for (const auto& h : s.hyps)
            if (h.index == *n.index) {
              if (h.formula.kind() == Formula::Kind::Mu && h.formula == f) return true;
              return fail("init: hypothesis " + n.index->to_string() + " does not match " + to_string(f));
            }
          return fail("init: unknown index " + n.index->to_string());
        }
        const Definition* d = defs_.find(f.def());
        if (!d) return fail("unknown definition " + f.def().name());
        return expect(n, Rule::UnfoldR, f, 1) &&
               replay(RightFocusSeq{s.hyps, unfold_mu(*d, f.args()), s.level}, n.children[0]);
      }
      case Formula::Kind::Imp:
      case Formula::Kind::All:
        return expect(n, Rule::ReleaseR, f, 1) && replay(AsyncSeq{s.hyps, {}, f, false, s.level}, n.children[0]);
    }
    return fail("unknown formula");
  }

  const DefTable& defs_;
  const LemmaTable& lemmas_;
};

}  // namespace

ReplayResult verify_trace_sequent(const DefTable& defs, const LemmaTable& lemmas, const Sequent& seq,
                                  const TraceNode& trace) {
  Replayer r(defs, lemmas);
  ReplayResult out;
  out.ok = r.run(seq, trace);
  if (!out.ok) out.diagnostic = r.diagnostic.empty() ? "replay failed" : r.diagnostic;
  return out;
}

ReplayResult verify_trace(const DefTable& defs, const LemmaTable& lemmas, const Formula& goal,
                          const TraceNode& trace) {
  AsyncSeq s;
  s.rhs = goal;
  return verify_trace_sequent(defs, lemmas, s, trace);
}

}  // namespace acheck
