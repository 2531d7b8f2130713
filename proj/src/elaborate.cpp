#include <algorithm>
#include <map>

#include "acheck/frontend.hpp"

namespace acheck {

namespace {

// Variables of the surface syntax: binder names map to de Bruijn indices,
// free names (clause variables, definition slots) to eigenvariables.
class Converter {
public:
  Converter(const Signature& sig, std::map<std::string, Term>* free_vars, std::vector<Term>* introduced)
      : sig_(sig), free_(free_vars), introduced_(introduced) {}

  Term term(const STerm& t) {
    for (std::size_t i = bound_.size(); i-- > 0;)
      if (bound_[i] == t.head) return Term::bvar(static_cast<uint32_t>(bound_.size() - 1 - i));
    const Sym head = Sym::intern(t.head);
    if (sig_.constructor(head)) {
      std::vector<Term> args;
      for (const auto& a : t.args) args.push_back(term(a));
      return Term::app(head, std::move(args));
    }
    if (!free_) throw ParseError(t.pos, "unknown symbol '" + t.head + "'");
    auto it = free_->find(t.head);
    if (it != free_->end()) return it->second;
    Term e = fresh_evar(0);
    free_->emplace(t.head, e);
    introduced_->push_back(e);
    return e;
  }

  Formula formula(const SFormula& f) {
    switch (f.kind) {
      case SFormula::Kind::True: return Formula::tt();
      case SFormula::Kind::False: return Formula::ff();
      case SFormula::Kind::Eq: return Formula::eq(term(f.terms[0]), term(f.terms[1]));
      case SFormula::Kind::Atom: {
        std::vector<Term> args;
        for (const auto& a : f.terms) args.push_back(term(a));
        return Formula::mu(Sym::intern(f.pred), std::move(args));
      }
      case SFormula::Kind::And: return Formula::conj(formula(f.subs[0]), formula(f.subs[1]));
      case SFormula::Kind::Or: return Formula::disj(formula(f.subs[0]), formula(f.subs[1]));
      case SFormula::Kind::Imp: return Formula::imp(formula(f.subs[0]), formula(f.subs[1]));
      case SFormula::Kind::All:
      case SFormula::Kind::Ex: {
        for (const auto& b : f.binders) bound_.push_back(b);
        Formula body = formula(f.subs[0]);
        for (std::size_t i = 0; i < f.binders.size(); ++i) {
          bound_.pop_back();
          body = f.kind == SFormula::Kind::All ? Formula::all(body) : Formula::ex(body);
        }
        return body;
      }
    }
    return Formula::tt();
  }

private:
  const Signature& sig_;
  std::map<std::string, Term>* free_;
  std::vector<Term>* introduced_;
  std::vector<std::string> bound_;
};

bool mentions(const SFormula& f, const std::string& pred) {
  if (f.kind == SFormula::Kind::Atom) return f.pred == pred;
  return std::any_of(f.subs.begin(), f.subs.end(), [&](const SFormula& s) { return mentions(s, pred); });
}

// Only positive connectives are admitted in definition bodies.
void check_positive(const SFormula& f, const std::string& self) {
  if (f.kind == SFormula::Kind::Imp) {
    if (mentions(f.subs[0], self)) throw ParseError(f.pos, "non-positive recursion in the definition of '" + self + "'");
    throw ParseError(f.pos, "implication in the body of '" + self + "' (only positive bodies are supported)");
  }
  if (f.kind == SFormula::Kind::All)
    throw ParseError(f.pos, "universal quantifier in the body of '" + self + "' (only positive bodies are supported)");
  for (const auto& s : f.subs) check_positive(s, self);
}

Formula fold_right(const std::vector<Formula>& xs, Formula (*op)(Formula, Formula), Formula empty) {
  if (xs.empty()) return empty;
  Formula out = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) out = op(xs[i], out);
  return out;
}

}  // namespace

Definition compile_definition(const DefineDecl& d, const Signature& sig, const DefTable&) {
  const Sym self = Sym::intern(d.name);
  const std::size_t n = d.arg_sorts.size();
  std::vector<Term> slots;
  for (std::size_t j = 0; j < n; ++j) slots.push_back(fresh_evar(0));

  std::vector<Formula> disjuncts;
  for (const auto& clause : d.clauses) {
    if (clause.body) check_positive(*clause.body, d.name);
    std::map<std::string, Term> vars;
    std::vector<Term> existentials;
    Converter conv(sig, &vars, &existentials);

    std::vector<Formula> parts;
    for (std::size_t j = 0; j < n; ++j) {
      const STerm& h = clause.head.terms[j];
      const bool variable = h.args.empty() && !sig.constructor(Sym::intern(h.head));
      if (variable && !vars.count(h.head)) {
        vars.emplace(h.head, slots[j]);
      } else if (variable) {
        parts.push_back(Formula::eq(vars.at(h.head), slots[j]));
      } else {
        parts.push_back(Formula::eq(slots[j], conv.term(h)));
      }
    }
    if (clause.body) parts.push_back(conv.formula(*clause.body));

    Formula f = fold_right(parts, &Formula::conj, Formula::tt());
    for (auto it = existentials.rbegin(); it != existentials.rend(); ++it)
      f = Formula::ex(abstract_evar(f, it->var_id()));
    disjuncts.push_back(f);
  }

  Formula body = fold_right(disjuncts, &Formula::disj, Formula::ff());
  for (const auto& x : slots) body = abstract_evar(body, x.var_id());

  Definition def;
  def.name = self;
  for (const auto& s : d.arg_sorts) def.arg_sorts.push_back(Sym::intern(s));
  def.body = Abstraction{static_cast<uint32_t>(n), body};
  return def;
}

Theory elaborate(const TheoremFile& file) {
  Theory th;
  for (const auto& decl : file.decls) {
    if (const auto* k = std::get_if<KindDecl>(&decl)) {
      for (const auto& n : k->names) th.sig.add_sort(Sym::intern(n));
    } else if (const auto* t = std::get_if<TypeDecl>(&decl)) {
      std::vector<Sym> args;
      for (const auto& s : t->arg_sorts) args.push_back(Sym::intern(s));
      for (const auto& n : t->names) th.sig.add_constructor({Sym::intern(n), args, Sym::intern(t->result)});
    } else if (const auto* d = std::get_if<DefineDecl>(&decl)) {
      th.defs.add(compile_definition(*d, th.sig, th.defs));
    } else if (const auto* thm = std::get_if<TheoremDecl>(&decl)) {
      Converter conv(th.sig, nullptr, nullptr);
      th.theorems.push_back({Sym::intern(thm->name), conv.formula(thm->statement), thm->ship, thm->pos});
    }
  }
  return th;
}

SessionResult run_session(const Theory& theory, const FpcDefinition& fpc, const SessionOptions& options) {
  SessionResult out;
  for (const auto& thm : theory.theorems) {
    TheoremResult r;
    r.name = thm.name;
    r.statement = thm.statement;
    r.lemmas_available = out.lemmas.size();
    if (!thm.ship) {
      r.diagnostic = "no certificate";
    } else {
      try {
        const Cert cert = fpc.parse_certificate(*thm.ship);
        CheckResult c = check(theory.defs, out.lemmas, thm.statement, cert, fpc, options.limits);
        r.verdict = c.verdict;
        r.trace = std::move(c.trace);
        r.steps = c.steps;
        r.diagnostic = std::move(c.diagnostic);
      } catch (const std::invalid_argument& e) {
        r.diagnostic = e.what();
      }
    }
    const bool accepted = r.verdict == Verdict::Accepted;
    if (accepted) out.lemmas.push_back({thm.name, thm.statement});
    out.theorems.push_back(std::move(r));
    if (options.stop_on_failure && !accepted) break;
  }
  return out;
}

}  // namespace acheck
