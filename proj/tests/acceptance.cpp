// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails.

#include <array>
#include <chrono>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "acheck/oracle.hpp"
#include "acheck/unify.hpp"
#include "support.hpp"

using namespace acheck;
using namespace testing;

namespace {

using Triple = std::array<uint32_t, 3>;

struct Report {
  int failures = 0;
  void line(int n, bool ok, const std::string& what, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++failures;
  }
};

// Accepted proofs collected from every criterion, replayed under criterion 5.
struct Accepted {
  const DefTable* defs;
  LemmaTable lemmas;
  Formula goal;
  TraceNode trace;
};

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Accepted: return "accepted";
    case Verdict::Rejected: return "rejected";
    case Verdict::OutOfBudget: return "out of budget";
  }
  return "?";
}

std::string triple_name(const Triple& t) {
  return "(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]) + ")";
}

bool dominates(const Triple& big, const Triple& small) {
  return big[0] >= small[0] && big[1] >= small[1] && big[2] >= small[2];
}

std::vector<Triple> minimal(const std::set<Triple>& accepted) {
  std::vector<Triple> out;
  for (const auto& t : accepted) {
    bool is_min = true;
    for (const auto& u : accepted)
      if (u != t && dominates(t, u)) is_min = false;
    if (is_min) out.push_back(t);
  }
  return out;
}

// --- criterion 5 helpers ----------------------------------------------------

void collect_nodes(TraceNode& n, std::vector<TraceNode*>& out) {
  out.push_back(&n);
  for (auto& c : n.children) collect_nodes(c, out);
}

// Changes one field of one record. Returns a description.
std::string mutate(TraceNode& root, std::mt19937& rng) {
  std::vector<TraceNode*> nodes;
  collect_nodes(root, nodes);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  while (true) {
    TraceNode& n = *nodes[pick(nodes.size())];
    switch (pick(6)) {
      case 0: {
        Rule other = n.rule;
        while (other == n.rule) other = static_cast<Rule>(pick(static_cast<std::size_t>(Rule::ReleaseR) + 1));
        const std::string d = "rule " + std::string(rule_name(n.rule)) + " -> " + std::string(rule_name(other));
        n.rule = other;
        return d;
      }
      case 1: {
        const Formula other = n.principal == Formula::ff() ? Formula::tt() : Formula::ff();
        n.principal = other;
        return "principal of " + std::string(rule_name(n.rule));
      }
      case 2:
        if (n.terms.empty()) continue;
        n.terms[pick(n.terms.size())] = Term::app(Sym::intern("mutant"));
        return "term of " + std::string(rule_name(n.rule));
      case 3:
        if (!n.index) continue;
        n.index = Index::lemma_name(Sym::intern("mutant"));
        return "index of " + std::string(rule_name(n.rule));
      case 4:
        if (!n.invariant) continue;
        n.invariant->body = Formula::tt();
        return "invariant of " + std::string(rule_name(n.rule));
      case 5:
        if (n.children.empty()) continue;
        n.children.pop_back();
        return "premises of " + std::string(rule_name(n.rule));
    }
  }
}

// --- criterion 7 helpers ----------------------------------------------------

bool unify_replay(uint64_t ops, uint64_t& compared) {
  std::mt19937 rng(97);
  auto pick = [&](unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng); };
  std::vector<Term> mvars, evars;
  for (uint32_t l = 0; l < 3; ++l) {
    mvars.push_back(fresh_mvar(l));
    mvars.push_back(fresh_mvar(l));
    evars.push_back(fresh_evar(l));
  }
  std::function<Term(int)> term = [&](int depth) -> Term {
    switch (depth > 0 ? pick(6) : pick(3)) {
      case 0: return mvars[pick(static_cast<unsigned>(mvars.size()))];
      case 1: return evars[pick(static_cast<unsigned>(evars.size()))];
      case 2: return zero();
      case 3: return succ(term(depth - 1));
      default: return Term::app(Sym::intern("pair"), {term(depth - 1), term(depth - 1)});
    }
  };

  BindingStore store;
  std::vector<Checkpoint> marks;
  std::vector<std::size_t> log_at_mark;
  std::vector<std::pair<Term, Term>> log;
  for (uint64_t op = 0; op < ops; ++op) {
    const unsigned kind = pick(10);
    if (kind < 6) {
      const Term a = term(2), b = term(2);
      const BindingStore before = store;
      if (store.unify(a, b)) {
        log.emplace_back(a, b);
      } else if (!(store == before)) {
        return false;
      }
    } else if (kind < 8 || marks.empty()) {
      marks.push_back(store.mark());
      log_at_mark.push_back(log.size());
    } else {
      const std::size_t k = pick(static_cast<unsigned>(marks.size()));
      store.undo(marks[k]);
      log.resize(log_at_mark[k]);
      marks.resize(k);
      log_at_mark.resize(k);
    }
    BindingStore scratch;
    for (const auto& [a, b] : log)
      if (!scratch.unify(a, b)) return false;
    if (!(scratch.size() == store.size())) return false;
    for (const auto& m : mvars)
      if (!(scratch.resolve(m) == store.resolve(m))) return false;
    ++compared;
  }
  return true;
}

}  // namespace

int main() {
  Report report;
  const Theory th = corpus_theory();
  std::vector<Accepted> accepted;
  auto keep = [&](const LemmaTable& lemmas, const Formula& goal, const CheckResult& r) {
    if (r.verdict == Verdict::Accepted) accepted.push_back({&th.defs, lemmas, goal, *r.trace});
  };

  // Lemma table in scope for each corpus theorem: the theorems before it.
  std::map<std::string, LemmaTable> in_scope;
  {
    LemmaTable so_far;
    for (const auto& t : th.theorems) {
      in_scope[t.name.name()] = so_far;
      so_far.push_back({t.name, t.statement});
    }
  }

  // 1. The corpus checks end to end, quickly, and pluscom needs both lemmas.
  {
    const auto start = std::chrono::steady_clock::now();
    const SessionResult s = run_session(th, outline_fpc());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = s.theorems.size() == 5;
    std::string detail;
    for (const auto& t : s.theorems) {
      ok = ok && t.verdict == Verdict::Accepted;
      if (t.verdict != Verdict::Accepted) detail += t.name.name() + " " + verdict_name(t.verdict) + "; ";
      if (t.trace)
        accepted.push_back(
            {&th.defs, LemmaTable(s.lemmas.begin(), s.lemmas.begin() + static_cast<std::ptrdiff_t>(t.lemmas_available)),
             t.statement, *t.trace});
    }
    const TheoremEntry& pc = theorem(th, "pluscom");
    const Cert ship = outline_fpc().parse_certificate(*pc.ship);
    const bool both = check(th.defs, lemmas_of(th, {"plus0com", "plusscom"}), pc.statement, ship, outline_fpc()).verdict ==
                      Verdict::Accepted;
    const bool without0 = check(th.defs, lemmas_of(th, {"plus_total", "plus_determ", "plusscom"}), pc.statement, ship,
                                outline_fpc()).verdict == Verdict::Accepted;
    const bool withouts = check(th.defs, lemmas_of(th, {"plus_total", "plus_determ", "plus0com"}), pc.statement, ship,
                                outline_fpc()).verdict == Verdict::Accepted;
    ok = ok && both && !without0 && !withouts && secs < 5.0;
    detail += "5 theorems in " + std::to_string(secs) + " s; pluscom needs plus0com: " + (without0 ? "no" : "yes") +
              ", needs plusscom: " + (withouts ? "no" : "yes");
    report.line(1, ok, "corpus reproduction", detail);
  }

  // Grid over [0,3]^3 for every corpus theorem with its lemma table.
  std::map<std::string, std::map<Triple, Verdict>> grid;
  for (const auto& t : th.theorems)
    for (uint32_t d = 0; d < 4; ++d)
      for (uint32_t a = 0; a < 4; ++a)
        for (uint32_t u = 0; u < 4; ++u) {
          const LemmaTable& lemmas = in_scope[t.name.name()];
          const CheckResult r = check(th.defs, lemmas, t.statement, outline(d, a, u), outline_fpc());
          grid[t.name.name()][{d, a, u}] = r.verdict;
          keep(lemmas, t.statement, r);
        }

  // 2. Minimal accepting triples of plus_total and plus_determ.
  {
    const std::map<std::string, Triple> expected = {{"plus_total", {1, 0, 1}}, {"plus_determ", {1, 1, 0}}};
    bool ok = true;
    std::string detail;
    for (const auto& [name, want] : expected) {
      std::set<Triple> acc;
      for (const auto& [t, v] : grid[name])
        if (v == Verdict::Accepted) acc.insert(t);
      const auto mins = minimal(acc);
      const bool shipped = parse_outline(*theorem(th, name).ship) == parse_outline(
                                                                          "(induction " + std::to_string(want[0]) + " " +
                                                                          std::to_string(want[1]) + " " +
                                                                          std::to_string(want[2]) + ")");
      ok = ok && mins.size() == 1 && mins[0] == want && shipped;
      detail += name + " minimal:";
      for (const auto& m : mins) detail += " " + triple_name(m);
      detail += "; ";
    }
    report.line(2, ok, "minimal outline budgets", detail);
  }

  // 3. Negative controls for pluscom.
  {
    const TheoremEntry& pc = theorem(th, "pluscom");
    const LemmaTable& lemmas = in_scope["pluscom"];
    const Cert ship = outline_fpc().parse_certificate(*pc.ship);
    const Formula tampered =
        statement("forall N, is_nat N -> forall M, is_nat M -> forall S, plus N M S -> plus M S N");
    struct Control {
      std::string name;
      CheckResult result;
    } controls[] = {
        {"empty lemma table", check(th.defs, {}, pc.statement, ship, outline_fpc())},
        {"(induction 1 0 0)", check(th.defs, lemmas, pc.statement, outline(1, 0, 0), outline_fpc())},
        {"only plus0com",
         check(th.defs, lemmas, pc.statement, outline_fpc().parse_certificate("(induction 2 (lemmas plus0com) 1 0)"),
               outline_fpc())},
        {"tampered statement", check(th.defs, lemmas, tampered, ship, outline_fpc())},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : controls) {
      ok = ok && c.result.verdict == Verdict::Rejected;
      detail += c.name + ": " + verdict_name(c.result.verdict) + "; ";
    }
    report.line(3, ok, "negative controls", detail);
  }

  // 4. Kernel acceptance of ground atoms matches bottom-up evaluation.
  {
    std::vector<Formula> atoms;
    for (unsigned a = 0; a <= 6; ++a) {
      atoms.push_back(atom("is_nat", {numeral(a)}));
      for (unsigned b = 0; b <= 6; ++b)
        for (unsigned c = 0; c <= 6; ++c) atoms.push_back(atom("plus", {numeral(a), numeral(b), numeral(c)}));
    }
    std::size_t agree = 0, provable = 0;
    std::string detail;
    for (const auto& f : atoms) {
      const Truth truth = eval_ground(th.sig, th.defs, f, 64);
      const CheckResult r = check(th.defs, {}, f, outline(0, 0, 7), outline_fpc());
      keep({}, f, r);
      const bool same = (truth == Truth::True && r.verdict == Verdict::Accepted) ||
                        (truth == Truth::False && r.verdict == Verdict::Rejected);
      if (same) ++agree;
      else if (detail.size() < 200) detail += to_string(f) + "; ";
      if (truth == Truth::True) ++provable;
    }
    report.line(4, agree == atoms.size(), "oracle equivalence",
                std::to_string(agree) + "/" + std::to_string(atoms.size()) + " agree, " + std::to_string(provable) +
                    " true" + (detail.empty() ? "" : "; mismatches: " + detail));
  }

  // 5. Every accepted proof replays; single-field mutations never do.
  {
    std::size_t replayed = 0;
    for (const auto& a : accepted)
      if (verify_trace(*a.defs, a.lemmas, a.goal, a.trace)) ++replayed;
    std::mt19937 rng(5);
    std::size_t rejected = 0;
    const std::size_t mutations = 100;
    std::string escaped;
    for (std::size_t i = 0; i < mutations; ++i) {
      const Accepted& base = accepted[std::uniform_int_distribution<std::size_t>(0, 4)(rng)];  // corpus proofs
      TraceNode copy = base.trace;
      const std::string what = mutate(copy, rng);
      if (!verify_trace(*base.defs, base.lemmas, base.goal, copy)) ++rejected;
      else if (escaped.size() < 200) escaped += what + "; ";
    }
    report.line(5, replayed == accepted.size() && rejected == mutations, "replay soundness",
                std::to_string(replayed) + "/" + std::to_string(accepted.size()) + " replayed, " +
                    std::to_string(rejected) + "/" + std::to_string(mutations) + " mutations rejected" +
                    (escaped.empty() ? "" : "; accepted: " + escaped));
  }

  // 6. Acceptance is upward closed on the 4x4x4 grid.
  {
    std::size_t violations = 0, acc = 0, budget = 0;
    std::string detail;
    for (const auto& [name, cells] : grid)
      for (const auto& [small, v] : cells) {
        if (v == Verdict::OutOfBudget) ++budget;
        if (v != Verdict::Accepted) continue;
        ++acc;
        for (const auto& [big, w] : cells)
          if (dominates(big, small) && w != Verdict::Accepted) {
            ++violations;
            if (detail.size() < 200) detail += name + " " + triple_name(small) + " < " + triple_name(big) + "; ";
          }
      }
    report.line(6, violations == 0, "budget monotonicity",
                std::to_string(acc) + " accepted cells, " + std::to_string(violations) + " violations, " +
                    std::to_string(budget) + " cells out of steps" + (detail.empty() ? "" : "; " + detail));
  }

  // 7. Binding store replay and kernel choice-point hygiene.
  {
    uint64_t compared = 0;
    const bool store_ok = unify_replay(10'000, compared);
    ResourceLimits limits;
    limits.hygiene_checks = true;
    uint64_t violations = 0, checks = 0;
    for (const auto& t : th.theorems) {
      const LemmaTable& lemmas = in_scope[t.name.name()];
      for (const Cert& c : {outline_fpc().parse_certificate(*t.ship), outline(2, 1, 1)}) {
        const CheckResult r = check(th.defs, lemmas, t.statement, c, outline_fpc(), limits);
        violations += r.hygiene_violations;
        ++checks;
      }
    }
    report.line(7, store_ok && compared == 10'000 && violations == 0, "backtracking hygiene",
                std::to_string(compared) + " store states matched scratch replay; " + std::to_string(violations) +
                    " hygiene violations in " + std::to_string(checks) + " kernel runs");
  }

  return report.failures == 0 ? 0 : 1;
}
