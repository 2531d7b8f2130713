#pragma once

// The focused checker: invertible rules, decides, focused rules and the
// fixed-point rules, each gated by an FPC predicate.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "acheck/fpc.hpp"
#include "acheck/syntax.hpp"
#include "acheck/trace.hpp"

namespace acheck {

struct Lemma {
  Sym name;
  Formula formula;
};
using LemmaTable = std::vector<Lemma>;

struct StoreEntry {
  Index index;
  Formula formula;
};

/// Γ ⇑ Θ ⊢ R. When `rhs_stored` is set, R is the stored goal.
struct AsyncSeq {
  std::vector<StoreEntry> hyps;
  std::vector<Formula> workbench;
  Formula rhs;
  bool rhs_stored = false;
  uint32_t level = 0;  // highest eigenvariable level on this branch
};

/// Γ ⇓ N ⊢ R
struct LeftFocusSeq {
  std::vector<StoreEntry> hyps;
  Formula focus;
  Formula goal;
  uint32_t level = 0;
};

/// Γ ⊢ ⇓ P
struct RightFocusSeq {
  std::vector<StoreEntry> hyps;
  Formula focus;
  uint32_t level = 0;
};

using Sequent = std::variant<AsyncSeq, LeftFocusSeq, RightFocusSeq>;

struct ResourceLimits {
  uint64_t max_steps = 1'000'000;
  /// Snapshot the binding store at every choice point and compare it on
  /// entry to each further alternative. Slow.
  bool hygiene_checks = false;
};

enum class Verdict : uint8_t { Accepted, Rejected, OutOfBudget };

struct CheckResult {
  Verdict verdict = Verdict::Rejected;
  std::optional<TraceNode> trace;  // set iff Accepted
  uint64_t steps = 0;
  uint64_t hygiene_violations = 0;
  std::string diagnostic;
};

/// Checks `⊢ goal` with the lemmas available for decide. Throws
/// std::invalid_argument if the goal is not closed.
CheckResult check(const DefTable& defs, const LemmaTable& lemmas, const Formula& goal, const Cert& cert,
                  const FpcDefinition& fpc, const ResourceLimits& limits = {});

/// Same, from an arbitrary sequent.
CheckResult check_sequent(const DefTable& defs, const LemmaTable& lemmas, const Sequent& seq, const Cert& cert,
                          const FpcDefinition& fpc, const ResourceLimits& limits = {});

// --- induction -------------------------------------------------------------

/// λx̄. ∀z̄. (x̄ = t̄) ⊃ Θ' ⊃ R for the μ atom t̄ at workbench position
/// `target`, where Θ' is the rest of the workbench and z̄ its
/// eigenvariables. nullopt when the sequent still has metavariables.
std::optional<Abstraction> synthesize_obvious_invariant(const AsyncSeq& seq, std::size_t target);

struct InductionPremises {
  AsyncSeq main;        // S t̄ in place of the atom
  AsyncSeq invariance;  // B S ȳ ⊢ S ȳ, empty hypothesis store
  std::vector<Term> fresh;  // ȳ
};

/// Throws StructuralError if the target is not a μ atom or the arity of S
/// differs from the definition's.
InductionPremises apply_explicit_induction(const DefTable& defs, const AsyncSeq& seq, std::size_t target,
                                           const Abstraction& invariant);

/// Invariance premise of obvious induction: B(λx̄. μB x̄ ∧ S x̄) ȳ ⊢ S ȳ.
/// The extra conjunct is admissible and keeps the predecessor facts usable.
AsyncSeq obvious_invariance_premise(const Definition& def, const Abstraction& invariant,
                                    std::span<const Term> fresh, uint32_t level);

// --- replay ----------------------------------------------------------------

struct ReplayResult {
  bool ok = false;
  std::string diagnostic;
  explicit operator bool() const { return ok; }
};

/// Re-applies every record of `trace` to `⊢ goal` without search. Unbound
/// metavariables left in the trace behave as constants.
ReplayResult verify_trace(const DefTable& defs, const LemmaTable& lemmas, const Formula& goal,
                          const TraceNode& trace);
ReplayResult verify_trace_sequent(const DefTable& defs, const LemmaTable& lemmas, const Sequent& seq,
                                  const TraceNode& trace);

}  // namespace acheck
