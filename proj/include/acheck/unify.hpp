#pragma once

// First-order unification over metavariables with an undo trail.

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "acheck/syntax.hpp"

namespace acheck {

/// Position in a BindingStore's trail. Only valid for the store that made it
/// and only until something undoes past it.
struct Checkpoint {
  std::size_t position = 0;
  uint64_t stamp = 0;
};

/// Metavariable bindings plus a chronological trail.
///
/// Invariants: no binding chain is cyclic, and a metavariable at level k is
/// never bound to a term mentioning an eigenvariable of level > k.
class BindingStore {
public:
  /// On success the store holds an mgu of a and b. On failure it is left
  /// exactly as it was.
  bool unify(const Term& a, const Term& b);

  Checkpoint mark() const;
  void undo(Checkpoint cp);

  /// Dereferences bound metavariables at the root only.
  Term walk(const Term& t) const;
  /// Replaces every bound metavariable, recursively.
  Term resolve(const Term& t) const;
  Formula resolve(const Formula& f) const;

  std::optional<Term> binding(uint64_t mvar_id) const;
  /// Effective scope level of an unbound metavariable.
  uint32_t level_of_mvar(const Term& mvar) const { return level_of(mvar); }
  std::size_t size() const { return bindings_.size(); }
  std::size_t trail_size() const { return trail_.size(); }

  /// Same bindings and same trail.
  friend bool operator==(const BindingStore& a, const BindingStore& b);

private:
  bool unify_rec(const Term& a, const Term& b);
  bool bind(const Term& mvar, const Term& value);
  bool occurs_or_escapes(uint64_t id, uint32_t level, const Term& t, std::vector<Term>& to_lower) const;
  uint32_t level_of(const Term& mvar) const;

  // A trail entry either records a binding or a scope restriction of an
  // unbound metavariable (its previous effective level is kept for undo).
  struct Entry {
    uint64_t id;
    uint64_t stamp;
    bool lowering;
    uint32_t previous_level;
    bool had_previous;
  };
  std::unordered_map<uint64_t, Term> bindings_;
  std::unordered_map<uint64_t, uint32_t> lowered_;
  std::vector<Entry> trail_;
  uint64_t next_stamp_ = 1;
};

/// Result of unifying two terms whose variables are eigenvariables, treating
/// those eigenvariables as instantiable (the equality-left rule).
struct EigenUnifier {
  bool clash = false;
  std::unordered_map<uint64_t, Term> subst;  // idempotent
};

/// Throws StructuralError if either term mentions a metavariable.
EigenUnifier unify_eigen(const Term& a, const Term& b);

}  // namespace acheck
