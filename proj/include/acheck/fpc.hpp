#pragma once

// The plug-in contract between the kernel and a proof-certificate format.
//
// Every augmented rule of the kernel consults one predicate of the table
// below. Predicates return an ordered, finite list of alternatives; the
// kernel explores them depth-first and backtracks. An empty list means the
// rule does not apply under that certificate.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "acheck/syntax.hpp"

namespace acheck {

/// Base of every certificate value. The kernel only moves these around; an
/// FPC downcasts its own certificates.
class CertNode {
public:
  virtual ~CertNode() = default;
};
using Cert = std::shared_ptr<const CertNode>;

/// Name of a stored formula: a lemma, or a hypothesis serial.
struct Index {
  enum class Kind : uint8_t { Lemma, Hyp };

  Kind kind = Kind::Hyp;
  Sym lemma;
  uint32_t serial = 0;

  static Index lemma_name(Sym name) { return {Kind::Lemma, name, 0}; }
  static Index hyp(uint32_t serial) { return {Kind::Hyp, Sym(), serial}; }
  bool is_lemma() const { return kind == Kind::Lemma; }

  std::string to_string() const;
  friend bool operator==(const Index&, const Index&) = default;
};

enum class Side : uint8_t { Left = 1, Right = 2 };

/// Use the invariant synthesized from the surrounding sequent.
struct ObviousInvariant {
  friend bool operator==(const ObviousInvariant&, const ObviousInvariant&) = default;
};
using InvariantChoice = std::variant<ObviousInvariant, Abstraction>;

struct InductionChoice {
  Cert left;        // premise with the invariant in place of the atom (unused for obvious)
  Cert invariance;  // premise B S y |- S y
  InvariantChoice invariant;
};

/// Try every frozen atom in the store.
struct AnyFrozen {
  friend bool operator==(const AnyFrozen&, const AnyFrozen&) = default;
};
using InitialChoice = std::variant<AnyFrozen, Index>;

/// A concrete witness, or nullopt for "fresh metavariable".
using TermChoice = std::optional<Term>;

class FpcDefinition {
public:
  virtual ~FpcDefinition() = default;

  virtual std::string_view name() const = 0;

  /// Concrete syntax of certificates (the ship string). Throws
  /// std::invalid_argument on malformed input.
  virtual Cert parse_certificate(std::string_view text) const;

  /// Check-time validation against the lemmas that will be available.
  /// Returns a diagnostic when the certificate cannot be used at all.
  virtual std::optional<std::string> validate(const Cert& cert, std::span<const Sym> lemmas) const;

  /// Certificates tried in turn by check(), sharing one step limit; the
  /// first accepted one wins. Every entry must admit no proof the original
  /// does not. Defaults to the certificate alone.
  virtual std::vector<Cert> schedule(const Cert& cert) const;

  // Clerks of the invertible phase.
  virtual std::vector<std::pair<Cert, Index>> store_clerk(const Cert& c) const = 0;
  virtual std::vector<std::pair<Cert, Cert>> or_left_clerk(const Cert& c) const;
  virtual std::vector<Cert> exists_left_clerk(const Cert& c) const;
  virtual std::vector<Cert> and_left_clerk(const Cert& c) const;
  virtual std::vector<Cert> imp_right_clerk(const Cert& c) const;
  virtual std::vector<Cert> all_right_clerk(const Cert& c) const;
  virtual std::vector<Cert> eq_left_clerk(const Cert& c) const;
  virtual std::vector<Cert> true_left_clerk(const Cert& c) const;
  virtual std::vector<Cert> false_left_clerk(const Cert& c) const;

  // Experts of the focused phase. `candidates` lists the decidable store
  // entries (lemmas first, then hypotheses, in store order).
  virtual std::vector<std::pair<Cert, Index>> decide_expert(const Cert& c,
                                                            std::span<const Index> candidates) const = 0;
  virtual std::vector<Cert> decide_right_expert(const Cert& c) const = 0;
  virtual std::vector<std::pair<Cert, Side>> or_expert(const Cert& c) const = 0;
  virtual std::vector<std::pair<Cert, TermChoice>> some_expert(const Cert& c) const = 0;
  virtual std::vector<std::pair<Cert, Cert>> and_expert(const Cert& c) const = 0;
  virtual std::vector<std::pair<Cert, Cert>> imp_left_expert(const Cert& c) const;
  virtual std::vector<Cert> true_expert(const Cert& c) const;

  // Fixed points.
  virtual std::vector<Cert> unfold_left_expert(const Cert& c) const = 0;
  virtual std::vector<Cert> unfold_right_expert(const Cert& c) const = 0;
  virtual std::vector<InductionChoice> ind_expert(const Cert& c) const = 0;
  virtual std::vector<InitialChoice> initial_expert(const Cert& c) const = 0;
};

}  // namespace acheck
