#pragma once

// Proof-outline certificates: do one obvious induction, then close every
// branch with a bounded number of decides (lemmas or hypotheses) and
// bounded fixed-point unfoldings.
//
//   (induction D UA US)
//   (induction D (lemmas NAME ...) UA US)
//   (tree D UA US NODE)      NODE := (lemmas NAME ...) | (split NODE NODE)

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acheck/fpc.hpp"

namespace acheck {

/// A lemma tree. A split follows the next case split or conjunction; a
/// leaf names the lemmas usable from there on.
struct OutlineNode {
  std::vector<Sym> lemmas;  // leaf
  std::shared_ptr<const OutlineNode> left, right;  // split

  bool is_split() const { return left != nullptr; }
  friend bool operator==(const OutlineNode& a, const OutlineNode& b);
};

struct Outline {
  enum class Kind : uint8_t { Induction, WithLemmas, Tree };

  Kind kind = Kind::Induction;
  uint32_t decides = 0;
  uint32_t unfold_left = 0;
  uint32_t unfold_right = 0;
  std::vector<Sym> lemmas;                  // WithLemmas
  std::shared_ptr<const OutlineNode> tree;  // Tree

  friend bool operator==(const Outline& a, const Outline& b);
};

class OutlineSyntaxError : public std::invalid_argument {
public:
  OutlineSyntaxError(std::size_t position, const std::string& what)
      : std::invalid_argument("certificate, column " + std::to_string(position + 1) + ": " + what),
        position_(position) {}
  /// 0-based offset into the certificate text.
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

Outline parse_outline(std::string_view text);
std::string print_outline(const Outline& o);

/// Lemma names mentioned anywhere in the outline.
std::vector<Sym> outline_lemmas(const Outline& o);

/// Initial certificate for a check.
Cert outline_cert(const Outline& o);

/// The outline FPC. Stateless; one instance may serve concurrent checks.
const FpcDefinition& outline_fpc();

}  // namespace acheck
