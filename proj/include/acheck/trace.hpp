#pragma once

// Elaborated proofs: one record per rule application, replayable without
// search.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "acheck/fpc.hpp"
#include "acheck/syntax.hpp"

namespace acheck {

enum class Rule : uint8_t {
  // invertible phase, workbench
  TrueL,
  FalseL,
  AndL,
  OrL,
  ExL,
  EqL,
  Freeze,
  StoreL,
  UnfoldL,
  ObviousInd,
  Ind,
  // invertible phase, right-hand side
  ImpR,
  AllR,
  StoreR,
  // border
  Decide,
  DecideR,
  // left focus
  AllL,
  ImpL,
  ReleaseL,
  // right focus
  TrueR,
  AndR,
  OrR1,
  OrR2,
  ExR,
  EqR,
  Init,
  UnfoldR,
  ReleaseR,
};

std::string_view rule_name(Rule r);
std::optional<Rule> rule_from_name(std::string_view name);

struct TraceNode {
  Rule rule = Rule::TrueR;
  Formula principal;
  std::vector<Term> terms;              // eigenvariables or witnesses
  std::optional<Index> index;           // Freeze / StoreL / Decide / Init
  std::optional<Abstraction> invariant; // Ind / ObviousInd
  std::vector<TraceNode> children;
};

struct TraceStats {
  std::size_t decides = 0;  // decide on a stored formula
  std::size_t decides_right = 0;
  std::size_t unfold_left = 0;
  std::size_t unfold_right = 0;
  std::size_t inductions = 0;
  std::size_t nodes = 0;
};

TraceStats trace_stats(const TraceNode& root);

/// Calls `fn` on every node in pre-order.
template <class Fn>
void for_each_node(const TraceNode& n, Fn&& fn) {
  fn(n);
  for (const auto& c : n.children) for_each_node(c, fn);
}

/// Line-delimited text form. After two `#` header lines, one record per
/// line in pre-order, tab-separated:
///
///   rule  principal  terms  index  children  invariant
///
/// `terms` are separated by " | "; empty fields are "-". Variables are
/// renamed by first occurrence, so output is stable across runs.
void write_trace(std::ostream& out, const TraceNode& root, std::string_view theorem);

}  // namespace acheck
