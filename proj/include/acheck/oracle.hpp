#pragma once

// Bottom-up evaluation of ground fixed-point atoms, for testing the kernel
// against the least-fixed-point reading of definitions.

#include <cstdint>
#include <optional>
#include <vector>

#include "acheck/syntax.hpp"

namespace acheck {

enum class Truth : uint8_t { True, False, Unknown };

/// Ground terms of each sort with depth at most `max_depth` (a constant has
/// depth 1), in order of increasing depth.
std::vector<Term> term_universe(const Signature& sig, Sym sort, std::size_t max_depth);

/// Iterates the immediate-consequence step of `defs` over the ground terms
/// of depth at most `depth_bound` (default: one more than the deepest
/// argument of `atom`). True when `atom` is derived within `fuel` rounds,
/// False when the facts saturate without it, Unknown otherwise.
///
/// Definitions must carry argument sorts. Throws std::invalid_argument if
/// `atom` is not a ground fixed-point atom.
Truth eval_ground(const Signature& sig, const DefTable& defs, const Formula& atom, uint32_t fuel,
                  std::optional<std::size_t> depth_bound = std::nullopt);

}  // namespace acheck
