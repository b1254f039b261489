#pragma once

#include <cstdint>

namespace joinbound {

// Float-side tolerance for every entropy/log-domain comparison.
inline constexpr double kEntropyTol = 1e-9;

// Subset-lattice LPs and entropy vectors have 2^|X| variables/coordinates.
inline constexpr int kMaxLatticeAttrs = 12;

// Hard structural limit of the AttrSet bitmask representation.
inline constexpr int kMaxSchemaAttrs = 24;

// Materialization guard for all database generators (rows per table).
inline constexpr std::int64_t kDefaultRowLimit = 500000;

// GF(p) constructions use single-word arithmetic.
inline constexpr int kMaxGfPrime = 251;
inline constexpr int kMaxGfDim = 12;

// Reserved characters: separator for encoded tuple values, placeholder
// brackets for quotient databases. Forbidden in user-supplied values.
inline constexpr char kValueSeparator = '|';
inline constexpr const char* kPlaceholderOpen = "⟨";  // ⟨
inline constexpr const char* kPlaceholderClose = "⟩"; // ⟩

} // namespace joinbound
