#pragma once

namespace osel {

// Absolute tolerance for comparisons inside exact recursions.
inline constexpr double kExactTol = 1e-12;

// Snap tolerance inside the target inversion, relative to max(1, g).
// Errors compound through the inversion by 1 / Pr[v < x] per stage, so an
// exact target equal to an atom or to a box mean can arrive well above 1e-12
// off; snapping keeps those ties exact.
inline constexpr double kSnapTol = 1e-9;

// Tolerance for user-facing checks (instance files, reports).
inline constexpr double kUserTol = 1e-9;

inline constexpr double kGoldenRatio = 1.6180339887498948482;

}  // namespace osel
