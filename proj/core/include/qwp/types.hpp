#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

namespace qwp {

using cplx = std::complex<double>;

// Numerical tolerances shared across the library.  Constructors normalize;
// operations check against these and throw rather than silently renormalize.
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kReadyTolerance = 1e-8;
inline constexpr double kCertaintyTolerance = 1e-10;
inline constexpr double kDiagonalityTolerance = 1e-6;
inline constexpr double kZeroBranchWeight = 1e-24;

// Dense state vectors only; product dimensions beyond this are rejected.
inline constexpr std::size_t kMaxTotalDimension = std::size_t{1} << 22;

}  // namespace qwp
