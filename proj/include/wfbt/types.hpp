#pragma once

#include <limits>

namespace wfbt {

enum class Direction : int { Down = -1, Up = 1 };

/// Marker for indices where a quantity is not yet defined (indicator warm-up,
/// the last row's missing target, a classifier's regression value).
inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

}  // namespace wfbt
