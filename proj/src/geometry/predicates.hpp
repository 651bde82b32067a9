#pragma once

#include "pattern_gauge/geometry/curve.hpp"

namespace pattern_gauge::geometry::detail {

// Sign of the orientation determinant of (a, b, c): > 0 for a left turn.
// Filtered in floating point, exact rational fallback near zero.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

// > 0 when d lies strictly inside the circle through the counterclockwise triangle (a, b, c).
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace pattern_gauge::geometry::detail
