#pragma once

#include "vlad/graspx/rectangle.hpp"

#include <vector>

namespace vlad::evalx {

using graspx::GraspRectangle;
using graspx::Vec2;

// Shoelace area; positive for counterclockwise vertex order.
double signed_area(const std::vector<Vec2>& polygon);

// Sutherland-Hodgman clip of a convex `subject` by a convex `clip` polygon.
// Both must be counterclockwise.
std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip);

// Intersection over union of two oriented rectangles; 0 when either is degenerate.
double rect_iou(const GraspRectangle& a, const GraspRectangle& b);

}  // namespace vlad::evalx
