#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <array>

namespace vlad::graspx {

using Vec2 = Eigen::Vector2d;

// Maps any angle into (-pi/2, pi/2]; rectangles and lines are symmetric under pi.
double normalize_angle(double radians);

// Smallest difference between two line orientations, in [0, pi/2].
double angle_difference_mod_pi(double a, double b);

/// Oriented grasp rectangle in image coordinates (u right, v down).
///
/// `width` is the jaw opening measured along `angle`; `height` is the jaw
/// thickness perpendicular to it.
struct GraspRectangle {
    Vec2 center = Vec2::Zero();
    double angle = 0.0;
    double width = 0.0;
    double height = 0.0;

    // Counterclockwise (in u-right/v-down math orientation) starting from the
    // corner at -width/2, -height/2; the first edge runs along the jaw opening.
    std::array<Vec2, 4> corners() const;
    double area() const { return width * height; }
    bool valid() const;
};

// Inverse of corners(): center = mean, width = |c1 - c0|, height = |c2 - c1|,
// angle = direction of c0 -> c1 normalized into (-pi/2, pi/2].
GraspRectangle from_corners(const std::array<Vec2, 4>& corners);

nlohmann::json to_json(const GraspRectangle& rect);
GraspRectangle rectangle_from_json(const nlohmann::json& j);

}  // namespace vlad::graspx
