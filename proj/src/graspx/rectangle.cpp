#include "vlad/graspx/rectangle.hpp"

#include "vlad/error.hpp"

#include <cmath>
#include <numbers>

namespace vlad::graspx {

double normalize_angle(double radians) {
    constexpr double pi = std::numbers::pi;
    double r = std::fmod(radians, pi);
    if (r <= -pi / 2) {
        r += pi;
    } else if (r > pi / 2) {
        r -= pi;
    }
    return r;
}

double angle_difference_mod_pi(double a, double b) {
    const double d = std::abs(normalize_angle(a - b));
    return d;
}

std::array<Vec2, 4> GraspRectangle::corners() const {
    const Vec2 along(std::cos(angle), std::sin(angle));
    const Vec2 across(-along.y(), along.x());
    const Vec2 a = along * (width / 2);
    const Vec2 b = across * (height / 2);
    return {center - a - b, center + a - b, center + a + b, center - a + b};
}

bool GraspRectangle::valid() const {
    return center.allFinite() && std::isfinite(angle) && width > 0.0 && height > 0.0 && std::isfinite(width) &&
           std::isfinite(height);
}

GraspRectangle from_corners(const std::array<Vec2, 4>& corners) {
    GraspRectangle r;
    r.center = (corners[0] + corners[1] + corners[2] + corners[3]) / 4.0;
    const Vec2 edge = corners[1] - corners[0];
    r.width = edge.norm();
    r.height = (corners[2] - corners[1]).norm();
    r.angle = normalize_angle(std::atan2(edge.y(), edge.x()));
    return r;
}

nlohmann::json to_json(const GraspRectangle& rect) {
    return {{"center", {rect.center.x(), rect.center.y()}},
            {"angle_rad", rect.angle},
            {"width_px", rect.width},
            {"height_px", rect.height}};
}

GraspRectangle rectangle_from_json(const nlohmann::json& j) {
    try {
        GraspRectangle r;
        r.center = Vec2(j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>());
        r.angle = j.at("angle_rad").get<double>();
        r.width = j.at("width_px").get<double>();
        r.height = j.at("height_px").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("grasp rectangle JSON: ") + e.what());
    }
}

}  // namespace vlad::graspx
