#include "vlad/evalx/rect_iou.hpp"

#include <algorithm>
#include <cmath>

namespace vlad::evalx {

namespace {

constexpr double kEdgeEps = 1e-9;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::vector<Vec2> ccw_corners(const GraspRectangle& r) {
    const auto c = r.corners();
    std::vector<Vec2> poly(c.begin(), c.end());
    if (signed_area(poly) < 0.0) {
        std::reverse(poly.begin(), poly.end());
    }
    return poly;
}

}  // namespace

double signed_area(const std::vector<Vec2>& polygon) {
    double twice = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
    }
    return twice / 2.0;
}

std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip) {
    std::vector<Vec2> output = subject;
    for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
        const Vec2& a = clip[e];
        const Vec2& b = clip[(e + 1) % clip.size()];
        const Vec2 edge = b - a;
        const double scale = std::max(1.0, edge.norm());
        // Points within kEdgeEps of the edge line count as inside, so shared
        // collinear edges do not flicker in and out.
        auto side = [&](const Vec2& p) { return cross(edge, p - a) / scale; };

        std::vector<Vec2> input;
        input.swap(output);
        for (std::size_t i = 0; i < input.size(); ++i) {
            const Vec2& cur = input[i];
            const Vec2& prev = input[(i + input.size() - 1) % input.size()];
            const double s_cur = side(cur);
            const double s_prev = side(prev);
            const bool in_cur = s_cur >= -kEdgeEps;
            const bool in_prev = s_prev >= -kEdgeEps;
            if (in_cur) {
                if (!in_prev) {
                    output.push_back(prev + (cur - prev) * (s_prev / (s_prev - s_cur)));
                }
                output.push_back(cur);
            } else if (in_prev) {
                output.push_back(prev + (cur - prev) * (s_prev / (s_prev - s_cur)));
            }
        }
    }
    return output;
}

double rect_iou(const GraspRectangle& a, const GraspRectangle& b) {
    const double area_a = std::abs(a.width * a.height);
    const double area_b = std::abs(b.width * b.height);
    if (!(area_a > 0.0) || !(area_b > 0.0)) {
        return 0.0;
    }
    const auto inter_poly = clip_convex(ccw_corners(a), ccw_corners(b));
    const double inter = inter_poly.size() < 3 ? 0.0 : std::abs(signed_area(inter_poly));
    const double uni = area_a + area_b - inter;
    if (!(uni > 0.0)) {
        return 0.0;
    }
    return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace vlad::evalx
