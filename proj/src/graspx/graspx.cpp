#include "vlad/graspx/graspx.hpp"

#include "vlad/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vlad::graspx {

namespace {

constexpr double kBandSlack = 1e-9;

long bin_of(double t, double min_t) { return static_cast<long>(std::floor(t - min_t + 0.5)); }

double median(std::vector<double> values) {
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    return (upper + *std::max_element(values.begin(), values.begin() + static_cast<long>(mid))) / 2.0;
}

bool in_band(const RodAxis& axis, const Vec2& p, double start_t, double end_t) {
    const double t = axis.along(p);
    return t >= start_t && t < end_t && std::abs(axis.across(p)) <= axis.thickness / 2.0 + kBandSlack;
}

}  // namespace

RodAxis fit_rod_axis(const BinaryMask& rod_mask) {
    const auto pixels = rod_mask.set_pixels();
    if (pixels.size() < 2) {
        throw Error(ErrorCode::EmptyMask, "rod mask needs at least two set pixels");
    }
    const double n = static_cast<double>(pixels.size());
    Vec2 mean = Vec2::Zero();
    for (const auto& p : pixels) {
        mean += Vec2(p.u, p.v);
    }
    mean /= n;
    double cuu = 0.0, cvv = 0.0, cuv = 0.0;
    for (const auto& p : pixels) {
        const double du = p.u - mean.x();
        const double dv = p.v - mean.y();
        cuu += du * du;
        cvv += dv * dv;
        cuv += du * dv;
    }
    cuu /= n;
    cvv /= n;
    cuv /= n;

    const double half_trace = (cuu + cvv) / 2.0;
    const double radius = std::hypot((cuu - cvv) / 2.0, cuv);
    const double major = half_trace + radius;
    const double minor = std::max(0.0, half_trace - radius);
    if (major <= 0.0 || (minor > 0.0 && major / minor < kMinElongation)) {
        throw Error(ErrorCode::IsotropicMask, "rod mask is not elongated");
    }

    RodAxis axis;
    axis.angle = normalize_angle(0.5 * std::atan2(2.0 * cuv, cuu - cvv));
    axis.direction = Vec2(std::cos(axis.angle), std::sin(axis.angle));
    axis.anchor = mean;

    axis.min_t = std::numeric_limits<double>::infinity();
    axis.max_t = -std::numeric_limits<double>::infinity();
    for (const auto& p : pixels) {
        const double t = axis.along(Vec2(p.u, p.v));
        axis.min_t = std::min(axis.min_t, t);
        axis.max_t = std::max(axis.max_t, t);
    }

    const long bins = bin_of(axis.max_t, axis.min_t) + 1;
    std::vector<double> lo(static_cast<std::size_t>(bins), std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<std::size_t>(bins), -std::numeric_limits<double>::infinity());
    for (const auto& p : pixels) {
        const Vec2 q(p.u, p.v);
        const auto b = static_cast<std::size_t>(bin_of(axis.along(q), axis.min_t));
        const double s = axis.across(q);
        lo[b] = std::min(lo[b], s);
        hi[b] = std::max(hi[b], s);
    }
    std::vector<double> extents;
    for (std::size_t b = 0; b < lo.size(); ++b) {
        if (hi[b] >= lo[b]) {
            extents.push_back(hi[b] - lo[b] + 1.0);
        }
    }
    axis.thickness = median(std::move(extents));
    return axis;
}

BinaryMask band_mask(const RodAxis& axis, double start_t, double end_t, int width, int height) {
    BinaryMask out(width, height);
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            if (in_band(axis, Vec2(u, v), start_t, end_t)) {
                out.set(u, v);
            }
        }
    }
    return out;
}

std::vector<Discontinuity> find_discontinuities(const BinaryMask& rod_mask, const RodAxis& axis,
                                                const BinaryMask& object_mask, int min_gap) {
    if (!rod_mask.same_shape(object_mask)) {
        throw Error(ErrorCode::DimensionMismatch, "rod and object masks differ in size");
    }
    const long bins = bin_of(axis.max_t, axis.min_t) + 1;
    std::vector<std::uint8_t> occupied(static_cast<std::size_t>(std::max(bins, 0L)), 0);
    for (const auto& p : rod_mask.set_pixels()) {
        const long b = bin_of(axis.along(Vec2(p.u, p.v)), axis.min_t);
        if (b >= 0 && b < bins) {
            occupied[static_cast<std::size_t>(b)] = 1;
        }
    }

    // Empty runs [first, last] strictly inside the occupied extent.
    struct Run {
        long first;
        long last;
    };
    std::vector<Run> runs;
    long b = 0;
    while (b < bins) {
        if (occupied[static_cast<std::size_t>(b)]) {
            ++b;
            continue;
        }
        const long first = b;
        while (b < bins && !occupied[static_cast<std::size_t>(b)]) {
            ++b;
        }
        if (first > 0 && b < bins && b - first >= min_gap) {
            runs.push_back({first, b - 1});
        }
    }

    const double band_start = axis.min_t - 0.5;
    const double band_end = axis.min_t + static_cast<double>(bins) - 0.5;
    std::vector<Discontinuity> out;
    out.reserve(runs.size());
    for (const auto& run : runs) {
        Discontinuity d;
        d.start_t = axis.min_t + static_cast<double>(run.first) - 0.5;
        d.end_t = axis.min_t + static_cast<double>(run.last) + 0.5;
        d.run_length = static_cast<double>(run.last - run.first + 1);

        std::size_t inter = 0;
        std::size_t uni = 0;
        for (int v = 0; v < rod_mask.height(); ++v) {
            for (int u = 0; u < rod_mask.width(); ++u) {
                const Vec2 p(u, v);
                const bool gap = in_band(axis, p, d.start_t, d.end_t);
                const bool obj = object_mask.at(u, v) && in_band(axis, p, band_start, band_end);
                inter += (gap && obj) ? 1 : 0;
                uni += (gap || obj) ? 1 : 0;
            }
        }
        d.iou_with_object = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
        out.push_back(d);
    }
    return out;
}

GraspRectangle select_grasp(const std::vector<Discontinuity>& discontinuities, const RodAxis& axis,
                            const BinaryMask& object_mask, const GraspOptions& options) {
    if (!(options.delta > 0.0 && options.delta < 1.0) || !(options.epsilon > 0.0 && options.epsilon < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "delta and epsilon must lie in (0, 1)");
    }
    const double min_run = options.delta * std::sqrt(static_cast<double>(object_mask.count()));

    const Discontinuity* best = nullptr;
    for (const auto& d : discontinuities) {
        if (d.run_length < min_run || d.iou_with_object < options.epsilon) {
            continue;
        }
        if (best == nullptr || d.iou_with_object > best->iou_with_object ||
            (d.iou_with_object == best->iou_with_object &&
             (d.run_length > best->run_length ||
              (d.run_length == best->run_length && d.start_t < best->start_t)))) {
            best = &d;
        }
    }
    if (best == nullptr) {
        throw Error(ErrorCode::NoViableGrasp, "no discontinuity passes the run-length and overlap filters");
    }

    GraspRectangle rect;
    rect.center = axis.point_at((best->start_t + best->end_t) / 2.0);
    rect.angle = axis.angle;
    rect.width = best->run_length;
    rect.height = options.jaw_height.value_or(axis.thickness);
    return rect;
}

Extraction extract_grasp(const BinaryMask& rod_mask, const BinaryMask& object_mask, const GraspOptions& options) {
    Extraction ex;
    ex.axis = fit_rod_axis(rod_mask);
    ex.discontinuities = find_discontinuities(rod_mask, ex.axis, object_mask, options.min_gap);
    ex.grasp = select_grasp(ex.discontinuities, ex.axis, object_mask, options);
    return ex;
}

nlohmann::json to_json(const Discontinuity& d) {
    return {{"start_t", d.start_t}, {"end_t", d.end_t}, {"run_length", d.run_length}, {"iou_with_object", d.iou_with_object}};
}

}  // namespace vlad::graspx
