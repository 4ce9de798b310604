#pragma once

#include "vlad/graspx/rectangle.hpp"
#include "vlad/lifting/raster.hpp"

#include <optional>
#include <vector>

namespace vlad::graspx {

using lifting::BinaryMask;

/// Total-least-squares line through the set pixels of a rod mask.
///
/// Coordinates along the line are t = (p - anchor) . direction and across it
/// s = (p - anchor) . normal, with normal = (-direction.y, direction.x).
struct RodAxis {
    Vec2 direction{1.0, 0.0};
    Vec2 anchor = Vec2::Zero();
    double angle = 0.0;  // (-pi/2, pi/2]
    // Median over axis bins of the perpendicular pixel extent.
    double thickness = 1.0;
    // Extent of set pixels along the axis, bin-aligned.
    double min_t = 0.0;
    double max_t = 0.0;

    Vec2 normal() const { return {-direction.y(), direction.x()}; }
    double along(const Vec2& p) const { return (p - anchor).dot(direction); }
    double across(const Vec2& p) const { return (p - anchor).dot(normal()); }
    Vec2 point_at(double t) const { return anchor + t * direction; }
};

struct Discontinuity {
    double start_t = 0.0;
    double end_t = 0.0;
    double run_length = 0.0;
    double iou_with_object = 0.0;
};

struct GraspOptions {
    double delta = 0.1;    // minimum run as a fraction of sqrt(object area)
    double epsilon = 0.2;  // minimum gap-band / object IoU
    int min_gap = 2;       // shorter gaps are closed before analysis
    std::optional<double> jaw_height;
};

inline constexpr double kMinElongation = 1.5;

// Throws Error{EmptyMask} below two set pixels and Error{IsotropicMask} when
// the principal variance ratio is under kMinElongation.
RodAxis fit_rod_axis(const BinaryMask& rod_mask);

/// Gaps between set rod pixels along the axis, sorted by start_t.
///
/// Set pixels are binned at one-pixel spacing along the axis; runs of empty
/// bins shorter than `min_gap` are filled, the rest become discontinuities.
/// Each gap's band (rod thickness wide, gap long) is compared with the part of
/// the object mask inside the full rod band to give iou_with_object.
std::vector<Discontinuity> find_discontinuities(const BinaryMask& rod_mask, const RodAxis& axis,
                                                const BinaryMask& object_mask, int min_gap = 2);

// Pixels of the rod band restricted to [start_t, end_t] along the axis.
BinaryMask band_mask(const RodAxis& axis, double start_t, double end_t, int width, int height);

/// Filters by run length (>= delta * sqrt(object area)) and IoU (>= epsilon),
/// then picks the highest IoU; ties go to the longer run, then the lower
/// start_t. Throws Error{NoViableGrasp} when nothing survives.
GraspRectangle select_grasp(const std::vector<Discontinuity>& discontinuities, const RodAxis& axis,
                            const BinaryMask& object_mask, const GraspOptions& options = {});

struct Extraction {
    RodAxis axis;
    std::vector<Discontinuity> discontinuities;
    GraspRectangle grasp;
};

Extraction extract_grasp(const BinaryMask& rod_mask, const BinaryMask& object_mask, const GraspOptions& options = {});

nlohmann::json to_json(const Discontinuity& d);

}  // namespace vlad::graspx
