#pragma once

#include "vlad/lifting/raster.hpp"
#include "vlad/pcmath/point_cloud.hpp"

namespace vlad::lifting {

inline constexpr int kDefaultRodDilation = 1;

struct LiftStats {
    std::size_t masked_pixels = 0;
    std::size_t invalid_depth = 0;  // masked pixels skipped for zero/NaN depth
    std::size_t lifted = 0;
};

struct LiftResult {
    pcmath::PointCloud cloud;
    LiftStats stats;
};

/// Pinhole back-projection of masked, valid-depth pixels:
/// (u, v, d) -> ((u - cx) d / fx, (v - cy) d / fy, d).
/// Points are emitted in row-major pixel order.
LiftResult backproject_with_stats(const DepthMap& depth, const BinaryMask& mask, const CameraIntrinsics& k,
                                  pcmath::Frame frame, pcmath::Role role = pcmath::Role::Untagged);

pcmath::PointCloud backproject(const DepthMap& depth, const BinaryMask& mask, const CameraIntrinsics& k,
                               pcmath::Frame frame, pcmath::Role role = pcmath::Role::Untagged);

// Inverse of backproject for a single point; false when z <= 0.
bool project_point(const pcmath::Point& p, const CameraIntrinsics& k, PixelCoord& out);

/// Rasterizes a cloud into a mask: each point with z > 0 marks the pixel
/// (round(fx x/z + cx), round(fy y/z + cy)); out-of-frame hits are dropped;
/// the result is dilated by `dilation` pixels.
BinaryMask project_to_mask(const pcmath::PointCloud& cloud, const CameraIntrinsics& k, int width, int height,
                           int dilation = kDefaultRodDilation);

}  // namespace vlad::lifting
