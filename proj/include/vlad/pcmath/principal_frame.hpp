#pragma once

#include "vlad/pcmath/point_cloud.hpp"

#include <Eigen/Core>

namespace vlad::pcmath {

// Eigenvalues at or below this are treated as a collapsed axis.
inline constexpr double kEigenvalueClamp = 1e-12;

/// Principal axes of a cloud's covariance.
///
/// Columns of `axes` are orthonormal eigenvectors ordered by descending
/// eigenvalue. Each column is sign-normalized so its largest-magnitude
/// component is nonnegative (ties go to the lowest index); this gives the
/// eight-way sign search in the alignment module a well-defined starting point.
struct PrincipalFrame {
    Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();
    Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();
    Point centroid = Point::Zero();
    int degenerate_axes = 0;

    bool degenerate() const noexcept { return degenerate_axes > 0; }
    // Eigenvalues floored at kEigenvalueClamp, safe for ratios.
    Eigen::Vector3d clamped_eigenvalues() const;
};

/// Covariance uses the 1/n normalization over mean-centered points.
///
/// The reduction runs over a lexicographically sorted copy of the points, so
/// the result is bit-identical under any permutation of the input.
PrincipalFrame principal_frame(const PointCloud& cloud);

// Flip `v` so its largest-magnitude component is nonnegative.
Eigen::Vector3d normalize_sign(const Eigen::Vector3d& v);

}  // namespace vlad::pcmath
