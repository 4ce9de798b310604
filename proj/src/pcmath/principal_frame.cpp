#include "vlad/pcmath/principal_frame.hpp"

#include "vlad/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace vlad::pcmath {

Eigen::Vector3d PrincipalFrame::clamped_eigenvalues() const {
    return eigenvalues.cwiseMax(kEigenvalueClamp);
}

Eigen::Vector3d normalize_sign(const Eigen::Vector3d& v) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) {
            best = i;
        }
    }
    return v[best] < 0.0 ? Eigen::Vector3d(-v) : v;
}

PrincipalFrame principal_frame(const PointCloud& cloud) {
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "principal frame of an empty cloud");
    }

    std::vector<Point> sorted = cloud.points;
    std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) {
        return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    });

    const double n = static_cast<double>(sorted.size());
    Point mean = Point::Zero();
    for (const auto& p : sorted) {
        mean += p;
    }
    mean /= n;

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : sorted) {
        const Point d = p - mean;
        cov.noalias() += d * d.transpose();
    }
    cov /= n;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    // Ascending from Eigen; reverse into descending order.
    const Eigen::Vector3d ascending = solver.eigenvalues();
    const Eigen::Matrix3d vectors = solver.eigenvectors();

    PrincipalFrame frame;
    frame.centroid = mean;
    for (int i = 0; i < 3; ++i) {
        frame.eigenvalues[i] = std::max(0.0, ascending[2 - i]);
        frame.axes.col(i) = normalize_sign(vectors.col(2 - i));
    }

    // Relative floor catches round-off on large-scale planar clouds.
    const double floor = std::max(kEigenvalueClamp, 1e-10 * frame.eigenvalues[0]);
    for (int i = 0; i < 3; ++i) {
        if (frame.eigenvalues[i] <= floor) {
            ++frame.degenerate_axes;
        }
    }
    return frame;
}

}  // namespace vlad::pcmath
