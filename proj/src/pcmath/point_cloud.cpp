#include "vlad/pcmath/point_cloud.hpp"

#include "vlad/error.hpp"

#include <Eigen/LU>

#include <string>

namespace vlad::pcmath {

std::string_view to_string(Frame frame) {
    return frame == Frame::Scene ? "scene" : "generated";
}

std::string_view to_string(Role role) {
    switch (role) {
        case Role::Object: return "object";
        case Role::Rod: return "rod";
        case Role::Untagged: return "untagged";
    }
    return "untagged";
}

void require_valid(const PointCloud& cloud, std::string_view what) {
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, std::string(what) + " has no points");
    }
    for (const auto& p : cloud.points) {
        if (!p.allFinite()) {
            throw Error(ErrorCode::InvalidArgument, std::string(what) + " has a non-finite coordinate");
        }
    }
}

Point centroid(const PointCloud& cloud) {
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "centroid of an empty cloud");
    }
    Point sum = Point::Zero();
    for (const auto& p : cloud.points) {
        sum += p;
    }
    return sum / static_cast<double>(cloud.size());
}

RigidishTransform::RigidishTransform() : matrix_(Eigen::Matrix4d::Identity()), target_(Frame::Scene) {}

RigidishTransform::RigidishTransform(const Eigen::Matrix4d& matrix, Frame target)
    : matrix_(matrix), target_(target) {
    if (!matrix_.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "transform has non-finite entries");
    }
    if (matrix_(3, 0) != 0.0 || matrix_(3, 1) != 0.0 || matrix_(3, 2) != 0.0 || matrix_(3, 3) != 1.0) {
        throw Error(ErrorCode::InvalidArgument, "transform last row must be (0, 0, 0, 1)");
    }
    if (matrix_.topLeftCorner<3, 3>().determinant() == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "transform linear block is singular");
    }
}

RigidishTransform RigidishTransform::identity(Frame target) {
    return RigidishTransform(Eigen::Matrix4d::Identity(), target);
}

RigidishTransform RigidishTransform::translation(const Point& offset, Frame target) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topRightCorner<3, 1>() = offset;
    return RigidishTransform(m, target);
}

RigidishTransform RigidishTransform::centered(const Eigen::Matrix3d& linear, const Point& source_center,
                                              const Point& target_center, Frame target) {
    Eigen::Matrix4d to_origin = Eigen::Matrix4d::Identity();
    to_origin.topRightCorner<3, 1>() = -source_center;
    Eigen::Matrix4d block = Eigen::Matrix4d::Identity();
    block.topLeftCorner<3, 3>() = linear;
    Eigen::Matrix4d from_origin = Eigen::Matrix4d::Identity();
    from_origin.topRightCorner<3, 1>() = target_center;
    return RigidishTransform(from_origin * block * to_origin, target);
}

Point RigidishTransform::apply(const Point& p) const {
    const auto& m = matrix_;
    return {m(0, 0) * p.x() + m(0, 1) * p.y() + m(0, 2) * p.z() + m(0, 3),
            m(1, 0) * p.x() + m(1, 1) * p.y() + m(1, 2) * p.z() + m(1, 3),
            m(2, 0) * p.x() + m(2, 1) * p.y() + m(2, 2) * p.z() + m(2, 3)};
}

RigidishTransform RigidishTransform::inverse(Frame target) const {
    const Eigen::Matrix3d inv = linear().inverse();
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = inv;
    m.topRightCorner<3, 1>() = -inv * offset();
    return RigidishTransform(m, target);
}

RigidishTransform RigidishTransform::compose(const RigidishTransform& first) const {
    Eigen::Matrix4d m = matrix_ * first.matrix_;
    m.row(3) << 0.0, 0.0, 0.0, 1.0;
    return RigidishTransform(m, target_);
}

PointCloud apply_transform(const RigidishTransform& t, const PointCloud& cloud) {
    PointCloud out;
    out.frame = t.target();
    out.role = cloud.role;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points) {
        out.points.push_back(t.apply(p));
    }
    return out;
}

}  // namespace vlad::pcmath
