#pragma once

#include <Eigen/Core>

#include <span>
#include <string_view>
#include <vector>

namespace vlad::pcmath {

using Point = Eigen::Vector3d;

// Cartesian space a cloud lives in: the observed scene or the generated image.
enum class Frame { Scene, Generated };
enum class Role { Object, Rod, Untagged };

std::string_view to_string(Frame frame);
std::string_view to_string(Role role);

struct PointCloud {
    std::vector<Point> points;
    Frame frame = Frame::Scene;
    Role role = Role::Untagged;

    PointCloud() = default;
    PointCloud(std::vector<Point> pts, Frame f, Role r = Role::Untagged)
        : points(std::move(pts)), frame(f), role(r) {}

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
};

// Throws Error{EmptyCloud} when the cloud has no points, Error{InvalidArgument}
// when any coordinate is non-finite.
void require_valid(const PointCloud& cloud, std::string_view what);

Point centroid(const PointCloud& cloud);

/// 4x4 homogeneous map whose last row is exactly (0, 0, 0, 1).
///
/// The linear block is NOT required to be orthogonal: alignment produces
/// anisotropic scaling and reflections. `target` is the frame the mapped
/// points are tagged with.
class RigidishTransform {
public:
    RigidishTransform();
    RigidishTransform(const Eigen::Matrix4d& matrix, Frame target);

    static RigidishTransform identity(Frame target);
    static RigidishTransform translation(const Point& offset, Frame target);
    // x -> linear * (x - source_center) + target_center
    static RigidishTransform centered(const Eigen::Matrix3d& linear, const Point& source_center,
                                      const Point& target_center, Frame target);

    const Eigen::Matrix4d& matrix() const noexcept { return matrix_; }
    Eigen::Matrix3d linear() const { return matrix_.topLeftCorner<3, 3>(); }
    Point offset() const { return matrix_.topRightCorner<3, 1>(); }
    Frame target() const noexcept { return target_; }

    Point apply(const Point& p) const;
    RigidishTransform inverse(Frame target) const;
    // (*this) after `first`
    RigidishTransform compose(const RigidishTransform& first) const;

private:
    Eigen::Matrix4d matrix_;
    Frame target_;
};

PointCloud apply_transform(const RigidishTransform& t, const PointCloud& cloud);

}  // namespace vlad::pcmath
