#pragma once

#include "vlad/datasets/annotation.hpp"
#include "vlad/genclients/replay.hpp"
#include "vlad/lifting/raster.hpp"
#include "vlad/pcmath/point_cloud.hpp"

#include <Eigen/Geometry>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace vlad::testing {

// Skewed, anisotropic cloud: distinct principal variances and no reflection
// symmetry, so every wrong sign triple has a strictly positive Chamfer loss.
std::vector<pcmath::Point> anisotropic_cloud(std::mt19937_64& rng, std::size_t n,
                                             const Eigen::Vector3d& spread = {3.0, 1.5, 0.6});

Eigen::Matrix3d random_rotation(std::mt19937_64& rng);
// Rotation by `angle` about a random axis.
Eigen::Matrix3d rotation_by(std::mt19937_64& rng, double angle);

std::vector<pcmath::Point> transformed(const std::vector<pcmath::Point>& pts, const Eigen::Matrix3d& linear,
                                       const Eigen::Vector3d& offset);

/// Rod through the object, in object-local coordinates.
struct RodSpec {
    Eigen::Vector3d direction{0.0, 1.0, 0.0};
    Eigen::Vector3d through = Eigen::Vector3d::Zero();
    double radius = 0.006;
    double half_length = 0.16;
    bool broken = true;  // false: drawn on top of the object, no gap
};

/// An elongated ellipsoid body with an off-center knob, sitting in front of a
/// table plane. Pose is object-local to camera: x_cam = center + scale * R x_local.
struct SyntheticObject {
    Eigen::Vector3d center{0.0, 0.0, 1.0};
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    double scale = 1.0;
    Eigen::Vector3d body_axes{0.10, 0.045, 0.035};
    Eigen::Vector3d knob_center{0.085, 0.02, -0.01};
    Eigen::Vector3d knob_axes{0.035, 0.035, 0.03};
    double table_depth = 1.15;
};

struct Render {
    lifting::RgbImage rgb;
    lifting::DepthMap depth;
    lifting::BinaryMask object;
    lifting::BinaryMask rod;
};

lifting::CameraIntrinsics synthetic_camera();
inline constexpr int kImageWidth = 240;
inline constexpr int kImageHeight = 180;

Render render(const SyntheticObject& object, const RodSpec* rod);

/// The grasp the rod encodes: where the rod enters and leaves the object,
/// projected into the image. Center is the projected midpoint; angle is the
/// projected rod direction; width is the projected entry-exit distance.
graspx::GraspRectangle ground_truth_grasp(const SyntheticObject& object, const RodSpec& rod);

/// Serves one precomputed generated render for every request; the chat
/// steps answer with fixed text.
class SyntheticServices final : public genclients::GenerationService,
                                public genclients::DepthService,
                                public genclients::SegmentationService {
public:
    SyntheticServices(Render generated, lifting::BinaryMask scene_object, double depth_scale = 1.0);

    genclients::ChatStepReply chat_step(const genclients::ChatStepRequest& request) override;
    std::string provider() const override { return "synthetic"; }
    lifting::DepthMap predict_depth(const std::string& sample_id, const lifting::RgbImage& image) override;
    lifting::BinaryMask segment(const std::string& sample_id, const lifting::RgbImage& image,
                                genclients::SegmentQuery query) override;

private:
    Render generated_;
    lifting::BinaryMask scene_object_;
    double depth_scale_;
};

genclients::ClientSet synthetic_clients(Render generated, lifting::BinaryMask scene_object, double depth_scale = 1.0);

enum class FixtureKind { Identity, RotatedScaled, Unbroken, NoRod };

struct SyntheticCase {
    std::string id;
    SyntheticObject scene;
    Render scene_render;
    genclients::GenerativeOutputs outputs;
    graspx::GraspRectangle truth;
};

// `variant` perturbs the object pose so batch samples differ.
SyntheticCase make_case(FixtureKind kind, const std::string& id, int variant = 0);

/// Writes a Cornell-layout sample (<id>r.png, <id>d.png, <id>mask.png,
/// <id>cpos.txt with the ground truth plus jittered copies) and its replay
/// fixture under fixtures/<id>/.
void write_cornell_sample(const std::filesystem::path& dataset_root, const std::filesystem::path& fixture_root,
                          const SyntheticCase& c);

class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace vlad::testing
