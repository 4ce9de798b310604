#include "synthetic.hpp"

#include "vlad/datasets/datasets.hpp"
#include "vlad/error.hpp"
#include "vlad/lifting/image_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>

namespace vlad::testing {

namespace fs = std::filesystem;
using Eigen::Matrix3d;
using Eigen::Vector3d;

std::vector<pcmath::Point> anisotropic_cloud(std::mt19937_64& rng, std::size_t n, const Vector3d& spread) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::vector<pcmath::Point> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // One skewed axis plus a bent second axis breaks every mirror symmetry.
        const double a = expo(rng) - 1.0;
        const double b = gauss(rng);
        const double c = gauss(rng);
        pts.emplace_back(spread.x() * a, spread.y() * b + 0.3 * a * a, spread.z() * c + 0.2 * a * b);
    }
    return pts;
}

Matrix3d random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    q.normalize();
    return q.toRotationMatrix();
}

Matrix3d rotation_by(std::mt19937_64& rng, double angle) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
    axis.normalize();
    return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

std::vector<pcmath::Point> transformed(const std::vector<pcmath::Point>& pts, const Matrix3d& linear,
                                       const Vector3d& offset) {
    std::vector<pcmath::Point> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        out.push_back(linear * p + offset);
    }
    return out;
}

lifting::CameraIntrinsics synthetic_camera() { return {300.0, 300.0, 119.5, 89.5}; }

namespace {

constexpr double kNoHit = std::numeric_limits<double>::infinity();

struct Ellipsoid {
    Vector3d center;
    Matrix3d rotation;
    Vector3d axes;
};

// Smallest positive t with the ray t * w inside the ellipsoid boundary.
double hit_ellipsoid(const Ellipsoid& e, const Vector3d& w, double* exit = nullptr) {
    const Vector3d o = (e.rotation.transpose() * (-e.center)).cwiseQuotient(e.axes);
    const Vector3d d = (e.rotation.transpose() * w).cwiseQuotient(e.axes);
    const double a = d.dot(d);
    const double b = 2.0 * o.dot(d);
    const double c = o.dot(o) - 1.0;
    const double disc = b * b - 4 * a * c;
    if (disc < 0) {
        return kNoHit;
    }
    const double t0 = (-b - std::sqrt(disc)) / (2 * a);
    const double t1 = (-b + std::sqrt(disc)) / (2 * a);
    if (exit) {
        *exit = t1;
    }
    return t0 > 0 ? t0 : kNoHit;
}

// Line p0 + s * dir against an ellipsoid; the [s_in, s_out] chord if any.
std::optional<std::pair<double, double>> chord(const Ellipsoid& e, const Vector3d& p0, const Vector3d& dir) {
    const Vector3d o = (e.rotation.transpose() * (p0 - e.center)).cwiseQuotient(e.axes);
    const Vector3d d = (e.rotation.transpose() * dir).cwiseQuotient(e.axes);
    const double a = d.dot(d);
    const double b = 2.0 * o.dot(d);
    const double c = o.dot(o) - 1.0;
    const double disc = b * b - 4 * a * c;
    if (disc <= 0) {
        return std::nullopt;
    }
    return std::pair{(-b - std::sqrt(disc)) / (2 * a), (-b + std::sqrt(disc)) / (2 * a)};
}

struct Cylinder {
    Vector3d p0;
    Vector3d dir;
    double radius;
    double half_length;
};

double hit_cylinder(const Cylinder& cyl, const Vector3d& w) {
    const Vector3d o = -cyl.p0;
    const Vector3d w_perp = w - w.dot(cyl.dir) * cyl.dir;
    const Vector3d o_perp = o - o.dot(cyl.dir) * cyl.dir;
    const double a = w_perp.dot(w_perp);
    const double b = 2.0 * w_perp.dot(o_perp);
    const double c = o_perp.dot(o_perp) - cyl.radius * cyl.radius;
    const double disc = b * b - 4 * a * c;
    if (a <= 0 || disc < 0) {
        return kNoHit;
    }
    for (const double t : {(-b - std::sqrt(disc)) / (2 * a), (-b + std::sqrt(disc)) / (2 * a)}) {
        if (t > 0 && std::abs((t * w - cyl.p0).dot(cyl.dir)) <= cyl.half_length) {
            return t;
        }
    }
    return kNoHit;
}

std::pair<Ellipsoid, Ellipsoid> object_parts(const SyntheticObject& obj) {
    Ellipsoid body{obj.center, obj.rotation, obj.scale * obj.body_axes};
    Ellipsoid knob{obj.center + obj.scale * obj.rotation * obj.knob_center, obj.rotation, obj.scale * obj.knob_axes};
    return {body, knob};
}

Cylinder rod_cylinder(const SyntheticObject& obj, const RodSpec& rod) {
    return {obj.center + obj.scale * obj.rotation * rod.through, (obj.rotation * rod.direction).normalized(),
            obj.scale * rod.radius, obj.scale * rod.half_length};
}

std::uint8_t shade(std::uint8_t base, double z) {
    const double f = std::clamp(1.3 - 0.5 * z, 0.3, 1.0);
    return static_cast<std::uint8_t>(std::lround(base * f));
}

graspx::Vec2 project(const Vector3d& p, const lifting::CameraIntrinsics& k) {
    return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

}  // namespace

Render render(const SyntheticObject& object, const RodSpec* rod) {
    const auto k = synthetic_camera();
    const auto [body, knob] = object_parts(object);
    const std::optional<Cylinder> cyl = rod ? std::optional(rod_cylinder(object, *rod)) : std::nullopt;

    std::vector<float> depth(kImageWidth * kImageHeight);
    std::vector<std::uint8_t> rgb(3 * depth.size());
    Render r;
    r.object = lifting::BinaryMask(kImageWidth, kImageHeight);
    r.rod = lifting::BinaryMask(kImageWidth, kImageHeight);
    for (int v = 0; v < kImageHeight; ++v) {
        for (int u = 0; u < kImageWidth; ++u) {
            const Vector3d w((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
            const double t_obj = std::min(hit_ellipsoid(body, w), hit_ellipsoid(knob, w));
            const double t_rod = cyl ? hit_cylinder(*cyl, w) : kNoHit;
            double t = object.table_depth;
            std::array<std::uint8_t, 3> color{200, 200, 200};
            const bool rod_on_top = rod && !rod->broken && t_rod < kNoHit;
            if (rod_on_top || (t_rod < t_obj && t_rod < t)) {
                t = t_rod;
                color = {30, 60, 220};
                r.rod.set(u, v);
            } else if (t_obj < t) {
                t = t_obj;
                color = {210, 120, 40};
                r.object.set(u, v);
            }
            const std::size_t i = static_cast<std::size_t>(v) * kImageWidth + u;
            depth[i] = static_cast<float>(t);
            for (int c = 0; c < 3; ++c) {
                rgb[3 * i + c] = shade(color[c], t);
            }
        }
    }
    r.depth = lifting::DepthMap(kImageWidth, kImageHeight, std::move(depth));
    r.rgb = lifting::RgbImage(kImageWidth, kImageHeight, std::move(rgb));
    return r;
}

graspx::GraspRectangle ground_truth_grasp(const SyntheticObject& object, const RodSpec& rod) {
    const auto k = synthetic_camera();
    const auto [body, knob] = object_parts(object);
    const auto cyl = rod_cylinder(object, rod);
    double s_in = kNoHit;
    double s_out = -kNoHit;
    for (const auto& e : {body, knob}) {
        if (const auto c = chord(e, cyl.p0, cyl.dir)) {
            s_in = std::min(s_in, c->first);
            s_out = std::max(s_out, c->second);
        }
    }
    if (!(s_in < s_out)) {
        throw Error(ErrorCode::InvalidArgument, "synthetic rod misses the object");
    }
    const graspx::Vec2 a = project(cyl.p0 + s_in * cyl.dir, k);
    const graspx::Vec2 b = project(cyl.p0 + s_out * cyl.dir, k);
    graspx::GraspRectangle g;
    g.center = 0.5 * (a + b);
    g.angle = graspx::normalize_angle(std::atan2(b.y() - a.y(), b.x() - a.x()));
    g.width = (b - a).norm();
    g.height = 2.0 * k.fx * cyl.radius / cyl.p0.z();
    return g;
}

SyntheticServices::SyntheticServices(Render generated, lifting::BinaryMask scene_object, double depth_scale)
    : generated_(std::move(generated)), scene_object_(std::move(scene_object)), depth_scale_(depth_scale) {}

genclients::ChatStepReply SyntheticServices::chat_step(const genclients::ChatStepRequest& request) {
    genclients::ChatStepReply reply;
    if (request.modality == genclients::Modality::Image) {
        reply.text = "done";
        reply.image = generated_.rgb;
        reply.tokens = {1290, 0};
    } else if (request.step == 0) {
        reply.text = "Close the jaws across the narrow middle of the body, away from the knob.";
        reply.tokens = {18, 412};
    } else {
        reply.text = "Add one straight blue rod through the middle of the object, across its short side.";
        reply.tokens = {21, 96};
    }
    return reply;
}

lifting::DepthMap SyntheticServices::predict_depth(const std::string&, const lifting::RgbImage&) {
    std::vector<float> values = generated_.depth.values();
    for (auto& d : values) {
        d = static_cast<float>(d * depth_scale_);
    }
    return lifting::DepthMap(generated_.depth.width(), generated_.depth.height(), std::move(values));
}

lifting::BinaryMask SyntheticServices::segment(const std::string&, const lifting::RgbImage& image,
                                               genclients::SegmentQuery query) {
    const bool generated = image == generated_.rgb;
    if (query == genclients::SegmentQuery::Rod) {
        return generated ? generated_.rod : lifting::BinaryMask(image.width(), image.height());
    }
    return generated ? generated_.object : scene_object_;
}

genclients::ClientSet synthetic_clients(Render generated, lifting::BinaryMask scene_object, double depth_scale) {
    auto s = std::make_shared<SyntheticServices>(std::move(generated), std::move(scene_object), depth_scale);
    return {s, s, s};
}

SyntheticCase make_case(FixtureKind kind, const std::string& id, int variant) {
    SyntheticCase c;
    c.id = id;
    const double yaw = (20.0 + 11.0 * variant) * std::numbers::pi / 180.0;
    const double tilt = (15.0 - 3.0 * (variant % 4)) * std::numbers::pi / 180.0;
    c.scene.rotation = (Eigen::AngleAxisd(yaw, Vector3d::UnitZ()) * Eigen::AngleAxisd(tilt, Vector3d::UnitX()))
                           .toRotationMatrix();
    c.scene.center = Vector3d(0.004 * (variant % 3), -0.003 * (variant % 2), 1.0 + 0.01 * (variant % 5));
    c.scene_render = render(c.scene, nullptr);

    RodSpec rod;
    rod.broken = kind != FixtureKind::Unbroken;
    SyntheticObject generated = c.scene;
    double depth_scale = 1.0;
    if (kind == FixtureKind::RotatedScaled) {
        const Matrix3d spin = Eigen::AngleAxisd(std::numbers::pi / 6, Vector3d::UnitZ()).toRotationMatrix();
        generated.rotation = spin * c.scene.rotation;
        generated.scale = 0.8;
        depth_scale = 1.4;
    }
    const Render gen = kind == FixtureKind::NoRod ? render(generated, nullptr) : render(generated, &rod);
    c.truth = ground_truth_grasp(c.scene, rod);

    const auto clients = synthetic_clients(gen, c.scene_render.object, depth_scale);
    genclients::GenerationSettings settings;
    settings.templates = genclients::PromptTemplates::load_default();
    settings.retry = genclients::RetryPolicy::immediate(0);
    c.outputs = genclients::query_services(clients, id, c.scene_render.rgb, c.scene_render.object, settings);
    return c;
}

void write_cornell_sample(const fs::path& dataset_root, const fs::path& fixture_root, const SyntheticCase& c) {
    fs::create_directories(dataset_root);
    lifting::write_rgb_png(dataset_root / (c.id + "r.png"), c.scene_render.rgb);
    lifting::write_depth_png_mm(dataset_root / (c.id + "d.png"), c.scene_render.depth);
    lifting::write_mask_png(dataset_root / (c.id + "mask.png"), c.scene_render.object);
    std::vector<graspx::GraspRectangle> rects{c.truth};
    for (int i = 1; i <= 4; ++i) {
        graspx::GraspRectangle r = c.truth;
        r.center += graspx::Vec2(1.5 * i - 4, 0.5 * i);
        r.angle = graspx::normalize_angle(r.angle + 0.05 * (i - 2));
        r.height = std::max(r.height, 6.0);
        rects.push_back(r);
    }
    std::ofstream(dataset_root / (c.id + "cpos.txt")) << datasets::format_cornell_rectangles(rects);
    genclients::write_fixture(fixture_root / c.id, c.outputs);
}

TempDir::TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("vlad-" + tag + "-" + std::to_string(rd()));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

}  // namespace vlad::testing
