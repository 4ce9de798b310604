#include "vlad/align/align.hpp"

#include "vlad/error.hpp"
#include "vlad/pcmath/metrics.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

namespace vlad::align {

using pcmath::Frame;
using pcmath::Point;
using pcmath::PointCloud;
using pcmath::RigidishTransform;

namespace {

std::vector<Point> transformed(const RigidishTransform& t, std::span<const Point> points) {
    std::vector<Point> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        out.push_back(t.apply(p));
    }
    return out;
}

void finish_metrics(AlignmentResult& result, const PointCloud& p_s, const PointCloud& p_g) {
    const pcmath::ChamferTarget scene(p_s.points);
    const auto moved = transformed(result.transform, p_g.points);
    result.cd = scene.chamfer(moved);
    result.uhd = scene.hausdorff_from(moved);
}

// Rigid (R, t) minimizing sum |R a_i + t - b_i|^2.
RigidishTransform kabsch(std::span<const Point> from, std::span<const Point> to) {
    const double n = static_cast<double>(from.size());
    Point mean_from = Point::Zero();
    Point mean_to = Point::Zero();
    for (std::size_t i = 0; i < from.size(); ++i) {
        mean_from += from[i];
        mean_to += to[i];
    }
    mean_from /= n;
    mean_to /= n;

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < from.size(); ++i) {
        h.noalias() += (from[i] - mean_from) * (to[i] - mean_to).transpose();
    }
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) {
        d(2, 2) = -1.0;
    }
    const Eigen::Matrix3d r = svd.matrixV() * d * svd.matrixU().transpose();
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = r;
    m.topRightCorner<3, 1>() = mean_to - r * mean_from;
    return RigidishTransform(m, Frame::Scene);
}

struct IcpOutcome {
    RigidishTransform transform;
    int iterations = 0;
};

IcpOutcome run_icp(std::span<const Point> target, std::span<const Point> source, RigidishTransform start,
                   int max_iters, double tol) {
    const pcmath::NearestNeighborIndex index(target);
    RigidishTransform current = start;
    double previous = std::numeric_limits<double>::infinity();
    std::vector<Point> matched(source.size());
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        const auto moved = transformed(current, source);
        double loss = 0.0;
        for (std::size_t i = 0; i < moved.size(); ++i) {
            const auto nn = index.nearest(moved[i]);
            matched[i] = target[nn.index];
            loss += nn.squared_distance;
        }
        loss /= static_cast<double>(moved.size());
        if (loss == 0.0 || (std::isfinite(previous) && std::abs(previous - loss) <= tol * previous)) {
            break;
        }
        previous = loss;
        current = kabsch(moved, matched).compose(current);
    }
    return {current, iter};
}

}  // namespace

Signs signs_for_index(int index) {
    return {(index & 4) != 0 ? -1 : 1, (index & 2) != 0 ? -1 : 1, (index & 1) != 0 ? -1 : 1};
}

Eigen::Matrix3d candidate_linear_block(const pcmath::PrincipalFrame& frame_s, const pcmath::PrincipalFrame& frame_g,
                                       const Signs& signs) {
    const Eigen::Vector3d lambda_s = frame_s.clamped_eigenvalues();
    const Eigen::Vector3d lambda_g = frame_g.clamped_eigenvalues();
    Eigen::Matrix3d inner;
    for (int c = 0; c < 3; ++c) {
        inner.col(c) = signs[static_cast<std::size_t>(c)] * std::sqrt(lambda_g[c] / lambda_s[c]) * frame_g.axes.col(c);
    }
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(inner);
    if (!inner.allFinite() || !lu.isInvertible()) {
        throw Error(ErrorCode::SingularCandidate, "candidate basis is not invertible");
    }
    return frame_s.axes * lu.inverse();
}

std::vector<Point> subsample(std::span<const Point> points, std::size_t max_points, std::uint64_t seed) {
    if (points.size() <= max_points) {
        return {points.begin(), points.end()};
    }
    // Partial Fisher-Yates over indices; raw engine output keeps it portable.
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < max_points; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(max_points);
    std::sort(idx.begin(), idx.end());
    std::vector<Point> out;
    out.reserve(max_points);
    for (auto i : idx) {
        out.push_back(points[i]);
    }
    return out;
}

AlignmentResult align_pca_opt(const PointCloud& p_s, const PointCloud& p_g, const PcaOptOptions& options) {
    pcmath::require_valid(p_s, "scene cloud");
    pcmath::require_valid(p_g, "generated cloud");

    const auto frame_s = pcmath::principal_frame(p_s);
    const auto frame_g = pcmath::principal_frame(p_g);

    const auto eval_s = subsample(p_s.points, options.max_eval_points, options.subsample_seed);
    const auto eval_g = subsample(p_g.points, options.max_eval_points, options.subsample_seed + 1);
    const pcmath::ChamferTarget scene(eval_s);

    const Eigen::Vector3d lambda_s = frame_s.eigenvalues;
    const Eigen::Vector3d lambda_g = frame_g.eigenvalues;
    const bool clamped = (lambda_s.array() < pcmath::kEigenvalueClamp).any() ||
                         (lambda_g.array() < pcmath::kEigenvalueClamp).any();

    AlignmentResult result;
    result.method = "pca-opt";
    result.degenerate_axes = frame_s.degenerate_axes + frame_g.degenerate_axes;
    result.all_candidates.reserve(8);

    std::optional<std::size_t> best;
    for (int c = 0; c < 8; ++c) {
        AlignmentCandidate cand;
        cand.signs = signs_for_index(c);
        cand.uses_clamped_axis = clamped;
        try {
            cand.linear_block = candidate_linear_block(frame_s, frame_g, cand.signs);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularCandidate) {
                throw;
            }
            cand.linear_block = Eigen::Matrix3d::Zero();
            cand.det = 0.0;
            cand.proper = false;
            cand.eligible = false;
            cand.loss = std::numeric_limits<double>::infinity();
            result.all_candidates.push_back(cand);
            continue;
        }
        cand.det = cand.linear_block.determinant();
        cand.proper = cand.det > 0.0;
        cand.eligible = cand.proper || !options.proper_only;
        const auto t = RigidishTransform::centered(cand.linear_block, frame_g.centroid, frame_s.centroid, Frame::Scene);
        cand.loss = scene.chamfer(transformed(t, eval_g));
        result.all_candidates.push_back(cand);
        if (cand.eligible && (!best || cand.loss < result.all_candidates[*best].loss)) {
            best = static_cast<std::size_t>(c);
        }
    }
    if (!best) {
        throw Error(ErrorCode::SingularCandidate, "no eligible candidate alignment");
    }

    result.chosen_index = *best;
    result.transform = RigidishTransform::centered(result.chosen().linear_block, frame_g.centroid, frame_s.centroid,
                                                   Frame::Scene);
    if (options.icp_polish) {
        const auto moved = transformed(result.transform, eval_g);
        const auto polish = run_icp(eval_s, moved, RigidishTransform::identity(Frame::Scene), options.polish_max_iters,
                                    options.polish_tol);
        result.transform = polish.transform.compose(result.transform);
        result.iterations = polish.iterations;
        result.polished = true;
    }
    finish_metrics(result, p_s, p_g);
    return result;
}

AlignmentResult align_icp(const PointCloud& p_s, const PointCloud& p_g, int max_iters, double tol) {
    pcmath::require_valid(p_s, "scene cloud");
    pcmath::require_valid(p_g, "generated cloud");

    const auto outcome = run_icp(p_s.points, p_g.points, RigidishTransform::identity(Frame::Scene), max_iters, tol);

    AlignmentResult result;
    result.method = "icp";
    result.transform = outcome.transform;
    result.iterations = outcome.iterations;
    AlignmentCandidate cand;
    cand.linear_block = outcome.transform.linear();
    cand.det = cand.linear_block.determinant();
    cand.proper = cand.det > 0.0;
    finish_metrics(result, p_s, p_g);
    cand.loss = result.cd;
    result.all_candidates.push_back(cand);
    return result;
}

AlignmentResult evaluate_external(const PointCloud& p_s, const PointCloud& p_g, const RigidishTransform& transform,
                                  const std::string& method) {
    pcmath::require_valid(p_s, "scene cloud");
    pcmath::require_valid(p_g, "generated cloud");
    AlignmentResult result;
    result.method = method;
    result.transform = RigidishTransform(transform.matrix(), Frame::Scene);
    AlignmentCandidate cand;
    cand.linear_block = transform.linear();
    cand.det = cand.linear_block.determinant();
    cand.proper = cand.det > 0.0;
    finish_metrics(result, p_s, p_g);
    cand.loss = result.cd;
    result.all_candidates.push_back(cand);
    return result;
}

nlohmann::json transform_to_json(const RigidishTransform& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            rows.push_back(t.matrix()(r, c));
        }
    }
    return rows;
}

RigidishTransform transform_from_json(const nlohmann::json& j, Frame target) {
    const auto& values = j.is_object() ? j.at("transform") : j;
    if (!values.is_array() || values.size() != 16) {
        throw Error(ErrorCode::InvalidArgument, "transform must be 16 numbers, row-major");
    }
    Eigen::Matrix4d m;
    for (int i = 0; i < 16; ++i) {
        m(i / 4, i % 4) = values.at(static_cast<std::size_t>(i)).get<double>();
    }
    return RigidishTransform(m, target);
}

nlohmann::json to_json(const AlignmentResult& result) {
    nlohmann::json candidates = nlohmann::json::array();
    for (std::size_t i = 0; i < result.all_candidates.size(); ++i) {
        const auto& c = result.all_candidates[i];
        candidates.push_back({{"signs", c.signs},
                              {"det", c.det},
                              {"loss", std::isfinite(c.loss) ? nlohmann::json(c.loss) : nlohmann::json(nullptr)},
                              {"proper", c.proper},
                              {"eligible", c.eligible},
                              {"chosen", i == result.chosen_index}});
    }
    return {{"method", result.method},
            {"transform", transform_to_json(result.transform)},
            {"candidates", candidates},
            {"cd", result.cd},
            {"uhd", result.uhd},
            {"degenerate_axes", result.degenerate_axes},
            {"iterations", result.iterations},
            {"polished", result.polished}};
}

}  // namespace vlad::align
