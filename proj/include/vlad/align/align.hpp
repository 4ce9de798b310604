#pragma once

#include "vlad/pcmath/point_cloud.hpp"
#include "vlad/pcmath/principal_frame.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace vlad::align {

using Signs = std::array<int, 3>;

// Candidate order: (+,+,+), (+,+,-), (+,-,+), ... (-,-,-). Ties in loss go to
// the earliest entry.
Signs signs_for_index(int index);

struct AlignmentCandidate {
    Signs signs{1, 1, 1};
    Eigen::Matrix3d linear_block = Eigen::Matrix3d::Identity();
    double loss = 0.0;
    double det = 1.0;
    bool proper = true;
    // Selection skipped this candidate (e.g. det <= 0 under proper_only).
    bool eligible = true;
    // Any eigenvalue feeding this block was floored at the clamp.
    bool uses_clamped_axis = false;
};

struct AlignmentResult {
    std::string method;
    pcmath::RigidishTransform transform;
    std::size_t chosen_index = 0;
    std::vector<AlignmentCandidate> all_candidates;
    double cd = 0.0;   // chamfer(scene, transform * generated), full clouds
    double uhd = 0.0;  // hausdorff_unidirectional(transform * generated, scene)
    int degenerate_axes = 0;  // collapsed axes, scene and generated clouds together
    int iterations = 0;
    bool polished = false;

    const AlignmentCandidate& chosen() const { return all_candidates.at(chosen_index); }
};

struct PcaOptOptions {
    bool proper_only = false;
    // Rigid ICP refinement after the sign search. Off by default.
    bool icp_polish = false;
    int polish_max_iters = 30;
    double polish_tol = 1e-9;
    std::size_t max_eval_points = 4096;
    std::uint64_t subsample_seed = 0x5eedULL;
};

/// [v_s1 v_s2 v_s3] * [i v_g1 r1, j v_g2 r2, k v_g3 r3]^-1 with
/// r_n = sqrt(lambda_g_n / lambda_s_n) over clamped eigenvalues.
/// Throws Error{SingularCandidate} if the inner matrix cannot be inverted.
Eigen::Matrix3d candidate_linear_block(const pcmath::PrincipalFrame& frame_s, const pcmath::PrincipalFrame& frame_g,
                                       const Signs& signs);

/// Principal-axis alignment of the generated cloud onto the scene cloud.
///
/// All eight sign triples are scored by Chamfer distance between the scene
/// cloud and the mapped generated cloud; the minimum wins. Clouds larger than
/// `max_eval_points` are subsampled for scoring only.
AlignmentResult align_pca_opt(const pcmath::PointCloud& p_s, const pcmath::PointCloud& p_g,
                              const PcaOptOptions& options = {});

/// Point-to-point ICP from the identity: nearest-neighbor matches, SVD rigid
/// update, stop when the relative change in mean squared match distance
/// drops below `tol` or after `max_iters`.
AlignmentResult align_icp(const pcmath::PointCloud& p_s, const pcmath::PointCloud& p_g, int max_iters = 50,
                          double tol = 1e-10);

// Scores a transform computed elsewhere (e.g. a certifiable registration
// tool) with the same metrics, so it can sit in the same comparison table.
AlignmentResult evaluate_external(const pcmath::PointCloud& p_s, const pcmath::PointCloud& p_g,
                                  const pcmath::RigidishTransform& transform, const std::string& method);

// Deterministic uniform subsample without replacement; order preserved.
std::vector<pcmath::Point> subsample(std::span<const pcmath::Point> points, std::size_t max_points,
                                     std::uint64_t seed);

nlohmann::json to_json(const AlignmentResult& result);
nlohmann::json transform_to_json(const pcmath::RigidishTransform& t);
pcmath::RigidishTransform transform_from_json(const nlohmann::json& j, pcmath::Frame target);

}  // namespace vlad::align
