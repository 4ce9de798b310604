#pragma once

#include "vlad/align/align.hpp"
#include "vlad/datasets/datasets.hpp"
#include "vlad/evalx/scoring.hpp"
#include "vlad/genclients/replay.hpp"
#include "vlad/graspx/graspx.hpp"
#include "vlad/lifting/lifting.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vlad::pipeline {

enum class FailureStage { Generation, Lift, Align, NoRodDetected, NoViableGrasp };
std::string_view to_string(FailureStage stage);

enum class AlignMethod { PcaOpt, Icp };
AlignMethod parse_align_method(std::string_view name);
std::string_view to_string(AlignMethod method);

struct PipelineConfig {
    evalx::EvalConfig eval;
    AlignMethod align_method = AlignMethod::PcaOpt;
    align::PcaOptOptions pca;
    int icp_max_iters = 50;
    double icp_tol = 1e-10;
    int rod_dilation = lifting::kDefaultRodDilation;
    int min_gap = 2;
    std::optional<double> jaw_height;
    genclients::GenerationSettings generation;
    // Used when a sample carries no camera.json intrinsics.
    std::optional<lifting::CameraIntrinsics> intrinsics;
    std::optional<std::filesystem::path> debug_dir;
    std::optional<std::filesystem::path> plot_dir;
    int workers = 1;

    graspx::GraspOptions grasp_options() const;
};

struct PipelineRun {
    std::string sample_id;
    std::optional<genclients::GenerationExchange> exchange;
    std::optional<align::AlignmentResult> alignment;
    std::optional<graspx::GraspRectangle> grasp;
    std::optional<FailureStage> failure_stage;
    std::string failure_message;
    std::map<std::string, double> timings_ms;
    lifting::LiftStats scene_lift;
    lifting::LiftStats generated_lift;
    std::vector<graspx::Discontinuity> discontinuities;
    std::optional<evalx::SampleRecord> record;
};

/// Scene inputs for one sample, already loaded.
struct SceneInputs {
    std::string id;
    lifting::RgbImage rgb;
    lifting::DepthMap depth;
    // Absent: the segmentation client is asked for the scene object.
    std::optional<lifting::BinaryMask> object_mask;
    std::optional<lifting::CameraIntrinsics> intrinsics;
    std::vector<datasets::GraspAnnotation> annotations;
};

SceneInputs load_scene(const datasets::Sample& sample);

/// Runs generation, lifting, alignment, rod projection and grasp extraction
/// for one sample. Stage errors are recorded in failure_stage, never thrown.
PipelineRun run_scene(const SceneInputs& scene, const PipelineConfig& cfg, const genclients::ClientSet& clients);
PipelineRun run_sample(const datasets::Sample& sample, const PipelineConfig& cfg,
                       const genclients::ClientSet& clients);

struct BatchResult {
    evalx::EvalReport report;
    std::vector<PipelineRun> runs;
};

/// Samples run on up to cfg.workers threads; results are ordered by input
/// position regardless of completion order. Samples without a grasp score as
/// failures. Throws Error{NoSamples} on empty input.
BatchResult run_batch(const std::vector<datasets::Sample>& samples, const PipelineConfig& cfg,
                      const genclients::ClientSet& clients);

nlohmann::json to_json(const PipelineRun& run);
// One JSON object per line.
void write_run_log(const std::filesystem::path& path, const std::vector<PipelineRun>& runs);

// Draws the predicted rectangle (green) and annotations (red) over the image.
lifting::RgbImage draw_overlay(const lifting::RgbImage& image, const std::optional<graspx::GraspRectangle>& grasp,
                               const std::vector<datasets::GraspAnnotation>& annotations);

}  // namespace vlad::pipeline
