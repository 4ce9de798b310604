#pragma once

#include "vlad/datasets/annotation.hpp"
#include "vlad/lifting/raster.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vlad::datasets {

namespace fs = std::filesystem;

enum class DatasetKind { Cornell, Jacquard };

DatasetKind parse_dataset_kind(std::string_view name);
std::string_view to_string(DatasetKind kind);

inline constexpr std::size_t kDefaultMinAnnotations = 100;

/// One dataset item. Images are referenced by path and read on demand.
struct Sample {
    std::string id;
    fs::path rgb_path;
    fs::path depth_path;
    std::optional<fs::path> object_mask_path;
    std::optional<lifting::CameraIntrinsics> intrinsics;
    std::vector<GraspAnnotation> annotations;
    std::size_t parse_warnings = 0;
};

struct LoadReport {
    std::vector<Sample> samples;
    std::size_t files_seen = 0;
    std::size_t excluded = 0;  // empty or below the annotation minimum
    std::size_t warnings = 0;  // malformed rectangles / lines skipped
};

// Parses Cornell 4-corner text: one "x y" per line, four lines per rectangle.
// Returns the rectangles; `warnings` counts dropped groups (malformed, degenerate
// or an incomplete trailing group).
std::vector<graspx::GraspRectangle> parse_cornell_rectangles(std::istream& in, std::size_t& warnings);
std::string format_cornell_rectangles(const std::vector<graspx::GraspRectangle>& rects);

// Parses "x;y;theta_deg;opening;jaw"; nullopt if malformed or degenerate.
std::optional<graspx::GraspRectangle> parse_jacquard_line(std::string_view line);
std::string format_jacquard_line(const graspx::GraspRectangle& rect);

/// Cornell layout: <id>cpos.txt anywhere under root with <id>r.png,
/// <id>d.png (16-bit mm) or <id>d.f32, optional <id>mask.png. Negative
/// rectangle files (<id>cneg.txt) are ignored.
LoadReport load_cornell_report(const fs::path& root);
std::vector<Sample> load_cornell(const fs::path& root);

/// Jacquard layout: <id>_grasps.txt anywhere under root with <id>_RGB.png,
/// <id>_depth.png or <id>_depth.f32, optional <id>_mask.png. Samples with
/// fewer than `min_annotations` valid grasp lines are excluded.
LoadReport load_jacquard_report(const fs::path& root, std::size_t min_annotations = kDefaultMinAnnotations);
std::vector<Sample> load_jacquard(const fs::path& root, std::size_t min_annotations = kDefaultMinAnnotations);

LoadReport load_report(DatasetKind kind, const fs::path& root, std::size_t min_annotations = kDefaultMinAnnotations);

// Plain-text id list, one per line; '#' comments and blank lines skipped.
std::set<std::string> read_id_list(const fs::path& path);
std::vector<Sample> filter_by_ids(std::vector<Sample> samples, const std::set<std::string>& ids);

// Optional <root>/camera.json: {"fx":..,"fy":..,"cx":..,"cy":..}.
std::optional<lifting::CameraIntrinsics> read_camera(const fs::path& root);

lifting::RgbImage load_rgb(const Sample& sample);
lifting::DepthMap load_depth(const Sample& sample);
std::optional<lifting::BinaryMask> load_object_mask(const Sample& sample);

}  // namespace vlad::datasets
