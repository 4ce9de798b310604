#pragma once

#include "vlad/datasets/annotation.hpp"
#include "vlad/graspx/rectangle.hpp"

#include <nlohmann/json.hpp>

#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace vlad::evalx {

struct EvalConfig {
    double iou_threshold = 0.25;
    // Orientation test; nullopt scores on IoU alone.
    std::optional<double> angle_threshold = std::numbers::pi / 6;
    double delta = 0.1;
    double epsilon = 0.2;

    void validate() const;
};

struct SampleRecord {
    std::string id;
    double best_iou = 0.0;
    std::optional<std::size_t> matched_annotation;
    bool success = false;
    double cd = std::numeric_limits<double>::quiet_NaN();
    double uhd = std::numeric_limits<double>::quiet_NaN();
    // Set when the pipeline produced no grasp; such samples score as failures.
    std::optional<std::string> failure;
};

struct EvalReport {
    std::vector<SampleRecord> per_sample;
    double success_rate = 0.0;      // percent
    double success_rate_std = 0.0;  // population std of the 0/100 indicator
    double mean_cd = std::numeric_limits<double>::quiet_NaN();
    double std_cd = std::numeric_limits<double>::quiet_NaN();
    double mean_uhd = std::numeric_limits<double>::quiet_NaN();
    double std_uhd = std::numeric_limits<double>::quiet_NaN();
    std::size_t successes = 0;
};

/// Success iff some annotation has IoU >= iou_threshold and, when the angle
/// test is on, orientation within angle_threshold (mod pi). best_iou is the
/// maximum over annotations passing the angle test (all of them when off).
SampleRecord score_sample(const std::string& id, const graspx::GraspRectangle& predicted,
                          const std::vector<datasets::GraspAnnotation>& annotations, const EvalConfig& cfg);

SampleRecord failed_record(const std::string& id, const std::string& reason);

// Throws Error{EmptyRecords} on an empty input. CD/UHD statistics skip NaN entries.
EvalReport aggregate(std::vector<SampleRecord> records);

nlohmann::json to_json(const SampleRecord& record);
nlohmann::json to_json(const EvalReport& report);
std::string format_table(const EvalReport& report, const std::string& title);

}  // namespace vlad::evalx
