#include "vlad/evalx/scoring.hpp"

#include "vlad/error.hpp"
#include "vlad/evalx/rect_iou.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace vlad::evalx {

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

void mean_std(const std::vector<double>& values, double& mean, double& std_dev) {
    std::vector<double> finite;
    for (double v : values) {
        if (std::isfinite(v)) {
            finite.push_back(v);
        }
    }
    if (finite.empty()) {
        return;
    }
    double sum = 0.0;
    for (double v : finite) {
        sum += v;
    }
    mean = sum / static_cast<double>(finite.size());
    double sq = 0.0;
    for (double v : finite) {
        sq += (v - mean) * (v - mean);
    }
    std_dev = std::sqrt(sq / static_cast<double>(finite.size()));
}

}  // namespace

void EvalConfig::validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "iou_threshold must lie in (0, 1]");
    }
    if (angle_threshold && !(*angle_threshold >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "angle_threshold must be nonnegative");
    }
}

SampleRecord score_sample(const std::string& id, const graspx::GraspRectangle& predicted,
                          const std::vector<datasets::GraspAnnotation>& annotations, const EvalConfig& cfg) {
    if (annotations.empty()) {
        throw Error(ErrorCode::NoAnnotations, "sample " + id + " has no annotations");
    }
    SampleRecord record;
    record.id = id;
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        const auto& truth = annotations[i].rectangle;
        if (cfg.angle_threshold &&
            graspx::angle_difference_mod_pi(predicted.angle, truth.angle) > *cfg.angle_threshold) {
            continue;
        }
        const double iou = rect_iou(predicted, truth);
        if (!record.matched_annotation || iou > record.best_iou) {
            record.best_iou = iou;
            record.matched_annotation = i;
        }
    }
    record.success = record.matched_annotation.has_value() && record.best_iou >= cfg.iou_threshold;
    return record;
}

SampleRecord failed_record(const std::string& id, const std::string& reason) {
    SampleRecord record;
    record.id = id;
    record.failure = reason;
    return record;
}

EvalReport aggregate(std::vector<SampleRecord> records) {
    if (records.empty()) {
        throw Error(ErrorCode::EmptyRecords, "nothing to aggregate");
    }
    EvalReport report;
    report.per_sample = std::move(records);
    std::vector<double> cds;
    std::vector<double> uhds;
    for (const auto& r : report.per_sample) {
        report.successes += r.success ? 1 : 0;
        cds.push_back(r.cd);
        uhds.push_back(r.uhd);
    }
    const double n = static_cast<double>(report.per_sample.size());
    const double p = static_cast<double>(report.successes) / n;
    report.success_rate = 100.0 * p;
    report.success_rate_std = 100.0 * std::sqrt(p * (1.0 - p));
    mean_std(cds, report.mean_cd, report.std_cd);
    mean_std(uhds, report.mean_uhd, report.std_uhd);
    return report;
}

nlohmann::json to_json(const SampleRecord& r) {
    nlohmann::json j = {{"id", r.id},
                        {"best_iou", r.best_iou},
                        {"matched_annotation_id", r.matched_annotation ? nlohmann::json(*r.matched_annotation)
                                                                       : nlohmann::json(nullptr)},
                        {"success", r.success},
                        {"cd", number_or_null(r.cd)},
                        {"uhd", number_or_null(r.uhd)}};
    if (r.failure) {
        j["failure"] = *r.failure;
    }
    return j;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& r : report.per_sample) {
        samples.push_back(to_json(r));
    }
    return {{"samples", report.per_sample.size()},
            {"successes", report.successes},
            {"success_rate", report.success_rate},
            {"success_rate_std", report.success_rate_std},
            {"mean_cd", number_or_null(report.mean_cd)},
            {"std_cd", number_or_null(report.std_cd)},
            {"mean_uhd", number_or_null(report.mean_uhd)},
            {"std_uhd", number_or_null(report.std_uhd)},
            {"per_sample", samples}};
}

std::string format_table(const EvalReport& report, const std::string& title) {
    std::ostringstream out;
    auto pm = [&](double mean, double sd) {
        std::ostringstream cell;
        if (std::isfinite(mean)) {
            cell << std::setprecision(4) << mean << " +- " << sd;
        } else {
            cell << "n/a";
        }
        return cell.str();
    };
    std::ostringstream sr;
    sr << std::fixed << std::setprecision(2) << report.success_rate << " +- " << report.success_rate_std;

    const int w = static_cast<int>(std::max<std::size_t>(title.size(), 8));
    out << std::left << std::setw(w) << "Method" << "  " << std::setw(18) << "SR (%)" << "  " << std::setw(26)
        << "CD" << "  " << "UHD" << '\n';
    out << std::left << std::setw(w) << title << "  " << std::setw(18) << sr.str() << "  " << std::setw(26)
        << pm(report.mean_cd, report.std_cd) << "  " << pm(report.mean_uhd, report.std_uhd) << '\n';
    out << report.successes << '/' << report.per_sample.size() << " samples succeeded\n";
    return out.str();
}

}  // namespace vlad::evalx
