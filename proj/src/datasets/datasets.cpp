#include "vlad/datasets/datasets.hpp"

#include "vlad/error.hpp"
#include "vlad/lifting/image_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace vlad::datasets {

using graspx::GraspRectangle;
using graspx::Vec2;

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) {
        return false;
    }
    // from_chars for double is not available everywhere; strtod on a copy.
    const std::string copy(text);
    char* end = nullptr;
    out = std::strtod(copy.c_str(), &end);
    return end == copy.c_str() + copy.size() && std::isfinite(out);
}

fs::path first_existing(const std::vector<fs::path>& candidates) {
    for (const auto& c : candidates) {
        if (fs::exists(c)) {
            return c;
        }
    }
    return candidates.front();
}

std::optional<fs::path> optional_file(const fs::path& p) {
    return fs::exists(p) ? std::optional<fs::path>(p) : std::nullopt;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Annotation files under root whose name ends with `suffix`, sorted by path.
std::vector<fs::path> find_annotation_files(const fs::path& root, std::string_view suffix) {
    if (!fs::is_directory(root)) {
        throw Error(ErrorCode::MissingDirectory, root.string() + " is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && ends_with(entry.path().filename().string(), suffix)) {
            files.push_back(entry.path());
        }
    }
    return files;
}

void finish(LoadReport& report, const fs::path& root) {
    std::sort(report.samples.begin(), report.samples.end(),
              [](const Sample& a, const Sample& b) { return a.id < b.id; });
    if (report.samples.empty()) {
        throw Error(ErrorCode::NoSamples, "no usable samples under " + root.string());
    }
}

}  // namespace

DatasetKind parse_dataset_kind(std::string_view name) {
    if (name == "cornell") {
        return DatasetKind::Cornell;
    }
    if (name == "jacquard") {
        return DatasetKind::Jacquard;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown dataset \"" + std::string(name) + "\"");
}

std::string_view to_string(DatasetKind kind) { return kind == DatasetKind::Cornell ? "cornell" : "jacquard"; }

std::vector<GraspRectangle> parse_cornell_rectangles(std::istream& in, std::size_t& warnings) {
    std::vector<GraspRectangle> rects;
    std::array<Vec2, 4> corners;
    int filled = 0;
    bool group_ok = true;
    std::string line;
    while (std::getline(in, line)) {
        const auto text = trim(line);
        if (text.empty()) {
            continue;
        }
        std::istringstream fields{std::string(text)};
        std::string xs, ys;
        double x = 0.0, y = 0.0;
        const bool ok = static_cast<bool>(fields >> xs >> ys) && parse_double(xs, x) && parse_double(ys, y);
        group_ok = group_ok && ok;
        corners[static_cast<std::size_t>(filled)] = Vec2(x, y);
        if (++filled == 4) {
            const auto rect = graspx::from_corners(corners);
            if (group_ok && rect.valid()) {
                rects.push_back(rect);
            } else {
                ++warnings;
            }
            filled = 0;
            group_ok = true;
        }
    }
    if (filled != 0) {
        ++warnings;
    }
    return rects;
}

std::string format_cornell_rectangles(const std::vector<GraspRectangle>& rects) {
    std::ostringstream out;
    out << std::setprecision(17);
    for (const auto& r : rects) {
        for (const auto& c : r.corners()) {
            out << c.x() << ' ' << c.y() << '\n';
        }
    }
    return out.str();
}

std::optional<GraspRectangle> parse_jacquard_line(std::string_view line) {
    line = trim(line);
    double values[5];
    for (int i = 0; i < 5; ++i) {
        const auto sep = line.find(';');
        const auto field = i < 4 ? line.substr(0, sep) : line;
        if ((i < 4 && sep == std::string_view::npos) || !parse_double(field, values[i])) {
            return std::nullopt;
        }
        if (i < 4) {
            line.remove_prefix(sep + 1);
        }
    }
    GraspRectangle r;
    r.center = Vec2(values[0], values[1]);
    r.angle = graspx::normalize_angle(values[2] * std::numbers::pi / 180.0);
    r.width = values[3];
    r.height = values[4];
    if (!r.valid()) {
        return std::nullopt;
    }
    return r;
}

std::string format_jacquard_line(const GraspRectangle& rect) {
    std::ostringstream out;
    out << std::setprecision(17) << rect.center.x() << ';' << rect.center.y() << ';'
        << rect.angle * 180.0 / std::numbers::pi << ';' << rect.width << ';' << rect.height;
    return out.str();
}

std::optional<lifting::CameraIntrinsics> read_camera(const fs::path& root) {
    const auto path = root / "camera.json";
    if (!fs::exists(path)) {
        return std::nullopt;
    }
    std::ifstream in(path);
    try {
        const auto j = nlohmann::json::parse(in);
        lifting::CameraIntrinsics k{j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(),
                                    j.at("cy").get<double>()};
        k.validate();
        return k;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, path.string() + ": " + e.what());
    }
}

LoadReport load_cornell_report(const fs::path& root) {
    LoadReport report;
    const auto camera = read_camera(root);
    for (const auto& file : find_annotation_files(root, "cpos.txt")) {
        ++report.files_seen;
        const std::string name = file.filename().string();
        const std::string id = name.substr(0, name.size() - std::string_view("cpos.txt").size());
        const fs::path dir = file.parent_path();

        std::ifstream in(file);
        Sample s;
        s.id = id;
        for (const auto& rect : parse_cornell_rectangles(in, s.parse_warnings)) {
            s.annotations.push_back({rect, AnnotationSource::Human});
        }
        report.warnings += s.parse_warnings;
        if (s.annotations.empty()) {
            ++report.excluded;
            continue;
        }
        s.rgb_path = dir / (id + "r.png");
        s.depth_path = first_existing({dir / (id + "d.png"), dir / (id + "d.f32")});
        s.object_mask_path = optional_file(dir / (id + "mask.png"));
        s.intrinsics = camera;
        report.samples.push_back(std::move(s));
    }
    finish(report, root);
    return report;
}

std::vector<Sample> load_cornell(const fs::path& root) { return load_cornell_report(root).samples; }

LoadReport load_jacquard_report(const fs::path& root, std::size_t min_annotations) {
    LoadReport report;
    const auto camera = read_camera(root);
    for (const auto& file : find_annotation_files(root, "_grasps.txt")) {
        ++report.files_seen;
        const std::string name = file.filename().string();
        const std::string id = name.substr(0, name.size() - std::string_view("_grasps.txt").size());
        const fs::path dir = file.parent_path();

        std::ifstream in(file);
        Sample s;
        s.id = id;
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) {
                continue;
            }
            if (auto rect = parse_jacquard_line(line)) {
                s.annotations.push_back({*rect, AnnotationSource::Simulated});
            } else {
                ++s.parse_warnings;
            }
        }
        report.warnings += s.parse_warnings;
        // "Fewer than min_annotations" is excluded; exactly the minimum stays.
        if (s.annotations.empty() || s.annotations.size() < min_annotations) {
            ++report.excluded;
            continue;
        }
        s.rgb_path = dir / (id + "_RGB.png");
        s.depth_path = first_existing({dir / (id + "_depth.png"), dir / (id + "_depth.f32")});
        s.object_mask_path = optional_file(dir / (id + "_mask.png"));
        s.intrinsics = camera;
        report.samples.push_back(std::move(s));
    }
    finish(report, root);
    return report;
}

std::vector<Sample> load_jacquard(const fs::path& root, std::size_t min_annotations) {
    return load_jacquard_report(root, min_annotations).samples;
}

LoadReport load_report(DatasetKind kind, const fs::path& root, std::size_t min_annotations) {
    return kind == DatasetKind::Cornell ? load_cornell_report(root) : load_jacquard_report(root, min_annotations);
}

std::set<std::string> read_id_list(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::set<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        const auto text = trim(line);
        if (!text.empty() && text.front() != '#') {
            ids.emplace(text);
        }
    }
    return ids;
}

std::vector<Sample> filter_by_ids(std::vector<Sample> samples, const std::set<std::string>& ids) {
    std::erase_if(samples, [&](const Sample& s) { return !ids.contains(s.id); });
    return samples;
}

lifting::RgbImage load_rgb(const Sample& sample) { return lifting::read_rgb_png(sample.rgb_path); }

lifting::DepthMap load_depth(const Sample& sample) { return lifting::read_depth(sample.depth_path); }

std::optional<lifting::BinaryMask> load_object_mask(const Sample& sample) {
    if (!sample.object_mask_path) {
        return std::nullopt;
    }
    return lifting::read_mask_png(*sample.object_mask_path);
}

}  // namespace vlad::datasets
