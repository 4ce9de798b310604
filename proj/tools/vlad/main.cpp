#include "vlad/align/align.hpp"
#include "vlad/datasets/datasets.hpp"
#include "vlad/error.hpp"
#include "vlad/evalx/scoring.hpp"
#include "vlad/genclients/http.hpp"
#include "vlad/genclients/replay.hpp"
#include "vlad/graspx/graspx.hpp"
#include "vlad/lifting/image_io.hpp"
#include "vlad/pcmath/cloud_io.hpp"
#include "vlad/pipeline/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <numbers>

using namespace vlad;
namespace fs = std::filesystem;

namespace {

struct DatasetArgs {
    std::string kind = "cornell";
    fs::path root;
    std::size_t min_annotations = datasets::kDefaultMinAnnotations;
    std::optional<fs::path> ids;
};

struct ScoringArgs {
    double iou_threshold = 0.25;
    bool iou_only = false;
    double angle_deg = 30.0;
    double delta = 0.1;
    double epsilon = 0.2;
};

struct RunArgs {
    DatasetArgs data;
    ScoringArgs scoring;
    std::string clients;
    fs::path out = "results";
    std::string method = "pca-opt";
    bool proper_only = false;
    bool icp_polish = false;
    int workers = 1;
    int min_gap = 2;
    int rod_dilation = lifting::kDefaultRodDilation;
    std::optional<double> jaw_height;
    std::optional<fs::path> debug_dir;
    bool plot = false;
    bool single_step = false;
    std::optional<fs::path> templates;
    std::vector<double> intrinsics;
    std::optional<fs::path> predictions;
};

void add_dataset_options(CLI::App* cmd, DatasetArgs& a) {
    cmd->add_option("--dataset", a.kind, "Dataset layout: cornell or jacquard")
        ->check(CLI::IsMember({"cornell", "jacquard"}));
    cmd->add_option("--root", a.root, "Dataset root directory")->required();
    cmd->add_option("--min-annotations", a.min_annotations, "Jacquard: drop samples with fewer grasps");
    cmd->add_option("--ids", a.ids, "Plain-text list of sample ids to keep");
}

void add_scoring_options(CLI::App* cmd, ScoringArgs& a) {
    cmd->add_option("--iou-threshold", a.iou_threshold, "Minimum rectangle IoU for a success");
    cmd->add_flag("--iou-only", a.iou_only, "Score on IoU alone, without the orientation test");
    cmd->add_option("--angle-threshold", a.angle_deg, "Orientation tolerance in degrees");
    cmd->add_option("--delta", a.delta, "Minimum gap run as a fraction of sqrt(object area)");
    cmd->add_option("--epsilon", a.epsilon, "Minimum gap / object IoU");
}

void add_pipeline_options(CLI::App* cmd, RunArgs& a) {
    cmd->add_option("--clients", a.clients, "replay:DIR or http:URL (default replay:<root>/fixtures)");
    cmd->add_option("--method", a.method, "Alignment: pca-opt or icp")->check(CLI::IsMember({"pca-opt", "icp"}));
    cmd->add_flag("--proper-only", a.proper_only, "Restrict the sign search to det > 0");
    cmd->add_flag("--icp-polish", a.icp_polish, "Rigid ICP refinement after the sign search");
    cmd->add_option("--workers", a.workers, "Samples processed in parallel")->check(CLI::PositiveNumber);
    cmd->add_option("--min-gap", a.min_gap, "Rod gaps shorter than this are closed");
    cmd->add_option("--rod-dilation", a.rod_dilation, "Dilation of the projected rod mask, pixels");
    cmd->add_option("--jaw-height", a.jaw_height, "Fixed rectangle height instead of the rod thickness");
    cmd->add_option("--debug-dir", a.debug_dir, "Dump intermediate clouds and masks here");
    cmd->add_flag("--plot", a.plot, "Write rectangle overlays to <out>/plots");
    cmd->add_flag("--single-step", a.single_step, "Skip the reasoning steps of the prompt chain");
    cmd->add_option("--templates", a.templates, "Prompt template directory");
    cmd->add_option("--intrinsics", a.intrinsics, "fx fy cx cy when the dataset has no camera.json")
        ->expected(4);
}

evalx::EvalConfig eval_config(const ScoringArgs& a) {
    evalx::EvalConfig cfg;
    cfg.iou_threshold = a.iou_threshold;
    if (a.iou_only) {
        cfg.angle_threshold.reset();
    } else {
        cfg.angle_threshold = a.angle_deg * std::numbers::pi / 180.0;
    }
    cfg.delta = a.delta;
    cfg.epsilon = a.epsilon;
    cfg.validate();
    return cfg;
}

std::vector<datasets::Sample> load_samples(const DatasetArgs& a) {
    auto samples = datasets::load_report(datasets::parse_dataset_kind(a.kind), a.root, a.min_annotations).samples;
    if (a.ids) {
        samples = datasets::filter_by_ids(std::move(samples), datasets::read_id_list(*a.ids));
    }
    if (samples.empty()) {
        throw Error(ErrorCode::NoSamples, "no samples left after filtering");
    }
    return samples;
}

pipeline::PipelineConfig pipeline_config(const RunArgs& a) {
    pipeline::PipelineConfig cfg;
    cfg.eval = eval_config(a.scoring);
    cfg.align_method = pipeline::parse_align_method(a.method);
    cfg.pca.proper_only = a.proper_only;
    cfg.pca.icp_polish = a.icp_polish;
    cfg.rod_dilation = a.rod_dilation;
    cfg.min_gap = a.min_gap;
    cfg.jaw_height = a.jaw_height;
    cfg.generation.templates = a.templates ? genclients::PromptTemplates::load(*a.templates)
                                           : genclients::PromptTemplates::load_default();
    cfg.generation.mode = a.single_step ? genclients::ChainMode::SingleStep : genclients::ChainMode::ThreeStep;
    if (!a.intrinsics.empty()) {
        cfg.intrinsics = lifting::CameraIntrinsics{a.intrinsics[0], a.intrinsics[1], a.intrinsics[2], a.intrinsics[3]};
    }
    cfg.debug_dir = a.debug_dir;
    if (a.plot) {
        cfg.plot_dir = a.out / "plots";
    }
    cfg.workers = a.workers;
    return cfg;
}

genclients::ClientSet clients_for(const RunArgs& a) {
    return genclients::make_clients(a.clients.empty() ? "replay:" + (a.data.root / "fixtures").string() : a.clients);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

int cmd_run(const RunArgs& a) {
    const auto samples = load_samples(a.data);
    const auto result = pipeline::run_batch(samples, pipeline_config(a), clients_for(a));
    fs::create_directories(a.out);
    pipeline::write_run_log(a.out / "runs.jsonl", result.runs);
    write_json(a.out / "report.json", evalx::to_json(result.report));
    const auto table = evalx::format_table(result.report, a.method);
    std::ofstream(a.out / "table.txt") << table;
    std::cout << table;
    return 0;
}

// Predictions JSONL: {"sample_id"|"id": ..., "grasp": rectangle JSON or null}.
std::map<std::string, std::optional<graspx::GraspRectangle>> read_predictions(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::map<std::string, std::optional<graspx::GraspRectangle>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto j = nlohmann::json::parse(line);
        const auto id = j.contains("sample_id") ? j.at("sample_id").get<std::string>() : j.at("id").get<std::string>();
        const auto& g = j.at("grasp");
        out[id] = g.is_null() ? std::nullopt : std::optional(graspx::rectangle_from_json(g));
    }
    return out;
}

int cmd_eval(const RunArgs& a, const std::optional<fs::path>& report_path) {
    const auto samples = load_samples(a.data);
    evalx::EvalReport report;
    if (a.predictions) {
        const auto cfg = eval_config(a.scoring);
        const auto predictions = read_predictions(*a.predictions);
        std::vector<evalx::SampleRecord> records;
        for (const auto& s : samples) {
            const auto it = predictions.find(s.id);
            if (it == predictions.end() || !it->second) {
                records.push_back(evalx::failed_record(s.id, it == predictions.end() ? "NoPrediction" : "NoGrasp"));
            } else {
                records.push_back(evalx::score_sample(s.id, *it->second, s.annotations, cfg));
            }
        }
        report = evalx::aggregate(std::move(records));
    } else {
        report = pipeline::run_batch(samples, pipeline_config(a), clients_for(a)).report;
    }
    if (report_path) {
        write_json(*report_path, evalx::to_json(report));
    }
    std::cout << evalx::format_table(report, a.predictions ? "predictions" : a.method);
    return 0;
}

int cmd_align(const fs::path& src, const fs::path& dst, const std::string& method, bool proper_only, bool polish,
              const std::optional<fs::path>& out) {
    // --src is the generated cloud to move, --dst the scene cloud it lands on.
    const auto p_g = pcmath::read_cloud(src, pcmath::Frame::Generated, pcmath::Role::Object);
    const auto p_s = pcmath::read_cloud(dst, pcmath::Frame::Scene, pcmath::Role::Object);
    align::AlignmentResult result;
    if (pipeline::parse_align_method(method) == pipeline::AlignMethod::PcaOpt) {
        align::PcaOptOptions opts;
        opts.proper_only = proper_only;
        opts.icp_polish = polish;
        result = align::align_pca_opt(p_s, p_g, opts);
    } else {
        result = align::align_icp(p_s, p_g);
    }
    const auto j = align::to_json(result);
    if (out) {
        write_json(*out, j);
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_extract(const fs::path& rod, const fs::path& object, const graspx::GraspOptions& opts,
                const std::optional<fs::path>& out) {
    const auto ex = graspx::extract_grasp(lifting::read_mask_png(rod), lifting::read_mask_png(object), opts);
    nlohmann::json gaps = nlohmann::json::array();
    for (const auto& d : ex.discontinuities) {
        gaps.push_back(graspx::to_json(d));
    }
    const nlohmann::json j = {{"grasp", graspx::to_json(ex.grasp)},
                              {"axis_angle_rad", ex.axis.angle},
                              {"rod_thickness_px", ex.axis.thickness},
                              {"discontinuities", gaps}};
    if (out) {
        write_json(*out, j);
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_validate(const DatasetArgs& a, bool kind_given) {
    std::vector<std::string> kinds;
    if (kind_given) {
        kinds.push_back(a.kind);
    } else {
        kinds = {"cornell", "jacquard"};
    }
    bool any = false;
    for (const auto& kind : kinds) {
        datasets::LoadReport report;
        try {
            report = datasets::load_report(datasets::parse_dataset_kind(kind), a.root, a.min_annotations);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NoSamples && !kind_given) {
                continue;
            }
            throw;
        }
        any = true;
        std::size_t annotations = 0;
        std::size_t missing = 0;
        std::size_t masks = 0;
        for (const auto& s : report.samples) {
            annotations += s.annotations.size();
            missing += !fs::exists(s.rgb_path) || !fs::exists(s.depth_path);
            masks += s.object_mask_path.has_value();
        }
        std::cout << "layout:            " << kind << '\n'
                  << "annotation files:  " << report.files_seen << '\n'
                  << "samples:           " << report.samples.size() << '\n'
                  << "excluded:          " << report.excluded << '\n'
                  << "annotations:       " << annotations << '\n'
                  << "malformed skipped: " << report.warnings << '\n'
                  << "object masks:      " << masks << '\n'
                  << "missing images:    " << missing << '\n'
                  << "camera.json:       " << (datasets::read_camera(a.root) ? "yes" : "no") << '\n';
        if (missing > 0) {
            return 1;
        }
    }
    if (!any) {
        throw Error(ErrorCode::NoSamples, "no Cornell or Jacquard annotation files under " + a.root.string());
    }
    return 0;
}

int cmd_record(const RunArgs& a, const fs::path& fixtures) {
    const auto samples = load_samples(a.data);
    const auto cfg = pipeline_config(a);
    const auto clients = genclients::make_clients(a.clients);
    int failures = 0;
    for (const auto& s : samples) {
        try {
            const auto rgb = datasets::load_rgb(s);
            auto mask = datasets::load_object_mask(s);
            const bool segmented = !mask;
            if (!mask) {
                mask = genclients::with_retries(cfg.generation.retry, [&] {
                    return clients.segmentation->segment(s.id, rgb, genclients::SegmentQuery::Object);
                });
            }
            auto outputs = genclients::query_services(clients, s.id, rgb, *mask, cfg.generation);
            if (segmented) {
                outputs.mask_object_s = *mask;
            }
            genclients::write_fixture(fixtures / s.id, outputs);
            std::cout << s.id << ": recorded\n";
        } catch (const Error& e) {
            ++failures;
            std::cout << s.id << ": " << e.what() << '\n';
        }
    }
    std::cout << samples.size() - failures << '/' << samples.size() << " fixtures recorded\n";
    return failures == 0 ? 0 : 1;
}

int cmd_verify(const RunArgs& a, const fs::path& fixtures) {
    const auto samples = load_samples(a.data);
    const auto cfg = pipeline_config(a);
    int failures = 0;
    for (const auto& s : samples) {
        const auto rgb = datasets::load_rgb(s);
        auto mask = datasets::load_object_mask(s);
        if (!mask) {
            mask = lifting::read_mask_png(fixtures / s.id / "mask_object_s.png");
        }
        const auto check = genclients::verify_fixture(fixtures, s.id, rgb, *mask, cfg.generation);
        failures += check.ok ? 0 : 1;
        std::cout << s.id << ": " << check.message << '\n';
    }
    std::cout << samples.size() - failures << '/' << samples.size() << " fixtures verified\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vlad: grasp rectangles from generated rod-impaled goal images"};
    app.set_config("--config", "", "Read options from a key = value file");
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run the full pipeline over a dataset");
    add_dataset_options(run_cmd, run.data);
    add_scoring_options(run_cmd, run.scoring);
    add_pipeline_options(run_cmd, run);
    run_cmd->add_option("--out", run.out, "Output directory for runs.jsonl, report.json and table.txt");

    RunArgs ev;
    std::optional<fs::path> report_path;
    auto* eval_cmd = app.add_subcommand("eval", "Score a dataset: run the pipeline or rescore saved predictions");
    add_dataset_options(eval_cmd, ev.data);
    add_scoring_options(eval_cmd, ev.scoring);
    add_pipeline_options(eval_cmd, ev);
    eval_cmd->add_option("--out", report_path, "Write the report JSON here");
    eval_cmd->add_option("--predictions", ev.predictions, "Score a runs.jsonl / predictions JSONL file instead");

    fs::path src, dst;
    std::string method = "pca-opt";
    bool proper_only = false, polish = false;
    std::optional<fs::path> align_out;
    auto* align_cmd = app.add_subcommand("align", "Align a generated cloud (src) onto a scene cloud (dst)");
    align_cmd->add_option("--src", src, "Generated cloud (.xyz or .bin)")->required()->check(CLI::ExistingFile);
    align_cmd->add_option("--dst", dst, "Scene cloud (.xyz or .bin)")->required()->check(CLI::ExistingFile);
    align_cmd->add_option("--method", method, "pca-opt or icp")->check(CLI::IsMember({"pca-opt", "icp"}));
    align_cmd->add_flag("--proper-only", proper_only, "Restrict the sign search to det > 0");
    align_cmd->add_flag("--icp-polish", polish, "Rigid ICP refinement after the sign search");
    align_cmd->add_option("--out", align_out, "Write the alignment JSON here");

    fs::path rod, object;
    graspx::GraspOptions gopts;
    std::optional<fs::path> extract_out;
    auto* extract_cmd = app.add_subcommand("extract", "Grasp rectangle from a scene rod mask and object mask");
    extract_cmd->add_option("--rod", rod, "Rod mask PNG")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("--object", object, "Object mask PNG")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("--delta", gopts.delta, "Minimum gap run as a fraction of sqrt(object area)");
    extract_cmd->add_option("--epsilon", gopts.epsilon, "Minimum gap / object IoU");
    extract_cmd->add_option("--min-gap", gopts.min_gap, "Shorter gaps are closed");
    extract_cmd->add_option("--jaw-height", gopts.jaw_height, "Fixed rectangle height");
    extract_cmd->add_option("--out", extract_out, "Write the result JSON here");

    auto* datasets_cmd = app.add_subcommand("datasets", "Dataset utilities");
    datasets_cmd->require_subcommand(1);
    DatasetArgs validate;
    auto* validate_cmd = datasets_cmd->add_subcommand("validate", "Check a dataset layout and count samples");
    validate_cmd->add_option("root", validate.root, "Dataset root")->required()->check(CLI::ExistingDirectory);
    auto* validate_kind = validate_cmd->add_option("--dataset", validate.kind, "cornell or jacquard")
                              ->check(CLI::IsMember({"cornell", "jacquard"}));
    validate_cmd->add_option("--min-annotations", validate.min_annotations, "Jacquard annotation minimum");

    auto* fixtures_cmd = app.add_subcommand("fixtures", "Record or verify replay fixtures");
    fixtures_cmd->require_subcommand(1);
    RunArgs rec;
    fs::path rec_dir;
    auto* record_cmd = fixtures_cmd->add_subcommand("record", "Query live services and store their answers");
    add_dataset_options(record_cmd, rec.data);
    record_cmd->add_option("--clients", rec.clients, "http:URL of the live services")->required();
    record_cmd->add_option("--fixtures", rec_dir, "Fixture root to write")->required();
    record_cmd->add_flag("--single-step", rec.single_step, "Skip the reasoning steps of the prompt chain");
    record_cmd->add_option("--templates", rec.templates, "Prompt template directory");

    RunArgs ver;
    fs::path ver_dir;
    auto* verify_cmd = fixtures_cmd->add_subcommand("verify", "Replay every fixture twice and compare");
    add_dataset_options(verify_cmd, ver.data);
    verify_cmd->add_option("--fixtures", ver_dir, "Fixture root")->required()->check(CLI::ExistingDirectory);
    verify_cmd->add_flag("--single-step", ver.single_step, "Fixtures were recorded in single-step mode");
    verify_cmd->add_option("--templates", ver.templates, "Prompt template directory");

    fs::path serve_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "Serve replay fixtures over the HTTP protocol");
    serve_cmd->add_option("--fixtures", serve_dir, "Fixture root")->required()->check(CLI::ExistingDirectory);
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port", port, "Port");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            return cmd_run(run);
        }
        if (*eval_cmd) {
            return cmd_eval(ev, report_path);
        }
        if (*align_cmd) {
            return cmd_align(src, dst, method, proper_only, polish, align_out);
        }
        if (*extract_cmd) {
            return cmd_extract(rod, object, gopts, extract_out);
        }
        if (*validate_cmd) {
            return cmd_validate(validate, validate_kind->count() > 0);
        }
        if (*record_cmd) {
            return cmd_record(rec, rec_dir);
        }
        if (*verify_cmd) {
            return cmd_verify(ver, ver_dir);
        }
        if (*serve_cmd) {
            genclients::ServiceHost server(genclients::make_replay_clients(serve_dir));
            std::cout << "serving " << serve_dir << " on http://" << host << ':' << port << std::endl;
            return server.listen(host, port) ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
