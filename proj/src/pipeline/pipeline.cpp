#include "vlad/pipeline/pipeline.hpp"

#include "vlad/error.hpp"
#include "vlad/lifting/image_io.hpp"
#include "vlad/pcmath/cloud_io.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

namespace vlad::pipeline {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

// Thrown inside run_scene to abort with a stage tag; never escapes it.
struct StageFailure {
    FailureStage stage;
    std::string message;
};

template <typename F>
auto timed(PipelineRun& run, const std::string& stage, F&& body) {
    const auto start = Clock::now();
    struct Record {
        PipelineRun& run;
        const std::string& stage;
        Clock::time_point start;
        ~Record() {
            run.timings_ms[stage] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        }
    } record{run, stage, start};
    return body();
}

template <typename F>
auto in_stage(FailureStage stage, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        throw StageFailure{stage, e.what()};
    }
}

void dump_debug(const fs::path& dir, const std::string& name, const pcmath::PointCloud& cloud) {
    fs::create_directories(dir);
    pcmath::write_xyz(dir / name, cloud);
}

}  // namespace

std::string_view to_string(FailureStage stage) {
    switch (stage) {
        case FailureStage::Generation: return "Generation";
        case FailureStage::Lift: return "Lift";
        case FailureStage::Align: return "Align";
        case FailureStage::NoRodDetected: return "NoRodDetected";
        case FailureStage::NoViableGrasp: return "NoViableGrasp";
    }
    return "Unknown";
}

AlignMethod parse_align_method(std::string_view name) {
    if (name == "pca-opt") {
        return AlignMethod::PcaOpt;
    }
    if (name == "icp") {
        return AlignMethod::Icp;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown alignment method \"" + std::string(name) + "\"");
}

std::string_view to_string(AlignMethod method) { return method == AlignMethod::PcaOpt ? "pca-opt" : "icp"; }

graspx::GraspOptions PipelineConfig::grasp_options() const {
    graspx::GraspOptions g;
    g.delta = eval.delta;
    g.epsilon = eval.epsilon;
    g.min_gap = min_gap;
    g.jaw_height = jaw_height;
    return g;
}

SceneInputs load_scene(const datasets::Sample& sample) {
    SceneInputs scene;
    scene.id = sample.id;
    scene.rgb = datasets::load_rgb(sample);
    scene.depth = datasets::load_depth(sample);
    scene.object_mask = datasets::load_object_mask(sample);
    scene.intrinsics = sample.intrinsics;
    scene.annotations = sample.annotations;
    return scene;
}

PipelineRun run_scene(const SceneInputs& scene, const PipelineConfig& cfg, const genclients::ClientSet& clients) {
    PipelineRun run;
    run.sample_id = scene.id;
    const auto debug = cfg.debug_dir ? std::optional<fs::path>(*cfg.debug_dir / scene.id) : std::nullopt;
    const auto total_start = Clock::now();

    try {
        const lifting::CameraIntrinsics k = in_stage(FailureStage::Lift, [&] {
            const auto intr = scene.intrinsics ? scene.intrinsics : cfg.intrinsics;
            if (!intr) {
                throw Error(ErrorCode::InvalidArgument, "no camera intrinsics for sample " + scene.id);
            }
            intr->validate();
            if (scene.depth.width() != scene.rgb.width() || scene.depth.height() != scene.rgb.height()) {
                throw Error(ErrorCode::DimensionMismatch, "scene depth and image sizes differ");
            }
            return *intr;
        });

        const lifting::BinaryMask object_s = timed(run, "segment_scene", [&] {
            if (scene.object_mask) {
                return *scene.object_mask;
            }
            return in_stage(FailureStage::Generation, [&] {
                return genclients::with_retries(cfg.generation.retry, [&] {
                    return clients.segmentation->segment(scene.id, scene.rgb, genclients::SegmentQuery::Object);
                });
            });
        });

        const auto outputs = timed(run, "generation", [&] {
            return in_stage(FailureStage::Generation, [&] {
                return genclients::query_services(clients, scene.id, scene.rgb, object_s, cfg.generation);
            });
        });
        run.exchange = outputs.exchange;
        if (outputs.mask_rod_g.empty()) {
            throw StageFailure{FailureStage::NoRodDetected, "segmenter found no rod in the generated image"};
        }

        struct Lifted {
            lifting::LiftResult scene_object;
            lifting::LiftResult generated_object;
            pcmath::PointCloud generated_rod;
        };
        const Lifted lifted = timed(run, "lift", [&] {
            Lifted l;
            l.scene_object = in_stage(FailureStage::Lift, [&] {
                return lifting::backproject_with_stats(scene.depth, object_s, k, pcmath::Frame::Scene,
                                                       pcmath::Role::Object);
            });
            l.generated_object = in_stage(FailureStage::Lift, [&] {
                return lifting::backproject_with_stats(outputs.depth_g, outputs.mask_object_g, k,
                                                       pcmath::Frame::Generated, pcmath::Role::Object);
            });
            l.generated_rod = in_stage(FailureStage::NoRodDetected, [&] {
                return lifting::backproject(outputs.depth_g, outputs.mask_rod_g, k, pcmath::Frame::Generated,
                                            pcmath::Role::Rod);
            });
            return l;
        });
        run.scene_lift = lifted.scene_object.stats;
        run.generated_lift = lifted.generated_object.stats;

        run.alignment = timed(run, "align", [&] {
            return in_stage(FailureStage::Align, [&] {
                const auto& p_s = lifted.scene_object.cloud;
                const auto& p_g = lifted.generated_object.cloud;
                return cfg.align_method == AlignMethod::PcaOpt
                           ? align::align_pca_opt(p_s, p_g, cfg.pca)
                           : align::align_icp(p_s, p_g, cfg.icp_max_iters, cfg.icp_tol);
            });
        });

        const auto rod_s = pcmath::apply_transform(run.alignment->transform, lifted.generated_rod);
        const auto rod_mask = timed(run, "project", [&] {
            return in_stage(FailureStage::NoRodDetected, [&] {
                return lifting::project_to_mask(rod_s, k, scene.rgb.width(), scene.rgb.height(), cfg.rod_dilation);
            });
        });

        if (debug) {
            dump_debug(*debug, "object_scene.xyz", lifted.scene_object.cloud);
            dump_debug(*debug, "object_generated.xyz", lifted.generated_object.cloud);
            dump_debug(*debug, "rod_generated.xyz", lifted.generated_rod);
            dump_debug(*debug, "rod_scene.xyz", rod_s);
            lifting::write_mask_png(*debug / "mask_object_scene.png", object_s);
            lifting::write_mask_png(*debug / "mask_rod_scene.png", rod_mask);
            std::ofstream(*debug / "alignment.json") << align::to_json(*run.alignment).dump(2) << '\n';
            std::ofstream(*debug / "chain.json") << genclients::chain_to_json(outputs.exchange).dump(2) << '\n';
        }

        const auto options = cfg.grasp_options();
        const auto axis = timed(run, "extract", [&] {
            return in_stage(FailureStage::NoRodDetected, [&] { return graspx::fit_rod_axis(rod_mask); });
        });
        run.discontinuities = in_stage(FailureStage::NoRodDetected, [&] {
            return graspx::find_discontinuities(rod_mask, axis, object_s, options.min_gap);
        });
        run.grasp = in_stage(FailureStage::NoViableGrasp, [&] {
            return graspx::select_grasp(run.discontinuities, axis, object_s, options);
        });
        if (debug && !run.discontinuities.empty()) {
            lifting::BinaryMask gaps(rod_mask.width(), rod_mask.height());
            for (const auto& d : run.discontinuities) {
                gaps = gaps.unite(graspx::band_mask(axis, d.start_t, d.end_t, gaps.width(), gaps.height()));
            }
            lifting::write_mask_png(*debug / "mask_discontinuity.png", gaps);
        }
    } catch (const StageFailure& f) {
        run.failure_stage = f.stage;
        run.failure_message = f.message;
        run.grasp.reset();
    }

    if (!scene.annotations.empty()) {
        if (run.grasp) {
            run.record = evalx::score_sample(scene.id, *run.grasp, scene.annotations, cfg.eval);
        } else {
            run.record = evalx::failed_record(scene.id, std::string(to_string(*run.failure_stage)));
        }
        if (run.alignment) {
            run.record->cd = run.alignment->cd;
            run.record->uhd = run.alignment->uhd;
        }
    }
    if (cfg.plot_dir) {
        fs::create_directories(*cfg.plot_dir);
        lifting::write_rgb_png(*cfg.plot_dir / (scene.id + ".png"), draw_overlay(scene.rgb, run.grasp, scene.annotations));
    }
    run.timings_ms["total"] = std::chrono::duration<double, std::milli>(Clock::now() - total_start).count();
    return run;
}

PipelineRun run_sample(const datasets::Sample& sample, const PipelineConfig& cfg,
                       const genclients::ClientSet& clients) {
    SceneInputs scene;
    try {
        scene = load_scene(sample);
    } catch (const Error& e) {
        PipelineRun run;
        run.sample_id = sample.id;
        run.failure_stage = FailureStage::Lift;
        run.failure_message = e.what();
        run.timings_ms["total"] = 0.0;
        if (!sample.annotations.empty()) {
            run.record = evalx::failed_record(sample.id, "Lift");
        }
        return run;
    }
    return run_scene(scene, cfg, clients);
}

BatchResult run_batch(const std::vector<datasets::Sample>& samples, const PipelineConfig& cfg,
                      const genclients::ClientSet& clients) {
    if (samples.empty()) {
        throw Error(ErrorCode::NoSamples, "batch has no samples");
    }
    cfg.eval.validate();
    BatchResult result;
    result.runs.resize(samples.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < samples.size(); i = next++) {
            result.runs[i] = run_sample(samples[i], cfg, clients);
        }
    };
    const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(samples.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    std::vector<evalx::SampleRecord> records;
    records.reserve(result.runs.size());
    for (const auto& run : result.runs) {
        records.push_back(run.record ? *run.record : evalx::failed_record(run.sample_id, "NoAnnotations"));
    }
    result.report = evalx::aggregate(std::move(records));
    return result;
}

nlohmann::json to_json(const PipelineRun& run) {
    nlohmann::json j = {{"sample_id", run.sample_id}, {"timings_ms", run.timings_ms}};
    j["grasp"] = run.grasp ? graspx::to_json(*run.grasp) : nlohmann::json(nullptr);
    j["failure_stage"] = run.failure_stage ? nlohmann::json(std::string(to_string(*run.failure_stage)))
                                           : nlohmann::json(nullptr);
    if (run.failure_stage) {
        j["failure_message"] = run.failure_message;
    }
    if (run.alignment) {
        j["alignment"] = align::to_json(*run.alignment);
    }
    if (run.exchange) {
        j["tokens"] = {{"output", run.exchange->token_counts.output},
                       {"reasoning", run.exchange->token_counts.reasoning}};
        j["provider"] = run.exchange->provider;
    }
    j["lift"] = {{"scene_masked", run.scene_lift.masked_pixels},
                 {"scene_invalid_depth", run.scene_lift.invalid_depth},
                 {"generated_masked", run.generated_lift.masked_pixels},
                 {"generated_invalid_depth", run.generated_lift.invalid_depth}};
    nlohmann::json gaps = nlohmann::json::array();
    for (const auto& d : run.discontinuities) {
        gaps.push_back(graspx::to_json(d));
    }
    j["discontinuities"] = gaps;
    if (run.record) {
        j["score"] = evalx::to_json(*run.record);
    }
    return j;
}

void write_run_log(const fs::path& path, const std::vector<PipelineRun>& runs) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    for (const auto& run : runs) {
        out << to_json(run).dump() << '\n';
    }
}

namespace {

void draw_line(lifting::RgbImage& img, graspx::Vec2 a, graspx::Vec2 b, std::array<std::uint8_t, 3> color) {
    const double steps = std::max({std::abs(b.x() - a.x()), std::abs(b.y() - a.y()), 1.0});
    for (int i = 0; i <= static_cast<int>(std::ceil(steps)); ++i) {
        const graspx::Vec2 p = a + (b - a) * (i / std::ceil(steps));
        const int u = static_cast<int>(std::lround(p.x()));
        const int v = static_cast<int>(std::lround(p.y()));
        if (u >= 0 && v >= 0 && u < img.width() && v < img.height()) {
            std::uint8_t* px = img.pixel(u, v);
            px[0] = color[0];
            px[1] = color[1];
            px[2] = color[2];
        }
    }
}

void draw_rect(lifting::RgbImage& img, const graspx::GraspRectangle& r, std::array<std::uint8_t, 3> color) {
    const auto c = r.corners();
    for (std::size_t i = 0; i < 4; ++i) {
        draw_line(img, c[i], c[(i + 1) % 4], color);
    }
}

}  // namespace

lifting::RgbImage draw_overlay(const lifting::RgbImage& image, const std::optional<graspx::GraspRectangle>& grasp,
                               const std::vector<datasets::GraspAnnotation>& annotations) {
    lifting::RgbImage out = image;
    for (const auto& a : annotations) {
        draw_rect(out, a.rectangle, {220, 40, 40});
    }
    if (grasp) {
        draw_rect(out, *grasp, {40, 220, 40});
    }
    return out;
}

}  // namespace vlad::pipeline
