#include "vlad/genclients/replay.hpp"

#include "vlad/error.hpp"
#include "vlad/lifting/image_io.hpp"

#include <fstream>

namespace vlad::genclients {

namespace fs = std::filesystem;

namespace {

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ServiceUnavailable, "missing fixture file " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedResponse, path.string() + ": " + e.what());
    }
}

template <typename F>
auto read_fixture_file(const fs::path& path, F&& reader) {
    if (!fs::exists(path)) {
        throw Error(ErrorCode::ServiceUnavailable, "missing fixture file " + path.string());
    }
    try {
        return reader(path);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Io || e.code() == ErrorCode::DimensionMismatch) {
            throw Error(ErrorCode::MalformedResponse, e.what());
        }
        throw;
    }
}

}  // namespace

GenerativeOutputs query_services(const ClientSet& clients, const std::string& sample_id, const RgbImage& scene_image,
                                 const BinaryMask& object_mask, const GenerationSettings& settings) {
    if (!clients.generation || !clients.depth || !clients.segmentation) {
        throw Error(ErrorCode::InvalidArgument, "client set is incomplete");
    }
    GenerativeOutputs out;
    out.exchange = run_prompt_chain(*clients.generation, sample_id, scene_image, object_mask, settings.templates,
                                    settings.gripper, settings.mode, settings.retry);
    const RgbImage& generated = out.exchange.output_image;
    out.depth_g = with_retries(settings.retry, [&] { return clients.depth->predict_depth(sample_id, generated); });
    out.mask_object_g = with_retries(settings.retry, [&] {
        return clients.segmentation->segment(sample_id, generated, SegmentQuery::Object);
    });
    out.mask_rod_g = with_retries(settings.retry, [&] {
        return clients.segmentation->segment(sample_id, generated, SegmentQuery::Rod);
    });
    const auto same = [&](int w, int h) { return w == generated.width() && h == generated.height(); };
    if (!same(out.depth_g.width(), out.depth_g.height()) ||
        !same(out.mask_object_g.width(), out.mask_object_g.height()) ||
        !same(out.mask_rod_g.width(), out.mask_rod_g.height())) {
        throw Error(ErrorCode::DimensionMismatch, "service output size differs from the generated image");
    }
    return out;
}

void write_fixture(const fs::path& sample_dir, const GenerativeOutputs& outputs) {
    fs::create_directories(sample_dir);
    {
        std::ofstream out(sample_dir / "chain.json");
        out << chain_to_json(outputs.exchange).dump(2) << '\n';
    }
    lifting::write_rgb_png(sample_dir / "generated.png", outputs.exchange.output_image);
    lifting::write_depth_f32(sample_dir / "depth_g.f32", outputs.depth_g);
    lifting::write_mask_png(sample_dir / "mask_object_g.png", outputs.mask_object_g);
    lifting::write_mask_png(sample_dir / "mask_rod_g.png", outputs.mask_rod_g);
    if (outputs.mask_object_s) {
        lifting::write_mask_png(sample_dir / "mask_object_s.png", *outputs.mask_object_s);
    }
}

ReplayClient::ReplayClient(fs::path root) : root_(std::move(root)) {}

fs::path ReplayClient::sample_dir(const std::string& sample_id) const {
    const auto dir = root_ / sample_id;
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::ServiceUnavailable, "no replay fixture for sample " + sample_id);
    }
    return dir;
}

ChatStepReply ReplayClient::chat_step(const ChatStepRequest& request) {
    const auto dir = sample_dir(request.sample_id);
    const auto chain = read_json(dir / "chain.json");
    for (const auto& s : steps_from_json(chain)) {
        if (s.step != request.step || s.modality != request.modality) {
            continue;
        }
        ChatStepReply reply;
        reply.text = s.text;
        reply.tokens = s.tokens;
        if (s.modality == Modality::Image) {
            reply.image = read_fixture_file(dir / "generated.png", lifting::read_rgb_png);
        }
        return reply;
    }
    throw Error(ErrorCode::MalformedResponse, "fixture " + request.sample_id + " has no reply for step " +
                                                  std::to_string(request.step));
}

DepthMap ReplayClient::predict_depth(const std::string& sample_id, const RgbImage&) {
    return read_fixture_file(sample_dir(sample_id) / "depth_g.f32", lifting::read_depth_f32);
}

BinaryMask ReplayClient::segment(const std::string& sample_id, const RgbImage& image, SegmentQuery query) {
    const auto dir = sample_dir(sample_id);
    if (query == SegmentQuery::Rod) {
        return read_fixture_file(dir / "mask_rod_g.png", lifting::read_mask_png);
    }
    // Object queries arrive for both the generated image and the scene image;
    // the latter is answered from the optional recorded scene mask.
    const auto generated = read_fixture_file(dir / "generated.png", lifting::read_rgb_png);
    if (image == generated) {
        return read_fixture_file(dir / "mask_object_g.png", lifting::read_mask_png);
    }
    return read_fixture_file(dir / "mask_object_s.png", lifting::read_mask_png);
}

ClientSet make_replay_clients(const fs::path& root) {
    auto replay = std::make_shared<ReplayClient>(root);
    return {replay, replay, replay};
}

FixtureCheck verify_fixture(const fs::path& root, const std::string& sample_id, const RgbImage& scene_image,
                            const BinaryMask& object_mask, const GenerationSettings& settings) {
    FixtureCheck check{sample_id, false, {}};
    try {
        const auto clients_a = make_replay_clients(root);
        const auto clients_b = make_replay_clients(root);
        const auto a = query_services(clients_a, sample_id, scene_image, object_mask, settings);
        const auto b = query_services(clients_b, sample_id, scene_image, object_mask, settings);
        if (!(a.exchange.output_image == b.exchange.output_image) || !(a.depth_g == b.depth_g) ||
            !(a.mask_object_g == b.mask_object_g) || !(a.mask_rod_g == b.mask_rod_g) ||
            chain_to_json(a.exchange) != chain_to_json(b.exchange)) {
            check.message = "replays differ";
            return check;
        }
        if (a.exchange.chain.t2_generated.empty()) {
            check.message = "generation prompt is empty";
            return check;
        }
        check.ok = true;
        check.message = "ok";
    } catch (const Error& e) {
        check.message = e.what();
    }
    return check;
}

}  // namespace vlad::genclients
