#pragma once

#include "vlad/genclients/prompt_chain.hpp"
#include "vlad/genclients/services.hpp"

#include <filesystem>

namespace vlad::genclients {

/// Everything the generative services return for one sample.
struct GenerativeOutputs {
    GenerationExchange exchange;
    DepthMap depth_g;
    BinaryMask mask_object_g;
    BinaryMask mask_rod_g;
    std::optional<BinaryMask> mask_object_s;
};

struct GenerationSettings {
    PromptTemplates templates;
    GripperSpec gripper;
    ChainMode mode = ChainMode::ThreeStep;
    RetryPolicy retry;
};

// Prompt chain, then depth and both segmentations of the generated image.
GenerativeOutputs query_services(const ClientSet& clients, const std::string& sample_id, const RgbImage& scene_image,
                                 const BinaryMask& object_mask, const GenerationSettings& settings);

/// Fixture directory layout, one directory per sample id:
///   chain.json  generated.png  depth_g.f32  mask_object_g.png  mask_rod_g.png
/// plus mask_object_s.png when the scene object mask came from the segmenter.
void write_fixture(const std::filesystem::path& sample_dir, const GenerativeOutputs& outputs);

/// Offline stand-in for all three services, answering from recorded fixtures
/// under `root/<sample_id>/`. A missing fixture reads as ServiceUnavailable.
class ReplayClient final : public GenerationService, public DepthService, public SegmentationService {
public:
    explicit ReplayClient(std::filesystem::path root);

    ChatStepReply chat_step(const ChatStepRequest& request) override;
    std::string provider() const override { return "replay"; }
    DepthMap predict_depth(const std::string& sample_id, const RgbImage& image) override;
    BinaryMask segment(const std::string& sample_id, const RgbImage& image, SegmentQuery query) override;

    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path sample_dir(const std::string& sample_id) const;

    std::filesystem::path root_;
};

ClientSet make_replay_clients(const std::filesystem::path& root);

struct FixtureCheck {
    std::string sample_id;
    bool ok = false;
    std::string message;
};

// Structural checks plus two independent replays compared bit for bit.
FixtureCheck verify_fixture(const std::filesystem::path& root, const std::string& sample_id,
                            const RgbImage& scene_image, const BinaryMask& object_mask,
                            const GenerationSettings& settings);

}  // namespace vlad::genclients
