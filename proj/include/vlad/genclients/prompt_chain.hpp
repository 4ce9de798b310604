#pragma once

#include "vlad/genclients/retry.hpp"
#include "vlad/genclients/services.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace vlad::genclients {

// Text templates with {{name}} placeholders.
struct PromptTemplates {
    std::string t0_constraints;
    std::string t1_meta;
    std::string tc_constraints;
    std::string version;

    // Reads t0_constraints.txt, t1_meta.txt, tc_constraints.txt. A leading
    // "# vlad-template <version>" line is stripped and recorded.
    static PromptTemplates load(const std::filesystem::path& dir);
    // The repository's templates directory, as configured at build time.
    static PromptTemplates load_default();
};

// Throws Error{InvalidArgument} on a placeholder with no value.
std::string render_template(const std::string& text, const std::map<std::string, std::string>& values);

struct GripperSpec {
    double max_opening_mm = 80.0;
    double finger_width_mm = 20.0;
    std::string kind = "parallel-jaw two-finger gripper";

    std::map<std::string, std::string> placeholders() const;
};

enum class ChainMode { ThreeStep, SingleStep };

struct PromptChain {
    std::string t0_constraints;
    std::string reasoning;
    std::string t1_meta;
    std::string t2_generated;
    std::string tc_constraints;
    BinaryMask inpaint_mask;
};

struct StepRecord {
    int step = 0;
    Modality modality = Modality::Text;
    std::string text;
    TokenCounts tokens;
};

struct GenerationExchange {
    std::string sample_id;
    ChainMode mode = ChainMode::ThreeStep;
    PromptChain chain;
    RgbImage input_image;   // scene image with the background masked out
    RgbImage output_image;  // generated goal image
    std::vector<StepRecord> steps;
    TokenCounts token_counts;
    std::string provider;
    std::string template_version;
};

/// Three-step chain: constraints + image -> reasoning; reasoning + meta
/// prompt -> generation prompt; generation prompt + edit constraints +
/// inpainting mask + image -> goal image. SingleStep skips the first two
/// text steps and sends the constraint prompt straight to image generation.
GenerationExchange run_prompt_chain(GenerationService& service, const std::string& sample_id,
                                    const RgbImage& scene_image, const BinaryMask& object_mask,
                                    const PromptTemplates& templates, const GripperSpec& gripper = {},
                                    ChainMode mode = ChainMode::ThreeStep, const RetryPolicy& retry = {});

// chain.json body of a fixture: texts, per-step replies and token totals.
nlohmann::json chain_to_json(const GenerationExchange& exchange);
std::vector<StepRecord> steps_from_json(const nlohmann::json& chain_json);
std::string_view to_string(ChainMode mode);

}  // namespace vlad::genclients
