#pragma once

#include "vlad/lifting/raster.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vlad::genclients {

using lifting::BinaryMask;
using lifting::DepthMap;
using lifting::RgbImage;

// Wire schema tag carried in every request and response body.
inline constexpr const char* kSchemaVersion = "vlad.genclients/1";

struct TokenCounts {
    std::size_t output = 0;
    std::size_t reasoning = 0;
};

struct ChatMessage {
    std::string role;  // "user" | "assistant"
    std::string text;
};

enum class Modality { Text, Image };

/// One turn of the generation chain.
///
/// Text steps return reasoning or a generated prompt; the image step returns
/// the edited image, constrained by `inpaint_mask` (pixels the model may change).
struct ChatStepRequest {
    std::string sample_id;
    int step = 0;
    Modality modality = Modality::Text;
    std::vector<ChatMessage> messages;
    std::optional<RgbImage> image;
    std::optional<BinaryMask> inpaint_mask;
};

struct ChatStepReply {
    std::string text;
    std::optional<RgbImage> image;
    TokenCounts tokens;
};

enum class SegmentQuery { Object, Rod };
std::string_view to_string(SegmentQuery query);
SegmentQuery parse_segment_query(std::string_view text);

class GenerationService {
public:
    virtual ~GenerationService() = default;
    // Throws Error{ServiceUnavailable | MalformedResponse | GenerationRefused}.
    virtual ChatStepReply chat_step(const ChatStepRequest& request) = 0;
    virtual std::string provider() const = 0;
};

class DepthService {
public:
    virtual ~DepthService() = default;
    virtual DepthMap predict_depth(const std::string& sample_id, const RgbImage& image) = 0;
};

class SegmentationService {
public:
    virtual ~SegmentationService() = default;
    // An empty mask is a valid answer.
    virtual BinaryMask segment(const std::string& sample_id, const RgbImage& image, SegmentQuery query) = 0;
};

// Handles shared across worker threads; implementations are thread-safe.
struct ClientSet {
    std::shared_ptr<GenerationService> generation;
    std::shared_ptr<DepthService> depth;
    std::shared_ptr<SegmentationService> segmentation;
};

// JSON bodies for the HTTP protocol; images travel as base64 PNG, depth as
// base64 of the f32 raster format.
nlohmann::json to_json(const ChatStepRequest& request);
ChatStepRequest chat_request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChatStepReply& reply);
// Throws Error{GenerationRefused} when the body carries "refused": true.
ChatStepReply chat_reply_from_json(const nlohmann::json& j);

nlohmann::json depth_request_json(const std::string& sample_id, const RgbImage& image);
nlohmann::json depth_reply_json(const DepthMap& depth);
DepthMap depth_from_reply(const nlohmann::json& j);

nlohmann::json segment_request_json(const std::string& sample_id, const RgbImage& image, SegmentQuery query);
nlohmann::json segment_reply_json(const BinaryMask& mask);
BinaryMask mask_from_reply(const nlohmann::json& j);

RgbImage image_from_b64(const std::string& b64);
std::string image_to_b64(const RgbImage& image);

}  // namespace vlad::genclients
