#include "vlad/genclients/services.hpp"

#include "vlad/error.hpp"
#include "vlad/genclients/base64.hpp"
#include "vlad/lifting/image_io.hpp"

namespace vlad::genclients {

namespace {

template <typename F>
auto guarded(const char* what, F&& body) {
    try {
        return body();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedResponse, std::string(what) + ": " + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Io || e.code() == ErrorCode::DimensionMismatch ||
            e.code() == ErrorCode::InvalidArgument) {
            throw Error(ErrorCode::MalformedResponse, std::string(what) + ": " + e.what());
        }
        throw;
    }
}

void check_schema(const nlohmann::json& j) {
    if (j.contains("schema") && j.at("schema").get<std::string>() != kSchemaVersion) {
        throw Error(ErrorCode::MalformedResponse, "unsupported schema " + j.at("schema").get<std::string>());
    }
}

std::string mask_to_b64(const BinaryMask& mask) { return base64_encode(lifting::encode_mask_png(mask)); }

BinaryMask mask_from_b64(const std::string& b64) { return lifting::decode_mask_png(base64_decode(b64)); }

}  // namespace

std::string_view to_string(SegmentQuery query) { return query == SegmentQuery::Object ? "object" : "rod"; }

SegmentQuery parse_segment_query(std::string_view text) {
    if (text == "object") {
        return SegmentQuery::Object;
    }
    if (text == "rod") {
        return SegmentQuery::Rod;
    }
    throw Error(ErrorCode::MalformedResponse, "unknown segment query \"" + std::string(text) + "\"");
}

RgbImage image_from_b64(const std::string& b64) { return lifting::decode_rgb_png(base64_decode(b64)); }

std::string image_to_b64(const RgbImage& image) { return base64_encode(lifting::encode_rgb_png(image)); }

nlohmann::json to_json(const ChatStepRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", m.role}, {"text", m.text}});
    }
    nlohmann::json j = {{"schema", kSchemaVersion},
                        {"sample_id", request.sample_id},
                        {"step", request.step},
                        {"modality", request.modality == Modality::Text ? "text" : "image"},
                        {"messages", messages}};
    if (request.image) {
        j["image_b64"] = image_to_b64(*request.image);
    }
    if (request.inpaint_mask) {
        j["inpaint_mask_b64"] = mask_to_b64(*request.inpaint_mask);
    }
    return j;
}

ChatStepRequest chat_request_from_json(const nlohmann::json& j) {
    return guarded("chat-step request", [&] {
        check_schema(j);
        ChatStepRequest r;
        r.sample_id = j.at("sample_id").get<std::string>();
        r.step = j.at("step").get<int>();
        r.modality = j.at("modality").get<std::string>() == "image" ? Modality::Image : Modality::Text;
        for (const auto& m : j.at("messages")) {
            r.messages.push_back({m.at("role").get<std::string>(), m.at("text").get<std::string>()});
        }
        if (j.contains("image_b64")) {
            r.image = image_from_b64(j.at("image_b64").get<std::string>());
        }
        if (j.contains("inpaint_mask_b64")) {
            r.inpaint_mask = mask_from_b64(j.at("inpaint_mask_b64").get<std::string>());
        }
        return r;
    });
}

nlohmann::json to_json(const ChatStepReply& reply) {
    nlohmann::json j = {{"schema", kSchemaVersion},
                        {"text", reply.text},
                        {"tokens", {{"output", reply.tokens.output}, {"reasoning", reply.tokens.reasoning}}}};
    if (reply.image) {
        j["image_b64"] = image_to_b64(*reply.image);
    }
    return j;
}

ChatStepReply chat_reply_from_json(const nlohmann::json& j) {
    return guarded("chat-step reply", [&] {
        check_schema(j);
        if (j.value("refused", false)) {
            throw Error(ErrorCode::GenerationRefused, j.value("text", std::string("provider declined")));
        }
        ChatStepReply r;
        r.text = j.value("text", std::string());
        if (j.contains("tokens")) {
            r.tokens.output = j.at("tokens").value("output", std::size_t{0});
            r.tokens.reasoning = j.at("tokens").value("reasoning", std::size_t{0});
        }
        if (j.contains("image_b64")) {
            r.image = image_from_b64(j.at("image_b64").get<std::string>());
        }
        return r;
    });
}

nlohmann::json depth_request_json(const std::string& sample_id, const RgbImage& image) {
    return {{"schema", kSchemaVersion}, {"sample_id", sample_id}, {"image_b64", image_to_b64(image)}};
}

nlohmann::json depth_reply_json(const DepthMap& depth) {
    return {{"schema", kSchemaVersion},
            {"width", depth.width()},
            {"height", depth.height()},
            {"depth_f32_b64", base64_encode(lifting::encode_depth_f32(depth))}};
}

DepthMap depth_from_reply(const nlohmann::json& j) {
    return guarded("depth reply", [&] {
        check_schema(j);
        auto depth = lifting::decode_depth_f32(base64_decode(j.at("depth_f32_b64").get<std::string>()));
        if (depth.width() != j.at("width").get<int>() || depth.height() != j.at("height").get<int>()) {
            throw Error(ErrorCode::MalformedResponse, "depth raster does not match declared size");
        }
        return depth;
    });
}

nlohmann::json segment_request_json(const std::string& sample_id, const RgbImage& image, SegmentQuery query) {
    return {{"schema", kSchemaVersion},
            {"sample_id", sample_id},
            {"query", std::string(to_string(query))},
            {"image_b64", image_to_b64(image)}};
}

nlohmann::json segment_reply_json(const BinaryMask& mask) {
    return {{"schema", kSchemaVersion}, {"mask_b64", mask_to_b64(mask)}};
}

BinaryMask mask_from_reply(const nlohmann::json& j) {
    return guarded("segment reply", [&] {
        check_schema(j);
        return mask_from_b64(j.at("mask_b64").get<std::string>());
    });
}

}  // namespace vlad::genclients
