#pragma once

#include "vlad/genclients/services.hpp"

#include <chrono>
#include <memory>
#include <string>

namespace vlad::genclients {

// Environment variable holding the bearer token for live services.
inline constexpr const char* kCredentialEnv = "VLAD_API_KEY";

struct HttpOptions {
    std::chrono::seconds timeout{120};
    std::string api_key;  // empty: read kCredentialEnv
};

/// Client for the JSON protocol:
///   POST /v1/chat-step   ChatStepRequest  -> ChatStepReply
///   POST /v1/depth       {image_b64}      -> {width, height, depth_f32_b64}
///   POST /v1/segment     {image_b64, query} -> {mask_b64}
/// Connection failures and 5xx map to ServiceUnavailable, other non-200
/// statuses and undecodable bodies to MalformedResponse. Each call opens its
/// own connection, so one instance may be shared across threads.
class HttpClient final : public GenerationService, public DepthService, public SegmentationService {
public:
    explicit HttpClient(std::string base_url, HttpOptions options = {});

    ChatStepReply chat_step(const ChatStepRequest& request) override;
    std::string provider() const override { return "http:" + base_url_; }
    DepthMap predict_depth(const std::string& sample_id, const RgbImage& image) override;
    BinaryMask segment(const std::string& sample_id, const RgbImage& image, SegmentQuery query) override;

private:
    nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

    std::string base_url_;
    HttpOptions options_;
};

ClientSet make_http_clients(const std::string& base_url, HttpOptions options = {});

/// Serves a ClientSet over the same protocol. Used to put fixtures or a
/// local model behind the HTTP interface, and by the protocol tests.
class ServiceHost {
public:
    explicit ServiceHost(ClientSet backend);
    ~ServiceHost();
    ServiceHost(const ServiceHost&) = delete;
    ServiceHost& operator=(const ServiceHost&) = delete;

    // Binds to an ephemeral port on 127.0.0.1 and serves on a background thread.
    int start();
    // Blocks serving on host:port.
    bool listen(const std::string& host, int port);
    void stop();
    std::string url() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Parses "replay:DIR" or "http:URL" / "https:URL" into a client set.
ClientSet make_clients(const std::string& spec);

}  // namespace vlad::genclients
