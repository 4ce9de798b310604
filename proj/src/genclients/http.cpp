#include "vlad/genclients/http.hpp"

#include "vlad/error.hpp"
#include "vlad/genclients/replay.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

namespace vlad::genclients {

namespace {

constexpr const char* kJson = "application/json";

std::string resolve_key(const HttpOptions& options) {
    if (!options.api_key.empty()) {
        return options.api_key;
    }
    const char* env = std::getenv(kCredentialEnv);
    return env == nullptr ? std::string() : std::string(env);
}

}  // namespace

HttpClient::HttpClient(std::string base_url, HttpOptions options)
    : base_url_(std::move(base_url)), options_(std::move(options)) {
    while (!base_url_.empty() && base_url_.back() == '/') {
        base_url_.pop_back();
    }
    options_.api_key = resolve_key(options_);
}

nlohmann::json HttpClient::post(const std::string& path, const nlohmann::json& body) const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    if (!options_.api_key.empty()) {
        client.set_bearer_token_auth(options_.api_key);
    }
    const auto response = client.Post(path, body.dump(), kJson);
    if (!response) {
        throw Error(ErrorCode::ServiceUnavailable,
                    base_url_ + path + ": " + httplib::to_string(response.error()));
    }
    if (response->status >= 500 || response->status == 429) {
        throw Error(ErrorCode::ServiceUnavailable, base_url_ + path + ": HTTP " + std::to_string(response->status));
    }
    if (response->status != 200) {
        throw Error(ErrorCode::MalformedResponse, base_url_ + path + ": HTTP " + std::to_string(response->status));
    }
    try {
        return nlohmann::json::parse(response->body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedResponse, base_url_ + path + ": " + e.what());
    }
}

ChatStepReply HttpClient::chat_step(const ChatStepRequest& request) {
    return chat_reply_from_json(post("/v1/chat-step", to_json(request)));
}

DepthMap HttpClient::predict_depth(const std::string& sample_id, const RgbImage& image) {
    return depth_from_reply(post("/v1/depth", depth_request_json(sample_id, image)));
}

BinaryMask HttpClient::segment(const std::string& sample_id, const RgbImage& image, SegmentQuery query) {
    return mask_from_reply(post("/v1/segment", segment_request_json(sample_id, image, query)));
}

ClientSet make_http_clients(const std::string& base_url, HttpOptions options) {
    auto client = std::make_shared<HttpClient>(base_url, std::move(options));
    return {client, client, client};
}

struct ServiceHost::Impl {
    ClientSet backend;
    httplib::Server server;
    std::thread worker;
    int port = 0;
};

namespace {

// Maps library errors onto HTTP statuses the client maps back.
template <typename F>
void respond(httplib::Response& res, F&& body) {
    try {
        res.set_content(body().dump(), kJson);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::GenerationRefused) {
            res.set_content(nlohmann::json{{"schema", kSchemaVersion}, {"refused", true}, {"text", e.what()}}.dump(),
                            kJson);
            return;
        }
        res.status = e.code() == ErrorCode::ServiceUnavailable ? 503 : 400;
        res.set_content(nlohmann::json{{"error", e.what()}}.dump(), kJson);
    } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(nlohmann::json{{"error", e.what()}}.dump(), kJson);
    }
}

}  // namespace

ServiceHost::ServiceHost(ClientSet backend) : impl_(std::make_unique<Impl>()) {
    impl_->backend = std::move(backend);
    auto& b = impl_->backend;
    impl_->server.Post("/v1/chat-step", [&b](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] { return to_json(b.generation->chat_step(chat_request_from_json(nlohmann::json::parse(req.body)))); });
    });
    impl_->server.Post("/v1/depth", [&b](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            const auto j = nlohmann::json::parse(req.body);
            const auto image = image_from_b64(j.at("image_b64").get<std::string>());
            return depth_reply_json(b.depth->predict_depth(j.at("sample_id").get<std::string>(), image));
        });
    });
    impl_->server.Post("/v1/segment", [&b](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            const auto j = nlohmann::json::parse(req.body);
            const auto image = image_from_b64(j.at("image_b64").get<std::string>());
            const auto query = parse_segment_query(j.at("query").get<std::string>());
            return segment_reply_json(b.segmentation->segment(j.at("sample_id").get<std::string>(), image, query));
        });
    });
}

ServiceHost::~ServiceHost() { stop(); }

int ServiceHost::start() {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0) {
        throw Error(ErrorCode::ServiceUnavailable, "could not bind a local port");
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->port;
}

bool ServiceHost::listen(const std::string& host, int port) {
    impl_->port = port;
    return impl_->server.listen(host, port);
}

void ServiceHost::stop() {
    if (!impl_) {
        return;
    }
    impl_->server.stop();
    if (impl_->worker.joinable()) {
        impl_->worker.join();
    }
}

std::string ServiceHost::url() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }

ClientSet make_clients(const std::string& spec) {
    if (spec.rfind("replay:", 0) == 0) {
        return make_replay_clients(spec.substr(7));
    }
    if (spec.rfind("http:", 0) == 0 || spec.rfind("https:", 0) == 0) {
        // Accept both "http:URL" and a bare URL.
        const auto rest = spec.substr(spec.find(':') + 1);
        const bool bare = rest.rfind("//", 0) == 0;
        return make_http_clients(bare ? spec : rest);
    }
    throw Error(ErrorCode::InvalidArgument, "client spec must be replay:DIR or http:URL, got \"" + spec + "\"");
}

}  // namespace vlad::genclients
