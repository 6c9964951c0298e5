#ifndef MATEBENCH_MODEL_HPP
#define MATEBENCH_MODEL_HPP

// Uniform client for text-generating models: a remote completion endpoint,
// a deterministic scripted queue for tests, and an engine wrapped to answer
// prompts (the reference "model" that reproduces the oracle rows).

#include <chrono>
#include <cstdlib>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "matebench/chess.hpp"
#include "matebench/engine.hpp"
#include "matebench/response.hpp"

namespace matebench {

struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

struct GenerationParams {
    double temperature = 0.0;  // 0 requests deterministic decoding
    int max_tokens = 64;
    std::vector<std::string> stop = {"\n"};
};

class Model {
public:
    virtual ~Model() = default;
    virtual RawResponse complete(const std::string& prompt, const GenerationParams& params) = 0;
    virtual std::string name() const = 0;
};

// Fixed response queue, consumed in order. Exhaustion throws: a test that
// queries more than it scripted is broken.
class ScriptedModel : public Model {
public:
    explicit ScriptedModel(std::vector<std::string> responses, std::string name = "scripted")
        : name_(std::move(name)) {
        for (auto& r : responses) queue_.push_back(std::move(r));
    }

    RawResponse complete(const std::string&, const GenerationParams&) override {
        if (queue_.empty()) throw ModelError("scripted model exhausted");
        RawResponse r;
        r.text = std::move(queue_.front());
        queue_.pop_front();
        return r;
    }

    std::string name() const override { return name_; }
    size_t remaining() const { return queue_.size(); }

private:
    std::deque<std::string> queue_;
    std::string name_;
};

// Answers a prompt by searching the position named on its "FEN:" line.
class EngineAsModel : public Model {
public:
    EngineAsModel(EngineConfig cfg, EngineLimits limits, std::string name = "engine")
        : cfg_(std::move(cfg)), limits_(limits), name_(std::move(name)) {}

    RawResponse complete(const std::string& prompt, const GenerationParams&) override {
        if (!session_) session_ = std::make_unique<EngineSession>(cfg_);
        Position p = Position::from_fen(fen_of(prompt));
        RawResponse r;
        r.text = session_->best_move(p, limits_).uci();
        return r;
    }

    std::string name() const override { return name_; }

    static std::string fen_of(const std::string& prompt) {
        auto at = prompt.find("FEN: ");
        if (at == std::string::npos) throw ModelError("prompt has no FEN line");
        auto start = at + 5;
        auto end = prompt.find('\n', start);
        return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
    }

private:
    EngineConfig cfg_;
    EngineLimits limits_;
    std::string name_;
    std::unique_ptr<EngineSession> session_;
};

// ---------------------------------------------------------------------------
// HTTP completion endpoint

struct HttpEndpointConfig {
    std::string base_url;  // e.g. "http://127.0.0.1:8080"
    std::string path = "/v1/completions";
    std::string model;  // body "model" field; omitted when empty
    // Name of the environment variable holding the bearer token. The token
    // itself never appears in configs or manifests.
    std::string auth_env;
    // Dotted paths into the response JSON; numeric components index arrays.
    std::string text_field = "choices.0.text";
    std::string usage_field = "usage.completion_tokens";
    int timeout_s = 120;
    int max_retries = 3;
    int backoff_ms = 250;  // doubled per retry
};

namespace detail {

inline const nlohmann::json* json_path(const nlohmann::json& root, const std::string& path) {
    const nlohmann::json* cur = &root;
    size_t start = 0;
    while (start <= path.size()) {
        size_t dot = path.find('.', start);
        std::string key = path.substr(start, dot == std::string::npos ? std::string::npos
                                                                      : dot - start);
        if (cur->is_array() && !key.empty() &&
            key.find_first_not_of("0123456789") == std::string::npos) {
            size_t idx = std::stoul(key);
            if (idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
        } else if (cur->is_object() && cur->contains(key)) {
            cur = &(*cur)[key];
        } else {
            return nullptr;
        }
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return cur;
}

}  // namespace detail

class HttpCompletionModel : public Model {
public:
    explicit HttpCompletionModel(HttpEndpointConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.base_url.empty()) throw ModelError("endpoint base_url is required");
    }

    RawResponse complete(const std::string& prompt, const GenerationParams& params) override;

    std::string name() const override { return cfg_.model.empty() ? cfg_.base_url : cfg_.model; }

private:
    HttpEndpointConfig cfg_;
};

}  // namespace matebench

// The vendored header is include-once per TU; keep it out of the namespace.
#include <httplib.h>

namespace matebench {

inline RawResponse HttpCompletionModel::complete(const std::string& prompt,
                                                 const GenerationParams& params) {
    nlohmann::json body;
    if (!cfg_.model.empty()) body["model"] = cfg_.model;
    body["prompt"] = prompt;
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_tokens;
    if (!params.stop.empty()) body["stop"] = params.stop;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!cfg_.auth_env.empty()) {
        const char* token = std::getenv(cfg_.auth_env.c_str());
        if (!token || !*token)
            throw ModelError("auth environment variable " + cfg_.auth_env + " is not set");
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(cfg_.backoff_ms << (attempt - 1)));

        httplib::Client client(cfg_.base_url);
        client.set_connection_timeout(cfg_.timeout_s, 0);
        client.set_read_timeout(cfg_.timeout_s, 0);
        auto res = client.Post(cfg_.path, headers, payload, "application/json");

        if (!res) {
            last_error = "transport: " + httplib::to_string(res.error());
            continue;  // transient
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
            continue;  // transient
        }
        if (res->status != 200)
            throw ModelError("endpoint returned status " + std::to_string(res->status) + ": " +
                             res->body);

        nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded()) throw ModelError("endpoint returned non-JSON body");
        const nlohmann::json* text = detail::json_path(reply, cfg_.text_field);
        if (!text || !text->is_string())
            throw ModelError("response field " + cfg_.text_field + " missing or not a string");

        RawResponse out;
        out.text = text->get<std::string>();
        if (const nlohmann::json* usage = detail::json_path(reply, cfg_.usage_field);
            usage && usage->is_number())
            out.token_usage = usage->get<int64_t>();
        out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0);
        out.retries = attempt;
        return out;
    }
    throw ModelError("endpoint failed after " + std::to_string(cfg_.max_retries + 1) +
                     " attempts; last error: " + last_error);
}

}  // namespace matebench

#endif  // MATEBENCH_MODEL_HPP
