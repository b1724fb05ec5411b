#include "lsp/inference.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lsp/diagnostics.hpp"

namespace lsp {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

// Balanced-brace scan that respects string literals; returns the first
// substring that parses as a JSON object, if any.
std::optional<nlohmann::json> first_json_object(const std::string& text) {
    for (std::size_t start = 0; start < text.size(); ++start) {
        if (text[start] != '{') continue;
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (c == '\\') ++i;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                if (--depth == 0) {
                    nlohmann::json parsed =
                        nlohmann::json::parse(text.substr(start, i - start + 1),
                                              nullptr, false);
                    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
                    break;  // resume scanning after this '{'
                }
            }
        }
    }
    return std::nullopt;
}

// Extracts the last marker line of the form `<key>: "<value>"`.
std::optional<std::string> marker_line(const std::string& text, const std::string& key) {
    const std::string prefix = key + ": \"";
    std::size_t best = std::string::npos;
    std::size_t pos = 0;
    while ((pos = text.find(prefix, pos)) != std::string::npos) {
        if (pos == 0 || text[pos - 1] == '\n') best = pos;
        pos += prefix.size();
    }
    if (best == std::string::npos) return std::nullopt;
    const std::size_t value_start = best + prefix.size();
    const std::size_t line_end = text.find('\n', value_start);
    const std::size_t end = text.rfind('"', line_end == std::string::npos ? text.size()
                                                                          : line_end);
    if (end == std::string::npos || end < value_start) return std::nullopt;
    return text.substr(value_start, end - value_start);
}

void check_strict(const DecodingConfig& config) {
    if (config.strict_determinism && !config.is_deterministic()) {
        throw ConfigError(
            "strict determinism requires temperature 0 with top-p and top-k disabled");
    }
}

}  // namespace

ParsedPrediction parse_strict_json(const std::string& raw, bool expects_bare) {
    ParsedPrediction out;
    out.raw = raw;

    if (expects_bare) {
        const std::string token = trim(raw);
        if (token == "1") {
            out.label = ParsedLabel::one;
            return out;
        }
        if (token == "0") {
            out.label = ParsedLabel::zero;
            return out;
        }
    }

    const auto object = first_json_object(raw);
    if (!object) return out;

    if (object->contains("evidence") && (*object)["evidence"].is_string()) {
        out.evidence = (*object)["evidence"].get<std::string>();
    }
    if (!object->contains("label")) return out;
    const auto& label = (*object)["label"];
    if (label.is_boolean()) {
        out.label = label.get<bool>() ? ParsedLabel::one : ParsedLabel::zero;
    } else if (label.is_number_integer()) {
        const auto v = label.get<std::int64_t>();
        if (v == 0) out.label = ParsedLabel::zero;
        else if (v == 1) out.label = ParsedLabel::one;
    }
    return out;
}

ParsedPrediction classify(Backend& backend, const RenderedPrompt& prompt,
                          const DecodingConfig& config, int retry_base_delay_ms) {
    check_strict(config);
    constexpr int kAttempts = 3;
    for (int attempt = 1;; ++attempt) {
        try {
            const std::string raw = backend.generate(prompt.text, config);
            return parse_strict_json(raw, prompt.schema == OutputSchema::bare_binary);
        } catch (const TransportError&) {
            if (attempt >= kAttempts) throw;
            const auto delay = std::chrono::milliseconds(retry_base_delay_ms << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
    }
}

SketchOracleBackend::SketchOracleBackend(SketchDocument doc,
                                         std::shared_ptr<const SemanticScorer> scorer)
    : doc_(std::move(doc)), scorer_(std::move(scorer)) {
    if (!scorer_) throw Error("oracle backend needs a scorer");
}

std::string SketchOracleBackend::generate(const std::string& prompt,
                                          const DecodingConfig& config) {
    (void)config;
    const auto sentence = marker_line(prompt, "Sentence");
    if (!sentence) throw Error("prompt lacks the instance marker (Sentence line)");

    TaskInstance instance;
    instance.id = "oracle";
    instance.sentence = *sentence;
    instance.drug = marker_line(prompt, "Drug");
    instance.effect = marker_line(prompt, "Effect");

    const SketchDocument bound = bind_instance(doc_, instance);
    const SketchRunResult result =
        run_sketch(bound, InputText::from(instance.sentence), *scorer_);

    nlohmann::json reply;
    reply["label"] = result.label == "1" ? 1 : 0;
    reply["evidence"] = join_evidence(result.evidence);
    return reply.dump();
}

HttpBackend::HttpBackend(std::string endpoint, std::string model, std::string api_key)
    : model_(std::move(model)), api_key_(std::move(api_key)) {
    const std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint must be a http(s) URL");
    const std::size_t path = endpoint.find('/', scheme + 3);
    if (path == std::string::npos) {
        base_ = endpoint;
        path_ = "/generate";
    } else {
        base_ = endpoint.substr(0, path);
        path_ = endpoint.substr(path);
    }
}

std::unique_ptr<HttpBackend> HttpBackend::from_environment(const std::string& model) {
    const char* endpoint = std::getenv("LSP_HTTP_ENDPOINT");
    if (!endpoint || !*endpoint) {
        throw ConfigError("LSP_HTTP_ENDPOINT is not set");
    }
    const char* key = std::getenv("LSP_HTTP_API_KEY");
    return std::make_unique<HttpBackend>(endpoint, model, key ? key : "");
}

std::string HttpBackend::generate(const std::string& prompt, const DecodingConfig& config) {
    nlohmann::json body;
    body["model"] = model_;
    body["prompt"] = prompt;
    body["temperature"] = config.temperature;
    body["max_tokens"] = config.max_output_tokens;
    if (config.seed) body["seed"] = *config.seed;

    httplib::Client client(base_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto response = client.Post(path_, headers, body.dump(), "application/json");
    if (!response) {
        throw TransportError("request to " + base_ + path_ + " failed: " +
                             httplib::to_string(response.error()));
    }
    if (response->status < 200 || response->status >= 300) {
        throw TransportError("request to " + base_ + path_ + " returned status " +
                             std::to_string(response->status));
    }
    nlohmann::json reply = nlohmann::json::parse(response->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("text") || !reply["text"].is_string()) {
        throw TransportError("response from " + base_ + path_ + " lacks a \"text\" field");
    }
    return reply["text"].get<std::string>();
}

PredictionSet classify_corpus(Backend& backend,
                              const std::vector<std::pair<std::string, RenderedPrompt>>& items,
                              const DecodingConfig& config, int jobs, bool keep_raw,
                              int retry_base_delay_ms) {
    check_strict(config);
    PredictionSet set;
    set.model = backend.identity();
    set.records.resize(items.size());

    auto run_one = [&](std::size_t i) {
        PredictionRecord& record = set.records[i];
        record.id = items[i].first;
        try {
            const ParsedPrediction parsed =
                classify(backend, items[i].second, config, retry_base_delay_ms);
            record.label = parsed.label == ParsedLabel::one ? "1" : "0";
            record.invalid = parsed.label == ParsedLabel::invalid;
            if (parsed.evidence) record.evidence = *parsed.evidence;
            if (keep_raw) record.raw = parsed.raw;
        } catch (const std::exception& e) {
            record.label = "0";
            record.invalid = true;
            record.error = e.what();
        }
    };

    const int workers = std::max(1, jobs);
    if (workers == 1 || items.size() < 2) {
        for (std::size_t i = 0; i < items.size(); ++i) run_one(i);
        return set;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) {
                run_one(i);
            }
        });
    }
    for (auto& t : pool) t.join();
    return set;
}

}  // namespace lsp
