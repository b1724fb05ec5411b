#ifndef LSP_INFERENCE_HPP
#define LSP_INFERENCE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lsp/predictions.hpp"
#include "lsp/prompts.hpp"
#include "lsp/sketch.hpp"

namespace lsp {

// Defaults encode deterministic decoding: temperature zero, top-p and
// top-k disabled.
struct DecodingConfig {
    double temperature = 0.0;
    bool top_p_disabled = true;
    bool top_k_disabled = true;
    int max_output_tokens = 256;
    std::optional<std::uint64_t> seed;
    bool strict_determinism = false;

    bool is_deterministic() const {
        return temperature == 0.0 && top_p_disabled && top_k_disabled;
    }
};

// Text-generation backend. generate() throws TransportError for retryable
// failures and Error for permanent ones.
class Backend {
  public:
    virtual ~Backend() = default;
    virtual std::string generate(const std::string& prompt, const DecodingConfig& config) = 0;
    virtual std::string identity() const = 0;
};

enum class ParsedLabel { zero, one, invalid };

struct ParsedPrediction {
    ParsedLabel label = ParsedLabel::invalid;
    std::optional<std::string> evidence;
    std::string raw;  // verbatim completion, always retained
};

// Total: never throws; malformed output is data. Extracts the first
// parseable JSON object (code fences and surrounding prose ignored) and
// reads an integer or boolean "label" plus optional string "evidence".
// With expects_bare, a lone "1"/"0" token is accepted first.
ParsedPrediction parse_strict_json(const std::string& raw, bool expects_bare);

// generate-then-parse with up to 3 attempts (exponential backoff) on
// transport errors only; parse failures are never retried. Throws
// ConfigError when strict determinism is requested but violated.
ParsedPrediction classify(Backend& backend, const RenderedPrompt& prompt,
                          const DecodingConfig& config, int retry_base_delay_ms = 250);

// Fixed-completion backend for tests and dry runs.
class StubBackend final : public Backend {
  public:
    explicit StubBackend(std::string completion) : completion_(std::move(completion)) {}
    std::string generate(const std::string&, const DecodingConfig&) override {
        return completion_;
    }
    std::string identity() const override { return "stub"; }

  private:
    std::string completion_;
};

// Runs the sketch on the instance embedded in the rendered prompt (the
// trailing Sentence/Drug/Effect lines) and answers with the mandated
// JSON, enabling round-trip checks without any model.
class SketchOracleBackend final : public Backend {
  public:
    SketchOracleBackend(SketchDocument doc, std::shared_ptr<const SemanticScorer> scorer);
    std::string generate(const std::string& prompt, const DecodingConfig& config) override;
    std::string identity() const override { return "oracle"; }

  private:
    SketchDocument doc_;
    std::shared_ptr<const SemanticScorer> scorer_;
};

// Minimal JSON-over-HTTP contract:
//   POST <path> {"model", "prompt", "temperature", "max_tokens", "seed"?}
//   -> 200 {"text": "..."}
// Endpoint comes from LSP_HTTP_ENDPOINT (e.g. http://host:port/generate);
// LSP_HTTP_API_KEY, when set, is sent as a bearer token.
class HttpBackend final : public Backend {
  public:
    HttpBackend(std::string endpoint, std::string model, std::string api_key = "");

    static std::unique_ptr<HttpBackend> from_environment(const std::string& model);

    std::string generate(const std::string& prompt, const DecodingConfig& config) override;
    std::string identity() const override { return model_; }

  private:
    std::string base_;
    std::string path_;
    std::string model_;
    std::string api_key_;
};

// Classifies each (id, prompt) pair with a bounded number of in-flight
// requests; results merge by input index. Exhausted retries become error
// entries, never batch failures.
PredictionSet classify_corpus(Backend& backend,
                              const std::vector<std::pair<std::string, RenderedPrompt>>& items,
                              const DecodingConfig& config, int jobs = 4, bool keep_raw = false,
                              int retry_base_delay_ms = 250);

}  // namespace lsp

#endif
