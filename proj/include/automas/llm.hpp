#pragma once

#include "automas/prompts.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace automas::llm {

struct DecodeParams {
    double temperature = 0.0;
    int max_tokens = 1024;
};

struct ChatRequest {
    std::string system_prompt;
    std::string user_prompt;
    DecodeParams decode;
};

enum class BackendId { mock, http };

/// Backend selection with everything needed to construct it. Mock needs the
/// seed; http needs an endpoint and model name, with the credential read from
/// the environment variable named in `credential_env`.
struct BackendKind {
    BackendId id = BackendId::mock;
    std::int64_t seed = 42;
    std::string endpoint;
    std::string model;
    std::string credential_env = "AUTOMAS_API_KEY";

    static BackendKind make_mock(std::int64_t seed) {
        BackendKind k;
        k.id = BackendId::mock;
        k.seed = seed;
        return k;
    }
    static BackendKind make_http(std::string endpoint, std::string model) {
        BackendKind k;
        k.id = BackendId::http;
        k.endpoint = std::move(endpoint);
        k.model = std::move(model);
        return k;
    }
};

std::vector<std::string> validate_backend_kind(const BackendKind& kind);

/// The single boundary for generative and embedding calls. No other module
/// performs network activity.
class Backend {
public:
    virtual ~Backend() = default;

    /// Returns the completion text. Throws BackendError on transport or
    /// parse failure. Throws std::invalid_argument on an empty user prompt.
    virtual std::string chat(const ChatRequest& request) = 0;

    /// Returns a unit-norm vector of dimension embed_dim(). Throws
    /// std::invalid_argument on empty text.
    virtual std::vector<double> embed(const std::string& text) = 0;

    virtual int embed_dim() const = 0;
    virtual std::string kind_name() const = 0;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

/// Ground truth injected by tests and experiments so the mock backend can
/// reproduce the directional effects of a competent model: re-ranking lifts
/// the right agent, filtering prunes the wrong ones, critique repairs what
/// slipped through. Keys are the exact query / intent strings.
struct OracleBook {
    /// query -> relevant agent ids.
    std::unordered_map<std::string, std::vector<std::string>> relevant;
    /// Fraction of queries (chosen by stable hash) where the rerank oracle
    /// promotes relevant candidates to the front. 1.0 = always.
    double rerank_promote_rate = 1.0;
    /// Fraction of queries where the filter oracle prunes to relevant-only.
    double filter_apply_rate = 1.0;
    /// intent -> scripted decomposition steps.
    std::unordered_map<std::string, std::vector<std::string>> decompositions;
    /// intent -> gold plan JSON ({"steps": [..], "nodes": [{"name","arguments"}],
    /// "links": [{"source","target"}], "type": ".."}). Drives the plan critique
    /// and self-correcting composition channels.
    std::unordered_map<std::string, nlohmann::json> gold_plans;
    /// When set, the links channel ignores the gold plan on first attempts
    /// (no feedback in the request) and proposes a plain chain instead.
    bool sabotage_first_links = false;
    /// task -> refined task text returned by refine_task verdicts.
    std::unordered_map<std::string, std::string> refined_tasks;
};

struct MockOptions {
    /// Decompose returns the intent as the single subtask instead of
    /// splitting on connectives.
    bool single_step_decompose = false;
};

/// Deterministic stand-in for a model endpoint: chat is a pure function of
/// (seed, oracle+options state, request) and embed hashes character trigrams
/// of the lowercased text into D buckets before L2 normalization, so
/// lexically overlapping texts score higher cosine similarity.
class MockBackend : public Backend {
public:
    MockBackend(std::int64_t seed, int embed_dim, MockOptions options = {});

    std::string chat(const ChatRequest& request) override;
    std::vector<double> embed(const std::string& text) override;
    int embed_dim() const override { return embed_dim_; }
    std::string kind_name() const override { return "mock"; }

    OracleBook& oracle() { return oracle_; }
    const OracleBook& oracle() const { return oracle_; }
    MockOptions& options() { return options_; }

private:
    std::string dispatch(const std::string& kind, const nlohmann::json& payload,
                         const ChatRequest& request) const;

    std::string mock_enrich(const nlohmann::json& payload) const;
    std::string mock_rerank(const nlohmann::json& payload) const;
    std::string mock_filter(const nlohmann::json& payload) const;
    std::string mock_critique(const nlohmann::json& payload) const;
    std::string mock_decompose(const nlohmann::json& payload) const;
    std::string mock_args(const nlohmann::json& payload) const;
    std::string mock_links(const nlohmann::json& payload) const;
    std::string mock_plan_critique(const nlohmann::json& payload) const;
    std::string mock_feedback(const nlohmann::json& payload) const;
    std::string mock_judge(const nlohmann::json& payload) const;

    std::int64_t seed_;
    int embed_dim_;
    MockOptions options_;
    OracleBook oracle_;
};

/// JSON chat-completion-style client. Retries transport failures with capped
/// exponential backoff (3 attempts) and bounds in-flight requests.
class HttpBackend : public Backend {
public:
    HttpBackend(BackendKind kind, int embed_dim, int parallelism);
    ~HttpBackend() override;

    std::string chat(const ChatRequest& request) override;
    std::vector<double> embed(const std::string& text) override;
    int embed_dim() const override { return embed_dim_; }
    std::string kind_name() const override { return "http"; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int embed_dim_;
};

std::unique_ptr<Backend> make_backend(const BackendKind& kind, int embed_dim, int http_parallelism = 4,
                                      MockOptions options = {});

} // namespace automas::llm
