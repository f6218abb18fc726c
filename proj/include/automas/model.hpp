#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace automas {

/// Performance metrics exactly as vendors publish them: cents, milliseconds
/// and an accuracy fraction. Stored unnormalized; routing policies normalize
/// on the fly.
struct PerfMetrics {
    double cost_cents = 0.0;
    double latency_ms = 1.0;
    double accuracy = 1.0;

    bool operator==(const PerfMetrics&) const = default;
};

/// One registry entry. `enriched_queries` and `embedding` are empty until
/// ingestion-time enrichment runs.
struct AgentRecord {
    std::string id;
    std::string name;
    std::string description;
    PerfMetrics metrics;
    std::vector<std::string> tags;
    std::vector<std::string> enriched_queries;
    std::optional<std::vector<double>> embedding;

    bool operator==(const AgentRecord&) const = default;
};

/// One subtask produced by the planner.
struct TaskSpec {
    int index = 0;
    std::string description;
};

enum class Criterion { cost, latency, accuracy };
enum class Direction { minimize, maximize };

std::string criterion_name(Criterion c);
Direction default_direction(Criterion c);

struct PolicyTerm {
    Criterion criterion;
    Direction direction;
    double weight = 1.0;
};

/// Machine-checkable form of a user constraint such as "prioritize cost and
/// speed over accuracy". Ordered terms are applied lexicographically unless
/// `weighted` selects the weighted-sum variant.
struct ConstraintPolicy {
    std::vector<PolicyTerm> objective;
    bool weighted = false;
    std::string free_text;
};

/// Returns violation messages; empty means the policy is usable.
std::vector<std::string> validate_policy(const ConstraintPolicy& policy);

/// Parses "cost,latency" or "min:cost,max:accuracy" into a policy.
ConstraintPolicy parse_policy(const std::string& spec);

/// Every tunable symbol lives here: the hybrid trade-off alpha, retrieval
/// depth k, enrichment count N, critique budget, embedding dimension D and
/// the seed for all mock randomness.
struct EngineConfig {
    double alpha = 0.9;
    int k = 5;
    int n_enrich = 10;
    int max_critique_iters = 3;
    int embed_dim = 256;
    std::int64_t seed = 42;

    // Fusion pool per leg is pool_factor * k.
    int pool_factor = 4;
    // Feed synthetic queries into the sparse leg as well as the dense average.
    bool enrich_sparse = true;
    // Optional recommender stages.
    bool use_filter = false;
    bool use_task_critique = false;
    // When the filter judges everything irrelevant, keep the top candidate
    // unless this allows an empty result.
    bool allow_empty_filter = false;
    // Reroute attempts per node during execution.
    int reroute_attempts = 1;
    // In-flight request bound for http backends.
    int http_parallelism = 4;
    // Optional directory overriding the built-in prompt templates.
    std::string prompt_dir;
};

std::vector<std::string> validate_config(const EngineConfig& config);

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Pure check of the AgentRecord invariants. Dimension and enrichment-count
/// expectations come from the config.
ValidationResult validate_record(const AgentRecord& record, const EngineConfig& config = EngineConfig{});

} // namespace automas
