#pragma once

#include "automas/llm.hpp"
#include "automas/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace automas {

/// The enrichment artifacts for one agent: the synthetic queries plus the
/// re-normalized mean of the N+1 embeddings (base text and each query).
struct EnrichedDocument {
    std::string agent_id;
    std::string base_text;
    std::vector<std::string> synthetic_queries;
    std::vector<double> averaged_embedding;
};

/// Immutable catalog of agents. Construction validates every record and
/// rejects duplicate ids; enrichment returns a new registry.
class Registry {
public:
    Registry() = default;

    /// Validates and ingests records in order. Throws IngestError naming the
    /// offending id on duplicates, or listing violations for invalid records.
    static Registry ingest(std::vector<AgentRecord> records, const EngineConfig& config,
                           const std::string& backend_kind);

    const std::vector<AgentRecord>& records() const { return records_; }
    const AgentRecord* find(const std::string& id) const;
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    int embed_dim() const { return embed_dim_; }
    int n_enrich() const { return n_enrich_; }
    std::int64_t seed() const { return seed_; }
    const std::string& backend_kind() const { return backend_kind_; }

    /// Hash of the ingestion settings (N, D, backend kind, seed). Changes
    /// whenever any of them changes.
    std::string fingerprint() const;

private:
    std::vector<AgentRecord> records_;
    std::unordered_map<std::string, size_t> by_id_;
    int embed_dim_ = 256;
    int n_enrich_ = 10;
    std::int64_t seed_ = 42;
    std::string backend_kind_ = "mock";

    friend Registry enrich(const Registry&, int, llm::Backend&);
    friend Registry load_registry(const std::filesystem::path&);
};

/// Ingestion-time description enrichment: generates n synthetic queries per
/// agent and stores the averaged embedding. Identity on ids, names,
/// descriptions and metrics; idempotent under the mock backend.
Registry enrich(const Registry& registry, int n, llm::Backend& backend);

/// Builds the enrichment artifacts for one record without mutating anything.
EnrichedDocument enrich_record(const AgentRecord& record, int n, llm::Backend& backend);

nlohmann::json record_to_json(const AgentRecord& record);
AgentRecord record_from_json(const nlohmann::json& j);

/// Line-delimited JSON, one agent per line, preceded by a header line with
/// the format version, dimensions and fingerprint.
void save_registry(const Registry& registry, const std::filesystem::path& path);

/// Throws ParseError citing the 1-based line number on malformed lines.
Registry load_registry(const std::filesystem::path& path);

/// Same, then warns (never fails) when the file's fingerprint disagrees with
/// what the current config would produce.
Registry load_registry(const std::filesystem::path& path, const EngineConfig& current,
                       const std::string& current_backend);

/// Reads agent records from a plain JSONL file (no header line required).
std::vector<AgentRecord> read_record_stream(const std::filesystem::path& path);

} // namespace automas
