#include "automas/registry.hpp"

#include "automas/error.hpp"
#include "automas/text.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace automas {

using nlohmann::json;

namespace {

std::vector<double> normalized_mean(const std::vector<std::vector<double>>& vectors) {
    std::vector<double> mean(vectors.front().size(), 0.0);
    for (const auto& v : vectors) {
        for (size_t i = 0; i < v.size(); ++i) {
            mean[i] += v[i];
        }
    }
    for (double& x : mean) {
        x /= static_cast<double>(vectors.size());
    }
    double norm = 0.0;
    for (double x : mean) {
        norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& x : mean) {
            x /= norm;
        }
    }
    return mean;
}

} // namespace

Registry Registry::ingest(std::vector<AgentRecord> records, const EngineConfig& config,
                          const std::string& backend_kind) {
    Registry registry;
    registry.embed_dim_ = config.embed_dim;
    registry.n_enrich_ = config.n_enrich;
    registry.seed_ = config.seed;
    registry.backend_kind_ = backend_kind;

    for (auto& record : records) {
        auto validation = validate_record(record, config);
        if (!validation.ok()) {
            std::string msg = "invalid record '" + record.id + "':";
            for (const auto& v : validation.violations) {
                msg += " " + v + ";";
            }
            throw IngestError(msg);
        }
        if (registry.by_id_.count(record.id)) {
            throw IngestError("duplicate id '" + record.id + "'");
        }
        registry.by_id_[record.id] = registry.records_.size();
        registry.records_.push_back(std::move(record));
    }
    return registry;
}

const AgentRecord* Registry::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &records_[it->second];
}

std::string Registry::fingerprint() const {
    std::string canonical = "n=" + std::to_string(n_enrich_) + ";d=" + std::to_string(embed_dim_) +
                            ";backend=" + backend_kind_ + ";seed=" + std::to_string(seed_);
    return to_hex(fnv64(canonical));
}

EnrichedDocument enrich_record(const AgentRecord& record, int n, llm::Backend& backend) {
    EnrichedDocument doc;
    doc.agent_id = record.id;
    doc.base_text = record.name.empty() ? record.description : record.name + " " + record.description;

    if (n > 0) {
        static const llm::PromptLibrary prompts;
        json payload = {{"name", record.name}, {"description", record.description}, {"n", n}};
        auto rendered = prompts.render("enrich", payload,
                                       {{"name", record.name},
                                        {"description", record.description},
                                        {"n", std::to_string(n)}},
                                       record.description);
        std::string response = backend.chat({rendered.system_prompt, rendered.user_prompt, {}});
        json parsed = json::parse(response, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_array()) {
            throw BackendError("enrich: backend returned malformed query list for '" + record.id +
                                   "'",
                               /*retriable=*/false);
        }
        for (const auto& q : parsed) {
            doc.synthetic_queries.push_back(q.get<std::string>());
        }
        if (static_cast<int>(doc.synthetic_queries.size()) != n) {
            throw BackendError("enrich: expected " + std::to_string(n) + " queries for '" +
                                   record.id + "', got " +
                                   std::to_string(doc.synthetic_queries.size()),
                               /*retriable=*/false);
        }
    }

    std::vector<std::vector<double>> embeddings;
    embeddings.push_back(backend.embed(doc.base_text));
    for (const auto& q : doc.synthetic_queries) {
        embeddings.push_back(backend.embed(q));
    }
    doc.averaged_embedding = normalized_mean(embeddings);
    return doc;
}

Registry enrich(const Registry& registry, int n, llm::Backend& backend) {
    Registry out = registry;
    out.n_enrich_ = n;

    std::vector<std::string> failed;
    std::string first_error;
    for (auto& record : out.records_) {
        try {
            EnrichedDocument doc = enrich_record(record, n, backend);
            record.enriched_queries = std::move(doc.synthetic_queries);
            record.embedding = std::move(doc.averaged_embedding);
        } catch (const std::exception& e) {
            if (failed.empty()) {
                first_error = e.what();
            }
            failed.push_back(record.id);
        }
    }
    if (!failed.empty()) {
        std::string msg = "enrichment incomplete (" + first_error + "); unenriched:";
        for (const auto& id : failed) {
            msg += " " + id;
        }
        throw EnrichmentError(msg, failed);
    }
    return out;
}

json record_to_json(const AgentRecord& r) {
    json j = {{"id", r.id},
              {"name", r.name},
              {"description", r.description},
              {"metrics",
               {{"cost_cents", r.metrics.cost_cents},
                {"latency_ms", r.metrics.latency_ms},
                {"accuracy", r.metrics.accuracy}}},
              {"tags", r.tags},
              {"enriched_queries", r.enriched_queries}};
    if (r.embedding.has_value()) {
        j["embedding"] = *r.embedding;
    } else {
        j["embedding"] = json::array();
    }
    return j;
}

AgentRecord record_from_json(const json& j) {
    AgentRecord r;
    r.id = j.at("id").get<std::string>();
    r.name = j.value("name", "");
    r.description = j.at("description").get<std::string>();
    if (j.contains("metrics")) {
        const json& m = j.at("metrics");
        r.metrics.cost_cents = m.value("cost_cents", 0.0);
        r.metrics.latency_ms = m.value("latency_ms", 1.0);
        r.metrics.accuracy = m.value("accuracy", 1.0);
    }
    r.tags = j.value("tags", std::vector<std::string>{});
    r.enriched_queries = j.value("enriched_queries", std::vector<std::string>{});
    if (j.contains("embedding") && j.at("embedding").is_array() && !j.at("embedding").empty()) {
        r.embedding = j.at("embedding").get<std::vector<double>>();
    }
    return r;
}

void save_registry(const Registry& registry, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw AutomasError("cannot open for writing: " + path.string());
    }
    json header = {{"automas_registry_version", 1},
                   {"embed_dim", registry.embed_dim()},
                   {"n_enrich", registry.n_enrich()},
                   {"seed", registry.seed()},
                   {"backend_kind", registry.backend_kind()},
                   {"fingerprint", registry.fingerprint()}};
    out << header.dump() << "\n";
    for (const auto& record : registry.records()) {
        out << record_to_json(record).dump() << "\n";
    }
}

Registry load_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw AutomasError("cannot open for reading: " + path.string());
    }
    Registry registry;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("malformed JSON at line " + std::to_string(line_no) + " of " +
                                 path.string(),
                             line_no);
        }
        if (!header_seen && j.contains("automas_registry_version")) {
            header_seen = true;
            registry.embed_dim_ = j.value("embed_dim", 256);
            registry.n_enrich_ = j.value("n_enrich", 10);
            registry.seed_ = j.value("seed", static_cast<std::int64_t>(42));
            registry.backend_kind_ = j.value("backend_kind", "mock");
            continue;
        }
        AgentRecord record;
        try {
            record = record_from_json(j);
        } catch (const json::exception& e) {
            throw ParseError("invalid record at line " + std::to_string(line_no) + ": " + e.what(),
                             line_no);
        }
        if (registry.by_id_.count(record.id)) {
            throw IngestError("duplicate id '" + record.id + "' at line " +
                              std::to_string(line_no));
        }
        registry.by_id_[record.id] = registry.records_.size();
        registry.records_.push_back(std::move(record));
    }
    return registry;
}

Registry load_registry(const std::filesystem::path& path, const EngineConfig& current,
                       const std::string& current_backend) {
    Registry registry = load_registry(path);
    std::string expected = "n=" + std::to_string(current.n_enrich) +
                           ";d=" + std::to_string(current.embed_dim) +
                           ";backend=" + current_backend + ";seed=" + std::to_string(current.seed);
    if (registry.fingerprint() != to_hex(fnv64(expected))) {
        std::cerr << "warning: registry " << path.string()
                  << " was built with different settings than the current config"
                  << " (file n_enrich=" << registry.n_enrich() << " embed_dim=" << registry.embed_dim()
                  << " backend=" << registry.backend_kind() << " seed=" << registry.seed() << ")\n";
    }
    return registry;
}

std::vector<AgentRecord> read_record_stream(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw AutomasError("cannot open for reading: " + path.string());
    }
    std::vector<AgentRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("malformed JSON at line " + std::to_string(line_no) + " of " +
                                 path.string(),
                             line_no);
        }
        if (j.contains("automas_registry_version")) {
            continue; // allow re-reading a saved registry as a record stream
        }
        try {
            records.push_back(record_from_json(j));
        } catch (const json::exception& e) {
            throw ParseError("invalid record at line " + std::to_string(line_no) + ": " + e.what(),
                             line_no);
        }
    }
    return records;
}

} // namespace automas
