#pragma once

#include "automas/llm.hpp"
#include "automas/model.hpp"
#include "automas/registry.hpp"
#include "automas/text.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace automas {

struct ScoredCandidate {
    std::string agent_id;
    double sparse_score = 0.0;
    double dense_score = 0.0;
    double fused_score = 0.0;
    int rank = 0;
};

/// Snapshot of the agent fields the downstream stages need, so the index is
/// self-contained once built.
struct IndexedAgent {
    std::string id;
    std::string name;
    std::string description;
    PerfMetrics metrics;
};

struct Posting {
    size_t doc = 0; // position in agents()
    int tf = 0;
};

/// Immutable hybrid index: an in-memory inverted term index for BM25 plus one
/// dense (averaged) vector per agent for exact cosine scoring. Safe for
/// unbounded concurrent query threads once built.
class SearchIndex {
public:
    /// Indexes every agent's name + description, appending synthetic queries
    /// to the sparse document when `config.enrich_sparse` is set. Agents
    /// without a stored embedding are embedded from their base text.
    static SearchIndex build(const Registry& registry, llm::Backend& backend,
                             const EngineConfig& config);

    size_t corpus_size() const { return agents_.size(); }
    const std::vector<IndexedAgent>& agents() const { return agents_; }
    const IndexedAgent* agent(const std::string& id) const;
    const std::vector<double>& vector_of(size_t doc) const { return vectors_[doc]; }
    double avg_doc_len() const { return avg_doc_len_; }
    int doc_len(size_t doc) const { return doc_lengths_[doc]; }

    /// Standard BM25 (k1 = 1.2, b = 0.75, IDF floored at 0). Throws
    /// std::out_of_range for an unknown agent id.
    double bm25_score(const std::vector<std::string>& query_tokens,
                      const std::string& agent_id) const;

    /// Alpha-blended two-leg retrieval: both legs' top-(pool_factor * k)
    /// candidates are pooled, each leg is min-max normalized over the pool,
    /// and candidates are ranked by alpha * dense + (1 - alpha) * sparse.
    /// Ties break on lexicographic agent id. A query with no tokens falls
    /// back to dense-only scoring of the raw string.
    std::vector<ScoredCandidate> hybrid_search(const std::string& query, int k, double alpha,
                                               llm::Backend& backend) const;

private:
    std::vector<IndexedAgent> agents_;
    std::unordered_map<std::string, size_t> by_id_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<int> doc_lengths_;
    std::vector<std::vector<double>> vectors_;
    double avg_doc_len_ = 0.0;
    int pool_factor_ = 4;

    double bm25_for_doc(const std::vector<std::string>& query_tokens, size_t doc) const;
    std::vector<double> sparse_scores(const std::vector<std::string>& query_tokens) const;
};

} // namespace automas
