#include "automas/retrieval.hpp"

#include "automas/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace automas {

namespace {

constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;

std::vector<std::string> unique_tokens(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& t : tokens) {
        if (seen.insert(t).second) {
            out.push_back(t);
        }
    }
    return out;
}

} // namespace

SearchIndex SearchIndex::build(const Registry& registry, llm::Backend& backend,
                               const EngineConfig& config) {
    SearchIndex index;
    index.pool_factor_ = config.pool_factor;

    long total_len = 0;
    for (const auto& record : registry.records()) {
        size_t doc = index.agents_.size();
        index.agents_.push_back({record.id, record.name, record.description, record.metrics});
        index.by_id_[record.id] = doc;

        std::string sparse_text = record.name + " " + record.description;
        if (config.enrich_sparse) {
            for (const auto& q : record.enriched_queries) {
                sparse_text += " " + q;
            }
        }
        auto tokens = tokenize(sparse_text);
        index.doc_lengths_.push_back(static_cast<int>(tokens.size()));
        total_len += static_cast<long>(tokens.size());

        std::unordered_map<std::string, int> tf;
        for (const auto& t : tokens) {
            tf[t]++;
        }
        for (const auto& [term, count] : tf) {
            index.postings_[term].push_back({doc, count});
        }

        if (record.embedding.has_value()) {
            index.vectors_.push_back(*record.embedding);
        } else {
            std::string base =
                record.name.empty() ? record.description : record.name + " " + record.description;
            index.vectors_.push_back(backend.embed(base));
        }
    }
    index.avg_doc_len_ =
        index.agents_.empty() ? 0.0 : static_cast<double>(total_len) / index.agents_.size();
    return index;
}

const IndexedAgent* SearchIndex::agent(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &agents_[it->second];
}

double SearchIndex::bm25_for_doc(const std::vector<std::string>& query_tokens, size_t doc) const {
    const double n = static_cast<double>(agents_.size());
    const double dl = doc_lengths_[doc];
    double score = 0.0;
    for (const auto& term : unique_tokens(query_tokens)) {
        auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        const auto& plist = it->second;
        double df = static_cast<double>(plist.size());
        double idf = std::max(0.0, std::log((n - df + 0.5) / (df + 0.5)));
        if (idf == 0.0) {
            continue;
        }
        auto pit = std::lower_bound(plist.begin(), plist.end(), doc,
                                    [](const Posting& p, size_t d) { return p.doc < d; });
        if (pit == plist.end() || pit->doc != doc) {
            continue;
        }
        double tf = pit->tf;
        score += idf * tf * (kBm25K1 + 1.0) /
                 (tf + kBm25K1 * (1.0 - kBm25B + kBm25B * dl / avg_doc_len_));
    }
    return score;
}

double SearchIndex::bm25_score(const std::vector<std::string>& query_tokens,
                               const std::string& agent_id) const {
    auto it = by_id_.find(agent_id);
    if (it == by_id_.end()) {
        throw std::out_of_range("unknown agent id '" + agent_id + "'");
    }
    return bm25_for_doc(query_tokens, it->second);
}

std::vector<double> SearchIndex::sparse_scores(const std::vector<std::string>& query_tokens) const {
    std::vector<double> scores(agents_.size(), 0.0);
    const double n = static_cast<double>(agents_.size());
    for (const auto& term : unique_tokens(query_tokens)) {
        auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        double df = static_cast<double>(it->second.size());
        double idf = std::max(0.0, std::log((n - df + 0.5) / (df + 0.5)));
        if (idf == 0.0) {
            continue;
        }
        for (const auto& posting : it->second) {
            double tf = posting.tf;
            double dl = doc_lengths_[posting.doc];
            scores[posting.doc] += idf * tf * (kBm25K1 + 1.0) /
                                   (tf + kBm25K1 * (1.0 - kBm25B + kBm25B * dl / avg_doc_len_));
        }
    }
    return scores;
}

std::vector<ScoredCandidate> SearchIndex::hybrid_search(const std::string& query, int k,
                                                        double alpha,
                                                        llm::Backend& backend) const {
    if (k < 1) {
        throw std::invalid_argument("hybrid_search: k >= 1");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("hybrid_search: alpha in [0,1]");
    }
    if (agents_.empty()) {
        return {};
    }

    auto tokens = tokenize(query);
    const bool dense_only = tokens.empty();

    std::vector<double> dense(agents_.size(), 0.0);
    {
        auto qvec = backend.embed(query);
        for (size_t doc = 0; doc < agents_.size(); ++doc) {
            const auto& v = vectors_[doc];
            double dot = 0.0;
            size_t lim = std::min(v.size(), qvec.size());
            for (size_t i = 0; i < lim; ++i) {
                dot += v[i] * qvec[i];
            }
            dense[doc] = dot;
        }
    }
    std::vector<double> sparse =
        dense_only ? std::vector<double>(agents_.size(), 0.0) : sparse_scores(tokens);

    // Per-leg pools under the final total order (score desc, id asc), so the
    // fused top-k matches a whole-corpus scorer whenever k fits in the pool.
    const size_t pool =
        std::min(agents_.size(), static_cast<size_t>(pool_factor_) * static_cast<size_t>(k));
    auto top_pool = [&](const std::vector<double>& scores) {
        std::vector<size_t> docs(agents_.size());
        for (size_t i = 0; i < docs.size(); ++i) {
            docs[i] = i;
        }
        auto cmp = [&](size_t a, size_t b) {
            if (scores[a] != scores[b]) {
                return scores[a] > scores[b];
            }
            return agents_[a].id < agents_[b].id;
        };
        std::partial_sort(docs.begin(), docs.begin() + static_cast<long>(pool), docs.end(), cmp);
        docs.resize(pool);
        return docs;
    };

    std::set<size_t> union_pool;
    if (!dense_only) {
        for (size_t d : top_pool(sparse)) {
            union_pool.insert(d);
        }
    }
    for (size_t d : top_pool(dense)) {
        union_pool.insert(d);
    }

    double lo_s = 0.0, hi_s = 0.0, lo_d = 0.0, hi_d = 0.0;
    bool first = true;
    for (size_t d : union_pool) {
        if (first) {
            lo_s = hi_s = sparse[d];
            lo_d = hi_d = dense[d];
            first = false;
        } else {
            lo_s = std::min(lo_s, sparse[d]);
            hi_s = std::max(hi_s, sparse[d]);
            lo_d = std::min(lo_d, dense[d]);
            hi_d = std::max(hi_d, dense[d]);
        }
    }
    auto norm = [](double x, double lo, double hi) { return hi > lo ? (x - lo) / (hi - lo) : 0.0; };

    std::vector<ScoredCandidate> candidates;
    candidates.reserve(union_pool.size());
    for (size_t d : union_pool) {
        ScoredCandidate c;
        c.agent_id = agents_[d].id;
        c.sparse_score = sparse[d];
        c.dense_score = dense[d];
        double sn = norm(sparse[d], lo_s, hi_s);
        double dn = norm(dense[d], lo_d, hi_d);
        c.fused_score = dense_only ? dn : alpha * dn + (1.0 - alpha) * sn;
        candidates.push_back(std::move(c));
    }
    std::sort(candidates.begin(), candidates.end(), [](const ScoredCandidate& a,
                                                       const ScoredCandidate& b) {
        if (a.fused_score != b.fused_score) {
            return a.fused_score > b.fused_score;
        }
        return a.agent_id < b.agent_id;
    });
    if (candidates.size() > static_cast<size_t>(k)) {
        candidates.resize(static_cast<size_t>(k));
    }
    for (size_t i = 0; i < candidates.size(); ++i) {
        candidates[i].rank = static_cast<int>(i) + 1;
    }
    return candidates;
}

} // namespace automas
