#include "automas/recommender.hpp"

#include "automas/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace automas {

using nlohmann::json;

namespace {

json candidate_payload(const std::vector<std::string>& ids, const SearchIndex& index) {
    json arr = json::array();
    for (size_t i = 0; i < ids.size(); ++i) {
        const IndexedAgent* agent = index.agent(ids[i]);
        json entry = {{"index", static_cast<int>(i)}, {"id", ids[i]}};
        if (agent) {
            entry["name"] = agent->name;
            entry["description"] = agent->description;
            entry["metrics"] = {{"cost_cents", agent->metrics.cost_cents},
                                {"latency_ms", agent->metrics.latency_ms},
                                {"accuracy", agent->metrics.accuracy}};
        }
        arr.push_back(std::move(entry));
    }
    return arr;
}

std::string candidate_blocks(const std::vector<std::string>& ids, const SearchIndex& index) {
    std::ostringstream out;
    for (size_t i = 0; i < ids.size(); ++i) {
        const IndexedAgent* agent = index.agent(ids[i]);
        out << "[" << i << "] " << (agent ? agent->name : ids[i]);
        if (agent) {
            out << " - " << agent->description << " (cost " << agent->metrics.cost_cents
                << "c, latency " << agent->metrics.latency_ms << "ms, accuracy "
                << agent->metrics.accuracy << ")";
        }
        out << "\n";
    }
    return out.str();
}

// Index list from the backend, repaired into a permutation of 0..n-1:
// out-of-range and duplicate entries are dropped, missing ones appended in
// original relative order.
std::vector<size_t> repair_permutation(const json& parsed, size_t n) {
    std::vector<size_t> order;
    std::set<size_t> used;
    if (parsed.is_array()) {
        for (const auto& item : parsed) {
            if (!item.is_number_integer()) {
                continue;
            }
            long long v = item.get<long long>();
            if (v < 0 || v >= static_cast<long long>(n)) {
                continue;
            }
            size_t idx = static_cast<size_t>(v);
            if (used.insert(idx).second) {
                order.push_back(idx);
            }
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (!used.count(i)) {
            order.push_back(i);
        }
    }
    return order;
}

} // namespace

const std::vector<std::string>& Recommendation::final() const {
    if (critiqued.has_value()) {
        return *critiqued;
    }
    if (filtered.has_value()) {
        return *filtered;
    }
    if (!reranked.empty()) {
        return reranked;
    }
    return retrieved;
}

RerankResult rerank(const std::string& query, const std::vector<std::string>& candidate_ids,
                    const SearchIndex& index, llm::Backend& backend,
                    const llm::PromptLibrary& prompts) {
    if (candidate_ids.empty()) {
        throw AutomasError("rerank: candidates must be non-empty");
    }
    RerankResult result;
    if (candidate_ids.size() == 1) {
        result.ranked = candidate_ids;
        return result;
    }

    json payload = {{"query", query}, {"candidates", candidate_payload(candidate_ids, index)}};
    auto rendered = prompts.render("rerank", payload,
                                   {{"query", query},
                                    {"candidates", candidate_blocks(candidate_ids, index)}},
                                   query);
    json parsed;
    try {
        std::string response = backend.chat({rendered.system_prompt, rendered.user_prompt, {}});
        parsed = json::parse(response, nullptr, false);
    } catch (const BackendError&) {
        throw; // transport problems are the caller's to retry
    }
    if (parsed.is_discarded() || !parsed.is_array()) {
        result.ranked = candidate_ids;
        result.parse_fallback = true;
        return result;
    }
    for (size_t idx : repair_permutation(parsed, candidate_ids.size())) {
        result.ranked.push_back(candidate_ids[idx]);
    }
    return result;
}

std::vector<std::string> filter_candidates(const std::string& query,
                                           const std::vector<std::string>& candidate_ids,
                                           const SearchIndex& index, llm::Backend& backend,
                                           const llm::PromptLibrary& prompts, bool allow_empty) {
    if (candidate_ids.empty()) {
        throw AutomasError("filter: candidates must be non-empty");
    }
    json payload = {{"query", query}, {"candidates", candidate_payload(candidate_ids, index)}};
    auto rendered = prompts.render("filter", payload,
                                   {{"query", query},
                                    {"candidates", candidate_blocks(candidate_ids, index)}},
                                   query);
    std::string response = backend.chat({rendered.system_prompt, rendered.user_prompt, {}});
    json parsed = json::parse(response, nullptr, false);

    std::vector<std::string> kept;
    if (!parsed.is_discarded() && parsed.is_array()) {
        std::set<size_t> used;
        for (const auto& item : parsed) {
            if (!item.is_number_integer()) {
                continue;
            }
            long long v = item.get<long long>();
            if (v < 0 || v >= static_cast<long long>(candidate_ids.size())) {
                continue;
            }
            if (used.insert(static_cast<size_t>(v)).second) {
                kept.push_back(candidate_ids[static_cast<size_t>(v)]);
            }
        }
        // Preserve the input order regardless of how the response ordered them.
        std::sort(kept.begin(), kept.end(), [&](const std::string& a, const std::string& b) {
            auto pa = std::find(candidate_ids.begin(), candidate_ids.end(), a);
            auto pb = std::find(candidate_ids.begin(), candidate_ids.end(), b);
            return pa < pb;
        });
    } else {
        kept = candidate_ids; // unusable response: filter nothing
    }
    if (kept.empty() && !allow_empty) {
        kept.push_back(candidate_ids.front());
    }
    return kept;
}

CritiqueVerdict critique_task(const TaskSpec& task, Recommendation& recommendation,
                              const SearchIndex& index, llm::Backend& backend,
                              const llm::PromptLibrary& prompts) {
    const auto& final_ids = recommendation.final();
    if (final_ids.empty()) {
        throw AutomasError("critique_task: recommendation has an empty final stage");
    }
    json payload = {{"task", task.description},
                    {"final", final_ids},
                    {"retrieved", recommendation.retrieved}};
    auto rendered = prompts.render("critique", payload,
                                   {{"query", task.description},
                                    {"candidates", candidate_blocks(final_ids, index)}},
                                   task.description);
    std::string response = backend.chat({rendered.system_prompt, rendered.user_prompt, {}});
    json parsed = json::parse(response, nullptr, false);

    CritiqueVerdict verdict;
    if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("decision")) {
        verdict.rationale = "malformed critique verdict; accepted as-is";
        recommendation.warnings.push_back("critique verdict unparseable, treated as accept");
        return verdict;
    }
    std::string decision = parsed.value("decision", "accept");
    verdict.rationale = parsed.value("rationale", "");
    if (decision == "propose_alternative") {
        std::set<std::string> retrieved_set(recommendation.retrieved.begin(),
                                            recommendation.retrieved.end());
        std::set<std::string> used;
        for (const auto& id : parsed.value("ranked_ids", std::vector<std::string>{})) {
            // The critique cannot introduce agents outside the retrieved set.
            if (retrieved_set.count(id) && used.insert(id).second) {
                verdict.ranked_ids.push_back(id);
            }
        }
        if (verdict.ranked_ids.empty()) {
            recommendation.warnings.push_back(
                "critique proposed no usable agents, treated as accept");
            return verdict;
        }
        verdict.decision = CritiqueDecision::propose_alternative;
    } else if (decision == "refine_task") {
        verdict.decision = CritiqueDecision::refine_task;
        verdict.revised_task = parsed.value("revised_task", "");
        if (verdict.revised_task.empty()) {
            verdict.revised_task = task.description;
        }
    }
    return verdict;
}

Recommendation recommend(const TaskSpec& task, const SearchIndex& index,
                         const EngineConfig& config, llm::Backend& backend,
                         const llm::PromptLibrary& prompts) {
    if (index.corpus_size() == 0) {
        throw AutomasError("recommend: index is empty");
    }
    Recommendation rec;
    rec.task = task;

    try {
        rec.retrieved_scored = index.hybrid_search(task.description, config.k, config.alpha, backend);
    } catch (const std::exception& e) {
        throw AutomasError(std::string("recommend[retrieve]: ") + e.what());
    }
    for (const auto& c : rec.retrieved_scored) {
        rec.retrieved.push_back(c.agent_id);
    }
    if (rec.retrieved.empty()) {
        return rec;
    }

    try {
        RerankResult rr = rerank(task.description, rec.retrieved, index, backend, prompts);
        rec.reranked = std::move(rr.ranked);
        if (rr.parse_fallback) {
            rec.warnings.push_back("rerank response unusable, original order kept");
        }
    } catch (const std::exception& e) {
        throw AutomasError(std::string("recommend[rerank]: ") + e.what());
    }

    if (config.use_filter) {
        try {
            rec.filtered = filter_candidates(task.description, rec.reranked, index, backend,
                                             prompts, config.allow_empty_filter);
        } catch (const std::exception& e) {
            throw AutomasError(std::string("recommend[filter]: ") + e.what());
        }
    }

    if (config.use_task_critique && !rec.final().empty()) {
        try {
            CritiqueVerdict verdict = critique_task(task, rec, index, backend, prompts);
            std::vector<std::string> stage = rec.final();
            if (verdict.decision == CritiqueDecision::propose_alternative) {
                stage = verdict.ranked_ids;
            }
            rec.critiqued = std::move(stage);
            rec.verdict = std::move(verdict);
        } catch (const std::exception& e) {
            throw AutomasError(std::string("recommend[critique]: ") + e.what());
        }
    }
    return rec;
}

} // namespace automas
