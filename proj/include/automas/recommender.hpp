#pragma once

#include "automas/llm.hpp"
#include "automas/model.hpp"
#include "automas/retrieval.hpp"

#include <optional>
#include <string>
#include <vector>

namespace automas {

enum class CritiqueDecision { accept, propose_alternative, refine_task };

/// Mode-1 (in-the-loop) critique outcome. Proposed ids never leave the
/// retrieved candidate set; a refine_task verdict carries revised task text
/// for the caller to act on.
struct CritiqueVerdict {
    CritiqueDecision decision = CritiqueDecision::accept;
    std::vector<std::string> ranked_ids;
    std::string revised_task;
    std::string rationale;
};

/// Ranked candidates for one task with full stage provenance. `final()` is
/// the last stage that ran.
struct Recommendation {
    TaskSpec task;
    std::vector<ScoredCandidate> retrieved_scored;
    std::vector<std::string> retrieved;
    std::vector<std::string> reranked;
    std::optional<std::vector<std::string>> filtered;
    std::optional<std::vector<std::string>> critiqued;
    std::optional<CritiqueVerdict> verdict;
    std::vector<std::string> warnings;

    const std::vector<std::string>& final() const;
};

struct RerankResult {
    std::vector<std::string> ranked;
    bool parse_fallback = false; // original order kept because the response was unusable
};

/// LLM re-ordering of retrieved candidates. The output is always a
/// permutation of the input: unknown names in the response are ignored and
/// missing ones appended in their original relative order.
RerankResult rerank(const std::string& query, const std::vector<std::string>& candidate_ids,
                    const SearchIndex& index, llm::Backend& backend,
                    const llm::PromptLibrary& prompts);

/// LLM relevance filter: ordered subset of the input. When everything is
/// judged irrelevant the top candidate is kept unless `allow_empty` is set.
std::vector<std::string> filter_candidates(const std::string& query,
                                           const std::vector<std::string>& candidate_ids,
                                           const SearchIndex& index, llm::Backend& backend,
                                           const llm::PromptLibrary& prompts, bool allow_empty);

/// Mode-1 critique over a finished recommendation. Malformed backend verdicts
/// degrade to accept with a warning pushed onto the recommendation.
CritiqueVerdict critique_task(const TaskSpec& task, Recommendation& recommendation,
                              const SearchIndex& index, llm::Backend& backend,
                              const llm::PromptLibrary& prompts);

/// Full stage-2 pipeline: hybrid retrieval, re-rank, optional filter,
/// optional in-the-loop critique. Deterministic under the mock backend.
Recommendation recommend(const TaskSpec& task, const SearchIndex& index,
                         const EngineConfig& config, llm::Backend& backend,
                         const llm::PromptLibrary& prompts);

} // namespace automas
