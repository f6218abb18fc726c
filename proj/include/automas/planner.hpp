#pragma once

#include "automas/llm.hpp"
#include "automas/model.hpp"
#include "automas/recommender.hpp"
#include "automas/retrieval.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <string>
#include <vector>

namespace automas {

enum class WorkflowType { single, chain, dag };

std::string workflow_type_name(WorkflowType type);
WorkflowType workflow_type_from_name(const std::string& name);

struct PlanNode {
    std::string name;
    std::vector<std::string> arguments;

    bool operator==(const PlanNode&) const = default;
};

struct PlanLink {
    int source = 0;
    int target = 0;

    bool operator==(const PlanLink&) const = default;
    auto operator<=>(const PlanLink&) const = default;
};

/// The structured prediction: ordered step texts, tool nodes with argument
/// names, dependency links forming a DAG, and the workflow shape computed
/// from the link topology.
struct StructuredPlan {
    std::vector<std::string> task_steps;
    std::vector<PlanNode> task_nodes;
    std::vector<PlanLink> task_links;
    WorkflowType workflow_type = WorkflowType::single;
    int n_tools = 0;

    bool operator==(const StructuredPlan&) const = default;
};

/// single: one node, no edges; chain: edges are exactly the path
/// 0->1->...->n-1; dag: anything else.
WorkflowType classify_workflow(size_t n_nodes, const std::vector<PlanLink>& links);

bool links_acyclic(size_t n_nodes, const std::vector<PlanLink>& links);

/// Violation messages for the plan invariants (count, link ranges, DAG,
/// type consistency). Empty means valid.
std::vector<std::string> validate_plan(const StructuredPlan& plan);

nlohmann::json plan_to_json(const StructuredPlan& plan);

/// Parses the prediction JSON. Throws ParseError carrying the JSON path of
/// the offending field; throws PlanError when invariants fail.
StructuredPlan plan_from_json(const nlohmann::json& j);

struct RubricResult {
    std::string name;
    bool pass = false;
    std::string note;
};

/// Five-dimension plan review: coherence, node correctness, count agreement,
/// workflow-type accuracy, dependency validity.
struct CritiqueReport {
    std::array<RubricResult, 5> rubrics;
    bool overall = false;
};

struct IterationRecord {
    StructuredPlan plan;
    CritiqueReport report;
    std::string feedback; // feedback generated after this iteration ("" for the last)
};

struct PlanTrace {
    std::vector<IterationRecord> iterations;
    StructuredPlan final;
    int iterations_used = 0;
};

/// Raw output of one composition pass, before extraction.
struct ComposeTrace {
    std::string intent;
    std::vector<TaskSpec> subtasks;
    std::vector<Recommendation> recommendations;
    std::vector<std::string> chosen_agents; // agent names, one per subtask
    std::vector<std::vector<std::string>> arguments;
    std::vector<PlanLink> proposed_links;
    std::string claimed_type;
    std::vector<std::string> known_agent_names;
};

/// Splits an intent into ordered subtasks via the backend.
std::vector<TaskSpec> decompose(const std::string& intent, llm::Backend& backend,
                                const llm::PromptLibrary& prompts,
                                const std::string& feedback = "");

/// Caches recommendations per subtask description so critique iterations
/// re-query only subtasks whose text changed.
using RecommendationCache = std::unordered_map<std::string, Recommendation>;

/// ReAct-style composition: decompose, then per subtask query the recommender
/// and bind the top surviving agent plus backend-elicited argument names.
ComposeTrace compose(const std::string& intent, const SearchIndex& index,
                     const EngineConfig& config, llm::Backend& backend,
                     const llm::PromptLibrary& prompts, const std::string& feedback = "",
                     RecommendationCache* cache = nullptr);

/// Mechanical extraction to the prediction schema. Proposed links are
/// sanitized (self-loops, out-of-range, duplicate and backward edges are
/// dropped) so every emitted plan satisfies the DAG invariants. Returns the
/// plan plus warnings (e.g. nodes naming agents outside the candidate set).
struct ExtractionResult {
    StructuredPlan plan;
    std::vector<std::string> warnings;
};

ExtractionResult extract_plan(const ComposeTrace& trace);

/// Idempotent path: a JSON document already in the prediction schema is
/// validated and returned unchanged.
ExtractionResult extract_plan(const nlohmann::json& structured);

/// Mode-2 critique. Rubrics (iii) and (v) are additionally checked
/// mechanically; a mechanical failure overrides a backend pass. Backend
/// failure yields all-unevaluated rubrics and an overall fail.
CritiqueReport critique_plan(const StructuredPlan& plan, const std::string& intent,
                             llm::Backend& backend, const llm::PromptLibrary& prompts);

/// compose -> extract -> critique -> feedback, bounded by
/// config.max_critique_iters; candidate agent sets are frozen across
/// iterations via a shared recommendation cache.
PlanTrace refine_loop(const std::string& intent, const SearchIndex& index,
                      const EngineConfig& config, llm::Backend& backend,
                      const llm::PromptLibrary& prompts);

} // namespace automas
