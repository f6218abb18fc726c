#include "automas/prompts.hpp"

#include "automas/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace automas::llm {

namespace {

const std::unordered_map<std::string, std::string>& builtin_templates() {
    static const std::unordered_map<std::string, std::string> kTemplates = {
        {"enrich",
         "You write realistic user queries for an agent catalog.\n"
         "Agent name: {{name}}\n"
         "Agent description: {{description}}\n"
         "Write {{n}} distinct queries a user might type when they need this agent.\n"
         "Respond with a JSON array of {{n}} strings and nothing else.\n"},
        {"rerank",
         "You re-rank candidate agents for a task by how well each one fits.\n"
         "Task: {{query}}\n"
         "Candidates (numbered, with performance metrics):\n"
         "{{candidates}}\n"
         "Respond with a JSON array of the candidate indices ordered from best\n"
         "fit to worst fit, e.g. [2,0,1]. Output the JSON array only.\n"},
        {"filter",
         "You judge which candidate agents are relevant to a task.\n"
         "Task: {{query}}\n"
         "Candidates (numbered):\n"
         "{{candidates}}\n"
         "Respond with a JSON array of the indices of relevant candidates in\n"
         "their current order, e.g. [0,2]. Output the JSON array only.\n"},
        {"critique",
         "You review an agent shortlist for one task. You may accept it,\n"
         "reorder agents already retrieved, or ask for the task to be refined.\n"
         "You cannot introduce agents that were not retrieved.\n"
         "Task: {{query}}\n"
         "Current shortlist (best first):\n"
         "{{candidates}}\n"
         "Respond with JSON: {\"decision\": \"accept\"|\"propose_alternative\"|\"refine_task\",\n"
         " \"ranked_ids\": [..], \"revised_task\": \"..\", \"rationale\": \"..\"}.\n"},
        {"decompose",
         "You split a user intent into an ordered list of subtasks.\n"
         "{{exemplars}}"
         "Intent: {{intent}}\n"
         "{{feedback}}"
         "Respond with a JSON array of subtask description strings.\n"},
        {"args",
         "Name the input arguments the selected agent needs for this task.\n"
         "Task: {{task}}\n"
         "Agent: {{agent}}\n"
         "{{feedback}}"
         "Respond with a JSON array of argument name strings.\n"},
        {"links",
         "Identify dependencies between the plan steps below.\n"
         "Intent: {{intent}}\n"
         "Steps:\n{{steps}}\n"
         "{{feedback}}"
         "Respond with JSON: {\"links\": [{\"source\": i, \"target\": j}, ..],\n"
         " \"type\": \"single\"|\"chain\"|\"dag\"}.\n"},
        {"plan_critique",
         "You are a quality gate for a structured plan. Evaluate it along five\n"
         "dimensions: (i) logical coherence, (ii) task-node correctness,\n"
         "(iii) count agreement, (iv) workflow-type accuracy, (v) dependency validity.\n"
         "Intent: {{intent}}\n"
         "Plan:\n{{plan}}\n"
         "Respond with JSON: {\"rubrics\": [{\"name\": .., \"pass\": true|false, \"note\": ..} x5]}.\n"},
        {"feedback",
         "A plan failed review. Write targeted corrections for the failed\n"
         "rubrics and explicitly preserve what passed.\n"
         "Review:\n{{report}}\n"
         "Respond with a short correction note.\n"},
        {"judge",
         "You compare a predicted task plan against a reference plan.\n"
         "Query: {{query}}\n"
         "Predicted steps:\n{{pred}}\n"
         "Reference steps:\n{{gold}}\n"
         "Judge overall semantic match and per-position equivalence.\n"
         "Respond with JSON: {\"overall_match\": true|false, \"step_matches\": [bool per reference step]}.\n"},
    };
    return kTemplates;
}

} // namespace

PromptLibrary::PromptLibrary() : templates_(builtin_templates()) {}

void PromptLibrary::load_directory(const std::string& dir) {
    namespace fs = std::filesystem;
    if (dir.empty()) {
        return;
    }
    if (!fs::exists(dir)) {
        throw ParseError("prompt directory does not exist: " + dir);
    }
    for (auto& [kind, _] : builtin_templates()) {
        fs::path p = fs::path(dir) / (kind + ".txt");
        if (fs::exists(p)) {
            std::ifstream in(p);
            std::stringstream buf;
            buf << in.rdbuf();
            templates_[kind] = buf.str();
        }
    }
}

bool PromptLibrary::has(const std::string& kind) const {
    return templates_.count(kind) > 0;
}

RenderedPrompt PromptLibrary::render(const std::string& kind, const nlohmann::json& payload,
                                     const std::unordered_map<std::string, std::string>& vars,
                                     const std::string& user_prompt) const {
    auto it = templates_.find(kind);
    if (it == templates_.end()) {
        throw AutomasError("unknown prompt kind '" + kind + "'");
    }
    std::string body = it->second;
    for (const auto& [key, value] : vars) {
        std::string slot = "{{" + key + "}}";
        size_t pos = 0;
        while ((pos = body.find(slot, pos)) != std::string::npos) {
            body.replace(pos, slot.size(), value);
            pos += value.size();
        }
    }
    std::string system = std::string(kTaskHeader) + " " + kind + "\n" + kPayloadHeader + " " +
                         payload.dump() + "\n\n" + body;
    return RenderedPrompt{std::move(system), user_prompt};
}

} // namespace automas::llm
