#include "automas/planner.hpp"

#include "automas/error.hpp"
#include "automas/text.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace automas {

using nlohmann::json;

std::string workflow_type_name(WorkflowType type) {
    switch (type) {
    case WorkflowType::single:
        return "single";
    case WorkflowType::chain:
        return "chain";
    case WorkflowType::dag:
        return "dag";
    }
    return "?";
}

WorkflowType workflow_type_from_name(const std::string& name) {
    if (name == "single") {
        return WorkflowType::single;
    }
    if (name == "chain") {
        return WorkflowType::chain;
    }
    if (name == "dag") {
        return WorkflowType::dag;
    }
    throw ParseError("unknown workflow type '" + name + "'");
}

WorkflowType classify_workflow(size_t n_nodes, const std::vector<PlanLink>& links) {
    if (n_nodes == 1 && links.empty()) {
        return WorkflowType::single;
    }
    if (n_nodes >= 2 && links.size() == n_nodes - 1) {
        std::set<PlanLink> edges(links.begin(), links.end());
        bool is_path = edges.size() == links.size();
        for (size_t i = 0; is_path && i + 1 < n_nodes; ++i) {
            is_path = edges.count({static_cast<int>(i), static_cast<int>(i) + 1}) > 0;
        }
        if (is_path) {
            return WorkflowType::chain;
        }
    }
    return WorkflowType::dag;
}

bool links_acyclic(size_t n_nodes, const std::vector<PlanLink>& links) {
    std::vector<std::vector<int>> adj(n_nodes);
    std::vector<int> indegree(n_nodes, 0);
    for (const auto& l : links) {
        if (l.source < 0 || l.target < 0 || l.source >= static_cast<int>(n_nodes) ||
            l.target >= static_cast<int>(n_nodes)) {
            return false;
        }
        adj[static_cast<size_t>(l.source)].push_back(l.target);
        indegree[static_cast<size_t>(l.target)]++;
    }
    std::vector<int> ready;
    for (size_t i = 0; i < n_nodes; ++i) {
        if (indegree[i] == 0) {
            ready.push_back(static_cast<int>(i));
        }
    }
    size_t visited = 0;
    while (!ready.empty()) {
        int u = ready.back();
        ready.pop_back();
        ++visited;
        for (int v : adj[static_cast<size_t>(u)]) {
            if (--indegree[static_cast<size_t>(v)] == 0) {
                ready.push_back(v);
            }
        }
    }
    return visited == n_nodes;
}

std::vector<std::string> validate_plan(const StructuredPlan& plan) {
    std::vector<std::string> violations;
    if (plan.n_tools != static_cast<int>(plan.task_nodes.size())) {
        violations.push_back("n_tools equals number of task_nodes");
    }
    const int n = static_cast<int>(plan.task_nodes.size());
    for (const auto& l : plan.task_links) {
        if (l.source < 0 || l.source >= n || l.target < 0 || l.target >= n) {
            violations.push_back("link indices within range");
            break;
        }
    }
    for (const auto& l : plan.task_links) {
        if (l.source == l.target) {
            violations.push_back("no self-loop links");
            break;
        }
    }
    if (!links_acyclic(plan.task_nodes.size(), plan.task_links)) {
        violations.push_back("links form a DAG");
    }
    if (plan.workflow_type != classify_workflow(plan.task_nodes.size(), plan.task_links)) {
        violations.push_back("workflow_type consistent with links");
    }
    return violations;
}

json plan_to_json(const StructuredPlan& plan) {
    json nodes = json::array();
    for (const auto& n : plan.task_nodes) {
        nodes.push_back({{"name", n.name}, {"arguments", n.arguments}});
    }
    json links = json::array();
    for (const auto& l : plan.task_links) {
        links.push_back({{"source", l.source}, {"target", l.target}});
    }
    return json{{"task_steps", plan.task_steps},
                {"task_nodes", nodes},
                {"task_links", links},
                {"type", workflow_type_name(plan.workflow_type)},
                {"n_tools", plan.n_tools}};
}

StructuredPlan plan_from_json(const json& j) {
    auto fail = [](const std::string& path, const std::string& why) -> void {
        throw ParseError("plan schema violation at " + path + ": " + why);
    };
    StructuredPlan plan;
    if (!j.is_object()) {
        fail("/", "expected an object");
    }
    if (!j.contains("task_steps") || !j.at("task_steps").is_array()) {
        fail("/task_steps", "expected an array of strings");
    }
    for (size_t i = 0; i < j.at("task_steps").size(); ++i) {
        const auto& s = j.at("task_steps")[i];
        if (!s.is_string()) {
            fail("/task_steps/" + std::to_string(i), "expected a string");
        }
        plan.task_steps.push_back(s.get<std::string>());
    }
    if (!j.contains("task_nodes") || !j.at("task_nodes").is_array()) {
        fail("/task_nodes", "expected an array of objects");
    }
    for (size_t i = 0; i < j.at("task_nodes").size(); ++i) {
        const auto& n = j.at("task_nodes")[i];
        std::string path = "/task_nodes/" + std::to_string(i);
        if (!n.is_object() || !n.contains("name") || !n.at("name").is_string()) {
            fail(path + "/name", "expected a string name");
        }
        PlanNode node;
        node.name = n.at("name").get<std::string>();
        for (const auto& a : n.value("arguments", json::array())) {
            if (!a.is_string()) {
                fail(path + "/arguments", "expected strings");
            }
            node.arguments.push_back(a.get<std::string>());
        }
        plan.task_nodes.push_back(std::move(node));
    }
    if (!j.contains("task_links") || !j.at("task_links").is_array()) {
        fail("/task_links", "expected an array of {source,target}");
    }
    for (size_t i = 0; i < j.at("task_links").size(); ++i) {
        const auto& l = j.at("task_links")[i];
        std::string path = "/task_links/" + std::to_string(i);
        if (!l.is_object() || !l.contains("source") || !l.contains("target") ||
            !l.at("source").is_number_integer() || !l.at("target").is_number_integer()) {
            fail(path, "expected integer source and target");
        }
        plan.task_links.push_back({l.at("source").get<int>(), l.at("target").get<int>()});
    }
    if (!j.contains("type") || !j.at("type").is_string()) {
        fail("/type", "expected \"single\"|\"chain\"|\"dag\"");
    }
    plan.workflow_type = workflow_type_from_name(j.at("type").get<std::string>());
    if (!j.contains("n_tools") || !j.at("n_tools").is_number_integer()) {
        fail("/n_tools", "expected an integer");
    }
    plan.n_tools = j.at("n_tools").get<int>();

    auto violations = validate_plan(plan);
    if (!violations.empty()) {
        std::string msg = "plan violates invariants:";
        for (const auto& v : violations) {
            msg += " " + v + ";";
        }
        throw PlanError(msg);
    }
    return plan;
}

std::vector<TaskSpec> decompose(const std::string& intent, llm::Backend& backend,
                                const llm::PromptLibrary& prompts, const std::string& feedback) {
    if (intent.empty()) {
        throw std::invalid_argument("decompose: intent must be non-empty");
    }
    json payload = {{"intent", intent}, {"feedback", feedback}};
    std::string feedback_block =
        feedback.empty() ? "" : "PREVIOUS ATTEMPT / FEEDBACK:\n" + feedback + "\n";
    auto rendered = prompts.render(
        "decompose", payload,
        {{"intent", intent}, {"feedback", feedback_block}, {"exemplars", ""}}, intent);
    std::string response = backend.chat({rendered.system_prompt, rendered.user_prompt, {}});
    json parsed = json::parse(response, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array()) {
        throw PlanError("decompose: unparseable backend output: " + response);
    }
    std::vector<TaskSpec> subtasks;
    for (const auto& item : parsed) {
        if (!item.is_string()) {
            continue;
        }
        std::string text = item.get<std::string>();
        if (text.empty()) {
            continue;
        }
        subtasks.push_back({static_cast<int>(subtasks.size()), text});
    }
    if (subtasks.empty()) {
        throw PlanError("decompose: backend produced no usable subtasks: " + response);
    }
    return subtasks;
}

namespace {

std::vector<std::string> elicit_arguments(const std::string& intent, const TaskSpec& task,
                                          const std::string& agent_name, int node_index,
                                          const std::string& feedback, llm::Backend& backend,
                                          const llm::PromptLibrary& prompts) {
    json payload = {{"intent", intent},
                    {"task", task.description},
                    {"agent", agent_name},
                    {"node_index", node_index},
                    {"feedback", feedback}};
    std::string feedback_block =
        feedback.empty() ? "" : "PREVIOUS ATTEMPT / FEEDBACK:\n" + feedback + "\n";
    auto rendered = prompts.render("args", payload,
                                   {{"task", task.description},
                                    {"agent", agent_name},
                                    {"feedback", feedback_block}},
                                   task.description);
    std::string response = backend.chat({rendered.system_prompt, rendered.user_prompt, {}});
    json parsed = json::parse(response, nullptr, false);
    std::vector<std::string> args;
    if (parsed.is_array()) {
        for (const auto& a : parsed) {
            if (a.is_string() && !a.get<std::string>().empty()) {
                args.push_back(a.get<std::string>());
            }
        }
    }
    return args;
}

struct ProposedLinks {
    std::vector<PlanLink> links;
    std::string claimed_type;
};

ProposedLinks elicit_links(const std::string& intent, const std::vector<TaskSpec>& subtasks,
                           const std::string& feedback, llm::Backend& backend,
                           const llm::PromptLibrary& prompts) {
    json steps = json::array();
    std::ostringstream steps_text;
    for (const auto& t : subtasks) {
        steps.push_back(t.description);
        steps_text << "[" << t.index << "] " << t.description << "\n";
    }
    json payload = {{"intent", intent},
                    {"steps", steps},
                    {"n_nodes", subtasks.size()},
                    {"feedback", feedback}};
    std::string feedback_block =
        feedback.empty() ? "" : "PREVIOUS ATTEMPT / FEEDBACK:\n" + feedback + "\n";
    auto rendered = prompts.render(
        "links", payload,
        {{"intent", intent}, {"steps", steps_text.str()}, {"feedback", feedback_block}}, intent);
    std::string response = backend.chat({rendered.system_prompt, rendered.user_prompt, {}});
    json parsed = json::parse(response, nullptr, false);

    ProposedLinks out;
    if (parsed.is_object() && parsed.contains("links") && parsed.at("links").is_array()) {
        for (const auto& l : parsed.at("links")) {
            if (l.is_object() && l.contains("source") && l.contains("target") &&
                l.at("source").is_number_integer() && l.at("target").is_number_integer()) {
                out.links.push_back({l.at("source").get<int>(), l.at("target").get<int>()});
            }
        }
        out.claimed_type = parsed.value("type", "");
    } else {
        // Unusable response: sequential dependencies.
        for (size_t i = 0; i + 1 < subtasks.size(); ++i) {
            out.links.push_back({static_cast<int>(i), static_cast<int>(i) + 1});
        }
    }
    return out;
}

} // namespace

ComposeTrace compose(const std::string& intent, const SearchIndex& index,
                     const EngineConfig& config, llm::Backend& backend,
                     const llm::PromptLibrary& prompts, const std::string& feedback,
                     RecommendationCache* cache) {
    ComposeTrace trace;
    trace.intent = intent;
    trace.subtasks = decompose(intent, backend, prompts, feedback);

    std::set<std::string> known_names;
    for (const auto& subtask : trace.subtasks) {
        const Recommendation* rec = nullptr;
        if (cache) {
            auto it = cache->find(subtask.description);
            if (it != cache->end()) {
                rec = &it->second;
            }
        }
        Recommendation fresh;
        if (!rec) {
            fresh = recommend(subtask, index, config, backend, prompts);
            if (cache) {
                rec = &cache->emplace(subtask.description, std::move(fresh)).first->second;
            } else {
                rec = &fresh;
            }
        }
        if (rec->final().empty()) {
            throw PlanError("compose: no agent recommended for subtask '" + subtask.description +
                            "'");
        }
        for (const auto& id : rec->retrieved) {
            if (const IndexedAgent* a = index.agent(id)) {
                known_names.insert(a->name);
            }
        }
        const std::string& top_id = rec->final().front();
        const IndexedAgent* top = index.agent(top_id);
        std::string agent_name = top ? top->name : top_id;
        trace.recommendations.push_back(*rec);
        trace.chosen_agents.push_back(agent_name);
        trace.arguments.push_back(elicit_arguments(intent, subtask, agent_name,
                                                   subtask.index, feedback, backend, prompts));
    }

    ProposedLinks proposed = elicit_links(intent, trace.subtasks, feedback, backend, prompts);
    trace.proposed_links = std::move(proposed.links);
    trace.claimed_type = std::move(proposed.claimed_type);
    trace.known_agent_names.assign(known_names.begin(), known_names.end());
    return trace;
}

ExtractionResult extract_plan(const ComposeTrace& trace) {
    ExtractionResult result;
    StructuredPlan& plan = result.plan;
    for (const auto& t : trace.subtasks) {
        plan.task_steps.push_back(t.description);
    }
    for (size_t i = 0; i < trace.chosen_agents.size(); ++i) {
        plan.task_nodes.push_back({trace.chosen_agents[i], trace.arguments[i]});
    }
    // Constructive DAG enforcement: only forward edges survive.
    std::set<PlanLink> seen;
    const int n = static_cast<int>(plan.task_nodes.size());
    for (const auto& l : trace.proposed_links) {
        if (l.source < 0 || l.target >= n || l.source >= l.target) {
            continue;
        }
        if (seen.insert(l).second) {
            plan.task_links.push_back(l);
        }
    }
    std::sort(plan.task_links.begin(), plan.task_links.end());
    plan.workflow_type = classify_workflow(plan.task_nodes.size(), plan.task_links);
    plan.n_tools = n;

    std::set<std::string> known(trace.known_agent_names.begin(), trace.known_agent_names.end());
    for (const auto& node : plan.task_nodes) {
        if (!known.empty() && !known.count(node.name)) {
            result.warnings.push_back("node names agent outside the candidate set: " + node.name);
        }
    }
    if (!trace.claimed_type.empty() &&
        trace.claimed_type != workflow_type_name(plan.workflow_type)) {
        result.warnings.push_back("backend claimed workflow type " + trace.claimed_type +
                                  ", topology says " + workflow_type_name(plan.workflow_type));
    }

    auto violations = validate_plan(plan);
    if (!violations.empty()) {
        throw PlanError("extract: constructed plan violates invariants: " + violations.front());
    }
    return result;
}

ExtractionResult extract_plan(const json& structured) {
    ExtractionResult result;
    result.plan = plan_from_json(structured);
    return result;
}

CritiqueReport critique_plan(const StructuredPlan& plan, const std::string& intent,
                             llm::Backend& backend, const llm::PromptLibrary& prompts) {
    static const std::array<const char*, 5> kRubricNames = {
        "logical_coherence", "task_node_correctness", "count_agreement",
        "workflow_type_accuracy", "dependency_validity"};

    CritiqueReport report;
    json plan_json = plan_to_json(plan);
    json payload = {{"intent", intent}, {"plan", plan_json}};

    bool backend_ok = true;
    json rubrics;
    try {
        auto rendered = prompts.render("plan_critique", payload,
                                       {{"intent", intent}, {"plan", plan_json.dump(2)}}, intent);
        std::string response = backend.chat({rendered.system_prompt, rendered.user_prompt, {}});
        json parsed = json::parse(response, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("rubrics") ||
            !parsed.at("rubrics").is_array() || parsed.at("rubrics").size() != 5) {
            backend_ok = false;
        } else {
            rubrics = parsed.at("rubrics");
        }
    } catch (const std::exception&) {
        backend_ok = false;
    }

    for (size_t i = 0; i < 5; ++i) {
        RubricResult& r = report.rubrics[i];
        r.name = kRubricNames[i];
        if (backend_ok) {
            r.pass = rubrics[i].value("pass", false);
            r.note = rubrics[i].value("note", "");
        } else {
            r.pass = false;
            r.note = "unevaluated";
        }
    }

    // Mechanical checks own the final word on (iii) count and (v) dependencies.
    if (plan.n_tools != static_cast<int>(plan.task_nodes.size())) {
        report.rubrics[2].pass = false;
        report.rubrics[2].note = "mechanical: n_tools disagrees with task_nodes";
    }
    bool dag_ok = links_acyclic(plan.task_nodes.size(), plan.task_links);
    for (const auto& l : plan.task_links) {
        dag_ok = dag_ok && l.source != l.target;
    }
    if (!dag_ok) {
        report.rubrics[4].pass = false;
        report.rubrics[4].note = "mechanical: links are cyclic or out of range";
    }

    report.overall = std::all_of(report.rubrics.begin(), report.rubrics.end(),
                                 [](const RubricResult& r) { return r.pass; });
    return report;
}

namespace {

std::string build_feedback(const CritiqueReport& report, llm::Backend& backend,
                           const llm::PromptLibrary& prompts) {
    json rubrics = json::array();
    std::ostringstream human;
    for (const auto& r : report.rubrics) {
        rubrics.push_back({{"name", r.name}, {"pass", r.pass}, {"note", r.note}});
        human << (r.pass ? "[pass] " : "[FAIL] ") << r.name << ": " << r.note << "\n";
    }
    json payload = {{"rubrics", rubrics}};
    try {
        auto rendered = prompts.render("feedback", payload, {{"report", human.str()}}, human.str());
        return backend.chat({rendered.system_prompt, rendered.user_prompt, {}});
    } catch (const std::exception&) {
        // Mechanical fallback keeps the loop going when the backend is down.
        std::ostringstream out;
        out << "PREVIOUS ATTEMPT FEEDBACK\n";
        std::vector<std::string> passed;
        for (const auto& r : report.rubrics) {
            if (r.pass) {
                passed.push_back(r.name);
            } else {
                out << "Fix " << r.name << ": " << r.note << "\n";
            }
        }
        if (!passed.empty()) {
            out << "Do not change: ";
            for (size_t i = 0; i < passed.size(); ++i) {
                out << (i ? ", " : "") << passed[i];
            }
            out << "\n";
        }
        return out.str();
    }
}

} // namespace

PlanTrace refine_loop(const std::string& intent, const SearchIndex& index,
                      const EngineConfig& config, llm::Backend& backend,
                      const llm::PromptLibrary& prompts) {
    PlanTrace trace;
    RecommendationCache cache;
    std::string feedback;

    const int budget = config.max_critique_iters;
    for (int iter = 0; iter <= budget; ++iter) {
        ComposeTrace composed = compose(intent, index, config, backend, prompts, feedback, &cache);
        ExtractionResult extracted = extract_plan(composed);
        CritiqueReport report = critique_plan(extracted.plan, intent, backend, prompts);
        trace.iterations.push_back({extracted.plan, report, ""});
        if (report.overall || iter == budget) {
            break;
        }
        feedback = build_feedback(report, backend, prompts);
        trace.iterations.back().feedback = feedback;
    }
    trace.final = trace.iterations.back().plan;
    trace.iterations_used = static_cast<int>(trace.iterations.size());
    return trace;
}

} // namespace automas
