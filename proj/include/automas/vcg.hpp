#pragma once

#include "automas/model.hpp"
#include "automas/planner.hpp"
#include "automas/recommender.hpp"
#include "automas/registry.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace automas {

struct CandidateAgent {
    std::string id;
    PerfMetrics metrics;
};

struct VcgNode {
    TaskSpec task;
    std::vector<CandidateAgent> candidates;
};

/// Plan graph whose nodes carry the recommender's surviving candidates, so
/// routing can be re-solved under constraints and failures.
struct VariableCallGraph {
    std::vector<VcgNode> nodes;
    std::vector<PlanLink> edges;
};

/// Per-agent up/down state with the time of the last change; unknown agents
/// are up.
class AgentAvailability {
public:
    bool is_up(const std::string& id) const;
    void set_down(const std::string& id);
    void set_up(const std::string& id);

private:
    std::unordered_map<std::string, std::pair<bool, std::chrono::system_clock::time_point>>
        states_;
};

struct RouteAssignment {
    std::vector<std::string> chosen; // node index -> agent id
    ConstraintPolicy policy;
    double total_cost_cents = 0.0;
    double critical_path_latency_ms = 0.0;
    double min_accuracy = 1.0;
};

enum class NodeOutcome { ok, failed, rerouted };

struct ExecutionEvent {
    int node = 0;
    std::string agent;
    NodeOutcome outcome = NodeOutcome::ok;
};

struct ExecutionTrace {
    bool success = false;
    std::vector<ExecutionEvent> events;
    std::string cause; // non-empty when success is false
};

/// Scripted stand-ins for real agents: each call pops the next scripted
/// outcome for the agent, defaulting to success.
class AgentStubs {
public:
    void script(const std::string& id, std::vector<bool> outcomes);
    void fail_times(const std::string& id, int times);
    bool invoke(const std::string& id);

private:
    std::unordered_map<std::string, std::vector<bool>> scripts_;
};

/// Assembles the graph from a plan and one recommendation per plan node;
/// candidate metrics are snapshotted from the registry.
VariableCallGraph build_vcg(const StructuredPlan& plan,
                            const std::vector<Recommendation>& recommendations,
                            const Registry& registry);

/// Per-node choice of the available candidate that is lexicographically best
/// under the policy's ordered criteria (or best weighted sum when the policy
/// says so). Ties break on agent id. Throws RouteError naming the first
/// unroutable node.
RouteAssignment select_route(const VariableCallGraph& vcg, const ConstraintPolicy& policy,
                             const AgentAvailability& availability);

/// Minimal perturbation re-selection: only nodes whose chosen agent went
/// down are re-solved; everything else keeps its agent.
RouteAssignment reroute(const VariableCallGraph& vcg, const RouteAssignment& assignment,
                        const ConstraintPolicy& policy, const AgentAvailability& availability);

/// FSM execution: a node fires once all predecessors completed. On a stub
/// failure the node is rerouted (up to `reroute_attempts` times) before the
/// run is marked failed. The event order is a linear extension of the DAG.
ExecutionTrace execute_graph(const VariableCallGraph& vcg, const RouteAssignment& assignment,
                             AgentStubs& stubs, const AgentAvailability& availability,
                             int reroute_attempts = 1);

nlohmann::json route_to_json(const RouteAssignment& assignment, const ExecutionTrace* trace);

} // namespace automas
