#include "automas/model.hpp"

#include "automas/error.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace automas {

std::string criterion_name(Criterion c) {
    switch (c) {
    case Criterion::cost:
        return "cost";
    case Criterion::latency:
        return "latency";
    case Criterion::accuracy:
        return "accuracy";
    }
    return "?";
}

Direction default_direction(Criterion c) {
    return c == Criterion::accuracy ? Direction::maximize : Direction::minimize;
}

std::vector<std::string> validate_policy(const ConstraintPolicy& policy) {
    std::vector<std::string> violations;
    if (policy.objective.empty()) {
        violations.push_back("objective priority list non-empty");
    }
    std::set<Criterion> seen;
    for (const auto& term : policy.objective) {
        if (!seen.insert(term.criterion).second) {
            violations.push_back("duplicate criterion " + criterion_name(term.criterion));
        }
    }
    return violations;
}

ConstraintPolicy parse_policy(const std::string& spec) {
    ConstraintPolicy policy;
    policy.free_text = spec;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        // Trim spaces.
        size_t b = item.find_first_not_of(" \t");
        size_t e = item.find_last_not_of(" \t");
        if (b == std::string::npos) {
            continue;
        }
        item = item.substr(b, e - b + 1);

        PolicyTerm term{};
        std::string name = item;
        if (item.rfind("min:", 0) == 0) {
            term.direction = Direction::minimize;
            name = item.substr(4);
        } else if (item.rfind("max:", 0) == 0) {
            term.direction = Direction::maximize;
            name = item.substr(4);
        }
        if (name == "cost") {
            term.criterion = Criterion::cost;
        } else if (name == "latency" || name == "speed") {
            term.criterion = Criterion::latency;
        } else if (name == "accuracy") {
            term.criterion = Criterion::accuracy;
        } else {
            throw ParseError("unknown policy criterion '" + name + "'");
        }
        if (item.rfind("min:", 0) != 0 && item.rfind("max:", 0) != 0) {
            term.direction = default_direction(term.criterion);
        }
        policy.objective.push_back(term);
    }
    auto violations = validate_policy(policy);
    if (!violations.empty()) {
        throw ParseError("invalid policy '" + spec + "': " + violations.front());
    }
    return policy;
}

std::vector<std::string> validate_config(const EngineConfig& c) {
    std::vector<std::string> violations;
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
        violations.push_back("alpha in [0,1]");
    }
    if (c.k < 1) {
        violations.push_back("k >= 1");
    }
    if (c.n_enrich < 0) {
        violations.push_back("n_enrich >= 0");
    }
    if (c.max_critique_iters < 0) {
        violations.push_back("max_critique_iters >= 0");
    }
    if (c.embed_dim < 1) {
        violations.push_back("embed_dim >= 1");
    }
    if (c.pool_factor < 1) {
        violations.push_back("pool_factor >= 1");
    }
    if (c.reroute_attempts < 0) {
        violations.push_back("reroute_attempts >= 0");
    }
    if (c.http_parallelism < 1) {
        violations.push_back("http_parallelism >= 1");
    }
    return violations;
}

ValidationResult validate_record(const AgentRecord& record, const EngineConfig& config) {
    ValidationResult result;
    auto& v = result.violations;
    if (record.id.empty()) {
        v.push_back("id non-empty");
    }
    if (record.description.empty()) {
        v.push_back("description non-empty");
    }
    if (record.metrics.cost_cents < 0.0) {
        v.push_back("cost_cents >= 0");
    }
    if (!(record.metrics.latency_ms > 0.0)) {
        v.push_back("latency_ms > 0");
    }
    if (record.metrics.accuracy < 0.0 || record.metrics.accuracy > 1.0) {
        v.push_back("accuracy in [0,1]");
    }
    if (record.embedding.has_value()) {
        const auto& e = *record.embedding;
        if (static_cast<int>(e.size()) != config.embed_dim) {
            v.push_back("embedding dimension " + std::to_string(e.size()) + " != configured " +
                        std::to_string(config.embed_dim));
        }
        double norm_sq = 0.0;
        for (double x : e) {
            norm_sq += x * x;
        }
        if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-6) {
            v.push_back("embedding unit norm");
        }
    }
    if (!record.enriched_queries.empty() &&
        static_cast<int>(record.enriched_queries.size()) != config.n_enrich) {
        v.push_back("enriched_queries length 0 or configured N");
    }
    return result;
}

} // namespace automas
