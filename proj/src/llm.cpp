#include "automas/llm.hpp"

#include "automas/error.hpp"
#include "automas/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <semaphore>
#include <set>
#include <sstream>
#include <thread>

namespace automas::llm {

namespace {

using nlohmann::json;

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Stable per-query gate used by the graded oracle rates.
bool rate_gate(const std::string& key, const std::string& salt, double rate) {
    if (rate >= 1.0) {
        return true;
    }
    if (rate <= 0.0) {
        return false;
    }
    std::uint64_t h = fnv64(key + "#" + salt);
    return static_cast<double>(h % 10000) < rate * 10000.0;
}

std::vector<std::string> split_heuristic(const std::string& intent) {
    static const std::vector<std::string> kConnectives = {
        ", and then ", " and then ", ", then ", " then ", "; ", ". ", ", and ", " and "};
    std::vector<std::string> parts{intent};
    for (const auto& sep : kConnectives) {
        std::vector<std::string> next;
        for (const auto& part : parts) {
            size_t start = 0;
            size_t pos;
            while ((pos = part.find(sep, start)) != std::string::npos) {
                next.push_back(part.substr(start, pos - start));
                start = pos + sep.size();
            }
            next.push_back(part.substr(start));
        }
        parts = std::move(next);
    }
    std::vector<std::string> steps;
    for (auto& p : parts) {
        size_t b = p.find_first_not_of(" \t.");
        size_t e = p.find_last_not_of(" \t.");
        if (b != std::string::npos) {
            steps.push_back(p.substr(b, e - b + 1));
        }
    }
    if (steps.empty()) {
        steps.push_back(intent);
    }
    return steps;
}

std::string workflow_type_of(size_t n_nodes, const json& links) {
    if (n_nodes == 1 && links.empty()) {
        return "single";
    }
    if (n_nodes >= 2 && links.size() == n_nodes - 1) {
        std::set<std::pair<int, int>> edges;
        for (const auto& l : links) {
            edges.insert({l.at("source").get<int>(), l.at("target").get<int>()});
        }
        bool is_path = true;
        for (size_t i = 0; i + 1 < n_nodes; ++i) {
            if (!edges.count({static_cast<int>(i), static_cast<int>(i) + 1})) {
                is_path = false;
                break;
            }
        }
        if (is_path) {
            return "chain";
        }
    }
    return "dag";
}

bool links_form_dag(size_t n_nodes, const json& links) {
    std::vector<std::vector<int>> adj(n_nodes);
    for (const auto& l : links) {
        int s = l.value("source", -1);
        int t = l.value("target", -1);
        if (s < 0 || t < 0 || s >= static_cast<int>(n_nodes) || t >= static_cast<int>(n_nodes)) {
            return false;
        }
        adj[static_cast<size_t>(s)].push_back(t);
    }
    // Kahn's algorithm.
    std::vector<int> indegree(n_nodes, 0);
    for (const auto& out : adj) {
        for (int t : out) {
            indegree[static_cast<size_t>(t)]++;
        }
    }
    std::vector<int> queue;
    for (size_t i = 0; i < n_nodes; ++i) {
        if (indegree[i] == 0) {
            queue.push_back(static_cast<int>(i));
        }
    }
    size_t seen = 0;
    while (!queue.empty()) {
        int u = queue.back();
        queue.pop_back();
        ++seen;
        for (int t : adj[static_cast<size_t>(u)]) {
            if (--indegree[static_cast<size_t>(t)] == 0) {
                queue.push_back(t);
            }
        }
    }
    return seen == n_nodes;
}

json chain_links(size_t n_nodes) {
    json links = json::array();
    for (size_t i = 0; i + 1 < n_nodes; ++i) {
        links.push_back({{"source", static_cast<int>(i)}, {"target", static_cast<int>(i) + 1}});
    }
    return links;
}

} // namespace

std::vector<std::string> validate_backend_kind(const BackendKind& kind) {
    std::vector<std::string> violations;
    if (kind.id == BackendId::http && kind.endpoint.empty()) {
        violations.push_back("http backend requires a non-empty endpoint");
    }
    return violations;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// ---------------------------------------------------------------------------
// MockBackend
// ---------------------------------------------------------------------------

MockBackend::MockBackend(std::int64_t seed, int embed_dim, MockOptions options)
    : seed_(seed), embed_dim_(embed_dim), options_(options) {}

std::vector<double> MockBackend::embed(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("embed: text must be non-empty");
    }
    const std::string lower = lowercase(text);
    const std::uint64_t basis = fnv64("embed:" + std::to_string(seed_));
    std::vector<double> v(static_cast<size_t>(embed_dim_), 0.0);
    if (lower.size() < 3) {
        v[fnv64(lower, basis) % static_cast<std::uint64_t>(embed_dim_)] += 1.0;
    } else {
        for (size_t i = 0; i + 3 <= lower.size(); ++i) {
            std::string_view gram(lower.data() + i, 3);
            v[fnv64(gram, basis) % static_cast<std::uint64_t>(embed_dim_)] += 1.0;
        }
    }
    double norm = 0.0;
    for (double x : v) {
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) {
        x /= norm;
    }
    return v;
}

std::string MockBackend::chat(const ChatRequest& request) {
    if (request.user_prompt.empty()) {
        throw std::invalid_argument("chat: user_prompt must be non-empty");
    }
    // Locate the structured header.
    std::string kind;
    json payload;
    std::istringstream lines(request.system_prompt);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind(PromptLibrary::kTaskHeader, 0) == 0) {
            kind = line.substr(std::string(PromptLibrary::kTaskHeader).size());
            size_t b = kind.find_first_not_of(' ');
            kind = b == std::string::npos ? "" : kind.substr(b);
        } else if (line.rfind(PromptLibrary::kPayloadHeader, 0) == 0) {
            std::string raw = line.substr(std::string(PromptLibrary::kPayloadHeader).size());
            payload = json::parse(raw, nullptr, false);
        }
    }
    if (kind.empty() || payload.is_discarded()) {
        // No recognized template: deterministic echo.
        return "ack: " + request.user_prompt;
    }
    return dispatch(kind, payload, request);
}

std::string MockBackend::dispatch(const std::string& kind, const json& payload,
                                  const ChatRequest&) const {
    if (kind == "enrich") {
        return mock_enrich(payload);
    }
    if (kind == "rerank") {
        return mock_rerank(payload);
    }
    if (kind == "filter") {
        return mock_filter(payload);
    }
    if (kind == "critique") {
        return mock_critique(payload);
    }
    if (kind == "decompose") {
        return mock_decompose(payload);
    }
    if (kind == "args") {
        return mock_args(payload);
    }
    if (kind == "links") {
        return mock_links(payload);
    }
    if (kind == "plan_critique") {
        return mock_plan_critique(payload);
    }
    if (kind == "feedback") {
        return mock_feedback(payload);
    }
    if (kind == "judge") {
        return mock_judge(payload);
    }
    return "ack: unknown task " + kind;
}

std::string MockBackend::mock_enrich(const json& payload) const {
    const std::string description = payload.value("description", "");
    const int n = payload.value("n", 0);
    auto content = content_tokens(description);
    std::mt19937_64 rng(fnv64("enrich:" + std::to_string(seed_) + ":" + payload.dump()));

    static const std::vector<std::string> kOpeners = {
        "i want to",   "please help me", "how do i",      "i need to",
        "can you",     "looking for a way to", "help me", "i would like to"};
    static const std::vector<std::string> kTails = {
        "",          " today",    " right away", " for me",     " as soon as possible",
        " near me",  " online",   " this week",  " right now"};

    json queries = json::array();
    std::set<std::string> seen;
    for (int i = 0; i < n; ++i) {
        const std::string& opener = kOpeners[static_cast<size_t>(i) % kOpeners.size()];
        size_t take = 1 + rng() % std::min<size_t>(3, content.empty() ? 1 : content.size());
        std::vector<std::string> pool = content;
        std::string middle;
        for (size_t j = 0; j < take && !pool.empty(); ++j) {
            size_t pick = rng() % pool.size();
            middle += " " + pool[pick];
            pool.erase(pool.begin() + static_cast<long>(pick));
        }
        if (middle.empty()) {
            middle = " " + description;
        }
        std::string q = opener + middle + kTails[rng() % kTails.size()];
        while (seen.count(q)) {
            q += " variant " + std::to_string(i);
        }
        seen.insert(q);
        queries.push_back(q);
    }
    return queries.dump();
}

std::string MockBackend::mock_rerank(const json& payload) const {
    const std::string query = payload.value("query", "");
    const json& cands = payload.at("candidates");

    std::vector<size_t> order(cands.size());
    for (size_t i = 0; i < cands.size(); ++i) {
        order[i] = i;
    }

    auto rel_it = oracle_.relevant.find(query);
    if (rel_it != oracle_.relevant.end() &&
        rate_gate(query, "rerank", oracle_.rerank_promote_rate)) {
        std::set<std::string> rel(rel_it->second.begin(), rel_it->second.end());
        std::stable_partition(order.begin(), order.end(), [&](size_t i) {
            return rel.count(cands[i].value("id", "")) > 0;
        });
    } else {
        // Lexical fit: shared tokens between query and name + description.
        auto qtokens = tokenize(query);
        std::set<std::string> qset(qtokens.begin(), qtokens.end());
        std::vector<int> overlap(cands.size(), 0);
        for (size_t i = 0; i < cands.size(); ++i) {
            auto dtokens =
                tokenize(cands[i].value("name", "") + " " + cands[i].value("description", ""));
            std::set<std::string> dset(dtokens.begin(), dtokens.end());
            for (const auto& t : qset) {
                if (dset.count(t)) {
                    overlap[i]++;
                }
            }
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return overlap[a] > overlap[b]; });
    }

    json out = json::array();
    for (size_t i : order) {
        out.push_back(cands[i].value("index", static_cast<int>(i)));
    }
    return out.dump();
}

std::string MockBackend::mock_filter(const json& payload) const {
    const std::string query = payload.value("query", "");
    const json& cands = payload.at("candidates");

    json kept = json::array();
    auto rel_it = oracle_.relevant.find(query);
    if (rel_it != oracle_.relevant.end() && rate_gate(query, "filter", oracle_.filter_apply_rate)) {
        std::set<std::string> rel(rel_it->second.begin(), rel_it->second.end());
        for (size_t i = 0; i < cands.size(); ++i) {
            if (rel.count(cands[i].value("id", ""))) {
                kept.push_back(cands[i].value("index", static_cast<int>(i)));
            }
        }
    } else {
        auto qtokens = tokenize(query);
        std::set<std::string> qset(qtokens.begin(), qtokens.end());
        std::vector<size_t> with_overlap;
        for (size_t i = 0; i < cands.size(); ++i) {
            auto dtokens =
                tokenize(cands[i].value("name", "") + " " + cands[i].value("description", ""));
            bool any = std::any_of(dtokens.begin(), dtokens.end(),
                                   [&](const std::string& t) { return qset.count(t) > 0; });
            if (any) {
                with_overlap.push_back(i);
            }
        }
        if (with_overlap.empty()) {
            // Cannot tell anything apart; judge everything relevant.
            for (size_t i = 0; i < cands.size(); ++i) {
                kept.push_back(cands[i].value("index", static_cast<int>(i)));
            }
        } else {
            for (size_t i : with_overlap) {
                kept.push_back(cands[i].value("index", static_cast<int>(i)));
            }
        }
    }
    return kept.dump();
}

std::string MockBackend::mock_critique(const json& payload) const {
    const std::string task = payload.value("task", "");
    std::vector<std::string> final_ids;
    for (const auto& c : payload.value("final", json::array())) {
        final_ids.push_back(c.is_string() ? c.get<std::string>() : c.value("id", ""));
    }
    std::vector<std::string> retrieved;
    for (const auto& c : payload.value("retrieved", json::array())) {
        retrieved.push_back(c.is_string() ? c.get<std::string>() : c.value("id", ""));
    }

    json verdict;
    auto rel_it = oracle_.relevant.find(task);
    if (rel_it == oracle_.relevant.end()) {
        verdict = {{"decision", "accept"}, {"rationale", "no concerns"}};
        return verdict.dump();
    }
    std::set<std::string> rel(rel_it->second.begin(), rel_it->second.end());
    bool any_retrieved = std::any_of(retrieved.begin(), retrieved.end(),
                                     [&](const std::string& id) { return rel.count(id) > 0; });
    if (!any_retrieved) {
        std::string revised;
        auto ref_it = oracle_.refined_tasks.find(task);
        revised = ref_it != oracle_.refined_tasks.end() ? ref_it->second
                                                        : "Refine: " + task;
        verdict = {{"decision", "refine_task"},
                   {"revised_task", revised},
                   {"rationale", "no retrieved candidate fits the task"}};
        return verdict.dump();
    }
    if (!final_ids.empty() && rel.count(final_ids.front())) {
        verdict = {{"decision", "accept"}, {"rationale", "top candidate fits"}};
        return verdict.dump();
    }
    // Promote fitting agents from the retrieved set to the front.
    json ranked = json::array();
    for (const auto& id : retrieved) {
        if (rel.count(id)) {
            ranked.push_back(id);
        }
    }
    for (const auto& id : final_ids) {
        if (!rel.count(id)) {
            ranked.push_back(id);
        }
    }
    verdict = {{"decision", "propose_alternative"},
               {"ranked_ids", ranked},
               {"rationale", "a better fitting retrieved agent exists"}};
    return verdict.dump();
}

std::string MockBackend::mock_decompose(const json& payload) const {
    const std::string intent = payload.value("intent", "");
    auto scripted = oracle_.decompositions.find(intent);
    if (scripted != oracle_.decompositions.end()) {
        return json(scripted->second).dump();
    }
    auto gold = oracle_.gold_plans.find(intent);
    if (gold != oracle_.gold_plans.end() && gold->second.contains("steps")) {
        return gold->second.at("steps").dump();
    }
    if (options_.single_step_decompose) {
        return json(std::vector<std::string>{intent}).dump();
    }
    return json(split_heuristic(intent)).dump();
}

std::string MockBackend::mock_args(const json& payload) const {
    const std::string intent = payload.value("intent", "");
    const int node_index = payload.value("node_index", -1);
    auto gold = oracle_.gold_plans.find(intent);
    if (gold != oracle_.gold_plans.end() && gold->second.contains("nodes") && node_index >= 0 &&
        node_index < static_cast<int>(gold->second.at("nodes").size())) {
        return gold->second.at("nodes")[static_cast<size_t>(node_index)]
            .value("arguments", json::array())
            .dump();
    }
    auto content = content_tokens(payload.value("task", ""));
    json args = json::array();
    for (size_t i = 0; i < std::min<size_t>(2, content.size()); ++i) {
        args.push_back(content[i]);
    }
    return args.dump();
}

std::string MockBackend::mock_links(const json& payload) const {
    const std::string intent = payload.value("intent", "");
    const size_t n_nodes = payload.value("n_nodes", 0);
    const bool has_feedback = !payload.value("feedback", std::string()).empty();

    auto gold = oracle_.gold_plans.find(intent);
    if (gold != oracle_.gold_plans.end() && gold->second.contains("links")) {
        if (oracle_.sabotage_first_links && !has_feedback) {
            json links = chain_links(n_nodes);
            return json{{"links", links}, {"type", workflow_type_of(n_nodes, links)}}.dump();
        }
        json links = gold->second.at("links");
        std::string type = gold->second.value("type", workflow_type_of(n_nodes, links));
        return json{{"links", links}, {"type", type}}.dump();
    }
    json links = chain_links(n_nodes);
    return json{{"links", links}, {"type", workflow_type_of(n_nodes, links)}}.dump();
}

std::string MockBackend::mock_plan_critique(const json& payload) const {
    const std::string intent = payload.value("intent", "");
    const json& plan = payload.at("plan");
    const json nodes = plan.value("task_nodes", json::array());
    const json links = plan.value("task_links", json::array());
    const json steps = plan.value("task_steps", json::array());

    auto gold_it = oracle_.gold_plans.find(intent);
    const json* gold = gold_it != oracle_.gold_plans.end() ? &gold_it->second : nullptr;

    auto rubric = [](const std::string& name, bool pass, const std::string& note) {
        return json{{"name", name}, {"pass", pass}, {"note", note}};
    };
    json rubrics = json::array();

    bool coherent = !steps.empty();
    rubrics.push_back(rubric("logical_coherence", coherent,
                             coherent ? "steps read coherently" : "plan has no steps"));

    bool nodes_ok = true;
    std::string node_note = "nodes fit the intent";
    if (gold && gold->contains("nodes")) {
        std::multiset<std::string> got, want;
        for (const auto& n : nodes) {
            got.insert(normalize_text(n.value("name", "")));
        }
        for (const auto& n : gold->at("nodes")) {
            want.insert(normalize_text(n.value("name", "")));
        }
        nodes_ok = got == want;
        if (!nodes_ok) {
            node_note = "task nodes differ from the expected tools";
        }
    }
    rubrics.push_back(rubric("task_node_correctness", nodes_ok, node_note));

    bool count_ok = plan.value("n_tools", -1) == static_cast<int>(nodes.size());
    rubrics.push_back(rubric("count_agreement", count_ok,
                             count_ok ? "tool count matches" : "n_tools disagrees with nodes"));

    std::string computed = workflow_type_of(nodes.size(), links);
    std::string claimed = plan.value("type", "");
    bool type_ok;
    std::string type_note;
    if (gold && gold->contains("type")) {
        std::string want = gold->at("type").get<std::string>();
        type_ok = claimed == want;
        type_note = type_ok ? "workflow type correct"
                            : "workflow type should be " + want + ", got " + claimed;
    } else {
        type_ok = claimed == computed;
        type_note = type_ok ? "workflow type consistent" : "workflow type inconsistent with links";
    }
    rubrics.push_back(rubric("workflow_type_accuracy", type_ok, type_note));

    bool deps_ok = links_form_dag(nodes.size(), links);
    std::string dep_note = deps_ok ? "dependencies valid" : "links are cyclic or out of range";
    if (deps_ok && gold && gold->contains("links")) {
        std::set<std::pair<int, int>> got, want;
        for (const auto& l : links) {
            got.insert({l.value("source", -1), l.value("target", -1)});
        }
        for (const auto& l : gold->at("links")) {
            want.insert({l.value("source", -1), l.value("target", -1)});
        }
        deps_ok = got == want;
        if (!deps_ok) {
            dep_note = "dependencies differ from the expected links";
        }
    }
    rubrics.push_back(rubric("dependency_validity", deps_ok, dep_note));

    return json{{"rubrics", rubrics}}.dump();
}

std::string MockBackend::mock_feedback(const json& payload) const {
    std::ostringstream out;
    out << "PREVIOUS ATTEMPT FEEDBACK\n";
    std::vector<std::string> passed;
    for (const auto& r : payload.value("rubrics", json::array())) {
        if (r.value("pass", false)) {
            passed.push_back(r.value("name", ""));
        } else {
            out << "Fix " << r.value("name", "") << ": " << r.value("note", "") << "\n";
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

std::string MockBackend::mock_judge(const json& payload) const {
    const json pred = payload.value("pred_steps", json::array());
    const json gold = payload.value("gold_steps", json::array());
    json matches = json::array();
    size_t matched = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        bool m = i < pred.size() && normalize_text(pred[i].get<std::string>()) ==
                                        normalize_text(gold[i].get<std::string>());
        matches.push_back(m);
        if (m) {
            ++matched;
        }
    }
    bool overall = !gold.empty() && matched == gold.size();
    return json{{"overall_match", overall}, {"step_matches", matches}}.dump();
}

// ---------------------------------------------------------------------------
// HttpBackend
// ---------------------------------------------------------------------------

struct HttpBackend::Impl {
    BackendKind kind;
    std::string base;        // scheme://host[:port]
    std::string path_prefix; // anything after the authority
    std::counting_semaphore<256> slots;

    explicit Impl(BackendKind k, int parallelism)
        : kind(std::move(k)), slots(std::min(parallelism, 256)) {
        const std::string& url = kind.endpoint;
        size_t scheme = url.find("://");
        size_t path = scheme == std::string::npos ? url.find('/') : url.find('/', scheme + 3);
        if (path == std::string::npos) {
            base = url;
        } else {
            base = url.substr(0, path);
            path_prefix = url.substr(path);
            if (!path_prefix.empty() && path_prefix.back() == '/') {
                path_prefix.pop_back();
            }
        }
    }

    json post(const std::string& path, const json& body) {
        slots.acquire();
        struct Release {
            std::counting_semaphore<256>& s;
            ~Release() { s.release(); }
        } release{slots};

        httplib::Headers headers;
        if (const char* key = std::getenv(kind.credential_env.c_str()); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        const int kAttempts = 3;
        std::string last_error;
        for (int attempt = 0; attempt < kAttempts; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
            }
            httplib::Client client(base);
            client.set_connection_timeout(10);
            client.set_read_timeout(120);
            auto res = client.Post(path_prefix + path, headers, body.dump(), "application/json");
            if (!res) {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500 || res->status == 429) {
                last_error = "server status " + std::to_string(res->status);
                continue;
            }
            if (res->status < 200 || res->status >= 300) {
                throw BackendError("http backend: status " + std::to_string(res->status) + ": " +
                                       res->body,
                                   /*retriable=*/false);
            }
            json parsed = json::parse(res->body, nullptr, false);
            if (parsed.is_discarded()) {
                throw BackendError("http backend: malformed JSON response", /*retriable=*/false);
            }
            return parsed;
        }
        throw BackendError("http backend: " + last_error + " after " + std::to_string(kAttempts) +
                               " attempts",
                           /*retriable=*/true);
    }
};

HttpBackend::HttpBackend(BackendKind kind, int embed_dim, int parallelism)
    : impl_(std::make_unique<Impl>(std::move(kind), parallelism)), embed_dim_(embed_dim) {
    auto violations = validate_backend_kind(impl_->kind);
    if (!violations.empty()) {
        throw AutomasError("invalid backend: " + violations.front());
    }
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::chat(const ChatRequest& request) {
    if (request.user_prompt.empty()) {
        throw std::invalid_argument("chat: user_prompt must be non-empty");
    }
    json body = {{"model", impl_->kind.model},
                 {"messages",
                  {{{"role", "system"}, {"content", request.system_prompt}},
                   {{"role", "user"}, {"content", request.user_prompt}}}},
                 {"temperature", request.decode.temperature},
                 {"max_tokens", request.decode.max_tokens}};
    json res = impl_->post("/v1/chat/completions", body);
    try {
        return res.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("http backend: unexpected chat response shape: ") + e.what(),
                           /*retriable=*/false);
    }
}

std::vector<double> HttpBackend::embed(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("embed: text must be non-empty");
    }
    json body = {{"model", impl_->kind.model}, {"input", text}};
    json res = impl_->post("/v1/embeddings", body);
    std::vector<double> v;
    try {
        v = res.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("http backend: unexpected embedding response shape: ") +
                               e.what(),
                           /*retriable=*/false);
    }
    if (static_cast<int>(v.size()) != embed_dim_) {
        throw BackendError("http backend: embedding dimension " + std::to_string(v.size()) +
                               " != configured " + std::to_string(embed_dim_),
                           /*retriable=*/false);
    }
    double norm = 0.0;
    for (double x : v) {
        norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        throw BackendError("http backend: zero embedding vector", /*retriable=*/false);
    }
    for (double& x : v) {
        x /= norm;
    }
    return v;
}

std::unique_ptr<Backend> make_backend(const BackendKind& kind, int embed_dim, int http_parallelism,
                                      MockOptions options) {
    auto violations = validate_backend_kind(kind);
    if (!violations.empty()) {
        throw AutomasError("invalid backend: " + violations.front());
    }
    if (kind.id == BackendId::mock) {
        return std::make_unique<MockBackend>(kind.seed, embed_dim, options);
    }
    return std::make_unique<HttpBackend>(kind, embed_dim, http_parallelism);
}

} // namespace automas::llm
