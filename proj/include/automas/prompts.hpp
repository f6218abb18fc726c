#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <unordered_map>

namespace automas::llm {

struct RenderedPrompt {
    std::string system_prompt;
    std::string user_prompt;
};

/// Prompt templates for every generative call the pipeline makes. Built-in
/// defaults can be overridden per kind from a directory of <kind>.txt files.
///
/// Rendering prepends a two-line machine header
///     automas-task: <kind>
///     automas-payload: <compact json>
/// that the mock backend parses; real endpoints simply see it as part of the
/// system message. The template body below the header is the human-facing
/// instruction text with {{placeholder}} slots.
class PromptLibrary {
public:
    PromptLibrary();

    /// Overrides any template whose <kind>.txt exists in `dir`.
    void load_directory(const std::string& dir);

    bool has(const std::string& kind) const;

    RenderedPrompt render(const std::string& kind, const nlohmann::json& payload,
                          const std::unordered_map<std::string, std::string>& vars,
                          const std::string& user_prompt) const;

    static constexpr const char* kTaskHeader = "automas-task:";
    static constexpr const char* kPayloadHeader = "automas-payload:";

private:
    std::unordered_map<std::string, std::string> templates_;
};

} // namespace automas::llm
