#include "automas/text.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace automas {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            if (std::isalnum(c)) {
                current.push_back(static_cast<char>(std::tolower(c)));
            } else if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            // Multi-byte UTF-8 sequence: part of a word.
            current.push_back(text[i]);
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        bool word_char = (c >= 0x80) || std::isalnum(c);
        if (word_char) {
            if (pending_space && !out.empty()) {
                out.push_back(' ');
            }
            pending_space = false;
            out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : text[i]);
        } else {
            pending_space = true;
        }
    }
    return out;
}

bool is_stopword(const std::string& token) {
    static const std::unordered_set<std::string> kStopwords = {
        "the", "a",   "an",  "and", "or",  "of",  "to",   "in",   "on",      "for",
        "with", "between", "from", "all", "is",  "are", "be",   "that", "this",    "it",
        "as",  "at",  "by",  "i",   "you", "we",  "my",   "me",   "please",  "want",
        "need", "do", "can", "how", "your", "their", "will", "would", "find", "get"};
    return kStopwords.count(token) > 0;
}

std::vector<std::string> content_tokens(std::string_view text) {
    auto tokens = tokenize(text);
    std::vector<std::string> content;
    for (auto& t : tokens) {
        if (!is_stopword(t)) {
            content.push_back(t);
        }
    }
    return content.empty() ? tokens : content;
}

std::uint64_t fnv64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

} // namespace automas
