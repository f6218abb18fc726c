#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace automas {

/// Lowercase word segmentation. ASCII alphanumeric runs become tokens,
/// punctuation splits, and non-ASCII UTF-8 sequences are kept as token
/// characters so accented words survive intact.
std::vector<std::string> tokenize(std::string_view text);

/// Lowercase, strip punctuation, collapse whitespace. Used for tolerant
/// name and step comparisons.
std::string normalize_text(std::string_view text);

bool is_stopword(const std::string& token);

/// Content tokens: tokenize minus stopwords; falls back to all tokens
/// when everything is a stopword.
std::vector<std::string> content_tokens(std::string_view text);

/// FNV-1a over bytes, the project's stable hash for seeding and fingerprints.
std::uint64_t fnv64(std::string_view bytes, std::uint64_t seed = 1469598103934665603ULL);

std::string to_hex(std::uint64_t value);

} // namespace automas
