// SPDX-License-Identifier: Apache-2.0
//
// Text heuristics shared by the rule matcher and the deduction detectors.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qasynth/taxonomy.hpp"

namespace qasynth::text {

inline constexpr double kDefaultCjkThreshold = 0.3;

std::u32string decode_utf8(std::string_view s);

bool is_cjk(char32_t c) noexcept;

/// CJK codepoints over (CJK + Latin letters). Zero when there are no letters.
double cjk_ratio(std::string_view s);

/// zh when the CJK ratio exceeds `threshold`, else en.
Locale detect_locale(std::string_view s, double threshold = kDefaultCjkThreshold);

/// Locale demanded by an explicit directive in a query ("answer in English",
/// "用中文", ...). nullopt when the query states no requirement.
std::optional<Locale> requested_locale(std::string_view query);

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);

/// A markdown document split into prose and fenced-code segments.
struct FencedDocument {
    struct CodeBlock {
        std::string info;
        std::string body;
        bool closed = true;
    };
    std::vector<CodeBlock> code_blocks;
    std::string prose;          // concatenated text outside fences
    std::string prose_before_first_fence;
    std::size_t fence_delimiters = 0;
    bool has_fence() const noexcept { return fence_delimiters > 0; }
};

/// Fence delimiters are lines whose first non-blank characters are ```.
FencedDocument parse_fences(std::string_view markdown);

/// Whitespace tokens of code after stripping line comments and blank lines.
std::vector<std::string> normalized_code_tokens(std::string_view code);

/// 2·LCS / (|a| + |b|) over token sequences; 1.0 for two empty sequences.
double token_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Number of codepoints.
std::size_t codepoint_count(std::string_view s);

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

/// Last non-whitespace codepoint, or 0.
char32_t last_visible_codepoint(std::string_view s);

}  // namespace qasynth::text
