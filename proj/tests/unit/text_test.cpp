// SPDX-License-Identifier: Apache-2.0

#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "qasynth/text.hpp"

using namespace qasynth;

TEST(Text, CjkRatioAndLocale) {
    EXPECT_DOUBLE_EQ(text::cjk_ratio(""), 0.0);
    EXPECT_DOUBLE_EQ(text::cjk_ratio("1234 !?"), 0.0);
    EXPECT_DOUBLE_EQ(text::cjk_ratio("中文"), 1.0);
    // 2 CJK over 2 CJK + 6 Latin letters.
    EXPECT_DOUBLE_EQ(text::cjk_ratio("解释 foobar"), 0.25);
    EXPECT_EQ(text::detect_locale("解释 foobar"), Locale::en);
    EXPECT_EQ(text::detect_locale("请解释 for 循环"), Locale::zh);
    EXPECT_EQ(text::detect_locale("Explain this loop"), Locale::en);
}

TEST(Text, RequestedLocale) {
    EXPECT_EQ(text::requested_locale("请用中文解释"), Locale::zh);
    EXPECT_EQ(text::requested_locale("Explain this. Please answer in English."), Locale::en);
    EXPECT_EQ(text::requested_locale("Explain this loop"), std::nullopt);
    EXPECT_EQ(text::requested_locale("Answer in English, not 用中文"), Locale::en);
}

TEST(Text, ParseFences) {
    auto d = text::parse_fences("Intro\n```py\nx = 1\n```\nOutro\n");
    ASSERT_EQ(d.code_blocks.size(), 1u);
    EXPECT_EQ(d.code_blocks[0].info, "py");
    EXPECT_EQ(d.code_blocks[0].body, "x = 1\n");
    EXPECT_TRUE(d.code_blocks[0].closed);
    EXPECT_EQ(d.fence_delimiters, 2u);
    EXPECT_EQ(text::trim(d.prose_before_first_fence), "Intro");
    EXPECT_NE(d.prose.find("Outro"), std::string::npos);

    auto open = text::parse_fences("```\nint x");
    ASSERT_EQ(open.code_blocks.size(), 1u);
    EXPECT_FALSE(open.code_blocks[0].closed);
    EXPECT_EQ(open.fence_delimiters, 1u);

    EXPECT_FALSE(text::parse_fences("no code here").has_fence());
}

TEST(Text, NormalizedTokensDropComments) {
    auto a = text::normalized_code_tokens("int add(int a, int b) {\n    return a + b;\n}\n");
    auto b = text::normalized_code_tokens(
        "// Adds.\nint add(int a, int b) {\n    /* sum */\n    return a + b;  // plain\n}\n");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.size(), 11u);
    EXPECT_TRUE(text::normalized_code_tokens("# only a comment\n\n").empty());
}

namespace {

// Exponential LCS, for cross-checking on short sequences.
std::size_t lcs_brute(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size() || j == b.size()) return 0;
        if (a[i] == b[j]) return 1 + go(i + 1, j + 1);
        return std::max(go(i + 1, j), go(i, j + 1));
    };
    return go(0, 0);
}

}  // namespace

TEST(Text, TokenSimilarityMatchesBruteForce) {
    std::mt19937 gen(11);
    const std::vector<std::string> alphabet{"a", "b", "c", "{", "}"};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::string> a(gen() % 8), b(gen() % 8);
        for (auto& t : a) t = alphabet[gen() % alphabet.size()];
        for (auto& t : b) t = alphabet[gen() % alphabet.size()];
        double expected = a.empty() && b.empty() ? 1.0 : 2.0 * lcs_brute(a, b) / double(a.size() + b.size());
        EXPECT_DOUBLE_EQ(text::token_similarity(a, b), expected);
        EXPECT_DOUBLE_EQ(text::token_similarity(a, b), text::token_similarity(b, a));
    }
}

TEST(Text, MiscHelpers) {
    EXPECT_EQ(text::codepoint_count("中a"), 2u);
    EXPECT_EQ(text::last_visible_codepoint("abc.  \n"), U'.');
    EXPECT_EQ(text::last_visible_codepoint("  "), 0u);
    EXPECT_EQ(text::hex64(255), "00000000000000ff");
    EXPECT_EQ(text::split_lines("a\nb").size(), 2u);
    EXPECT_EQ(text::trim("  x \n"), "x");
}
