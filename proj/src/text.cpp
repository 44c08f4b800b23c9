// SPDX-License-Identifier: Apache-2.0

#include "qasynth/text.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace qasynth::text {

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
            cp = ((c & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
            len = 2;
        } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
            cp = ((c & 0x0F) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
                 (static_cast<unsigned char>(s[i + 2]) & 0x3F);
            len = 3;
        } else if ((c >> 3) == 0x1E && i + 3 < s.size()) {
            cp = ((c & 0x07) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
                 ((static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
                 (static_cast<unsigned char>(s[i + 3]) & 0x3F);
            len = 4;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

bool is_cjk(char32_t c) noexcept {
    return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
           (c >= 0x20000 && c <= 0x2A6DF) || (c >= 0xF900 && c <= 0xFAFF);
}

namespace {
bool is_latin_letter(char32_t c) noexcept { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }
}  // namespace

double cjk_ratio(std::string_view s) {
    std::size_t cjk = 0, latin = 0;
    for (char32_t c : decode_utf8(s)) {
        if (is_cjk(c)) ++cjk;
        else if (is_latin_letter(c)) ++latin;
    }
    if (cjk + latin == 0) return 0.0;
    return static_cast<double>(cjk) / static_cast<double>(cjk + latin);
}

Locale detect_locale(std::string_view s, double threshold) {
    return cjk_ratio(s) > threshold ? Locale::zh : Locale::en;
}

std::optional<Locale> requested_locale(std::string_view query) {
    static constexpr std::array<std::string_view, 12> kEnglish{
        "answer in english", "respond in english", "reply in english", "in english please",
        "write in english",  "explain in english", "用英文", "用英语", "英文回答", "英语回答",
        "请用英文", "使用英文",
    };
    static constexpr std::array<std::string_view, 12> kChinese{
        "answer in chinese", "respond in chinese", "reply in chinese", "in chinese please",
        "write in chinese",  "explain in chinese", "用中文", "用汉语", "中文回答", "请用中文",
        "使用中文", "用简体中文",
    };
    const std::string q = to_lower_ascii(query);
    std::size_t en_at = std::string::npos, zh_at = std::string::npos;
    for (auto p : kEnglish) en_at = std::min(en_at, q.find(p));
    for (auto p : kChinese) zh_at = std::min(zh_at, q.find(p));
    if (en_at == std::string::npos && zh_at == std::string::npos) return std::nullopt;
    // Earliest directive wins when both appear.
    return en_at < zh_at ? Locale::en : Locale::zh;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n\f\v");
    return std::string(s.substr(b, e - b + 1));
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    });
    return out;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < s.size()) out.emplace_back(s.substr(start));
            break;
        }
        std::string line(s.substr(start, nl - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(std::move(line));
        start = nl + 1;
    }
    return out;
}

FencedDocument parse_fences(std::string_view markdown) {
    FencedDocument doc;
    bool in_code = false;
    FencedDocument::CodeBlock current;
    for (const auto& line : split_lines(markdown)) {
        auto first = line.find_first_not_of(" \t");
        bool delimiter = first != std::string::npos && line.compare(first, 3, "```") == 0;
        if (delimiter) {
            ++doc.fence_delimiters;
            if (!in_code) {
                current = {};
                current.info = trim(std::string_view(line).substr(first + 3));
                in_code = true;
            } else {
                doc.code_blocks.push_back(std::move(current));
                in_code = false;
            }
            continue;
        }
        if (in_code) {
            current.body += line;
            current.body += '\n';
        } else {
            doc.prose += line;
            doc.prose += '\n';
            if (doc.fence_delimiters == 0) {
                doc.prose_before_first_fence += line;
                doc.prose_before_first_fence += '\n';
            }
        }
    }
    if (in_code) {
        current.closed = false;
        doc.code_blocks.push_back(std::move(current));
    }
    return doc;
}

std::vector<std::string> normalized_code_tokens(std::string_view code) {
    std::vector<std::string> tokens;
    bool in_block_comment = false;
    for (auto line : split_lines(code)) {
        std::string t = trim(line);
        if (in_block_comment) {
            auto end = t.find("*/");
            if (end == std::string::npos) continue;
            t = trim(std::string_view(t).substr(end + 2));
            in_block_comment = false;
        }
        if (t.starts_with("/*")) {
            if (t.find("*/") == std::string::npos) in_block_comment = true;
            continue;
        }
        if (t.empty() || t.starts_with("//") || t.starts_with("#") || t.starts_with("--") ||
            t.starts_with("* ") || t == "*") {
            continue;
        }
        // Trailing line comments.
        if (auto pos = t.find(" //"); pos != std::string::npos) t = trim(std::string_view(t).substr(0, pos));
        if (auto pos = t.find(" # "); pos != std::string::npos) t = trim(std::string_view(t).substr(0, pos));
        std::size_t i = 0;
        while (i < t.size()) {
            while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
            std::size_t j = i;
            while (j < t.size() && !std::isspace(static_cast<unsigned char>(t[j]))) ++j;
            if (j > i) tokens.emplace_back(t.substr(i, j - i));
            i = j;
        }
    }
    return tokens;
}

double token_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return 2.0 * static_cast<double>(prev[b.size()]) / static_cast<double>(a.size() + b.size());
}

std::size_t codepoint_count(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(
        s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

char32_t last_visible_codepoint(std::string_view s) {
    auto cps = decode_utf8(s);
    for (auto it = cps.rbegin(); it != cps.rend(); ++it) {
        char32_t c = *it;
        if (c != U' ' && c != U'\t' && c != U'\n' && c != U'\r' && c != 0x3000) return c;
    }
    return 0;
}

}  // namespace qasynth::text
