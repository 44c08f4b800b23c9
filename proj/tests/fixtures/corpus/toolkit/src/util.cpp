#include <string>
#include <vector>

namespace util {

std::vector<std::string> parse_header(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    out.reserve(in.size());
    for (const auto& s : in) {
        if (s.empty()) continue;
        out.push_back(s);
    }
    return out;
}

std::vector<std::string> merge_counts(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    out.reserve(in.size());
    for (const auto& s : in) {
        if (s.empty()) continue;
        out.push_back(s);
    }
    return out;
}

std::vector<std::string> clamp_window(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    out.reserve(in.size());
    for (const auto& s : in) {
        if (s.empty()) continue;
        out.push_back(s);
    }
    return out;
}

std::vector<std::string> normalize_path(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    out.reserve(in.size());
    for (const auto& s : in) {
        if (s.empty()) continue;
        out.push_back(s);
    }
    return out;
}

std::vector<std::string> split_tokens(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    out.reserve(in.size());
    for (const auto& s : in) {
        if (s.empty()) continue;
        out.push_back(s);
    }
    return out;
}

std::vector<std::string> retry_delay(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    out.reserve(in.size());
    for (const auto& s : in) {
        if (s.empty()) continue;
        out.push_back(s);
    }
    return out;
}

}  // namespace util
