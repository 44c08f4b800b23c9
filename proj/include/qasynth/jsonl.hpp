// SPDX-License-Identifier: Apache-2.0
//
// JSON / JSONL persistence. Every write goes to a sibling temp file that is
// renamed into place, so readers never observe a partial line.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qasynth::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path);

/// Writes `contents` to `path` via temp file + rename.
void write_file_atomic(const fs::path& path, const std::string& contents);

json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& doc);

/// Parses one JSON value per non-blank line; errors carry the line number.
std::vector<json> read_jsonl(const fs::path& path);

std::string dump_line(const json& record);

void write_jsonl(const fs::path& path, const std::vector<json>& records);

/// Appends records by rewriting the file (existing bytes + new lines) into a
/// temp file and renaming it over the original.
void append_jsonl(const fs::path& path, const std::vector<json>& records);

template <typename T>
std::vector<T> read_records(const fs::path& path) {
    std::vector<T> out;
    std::size_t line = 0;
    for (const auto& j : read_jsonl(path)) {
        ++line;
        try {
            out.push_back(j.get<T>());
        } catch (const std::exception& e) {
            throw IoError(path.string() + ": record " + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

template <typename T>
void write_records(const fs::path& path, const std::vector<T>& records) {
    std::vector<json> js;
    js.reserve(records.size());
    for (const auto& r : records) js.emplace_back(r);
    write_jsonl(path, js);
}

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace qasynth::io
