// SPDX-License-Identifier: Apache-2.0

#include "qasynth/jsonl.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>
#include <unistd.h>

namespace qasynth::io {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    static std::atomic<unsigned> counter{0};
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

json read_json(const fs::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

std::vector<json> read_jsonl(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<json> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw IoError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::string dump_line(const json& record) {
    return record.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

void write_jsonl(const fs::path& path, const std::vector<json>& records) {
    std::string body;
    for (const auto& r : records) body += dump_line(r);
    write_file_atomic(path, body);
}

void append_jsonl(const fs::path& path, const std::vector<json>& records) {
    std::string body = fs::exists(path) ? read_file(path) : std::string{};
    if (!body.empty() && body.back() != '\n') body += '\n';
    for (const auto& r : records) body += dump_line(r);
    write_file_atomic(path, body);
}

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw IoError("sha256 failed");
    }
    std::string hex;
    hex.reserve(len * 2);
    static constexpr char kDigits[] = "0123456789abcdef";
    for (unsigned i = 0; i < len; ++i) {
        hex += kDigits[md[i] >> 4];
        hex += kDigits[md[i] & 0xF];
    }
    return hex;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

}  // namespace qasynth::io
