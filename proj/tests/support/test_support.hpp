// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the unit and acceptance tests.

#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "qasynth/gateway.hpp"

namespace qasynth::testkit {

namespace fs = std::filesystem;

inline fs::path fixtures() { return fs::path(QASYNTH_FIXTURES_DIR); }

inline gateway::PoolConfig stub_pool() { return gateway::PoolConfig::load(fixtures() / "pools" / "stub_pool.json"); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t") {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("qasynth-test-" + std::to_string(::getpid()) + "-" + tag + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

}  // namespace qasynth::testkit
