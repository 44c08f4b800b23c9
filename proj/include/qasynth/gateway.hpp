// SPDX-License-Identifier: Apache-2.0
//
// Chat-model access. A pool of endpoints, each backed either by an HTTP
// chat-completion service or by a deterministic stub, plus named roles for
// the agent tasks (classifier, query generator, judge, ...).

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "qasynth/taxonomy.hpp"

namespace qasynth::gateway {

enum class FinishReason { complete, length_capped, error };

std::string_view to_string(FinishReason f) noexcept;
FinishReason parse_finish_reason(std::string_view s);

struct SamplingParams {
    std::optional<double> temperature;
    std::optional<double> top_p;
    std::optional<int> max_tokens;

    /// Fields set in `over` replace those here.
    SamplingParams overlaid(const SamplingParams& over) const;
};

/// One conditional reply of a stub endpoint. All present conditions must
/// hold; the first matching rule wins.
struct StubRule {
    std::optional<std::string> purpose;
    std::optional<std::string> contains;       // in any message
    std::optional<std::string> last_contains;  // in the last user message
    std::optional<std::string> not_contains;
    int min_user_turns = 0;
    std::string reply;
    bool error = false;
};

/// Deterministic backend. Replies are looked up by prompt hash, then by rule,
/// then by purpose, then fall back to `default_reply`. Reply templates expand
/// `{last_user}`, `{h8}` (prompt hash prefix), `{user_turns}` and `{purpose}`.
struct StubConfig {
    std::string default_reply = "{last_user}";
    std::map<std::string, std::string> by_hash;
    std::map<std::string, std::string> by_purpose;
    std::vector<StubRule> rules;
    bool fail_all = false;
};

enum class BackendKind { http, stub };

struct ModelEndpoint {
    std::string id;
    BackendKind kind = BackendKind::stub;
    std::string base_url;
    std::string model;
    std::string auth_env;  // name of the environment variable holding the token
    SamplingParams defaults{0.3, 0.95, 2048};
    double timeout_s = 60.0;
    int max_attempts = 3;
    int retry_base_ms = 200;
    int max_in_flight = 4;
    StubConfig stub;
};

/// Throws std::invalid_argument on out-of-range sampling parameters.
void validate_endpoint(const ModelEndpoint& e);

struct CandidateResponse {
    std::string endpoint_id;
    std::string text;
    FinishReason finish = FinishReason::complete;
    double latency_ms = 0.0;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    std::string error_cause;

    bool ok() const noexcept { return finish != FinishReason::error; }

    friend bool operator==(const CandidateResponse&, const CandidateResponse&) = default;
};

struct HttpReply {
    int status = 0;  // 0 when the request never got a response
    std::string body;
    std::string transport_error;
};

/// HTTP seam, replaceable in tests.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpReply post(const std::string& base_url, const std::string& path,
                           const std::vector<std::pair<std::string, std::string>>& headers,
                           const std::string& body, double timeout_s) = 0;
};

std::shared_ptr<Transport> default_transport();

/// Request body sent to an HTTP endpoint.
json wire_request(const ModelEndpoint& e, const std::vector<ChatMessage>& messages,
                  const SamplingParams& params);

/// Stub reply for a request; a pure function of its arguments.
CandidateResponse stub_complete(const ModelEndpoint& e, const std::vector<ChatMessage>& messages,
                                const SamplingParams& params, std::string_view purpose);

/// Single completion against one endpoint. Timeouts and 5xx responses are
/// retried with exponential backoff up to `max_attempts`; exhausting them
/// yields an error candidate with the cause recorded.
CandidateResponse complete(const ModelEndpoint& endpoint, const std::vector<ChatMessage>& messages,
                           const SamplingParams& params, Transport& transport,
                           std::string_view purpose = {});

/// Agent roles that are served by a single endpoint each.
enum class Role { plugin, classifier, query_generator, query_filter, judge, comparator };
std::string_view to_string(Role r) noexcept;

struct PoolConfig {
    std::vector<ModelEndpoint> endpoints;
    std::vector<std::string> generators;
    std::map<Role, std::string> roles;

    static PoolConfig from_json(const json& j);
    static PoolConfig load(const std::filesystem::path& path);
};

/// Thread-safe handle over a pool. Copies share in-flight limits.
class Gateway {
public:
    explicit Gateway(PoolConfig config, std::shared_ptr<Transport> transport = default_transport());

    const PoolConfig& config() const noexcept { return *config_; }
    const ModelEndpoint& endpoint(std::string_view id) const;
    const ModelEndpoint& endpoint_for(Role role) const;

    CandidateResponse complete(std::string_view endpoint_id, const std::vector<ChatMessage>& messages,
                               const SamplingParams& params = {}, std::string_view purpose = {}) const;

    CandidateResponse complete(Role role, const std::vector<ChatMessage>& messages,
                               const SamplingParams& params = {}, std::string_view purpose = {}) const;

    /// One candidate per generator endpoint, in pool order. Failures become
    /// error candidates; the batch itself never fails.
    std::vector<CandidateResponse> generate_candidates(const std::vector<ChatMessage>& messages,
                                                       const SamplingParams& params = {}) const;

private:
    struct Slots;
    std::shared_ptr<const PoolConfig> config_;
    std::shared_ptr<Transport> transport_;
    std::shared_ptr<std::map<std::string, std::unique_ptr<Slots>, std::less<>>> slots_;
};

void to_json(json& j, const CandidateResponse& c);
void from_json(const json& j, CandidateResponse& c);

}  // namespace qasynth::gateway
