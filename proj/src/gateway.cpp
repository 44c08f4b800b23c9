// SPDX-License-Identifier: Apache-2.0

#include "qasynth/gateway.hpp"

#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "qasynth/jsonl.hpp"
#include "qasynth/text.hpp"

namespace qasynth::gateway {

std::string_view to_string(FinishReason f) noexcept {
    switch (f) {
        case FinishReason::complete: return "complete";
        case FinishReason::length_capped: return "length_capped";
        case FinishReason::error: return "error";
    }
    return "error";
}

FinishReason parse_finish_reason(std::string_view s) {
    if (s == "complete") return FinishReason::complete;
    if (s == "length_capped") return FinishReason::length_capped;
    if (s == "error") return FinishReason::error;
    throw std::invalid_argument("invalid finish reason '" + std::string(s) + "'");
}

SamplingParams SamplingParams::overlaid(const SamplingParams& over) const {
    SamplingParams out = *this;
    if (over.temperature) out.temperature = over.temperature;
    if (over.top_p) out.top_p = over.top_p;
    if (over.max_tokens) out.max_tokens = over.max_tokens;
    return out;
}

void validate_endpoint(const ModelEndpoint& e) {
    if (e.id.empty()) throw std::invalid_argument("endpoint id is empty");
    if (e.defaults.temperature && (*e.defaults.temperature < 0.0 || *e.defaults.temperature > 2.0)) {
        throw std::invalid_argument("endpoint " + e.id + ": temperature must be in [0, 2]");
    }
    if (e.defaults.top_p && (*e.defaults.top_p <= 0.0 || *e.defaults.top_p > 1.0)) {
        throw std::invalid_argument("endpoint " + e.id + ": top_p must be in (0, 1]");
    }
    if (e.defaults.max_tokens && *e.defaults.max_tokens < 1) {
        throw std::invalid_argument("endpoint " + e.id + ": max_tokens must be positive");
    }
    if (e.max_attempts < 1) throw std::invalid_argument("endpoint " + e.id + ": max_attempts < 1");
    if (e.max_in_flight < 1) throw std::invalid_argument("endpoint " + e.id + ": max_in_flight < 1");
    if (e.kind == BackendKind::http && e.base_url.empty()) {
        throw std::invalid_argument("endpoint " + e.id + ": http endpoint without base_url");
    }
}

namespace {

void check_messages(const std::vector<ChatMessage>& messages) {
    if (messages.empty()) throw std::invalid_argument("complete: messages must be non-empty");
    for (const auto& m : messages) {
        if (m.role != "system" && m.role != "user" && m.role != "assistant") {
            throw std::invalid_argument("complete: invalid role '" + m.role + "'");
        }
    }
}

std::string last_user(const std::vector<ChatMessage>& messages) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == "user") return it->content;
    }
    return {};
}

int user_turns(const std::vector<ChatMessage>& messages) {
    int n = 0;
    for (const auto& m : messages) n += m.role == "user" ? 1 : 0;
    return n;
}

std::uint64_t prompt_hash(const std::vector<ChatMessage>& messages) {
    std::uint64_t h = text::fnv1a64("");
    for (const auto& m : messages) {
        h = text::fnv1a64(m.role, h);
        h = text::fnv1a64(std::string_view("\0", 1), h);
        h = text::fnv1a64(m.content, h);
        h = text::fnv1a64(std::string_view("\0", 1), h);
    }
    return h;
}

int count_words(std::string_view s) {
    int n = 0;
    bool in_word = false;
    for (char c : s) {
        bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

/// Prefix of `s` holding its first `n` words.
std::string first_words(std::string_view s, int n) {
    int seen = 0;
    bool in_word = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        bool space = std::isspace(static_cast<unsigned char>(s[i])) != 0;
        if (!space && !in_word) {
            if (seen == n) return std::string(s.substr(0, i));
            ++seen;
        }
        in_word = !space;
    }
    return std::string(s);
}

std::string expand(std::string_view tmpl, const std::vector<ChatMessage>& messages,
                   std::string_view purpose, std::uint64_t hash) {
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i);
            if (close != std::string_view::npos) {
                auto key = tmpl.substr(i + 1, close - i - 1);
                if (key == "last_user") { out += last_user(messages); i = close + 1; continue; }
                if (key == "h8") { out += text::hex64(hash).substr(0, 8); i = close + 1; continue; }
                if (key == "user_turns") { out += std::to_string(user_turns(messages)); i = close + 1; continue; }
                if (key == "purpose") { out += purpose; i = close + 1; continue; }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

bool rule_matches(const StubRule& r, const std::vector<ChatMessage>& messages, std::string_view purpose) {
    if (r.purpose && *r.purpose != purpose) return false;
    if (user_turns(messages) < r.min_user_turns) return false;
    auto any_contains = [&](const std::string& needle) {
        for (const auto& m : messages) {
            if (m.content.find(needle) != std::string::npos) return true;
        }
        return false;
    };
    if (r.contains && !any_contains(*r.contains)) return false;
    if (r.not_contains && any_contains(*r.not_contains)) return false;
    if (r.last_contains && last_user(messages).find(*r.last_contains) == std::string::npos) return false;
    return true;
}

}  // namespace

json wire_request(const ModelEndpoint& e, const std::vector<ChatMessage>& messages,
                  const SamplingParams& params) {
    const auto p = e.defaults.overlaid(params);
    json j{{"model", e.model}, {"messages", messages}};
    if (p.temperature) j["temperature"] = *p.temperature;
    if (p.top_p) j["top_p"] = *p.top_p;
    if (p.max_tokens) j["max_tokens"] = *p.max_tokens;
    return j;
}

CandidateResponse stub_complete(const ModelEndpoint& e, const std::vector<ChatMessage>& messages,
                                const SamplingParams& params, std::string_view purpose) {
    check_messages(messages);
    CandidateResponse r;
    r.endpoint_id = e.id;
    const auto& cfg = e.stub;
    const auto hash = prompt_hash(messages);
    if (cfg.fail_all) {
        r.finish = FinishReason::error;
        r.error_cause = "stub: injected failure";
        return r;
    }
    std::optional<std::string> tmpl;
    if (auto it = cfg.by_hash.find(text::hex64(hash)); it != cfg.by_hash.end()) tmpl = it->second;
    if (!tmpl) {
        for (const auto& rule : cfg.rules) {
            if (!rule_matches(rule, messages, purpose)) continue;
            if (rule.error) {
                r.finish = FinishReason::error;
                r.error_cause = "stub: injected failure";
                return r;
            }
            tmpl = rule.reply;
            break;
        }
    }
    if (!tmpl) {
        if (auto it = cfg.by_purpose.find(std::string(purpose)); it != cfg.by_purpose.end()) tmpl = it->second;
    }
    r.text = expand(tmpl.value_or(cfg.default_reply), messages, purpose, hash);

    int prompt_words = 0;
    for (const auto& m : messages) prompt_words += count_words(m.content);
    r.prompt_tokens = prompt_words;
    const auto p = e.defaults.overlaid(params);
    const int words = count_words(r.text);
    if (p.max_tokens && words > *p.max_tokens) {
        r.text = first_words(r.text, *p.max_tokens);
        r.finish = FinishReason::length_capped;
        r.completion_tokens = *p.max_tokens;
    } else {
        r.completion_tokens = words;
    }
    if (r.text.empty()) {
        r.finish = FinishReason::error;
        r.error_cause = "stub: empty reply";
    }
    return r;
}

namespace {

class HttplibTransport final : public Transport {
public:
    HttpReply post(const std::string& base_url, const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& headers,
                   const std::string& body, double timeout_s) override {
        httplib::Client client(base_url);
        const auto secs = static_cast<time_t>(timeout_s);
        const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);
        httplib::Headers hs;
        for (const auto& [k, v] : headers) hs.emplace(k, v);
        auto res = client.Post(path, hs, body, "application/json");
        HttpReply reply;
        if (!res) {
            reply.transport_error = httplib::to_string(res.error());
            return reply;
        }
        reply.status = res->status;
        reply.body = res->body;
        return reply;
    }
};

/// Splits "http://host:port/v1" into ("http://host:port", "/v1").
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme = url.find("://");
    auto path_at = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_at == std::string::npos) return {url, ""};
    std::string path = url.substr(path_at);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_at), path};
}

CandidateResponse parse_wire_response(const ModelEndpoint& e, const std::string& body) {
    CandidateResponse r;
    r.endpoint_id = e.id;
    try {
        auto j = json::parse(body);
        const auto& choice = j.at("choices").at(0);
        const auto& content = choice.at("message").at("content");
        r.text = content.is_string() ? content.get<std::string>() : std::string{};
        auto finish = choice.value("finish_reason", std::string("stop"));
        r.finish = finish == "length" ? FinishReason::length_capped : FinishReason::complete;
        if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
            if (u->contains("prompt_tokens")) r.prompt_tokens = u->at("prompt_tokens").get<int>();
            if (u->contains("completion_tokens")) r.completion_tokens = u->at("completion_tokens").get<int>();
        }
    } catch (const std::exception& ex) {
        r.text.clear();
        r.finish = FinishReason::error;
        r.error_cause = std::string("malformed response: ") + ex.what();
        return r;
    }
    if (r.text.empty()) {
        r.finish = FinishReason::error;
        r.error_cause = "empty completion";
    }
    return r;
}

}  // namespace

std::shared_ptr<Transport> default_transport() { return std::make_shared<HttplibTransport>(); }

CandidateResponse complete(const ModelEndpoint& endpoint, const std::vector<ChatMessage>& messages,
                           const SamplingParams& params, Transport& transport, std::string_view purpose) {
    check_messages(messages);
    if (endpoint.kind == BackendKind::stub) return stub_complete(endpoint, messages, params, purpose);

    const auto started = std::chrono::steady_clock::now();
    const auto [host, base_path] = split_url(endpoint.base_url);
    const std::string body = wire_request(endpoint, messages, params).dump();
    std::vector<std::pair<std::string, std::string>> headers;
    if (!endpoint.auth_env.empty()) {
        if (const char* token = std::getenv(endpoint.auth_env.c_str()); token && *token) {
            headers.emplace_back("Authorization", std::string("Bearer ") + token);
        }
    }

    std::string cause;
    for (int attempt = 1; attempt <= endpoint.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(std::chrono::milliseconds(endpoint.retry_base_ms) * (1 << (attempt - 2)));
        }
        auto reply = transport.post(host, base_path + "/chat/completions", headers, body, endpoint.timeout_s);
        if (reply.status == 200) {
            auto r = parse_wire_response(endpoint, reply.body);
            r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
            return r;
        }
        if (reply.status == 0) {
            cause = "transport: " + reply.transport_error;
        } else {
            cause = "http status " + std::to_string(reply.status);
            if (reply.status < 500) break;  // client errors are not retried
        }
        spdlog::debug("endpoint {} attempt {} failed: {}", endpoint.id, attempt, cause);
    }
    CandidateResponse r;
    r.endpoint_id = endpoint.id;
    r.finish = FinishReason::error;
    r.error_cause = cause + " after " + std::to_string(endpoint.max_attempts) + " attempts";
    r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return r;
}

// ---------------------------------------------------------------------------
// Pool configuration

std::string_view to_string(Role r) noexcept {
    switch (r) {
        case Role::plugin: return "plugin";
        case Role::classifier: return "classifier";
        case Role::query_generator: return "query_generator";
        case Role::query_filter: return "query_filter";
        case Role::judge: return "judge";
        case Role::comparator: return "comparator";
    }
    return "plugin";
}

namespace {

Role parse_role(std::string_view s) {
    for (auto r : {Role::plugin, Role::classifier, Role::query_generator, Role::query_filter, Role::judge,
                   Role::comparator}) {
        if (to_string(r) == s) return r;
    }
    throw std::invalid_argument("unknown role '" + std::string(s) + "'");
}

template <typename T>
void get_opt(const json& j, const char* key, std::optional<T>& v) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) v = it->get<T>();
}

StubConfig stub_from_json(const json& j) {
    StubConfig s;
    s.default_reply = j.value("default_reply", s.default_reply);
    s.fail_all = j.value("fail_all", false);
    if (j.contains("by_hash")) s.by_hash = j.at("by_hash").get<std::map<std::string, std::string>>();
    if (j.contains("by_purpose")) s.by_purpose = j.at("by_purpose").get<std::map<std::string, std::string>>();
    for (const auto& rj : j.value("rules", json::array())) {
        StubRule r;
        get_opt(rj, "purpose", r.purpose);
        get_opt(rj, "contains", r.contains);
        get_opt(rj, "last_contains", r.last_contains);
        get_opt(rj, "not_contains", r.not_contains);
        r.min_user_turns = rj.value("min_user_turns", 0);
        r.reply = rj.value("reply", std::string{});
        r.error = rj.value("error", false);
        s.rules.push_back(std::move(r));
    }
    return s;
}

ModelEndpoint endpoint_from_json(const json& j) {
    ModelEndpoint e;
    e.id = j.at("id").get<std::string>();
    auto kind = j.value("kind", std::string("stub"));
    if (kind == "http") e.kind = BackendKind::http;
    else if (kind == "stub") e.kind = BackendKind::stub;
    else throw std::invalid_argument("endpoint " + e.id + ": unknown kind '" + kind + "'");
    e.base_url = j.value("base_url", std::string{});
    e.model = j.value("model", e.id);
    e.auth_env = j.value("auth_env", std::string{});
    if (j.contains("temperature")) e.defaults.temperature = j.at("temperature").get<double>();
    if (j.contains("top_p")) e.defaults.top_p = j.at("top_p").get<double>();
    if (j.contains("max_tokens")) e.defaults.max_tokens = j.at("max_tokens").get<int>();
    e.timeout_s = j.value("timeout_s", e.timeout_s);
    e.max_attempts = j.value("max_attempts", e.max_attempts);
    e.retry_base_ms = j.value("retry_base_ms", e.retry_base_ms);
    e.max_in_flight = j.value("max_in_flight", e.max_in_flight);
    if (j.contains("stub")) e.stub = stub_from_json(j.at("stub"));
    validate_endpoint(e);
    return e;
}

}  // namespace

PoolConfig PoolConfig::from_json(const json& j) {
    PoolConfig p;
    for (const auto& ej : j.at("endpoints")) p.endpoints.push_back(endpoint_from_json(ej));
    std::set<std::string> ids;
    for (const auto& e : p.endpoints) {
        if (!ids.insert(e.id).second) throw std::invalid_argument("duplicate endpoint id '" + e.id + "'");
    }
    p.generators = j.value("generators", std::vector<std::string>{});
    if (p.generators.empty()) {
        for (const auto& e : p.endpoints) p.generators.push_back(e.id);
    }
    for (const auto& g : p.generators) {
        if (!ids.contains(g)) throw std::invalid_argument("generator '" + g + "' is not a pool endpoint");
    }
    if (auto it = j.find("roles"); it != j.end()) {
        for (const auto& [name, id] : it->items()) {
            auto sid = id.get<std::string>();
            if (!ids.contains(sid)) throw std::invalid_argument("role " + name + " names unknown endpoint '" + sid + "'");
            p.roles[parse_role(name)] = sid;
        }
    }
    if (!p.roles.contains(Role::plugin) && !p.generators.empty()) p.roles[Role::plugin] = p.generators.front();
    if (!p.roles.contains(Role::comparator) && p.roles.contains(Role::judge)) {
        p.roles[Role::comparator] = p.roles[Role::judge];
    }
    return p;
}

PoolConfig PoolConfig::load(const std::filesystem::path& path) { return from_json(io::read_json(path)); }

// ---------------------------------------------------------------------------
// Gateway

struct Gateway::Slots {
    explicit Slots(int n) : sem(n) {}
    std::counting_semaphore<1024> sem;
};

Gateway::Gateway(PoolConfig config, std::shared_ptr<Transport> transport)
    : config_(std::make_shared<const PoolConfig>(std::move(config))),
      transport_(std::move(transport)),
      slots_(std::make_shared<std::map<std::string, std::unique_ptr<Slots>, std::less<>>>()) {
    for (const auto& e : config_->endpoints) {
        validate_endpoint(e);
        (*slots_)[e.id] = std::make_unique<Slots>(std::min(e.max_in_flight, 1024));
    }
}

const ModelEndpoint& Gateway::endpoint(std::string_view id) const {
    for (const auto& e : config_->endpoints) {
        if (e.id == id) return e;
    }
    throw std::invalid_argument("unknown endpoint '" + std::string(id) + "'");
}

const ModelEndpoint& Gateway::endpoint_for(Role role) const {
    auto it = config_->roles.find(role);
    if (it == config_->roles.end()) {
        throw std::invalid_argument("pool config assigns no endpoint to role " + std::string(to_string(role)));
    }
    return endpoint(it->second);
}

CandidateResponse Gateway::complete(std::string_view endpoint_id, const std::vector<ChatMessage>& messages,
                                    const SamplingParams& params, std::string_view purpose) const {
    const auto& e = endpoint(endpoint_id);
    auto& slot = *slots_->find(endpoint_id)->second;
    slot.sem.acquire();
    struct Release {
        Slots& s;
        ~Release() { s.sem.release(); }
    } release{slot};
    return gateway::complete(e, messages, params, *transport_, purpose);
}

CandidateResponse Gateway::complete(Role role, const std::vector<ChatMessage>& messages,
                                    const SamplingParams& params, std::string_view purpose) const {
    return complete(endpoint_for(role).id, messages, params, purpose);
}

std::vector<CandidateResponse> Gateway::generate_candidates(const std::vector<ChatMessage>& messages,
                                                            const SamplingParams& params) const {
    if (config_->generators.empty()) throw std::invalid_argument("generate_candidates: empty pool");
    std::vector<CandidateResponse> out;
    out.reserve(config_->generators.size());
    for (const auto& id : config_->generators) out.push_back(complete(id, messages, params, "respond"));
    return out;
}

void to_json(json& j, const CandidateResponse& c) {
    j = json{{"endpoint_id", c.endpoint_id},
             {"text", c.text},
             {"finish", to_string(c.finish)},
             {"latency_ms", c.latency_ms}};
    if (c.prompt_tokens) j["prompt_tokens"] = *c.prompt_tokens;
    if (c.completion_tokens) j["completion_tokens"] = *c.completion_tokens;
    if (!c.error_cause.empty()) j["error_cause"] = c.error_cause;
}

void from_json(const json& j, CandidateResponse& c) {
    c.endpoint_id = j.at("endpoint_id").get<std::string>();
    c.text = j.value("text", std::string{});
    c.finish = parse_finish_reason(j.at("finish").get<std::string>());
    c.latency_ms = j.value("latency_ms", 0.0);
    c.prompt_tokens.reset();
    c.completion_tokens.reset();
    if (j.contains("prompt_tokens")) c.prompt_tokens = j.at("prompt_tokens").get<int>();
    if (j.contains("completion_tokens")) c.completion_tokens = j.at("completion_tokens").get<int>();
    c.error_cause = j.value("error_cause", std::string{});
}

}  // namespace qasynth::gateway
