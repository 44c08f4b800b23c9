// SPDX-License-Identifier: Apache-2.0

#include "qasynth/judge.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <spdlog/spdlog.h>

#include "qasynth/text.hpp"

namespace qasynth::judge {

std::string_view to_string(Scene s) noexcept {
    switch (s) {
        case Scene::inline_chat: return "inline_chat";
        case Scene::chat_view: return "chat_view";
        case Scene::both: return "both";
    }
    return "both";
}

bool DeductionRule::applies_to(TriggerMethod trigger) const noexcept {
    switch (scene) {
        case Scene::inline_chat: return trigger == TriggerMethod::inline_chat;
        case Scene::chat_view: return trigger == TriggerMethod::chat_view;
        case Scene::both: return true;
    }
    return false;
}

const std::vector<DeductionRule>& deduction_rules() {
    static const std::vector<DeductionRule> rules{
        {Scene::inline_chat, "text_before_code", 1, "a", "prose precedes the first code fence"},
        {Scene::chat_view, "missing_text_description", 1, "b", "no explanatory prose around the code"},
        {Scene::both, "locale_mismatch", 1, "c", "answer language differs from the requested or system language"},
        {Scene::both, "incomplete_code_fence", 1, "d", "unbalanced code fence delimiters"},
        {Scene::both, "unrequested_code_change", 2, "e", "selected code altered although no edit was asked for"},
        {Scene::both, "prompt_leak", 2, "f", "hidden prompt instructions repeated in the answer"},
        {Scene::both, "truncated_response", 5, "g", "answer cut off mid-word or mid-code"},
    };
    return rules;
}

json deduction_table_json() {
    json rows = json::array();
    for (const auto& r : deduction_rules()) {
        rows.push_back({{"scene", to_string(r.scene)},
                        {"item_id", r.item_id},
                        {"points", r.points},
                        {"detector_id", r.detector_id},
                        {"description", r.description}});
    }
    return rows;
}

Locale required_locale(const std::vector<ChatMessage>& prompt, Locale system_locale) {
    Locale out = system_locale;
    for (const auto& m : prompt) {
        if (m.role != "user") continue;
        if (auto l = text::requested_locale(m.content)) out = *l;
    }
    return out;
}

JudgeContext context_for(const harness::DialogueSession& session) {
    if (session.turns.empty()) throw harness::SessionError("session " + session.config.id + " has no turns");
    const auto& last = session.turns.back();
    JudgeContext ctx;
    ctx.query_id = session.config.id;
    ctx.round = session.config.round;
    ctx.scene = session.config.labels.trigger_method;
    ctx.intent = session.config.labels.intent;
    ctx.selected_code = last.selected_code;
    ctx.required_locale = required_locale(last.prompt, session.config.labels.system_locale);
    ctx.sentinels = harness::prompt_sentinels();
    ctx.prompt = last.prompt;
    return ctx;
}

namespace {

bool has_letters(std::string_view s) {
    for (char32_t c : text::decode_utf8(s)) {
        if (text::is_cjk(c) || (c < 0x80 && std::isalpha(static_cast<int>(c)))) return true;
    }
    return false;
}

bool ends_mid_word(std::string_view response) {
    const char32_t c = text::last_visible_codepoint(response);
    if (c == 0) return false;
    if (c < 0x80) return std::isalnum(static_cast<int>(c)) != 0;
    return text::is_cjk(c);
}

bool fires(const std::string& detector, const gateway::CandidateResponse& candidate, const JudgeContext& ctx,
           const text::FencedDocument& doc, const DetectorConfig& cfg) {
    const std::string& r = candidate.text;
    if (detector == "a") {
        return doc.has_fence() && !text::trim(doc.prose_before_first_fence).empty();
    }
    if (detector == "b") {
        return text::codepoint_count(text::trim(doc.prose)) < cfg.min_prose_chars;
    }
    if (detector == "c") {
        if (!has_letters(doc.prose)) return false;
        return text::detect_locale(doc.prose, cfg.cjk_threshold) != ctx.required_locale;
    }
    if (detector == "d") {
        return doc.fence_delimiters % 2 == 1;
    }
    if (detector == "e") {
        if (ctx.intent != Intent::code_explanation && ctx.intent != Intent::comment_generation) return false;
        const auto original = text::normalized_code_tokens(ctx.selected_code);
        if (original.empty()) return false;
        double best = 0.0;
        for (const auto& block : doc.code_blocks) {
            best = std::max(best, text::token_similarity(original, text::normalized_code_tokens(block.body)));
        }
        return best >= cfg.similarity_low && best <= cfg.similarity_high;
    }
    if (detector == "f") {
        return std::any_of(ctx.sentinels.begin(), ctx.sentinels.end(),
                           [&](const std::string& s) { return !s.empty() && r.find(s) != std::string::npos; });
    }
    if (detector == "g") {
        if (candidate.finish == gateway::FinishReason::length_capped) return true;
        // Cut off inside code. A dangling fence with nothing after it is a
        // markdown error (d), not a truncation.
        if (!doc.code_blocks.empty() && !doc.code_blocks.back().closed &&
            !text::trim(doc.code_blocks.back().body).empty()) {
            return true;
        }
        return ends_mid_word(r);
    }
    return false;
}

}  // namespace

std::vector<FiredDeduction> apply_deductions(const gateway::CandidateResponse& candidate, const JudgeContext& context,
                                             const DetectorConfig& config) {
    if (!candidate.ok()) throw std::invalid_argument("apply_deductions: error candidate");
    const auto doc = text::parse_fences(candidate.text);
    std::vector<FiredDeduction> out;
    for (const auto& rule : deduction_rules()) {
        if (!rule.applies_to(context.scene)) continue;
        if (fires(rule.detector_id, candidate, context, doc, config)) out.push_back({rule.item_id, rule.points});
    }
    return out;
}

std::optional<BaseScore> parse_score(std::string_view reply) {
    static const std::regex re(R"([Ss]core\s*(?::|：)\s*(-?\d+))");
    const std::string s(reply);
    std::smatch last;
    bool found = false;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
        last = *it;
        found = true;
    }
    if (!found) return std::nullopt;
    int n = 0;
    try {
        n = std::stoi(last[1].str());
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (n < 1 || n > 5) return std::nullopt;
    std::string rationale = text::trim(std::string_view(s).substr(0, static_cast<std::size_t>(last.position(0))));
    if (rationale.empty()) return std::nullopt;
    return BaseScore{n, std::move(rationale)};
}

namespace {

std::string conversation_block(const JudgeContext& ctx) {
    std::string out;
    for (const auto& m : ctx.prompt) {
        if (m.role == "system") continue;
        out += "[" + m.role + "]\n" + m.content + "\n\n";
    }
    return out;
}

std::string context_block(const JudgeContext& ctx) {
    std::string out = "Surface: " + std::string(to_string(ctx.scene)) + "\n";
    out += "Intent: " + std::string(to_string(ctx.intent)) + "\n";
    out += "Expected answer language: " + std::string(to_string(ctx.required_locale)) + "\n";
    if (!ctx.selected_code.empty()) out += "Selected code:\n```\n" + ctx.selected_code + "```\n";
    return out;
}

}  // namespace

std::vector<ChatMessage> scoring_prompt(const JudgeContext& context, const std::string& response) {
    std::string system =
        "You review answers given by an IDE coding assistant. Judge how well the answer follows the "
        "developer's instruction and how correct, complete and useful it is. Write your reasoning first. "
        "End with a final line of the form 'Score: N' where N is an integer from 1 (unusable) to 5 (perfect).";
    std::string user = context_block(context) + "\n# Conversation\n" + conversation_block(context) +
                       "# Answer to review\n" + response + "\n";
    return {{"system", std::move(system)}, {"user", std::move(user)}};
}

std::optional<BaseScore> score_response(const JudgeContext& context, const std::string& response,
                                        const gateway::Gateway& gw) {
    auto messages = scoring_prompt(context, response);
    auto reply = gw.complete(gateway::Role::judge, messages, {}, "score");
    if (!reply.ok()) return std::nullopt;
    if (auto s = parse_score(reply.text)) return s;

    messages.push_back({"assistant", reply.text});
    messages.push_back({"user",
                        "That reply could not be read. Give your reasoning, then a last line 'Score: N' "
                        "with N between 1 and 5."});
    reply = gw.complete(gateway::Role::judge, messages, {}, "score");
    if (!reply.ok()) return std::nullopt;
    if (auto s = parse_score(reply.text)) return s;
    spdlog::debug("judge reply for {} unparseable after repair", context.query_id);
    return BaseScore{1, "unparseable"};
}

int final_score(int base, const std::vector<FiredDeduction>& fired) {
    int total = 0;
    for (const auto& f : fired) total += f.points;
    return std::clamp(base - total, 0, 5);
}

std::optional<std::vector<std::vector<int>>> parse_ranking(std::string_view reply, int n) {
    std::vector<std::vector<int>> groups;
    auto valid = [&](const std::vector<std::vector<int>>& gs) {
        std::set<int> seen;
        for (const auto& g : gs) {
            if (g.empty()) return false;
            for (int v : g) {
                if (v < 1 || v > n || !seen.insert(v).second) return false;
            }
        }
        return !seen.empty();
    };

    // JSON form: {"ranking": [2, [1, 3]]}
    const auto open = reply.find('{');
    const auto close = reply.rfind('}');
    if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
        auto j = json::parse(reply.substr(open, close - open + 1), nullptr, false);
        if (!j.is_discarded() && j.is_object() && j.contains("ranking") && j["ranking"].is_array()) {
            for (const auto& e : j["ranking"]) {
                if (e.is_number_integer()) {
                    groups.push_back({e.get<int>()});
                } else if (e.is_array()) {
                    std::vector<int> g;
                    for (const auto& x : e) {
                        if (!x.is_number_integer()) return std::nullopt;
                        g.push_back(x.get<int>());
                    }
                    groups.push_back(std::move(g));
                } else {
                    return std::nullopt;
                }
            }
            if (valid(groups)) return groups;
            return std::nullopt;
        }
    }

    // Text form: "Ranking: 2 > 1 = 3"
    static const std::regex line_re(R"([Rr]anking\s*(?::|：)\s*([0-9\s>=,]+))");
    const std::string s(reply);
    std::smatch m;
    std::string last;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), line_re); it != std::sregex_iterator(); ++it) {
        last = (*it)[1].str();
    }
    if (last.empty()) return std::nullopt;
    groups.clear();
    std::vector<int> current;
    std::string num;
    auto flush_num = [&] {
        if (!num.empty()) current.push_back(std::stoi(num));
        num.clear();
    };
    for (char c : last) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            num += c;
        } else if (c == '>' || c == ',') {
            flush_num();
            if (current.empty()) return std::nullopt;
            groups.push_back(std::move(current));
            current.clear();
        } else if (c == '=') {
            flush_num();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            return std::nullopt;
        }
    }
    flush_num();
    if (!current.empty()) groups.push_back(std::move(current));
    if (!valid(groups)) return std::nullopt;
    return groups;
}

std::vector<ChatMessage> comparison_prompt(const JudgeContext& context, const std::vector<std::string>& responses) {
    std::string system =
        "You compare several answers an IDE coding assistant gave to the same request. All of them were judged "
        "acceptable; rank them from best to worst by instruction following, correctness and clarity. Reply "
        "with a final line 'Ranking: a > b > c' using the answer numbers, with '=' between answers of equal "
        "quality.";
    std::string user = context_block(context) + "\n# Conversation\n" + conversation_block(context);
    for (std::size_t i = 0; i < responses.size(); ++i) {
        user += "# Answer " + std::to_string(i + 1) + "\n" + responses[i] + "\n\n";
    }
    return {{"system", std::move(system)}, {"user", std::move(user)}};
}

std::size_t compare_responses(const JudgeContext& context, const std::vector<std::string>& responses,
                              const gateway::Gateway& gw) {
    if (responses.size() < 2) return 0;
    auto reply = gw.complete(gateway::Role::comparator, comparison_prompt(context, responses), {}, "compare");
    if (!reply.ok()) {
        spdlog::debug("comparison for {} failed: {}", context.query_id, reply.error_cause);
        return 0;
    }
    auto ranking = parse_ranking(reply.text, static_cast<int>(responses.size()));
    if (!ranking) return 0;
    const auto& top = ranking->front();
    return static_cast<std::size_t>(*std::min_element(top.begin(), top.end()) - 1);
}

std::variant<TrainingExample, Requeue> select_training_example(
    const harness::DialogueSession& session, const JudgeContext& context,
    const std::vector<gateway::CandidateResponse>& candidates, const std::vector<ScoreCard>& cards,
    const gateway::Gateway& gw) {
    std::vector<const ScoreCard*> fives;
    for (const auto& c : cards) {
        if (c.final_score == 5) fives.push_back(&c);
    }
    if (fives.empty()) return Requeue{"no 5-point candidate"};

    const ScoreCard* winner = fives.front();
    if (fives.size() > 1) {
        std::vector<std::string> texts;
        for (const auto* c : fives) texts.push_back(candidates.at(c->candidate_index).text);
        winner = fives.at(compare_responses(context, texts, gw));
    }
    const auto& cand = candidates.at(winner->candidate_index);

    TrainingExample ex;
    ex.query_id = context.query_id;
    ex.configuration = session.config;
    ex.transcript = context.prompt;
    ex.response = cand.text;
    ex.endpoint_id = cand.endpoint_id;
    ex.final_score = winner->final_score;
    ex.rationale = winner->rationale;
    ex.provenance.production_round = session.config.round;
    ex.provenance.trace_stored_seq = session.turns.empty() ? 0 : session.turns.back().events.stored;
    return ex;
}

Judgment judge_session(const harness::DialogueSession& session, const gateway::Gateway& gw,
                       const DetectorConfig& config) {
    Judgment out{{}, {}, Requeue{}};
    const auto ctx = context_for(session);
    out.candidates = gw.generate_candidates(ctx.prompt);
    for (std::size_t i = 0; i < out.candidates.size(); ++i) {
        const auto& cand = out.candidates[i];
        if (!cand.ok()) continue;
        auto base = score_response(ctx, cand.text, gw);
        if (!base) {
            out.outcome = Requeue{"judge unavailable"};
            return out;
        }
        ScoreCard card;
        card.query_id = ctx.query_id;
        card.round = ctx.round;
        card.candidate_index = i;
        card.endpoint_id = cand.endpoint_id;
        card.base_score = base->score;
        card.rationale = base->rationale;
        card.deductions = apply_deductions(cand, ctx, config);
        card.final_score = final_score(card.base_score, card.deductions);
        out.cards.push_back(std::move(card));
    }
    if (out.cards.empty()) {
        out.outcome = Requeue{"no complete candidate"};
        return out;
    }
    out.outcome = select_training_example(session, ctx, out.candidates, out.cards, gw);
    return out;
}

void to_json(json& j, const FiredDeduction& v) { j = json{{"item_id", v.item_id}, {"points", v.points}}; }

void from_json(const json& j, FiredDeduction& v) {
    v.item_id = j.at("item_id").get<std::string>();
    v.points = j.at("points").get<int>();
}

void to_json(json& j, const ScoreCard& v) {
    j = json{{"query_id", v.query_id},
             {"round", v.round},
             {"candidate_index", v.candidate_index},
             {"endpoint_id", v.endpoint_id},
             {"base_score", v.base_score},
             {"rationale", v.rationale},
             {"deductions", v.deductions},
             {"final_score", v.final_score}};
}

void from_json(const json& j, ScoreCard& v) {
    v.query_id = j.at("query_id").get<std::string>();
    v.round = j.value("round", 1);
    v.candidate_index = j.at("candidate_index").get<std::size_t>();
    v.endpoint_id = j.at("endpoint_id").get<std::string>();
    v.base_score = j.at("base_score").get<int>();
    v.rationale = j.value("rationale", std::string{});
    v.deductions = j.value("deductions", std::vector<FiredDeduction>{});
    v.final_score = j.at("final_score").get<int>();
}

}  // namespace qasynth::judge
