// SPDX-License-Identifier: Apache-2.0
//
// Response judgment: model scoring on a 1-5 scale, rule-based deductions for
// format and language violations, listwise comparison among perfect
// candidates, and admission of exactly-5 responses into the dataset.

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qasynth/gateway.hpp"
#include "qasynth/harness.hpp"
#include "qasynth/taxonomy.hpp"

namespace qasynth::judge {

enum class Scene { inline_chat, chat_view, both };
std::string_view to_string(Scene s) noexcept;

struct DeductionRule {
    Scene scene = Scene::both;
    std::string item_id;
    int points = 0;
    std::string detector_id;
    std::string description;

    bool applies_to(TriggerMethod trigger) const noexcept;
};

/// The seven deduction rules, in table order.
const std::vector<DeductionRule>& deduction_rules();

/// Audit export of the rule table.
json deduction_table_json();

struct DetectorConfig {
    double cjk_threshold = 0.3;
    std::size_t min_prose_chars = 20;
    double similarity_low = 0.5;
    double similarity_high = 0.999;
};

/// What the detectors need to know about the query a response answers.
struct JudgeContext {
    std::string query_id;
    int round = 1;
    TriggerMethod scene = TriggerMethod::chat_view;
    Intent intent = Intent::general_qa;
    std::string selected_code;
    Locale required_locale = Locale::en;
    std::vector<std::string> sentinels;
    std::vector<ChatMessage> prompt;  // final-turn prompt, full history included
};

/// Required answer locale: the latest explicit directive in the user turns,
/// else the system locale.
Locale required_locale(const std::vector<ChatMessage>& prompt, Locale system_locale);

JudgeContext context_for(const harness::DialogueSession& session);

struct FiredDeduction {
    std::string item_id;
    int points = 0;

    friend bool operator==(const FiredDeduction&, const FiredDeduction&) = default;
};

/// Deterministic detectors of the rule table; only rules whose scene matches
/// the context fire. Requires a non-error candidate.
std::vector<FiredDeduction> apply_deductions(const gateway::CandidateResponse& candidate,
                                             const JudgeContext& context, const DetectorConfig& config = {});

struct BaseScore {
    int score = 1;
    std::string rationale;
};

/// Rationale followed by "Score: N". nullopt unless N is in 1..5.
std::optional<BaseScore> parse_score(std::string_view reply);

std::vector<ChatMessage> scoring_prompt(const JudgeContext& context, const std::string& response);

/// Judge-model score. One repair retry on unusable replies, then (1,
/// "unparseable"). nullopt when the judge endpoint fails.
std::optional<BaseScore> score_response(const JudgeContext& context, const std::string& response,
                                        const gateway::Gateway& gw);

int final_score(int base, const std::vector<FiredDeduction>& fired);

struct ScoreCard {
    std::string query_id;
    int round = 1;
    std::size_t candidate_index = 0;
    std::string endpoint_id;
    int base_score = 1;
    std::string rationale;
    std::vector<FiredDeduction> deductions;
    int final_score = 0;
};

/// Best-first candidate numbers (1-based) grouped by ties, or nullopt.
std::optional<std::vector<std::vector<int>>> parse_ranking(std::string_view reply, int n);

std::vector<ChatMessage> comparison_prompt(const JudgeContext& context, const std::vector<std::string>& responses);

/// Index (into `responses`, given in pool order) of the best response. Ties,
/// unparseable rankings, and endpoint errors resolve to the earliest.
std::size_t compare_responses(const JudgeContext& context, const std::vector<std::string>& responses,
                              const gateway::Gateway& gw);

struct Requeue {
    std::string reason;
};

/// Admits the single 5-point candidate, or the comparison winner among
/// several; requeues when none scored 5.
std::variant<TrainingExample, Requeue> select_training_example(
    const harness::DialogueSession& session, const JudgeContext& context,
    const std::vector<gateway::CandidateResponse>& candidates, const std::vector<ScoreCard>& cards,
    const gateway::Gateway& gw);

struct Judgment {
    std::vector<gateway::CandidateResponse> candidates;
    std::vector<ScoreCard> cards;
    std::variant<TrainingExample, Requeue> outcome;
};

/// Candidates from the generator pool, scored, deducted, and selected.
Judgment judge_session(const harness::DialogueSession& session, const gateway::Gateway& gw,
                       const DetectorConfig& config = {});

void to_json(json& j, const FiredDeduction& v);
void from_json(const json& j, FiredDeduction& v);
void to_json(json& j, const ScoreCard& v);
void from_json(const json& j, ScoreCard& v);

}  // namespace qasynth::judge
