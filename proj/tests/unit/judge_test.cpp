// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "qasynth/jsonl.hpp"
#include "qasynth/judge.hpp"
#include "qasynth/text.hpp"
#include "test_support.hpp"

using namespace qasynth;
using namespace qasynth::judge;

namespace {

JudgeContext context(TriggerMethod scene, Intent intent = Intent::general_qa, Locale locale = Locale::en) {
    JudgeContext c;
    c.query_id = "q";
    c.scene = scene;
    c.intent = intent;
    c.required_locale = locale;
    c.sentinels = harness::prompt_sentinels();
    return c;
}

gateway::CandidateResponse candidate(std::string text, gateway::FinishReason f = gateway::FinishReason::complete) {
    gateway::CandidateResponse c;
    c.endpoint_id = "gen";
    c.text = std::move(text);
    c.finish = f;
    return c;
}

int points(const std::vector<FiredDeduction>& fired) {
    int p = 0;
    for (const auto& f : fired) p += f.points;
    return p;
}

gateway::Gateway agent(gateway::StubConfig stub, std::vector<std::string> generators = {}) {
    gateway::PoolConfig pool;
    gateway::ModelEndpoint e;
    e.id = "agent";
    e.stub = std::move(stub);
    pool.endpoints.push_back(e);
    pool.generators = {"agent"};
    for (const auto& g : generators) {
        gateway::ModelEndpoint ge;
        ge.id = g;
        ge.stub.default_reply = "This answer from " + g + " explains the code in enough words.";
        pool.endpoints.push_back(ge);
    }
    if (!generators.empty()) pool.generators = generators;
    pool.roles[gateway::Role::judge] = "agent";
    pool.roles[gateway::Role::comparator] = "agent";
    pool.roles[gateway::Role::plugin] = "agent";
    return gateway::Gateway(pool);
}

harness::DialogueSession session_for(const std::string& query) {
    harness::DialogueSession s;
    s.config.id = "q";
    s.config.labels.trigger_method = TriggerMethod::chat_view;
    s.config.labels.intent = Intent::general_qa;
    s.config.labels.system_locale = Locale::en;
    harness::TraceRecord t;
    t.query = query;
    t.prompt = {{"system", "You are the assistant in the chat view panel."}, {"user", query}};
    t.events = {1, 2, 3, 4};
    s.turns.push_back(t);
    return s;
}

ScoreCard card(std::size_t index, int final) {
    ScoreCard c;
    c.query_id = "q";
    c.candidate_index = index;
    c.endpoint_id = "gen-" + std::to_string(index);
    c.base_score = final;
    c.final_score = final;
    c.rationale = "r" + std::to_string(index);
    return c;
}

}  // namespace

TEST(DeductionTable, RowsInOrder) {
    const auto& rules = deduction_rules();
    ASSERT_EQ(rules.size(), 7u);
    std::vector<int> pts;
    for (const auto& r : rules) pts.push_back(r.points);
    EXPECT_EQ(pts, (std::vector<int>{1, 1, 1, 1, 2, 2, 5}));
    EXPECT_EQ(rules[0].scene, Scene::inline_chat);
    EXPECT_EQ(rules[1].scene, Scene::chat_view);
    for (std::size_t i = 2; i < 7; ++i) EXPECT_EQ(rules[i].scene, Scene::both);
    EXPECT_TRUE(rules[0].applies_to(TriggerMethod::inline_chat));
    EXPECT_FALSE(rules[0].applies_to(TriggerMethod::chat_view));
    EXPECT_EQ(deduction_table_json().size(), 7u);
}

TEST(Deductions, FixtureCorpus) {
    const auto cases = io::read_json(testkit::fixtures() / "deductions" / "cases.json");
    ASSERT_EQ(cases.size(), 14u);
    for (const auto& c : cases) {
        const auto& cj = c.at("context");
        auto ctx = context(parse_trigger_method(cj.at("scene").get<std::string>()),
                           parse_intent(cj.at("intent").get<std::string>()),
                           parse_locale(cj.at("required_locale").get<std::string>()));
        ctx.selected_code = cj.at("selected_code").get<std::string>();
        auto fired = apply_deductions(
            candidate(c.at("response").get<std::string>(), gateway::parse_finish_reason(c.at("finish").get<std::string>())),
            ctx);
        std::vector<std::string> items;
        for (const auto& f : fired) items.push_back(f.item_id);
        EXPECT_EQ(items, c.at("expected_items").get<std::vector<std::string>>()) << c.at("name");
        EXPECT_EQ(points(fired), c.at("expected_points").get<int>()) << c.at("name");
    }
}

TEST(Deductions, SimilarityBandOfFixtures) {
    // Independent check that the (e) fixtures sit on the intended sides of
    // the similarity band.
    const std::string original = "int add(int a, int b) {\n    return a + b;\n}\n";
    const auto a = text::normalized_code_tokens(original);
    const auto altered = text::normalized_code_tokens("int add(int a, int b) {\n    return a - b;\n}\n");
    EXPECT_DOUBLE_EQ(text::token_similarity(a, altered), 20.0 / 22.0);
    const auto commented = text::normalized_code_tokens(
        "// Adds two integers.\nint add(int a, int b) {\n    return a + b;  // plain sum\n}\n");
    EXPECT_DOUBLE_EQ(text::token_similarity(a, commented), 1.0);
}

TEST(Deductions, OpenFenceTruncationSinksScore) {
    auto fired = apply_deductions(candidate("Here is the fix.\n```python\ndef f(x):\n    return x +"),
                                  context(TriggerMethod::chat_view));
    bool g = false;
    for (const auto& f : fired) g = g || f.item_id == "truncated_response";
    EXPECT_TRUE(g);
    EXPECT_LE(final_score(5, fired), 1);
}

TEST(Deductions, LengthCapped) {
    auto fired = apply_deductions(candidate("A complete sentence that got capped anyway.", gateway::FinishReason::length_capped),
                                  context(TriggerMethod::chat_view));
    ASSERT_EQ(fired.size(), 1u);
    EXPECT_EQ(fired[0].points, 5);
}

TEST(Deductions, SceneFiltering) {
    // Code-only reply: fine inline, missing description in the chat view.
    const std::string code_only = "```go\nx := 1\n```";
    EXPECT_TRUE(apply_deductions(candidate(code_only), context(TriggerMethod::inline_chat)).empty());
    EXPECT_EQ(points(apply_deductions(candidate(code_only), context(TriggerMethod::chat_view))), 1);
}

TEST(Deductions, Deterministic) {
    auto ctx = context(TriggerMethod::inline_chat, Intent::general_qa, Locale::zh);
    auto c = candidate("Intro text\n```\ncode");
    EXPECT_EQ(apply_deductions(c, ctx), apply_deductions(c, ctx));
}

TEST(RequiredLocale, LatestDirectiveWins) {
    std::vector<ChatMessage> p{{"system", "s"}, {"user", "Explain. 请用中文回答。"}, {"assistant", "好"},
                               {"user", "Now Please answer in English."}};
    EXPECT_EQ(required_locale(p, Locale::zh), Locale::en);
    EXPECT_EQ(required_locale({{"user", "Explain."}}, Locale::zh), Locale::zh);
}

TEST(FinalScore, Clamped) {
    EXPECT_EQ(final_score(5, {}), 5);
    EXPECT_EQ(final_score(5, {{"a", 1}}), 4);
    EXPECT_EQ(final_score(4, {{"g", 5}, {"e", 2}}), 0);
}

TEST(ParseScore, Forms) {
    auto s = parse_score("The answer is correct and complete.\nScore: 5");
    ASSERT_TRUE(s);
    EXPECT_EQ(s->score, 5);
    EXPECT_EQ(s->rationale, "The answer is correct and complete.");
    EXPECT_EQ(parse_score("Mostly fine.\nscore：4")->score, 4);
    EXPECT_FALSE(parse_score("Score: 7"));
    EXPECT_FALSE(parse_score("Great.\nScore: 0"));
    EXPECT_FALSE(parse_score("Score: 5"));  // no rationale before it
    EXPECT_FALSE(parse_score("no score here"));
    EXPECT_EQ(parse_score("Said Score: 2 at first, but\nScore: 3")->score, 3);
}

TEST(ScoreResponse, StubParse) {
    gateway::StubConfig stub;
    stub.by_purpose["score"] = "Clear and correct.\nScore: 5";
    auto s = score_response(context(TriggerMethod::chat_view), "resp", agent(stub));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->score, 5);
}

TEST(ScoreResponse, OutOfRangeRetriedThenUnparseable) {
    gateway::StubConfig stub;
    stub.by_purpose["score"] = "Score: 7";
    auto s = score_response(context(TriggerMethod::chat_view), "resp", agent(stub));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->score, 1);
    EXPECT_EQ(s->rationale, "unparseable");
}

TEST(ScoreResponse, GatewayErrorIsNullopt) {
    gateway::StubConfig stub;
    stub.fail_all = true;
    EXPECT_FALSE(score_response(context(TriggerMethod::chat_view), "resp", agent(stub)));
}

TEST(Ranking, Parse) {
    auto r = parse_ranking("Ranking: 2 > 1 = 3", 3);
    ASSERT_TRUE(r);
    EXPECT_EQ(*r, (std::vector<std::vector<int>>{{2}, {1, 3}}));
    r = parse_ranking(R"({"ranking": [3, [1, 2]]})", 3);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->front(), (std::vector<int>{3}));
    EXPECT_FALSE(parse_ranking("Ranking: 4 > 1", 3));
    EXPECT_FALSE(parse_ranking("Ranking: 1 > 1", 2));
    EXPECT_FALSE(parse_ranking("I like them all", 2));
}

TEST(Ranking, StubRanksSecondFirst) {
    gateway::StubConfig stub;
    stub.by_purpose["compare"] = "Second is tighter.\nRanking: 2 > 1";
    EXPECT_EQ(compare_responses(context(TriggerMethod::chat_view), {"one", "two"}, agent(stub)), 1u);
}

TEST(Ranking, FallbacksToEarliest) {
    gateway::StubConfig stub;
    stub.by_purpose["compare"] = "Both are fine.";
    EXPECT_EQ(compare_responses(context(TriggerMethod::chat_view), {"one", "two"}, agent(stub)), 0u);
    stub.by_purpose["compare"] = "Ranking: 2 = 1";
    EXPECT_EQ(compare_responses(context(TriggerMethod::chat_view), {"one", "two"}, agent(stub)), 0u);
    gateway::StubConfig down;
    down.fail_all = true;
    EXPECT_EQ(compare_responses(context(TriggerMethod::chat_view), {"one", "two"}, agent(down)), 0u);
}

TEST(Select, UniqueFiveAdmitted) {
    gateway::StubConfig stub;
    stub.by_purpose["compare"] = "Ranking: 2 > 1";
    auto gw = agent(stub);
    auto s = session_for("What is this?");
    auto ctx = context_for(s);
    std::vector<gateway::CandidateResponse> cands{candidate("a"), candidate("b"), candidate("c")};
    auto out = select_training_example(s, ctx, cands, {card(0, 5), card(1, 3), card(2, 4)}, gw);
    ASSERT_TRUE(std::holds_alternative<TrainingExample>(out));
    EXPECT_EQ(std::get<TrainingExample>(out).response, "a");
    EXPECT_EQ(std::get<TrainingExample>(out).final_score, 5);
}

TEST(Select, NoFiveRequeues) {
    auto gw = agent({});
    auto s = session_for("What is this?");
    std::vector<gateway::CandidateResponse> cands{candidate("a"), candidate("b"), candidate("c")};
    auto out = select_training_example(s, context_for(s), cands, {card(0, 4), card(1, 4), card(2, 3)}, gw);
    ASSERT_TRUE(std::holds_alternative<Requeue>(out));
    EXPECT_EQ(std::get<Requeue>(out).reason, "no 5-point candidate");
}

TEST(Select, SeveralFivesCompared) {
    gateway::StubConfig stub;
    stub.by_purpose["compare"] = "Ranking: 2 > 1";
    auto gw = agent(stub);
    auto s = session_for("What is this?");
    std::vector<gateway::CandidateResponse> cands{candidate("a"), candidate("b"), candidate("c")};
    auto out = select_training_example(s, context_for(s), cands, {card(0, 5), card(1, 5), card(2, 2)}, gw);
    ASSERT_TRUE(std::holds_alternative<TrainingExample>(out));
    EXPECT_EQ(std::get<TrainingExample>(out).response, "b");
    EXPECT_EQ(std::get<TrainingExample>(out).rationale, "r1");
}

TEST(JudgeSession, ErrorCandidatesNeverScored) {
    gateway::StubConfig stub;
    stub.by_purpose["score"] = "Fine.\nScore: 4";
    auto pool_gw = agent(stub, {"g1", "g2"});
    auto pool = pool_gw.config();
    pool.endpoints[2].stub.fail_all = true;
    gateway::Gateway gw(pool);
    auto j = judge_session(session_for("What does this do?"), gw);
    ASSERT_EQ(j.candidates.size(), 2u);
    ASSERT_EQ(j.cards.size(), 1u);
    EXPECT_EQ(j.cards[0].candidate_index, 0u);
    EXPECT_TRUE(std::holds_alternative<Requeue>(j.outcome));
}

TEST(JudgeSession, JudgeDownRequeues) {
    auto pool = agent({}, {"g1"}).config();
    pool.endpoints[0].stub.fail_all = true;
    auto j = judge_session(session_for("What does this do?"), gateway::Gateway(pool));
    ASSERT_TRUE(std::holds_alternative<Requeue>(j.outcome));
    EXPECT_EQ(std::get<Requeue>(j.outcome).reason, "judge unavailable");
}

TEST(JudgeSession, ScoreCardJson) {
    auto c = card(2, 3);
    c.deductions = {{"prompt_leak", 2}};
    json j = c;
    auto back = j.get<ScoreCard>();
    EXPECT_EQ(back.deductions, c.deductions);
    EXPECT_EQ(back.final_score, 3);
}
