// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "qasynth/taxonomy.hpp"

using namespace qasynth;

namespace {

ChatConfiguration valid_two_turn() {
    ChatConfiguration c;
    c.id = "c1";
    c.repo = "toolkit";
    c.file_path = "src/util.cpp";
    c.file_lines = 70;
    c.cursor.selections = {{5, 10}};
    c.labels.cursor_behavior = CursorBehavior::select_block;
    c.labels.trigger_method = TriggerMethod::chat_view;
    c.labels.programming_language = "cpp";
    c.labels.dialog_turns = 2;
    c.labels.reference_regions = {ReferenceRegion::selected_code};
    c.labels.difficulty = Difficulty::intermediate;
    c.labels.intent = Intent::code_explanation;
    c.turns = {{c.cursor, "What does this do?"}, {{}, "And why the loop?"}};
    return c;
}

bool has_field(const ValidationResult& r, const std::string& field) {
    for (const auto& v : r.violations) {
        if (v.field == field) return true;
    }
    return false;
}

}  // namespace

TEST(Taxonomy, CategoryCounts) {
    std::size_t total = 0;
    for (auto d : kAllDimensions) total += categories_of(d).size();
    // 6 + 2 + 3 + 10 + 2 + 10 + 3 + 6 + 4 + 6
    EXPECT_EQ(total, 52u);
    EXPECT_EQ(categories_of(Dimension::dialog_turns).front(), "1");
    EXPECT_EQ(categories_of(Dimension::dialog_turns).back(), "10");
    EXPECT_TRUE(is_rule_dimension(Dimension::query_locale_requirement));
    EXPECT_FALSE(is_rule_dimension(Dimension::reference_regions));
}

TEST(Taxonomy, ParseRejectsOutOfSet) {
    EXPECT_THROW(CategoryLabel::parse(Dimension::intent, "code_fixing"), LabelError);
    EXPECT_THROW(CategoryLabel::parse(Dimension::dialog_turns, "0"), LabelError);
    EXPECT_THROW(CategoryLabel::parse(Dimension::programming_language, "cobol"), LabelError);
    EXPECT_EQ(CategoryLabel::parse(Dimension::intent, "code_repair").value, "code_repair");
    EXPECT_THROW(parse_difficulty("unknown"), LabelError);
}

TEST(Taxonomy, RoundTripEveryCategory) {
    for (auto d : kAllDimensions) {
        for (const auto& c : categories_of(d)) {
            LabelSet s;
            s.set(d, c);
            auto cats = s.categories(d);
            ASSERT_EQ(cats.size(), 1u) << to_string(d);
            EXPECT_EQ(cats.front(), c);
            EXPECT_EQ(parse_dimension(to_string(d)), d);
        }
    }
}

TEST(Taxonomy, LanguageTable) {
    const auto& t = LanguageTable::defaults();
    EXPECT_EQ(t.languages().size(), 10u);
    EXPECT_EQ(t.language_for_path("a.py"), "python");
    EXPECT_EQ(t.language_for_path("dir/x.tsx"), "typescript");
    EXPECT_EQ(t.language_for_path("README"), "unknown");
    auto ext = LanguageTable::from_json(json{{"languages", {{"kotlin", {".kt"}}}}});
    EXPECT_EQ(ext.language_for_path("Main.kt"), "kotlin");
    EXPECT_EQ(ext.language_for_path("a.py"), "python");
}

TEST(Taxonomy, CursorBehaviorFromSelections) {
    EXPECT_EQ(cursor_behavior_for(false, {}), CursorBehavior::no_active_file);
    EXPECT_EQ(cursor_behavior_for(true, {}), CursorBehavior::have_active_file);
    EXPECT_EQ(cursor_behavior_for(true, {{3, 9}}), CursorBehavior::select_block);
    EXPECT_EQ(cursor_behavior_for(true, {{3, 9}, {12, 12}}), CursorBehavior::select_multiple_blocks);
    EXPECT_EQ(cursor_behavior_for(true, {{4, 4}}), CursorBehavior::select_line);
    EXPECT_EQ(cursor_behavior_for(true, {{4, 4}, {8, 8}}), CursorBehavior::select_multiple_lines);
}

TEST(ValidateConfiguration, ValidTwoTurnConfig) {
    auto r = validate_configuration(valid_two_turn());
    EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front().message);
}

TEST(ValidateConfiguration, NoActiveFileWithPath) {
    auto c = valid_two_turn();
    c.labels.cursor_behavior = CursorBehavior::no_active_file;
    auto r = validate_configuration(c);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_field(r, "file_path"));
}

TEST(ValidateConfiguration, SelectedCodeWithoutSelection) {
    auto c = valid_two_turn();
    c.cursor = {};
    c.turns[0].cursor = {};
    c.labels.cursor_behavior = CursorBehavior::have_active_file;
    auto r = validate_configuration(c);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].field, "labels.reference_regions");
}

TEST(ValidateConfiguration, TurnCountAndRanges) {
    auto c = valid_two_turn();
    c.turns.pop_back();
    EXPECT_TRUE(has_field(validate_configuration(c), "turns"));

    c = valid_two_turn();
    c.turns[1].cursor.selections = {{60, 80}};
    EXPECT_TRUE(has_field(validate_configuration(c), "turns[1].cursor.selections"));

    c = valid_two_turn();
    c.labels.intent = Intent::unknown;
    EXPECT_TRUE(has_field(validate_configuration(c), "labels.intent"));
}

TEST(ValidateConfiguration, Deterministic) {
    auto c = valid_two_turn();
    c.labels.cursor_behavior = CursorBehavior::no_active_file;
    c.turns.clear();
    auto a = validate_configuration(c);
    auto b = validate_configuration(c);
    EXPECT_EQ(a.violations, b.violations);
}

TEST(ValidateInteraction, PriorChains) {
    QaInteraction a{.id = "a", .query = "q"};
    QaInteraction b{.id = "b", .query = "q"};
    a.prior_turn_ids = {"b"};
    b.prior_turn_ids = {"a"};
    EXPECT_FALSE(validate_prior_chains({a, b}).ok());
    b.prior_turn_ids.clear();
    EXPECT_TRUE(validate_prior_chains({a, b}).ok());

    QaInteraction self{.id = "s", .query = "q"};
    self.prior_turn_ids = {"s"};
    EXPECT_FALSE(validate_interaction(self).ok());
}

TEST(TaxonomyJson, ConfigurationRoundTrip) {
    auto c = valid_two_turn();
    c.error_payload = "error: boom";
    json j = c;
    EXPECT_EQ(j.get<ChatConfiguration>(), c);
    EXPECT_FALSE(json(valid_two_turn()).contains("error_payload"));
}

TEST(TaxonomyJson, UnknownFieldsIgnored) {
    json j = valid_two_turn();
    j["future_field"] = 42;
    EXPECT_EQ(j.get<ChatConfiguration>(), valid_two_turn());
}

TEST(TaxonomyJson, TrainingExampleRoundTrip) {
    TrainingExample e;
    e.query_id = "q";
    e.configuration = valid_two_turn();
    e.transcript = {{"system", "s"}, {"user", "u"}};
    e.response = "r";
    e.endpoint_id = "gen-a";
    e.final_score = 5;
    e.rationale = "ok";
    e.provenance = {2, 7, 9};
    json j = e;
    EXPECT_EQ(j.get<TrainingExample>(), e);
}
