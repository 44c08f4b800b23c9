// SPDX-License-Identifier: Apache-2.0
//
// Behavioral taxonomy for IDE question-answering sessions and the domain
// records shared by every pipeline stage.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace qasynth {

using json = nlohmann::json;

/// Thrown when a label string falls outside the closed set of its dimension.
class LabelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The ten behavioral axes. Declaration order matters: the first seven are
/// classified by deterministic rules, the last three by a model.
enum class Dimension : std::uint8_t {
    cursor_behavior,
    trigger_method,
    instruction_type,
    programming_language,
    system_locale,
    dialog_turns,
    query_locale_requirement,
    reference_regions,
    difficulty,
    intent,
};

inline constexpr std::size_t kDimensionCount = 10;
inline constexpr std::size_t kRuleDimensionCount = 7;

inline constexpr std::array<Dimension, kDimensionCount> kAllDimensions{
    Dimension::cursor_behavior,   Dimension::trigger_method,
    Dimension::instruction_type,  Dimension::programming_language,
    Dimension::system_locale,     Dimension::dialog_turns,
    Dimension::query_locale_requirement, Dimension::reference_regions,
    Dimension::difficulty,        Dimension::intent,
};

constexpr bool is_rule_dimension(Dimension d) noexcept {
    return static_cast<std::size_t>(d) < kRuleDimensionCount;
}

std::string_view to_string(Dimension d) noexcept;
Dimension parse_dimension(std::string_view s);

enum class CursorBehavior : std::uint8_t {
    no_active_file,
    have_active_file,
    select_block,
    select_multiple_blocks,
    select_line,
    select_multiple_lines,
};

enum class TriggerMethod : std::uint8_t { inline_chat, chat_view };

enum class InstructionType : std::uint8_t { query, template_plus_query, template_only };

enum class Locale : std::uint8_t { zh, en };

enum class LocaleRequirement : std::uint8_t { differs_from_system, same_as_system, none };

enum class ReferenceRegion : std::uint8_t {
    historical_dialog,
    selected_code,
    context,
    question,
    error_messages,
    general_knowledge,
};

// `unknown` is a sentinel for failed model classification; it is never a
// valid value inside a ChatConfiguration.
enum class Difficulty : std::uint8_t { elementary, intermediate, advanced, expert, unknown };

enum class Intent : std::uint8_t {
    code_generation,
    code_editing,
    code_explanation,
    comment_generation,
    code_repair,
    general_qa,
    unknown,
};

std::string_view to_string(CursorBehavior v) noexcept;
std::string_view to_string(TriggerMethod v) noexcept;
std::string_view to_string(InstructionType v) noexcept;
std::string_view to_string(Locale v) noexcept;
std::string_view to_string(LocaleRequirement v) noexcept;
std::string_view to_string(ReferenceRegion v) noexcept;
std::string_view to_string(Difficulty v) noexcept;
std::string_view to_string(Intent v) noexcept;

CursorBehavior parse_cursor_behavior(std::string_view s);
TriggerMethod parse_trigger_method(std::string_view s);
InstructionType parse_instruction_type(std::string_view s);
Locale parse_locale(std::string_view s);
LocaleRequirement parse_locale_requirement(std::string_view s);
ReferenceRegion parse_reference_region(std::string_view s);
Difficulty parse_difficulty(std::string_view s);
Intent parse_intent(std::string_view s);

inline constexpr std::string_view kUnknownLanguage = "unknown";
inline constexpr int kMaxPlannedTurns = 10;

/// Programming languages and the file extensions that map onto them.
/// The default table holds ten languages; more can be loaded from JSON.
class LanguageTable {
public:
    static const LanguageTable& defaults();

    /// `{"languages": {"python": [".py"], ...}}`; entries extend the defaults.
    static LanguageTable from_json(const json& j);

    bool contains(std::string_view language) const;
    /// Language for a path's extension, or "unknown".
    std::string language_for_path(std::string_view path) const;
    std::string_view fence_tag(std::string_view language) const;
    const std::vector<std::string>& languages() const noexcept { return languages_; }

    void add(const std::string& language, const std::vector<std::string>& extensions);

private:
    std::vector<std::string> languages_;
    std::map<std::string, std::string, std::less<>> by_extension_;
};

/// Closed category set of a dimension, in canonical order. dialog_turns
/// yields "1".."10" and programming_language uses the default table.
std::vector<std::string> categories_of(Dimension d);

/// Validates a single category string for a dimension.
bool is_valid_category(Dimension d, std::string_view value,
                       const LanguageTable& languages = LanguageTable::defaults());

/// One label on one dimension.
struct CategoryLabel {
    Dimension dimension{};
    std::string value;

    /// Throws LabelError when `value` is outside the dimension's set.
    static CategoryLabel parse(Dimension d, std::string_view value,
                               const LanguageTable& languages = LanguageTable::defaults());

    friend bool operator==(const CategoryLabel&, const CategoryLabel&) = default;
};

/// One label per dimension.
struct LabelSet {
    CursorBehavior cursor_behavior = CursorBehavior::no_active_file;
    TriggerMethod trigger_method = TriggerMethod::chat_view;
    InstructionType instruction_type = InstructionType::query;
    std::string programming_language{kUnknownLanguage};
    Locale system_locale = Locale::en;
    int dialog_turns = 1;
    LocaleRequirement query_locale_requirement = LocaleRequirement::none;
    std::set<ReferenceRegion> reference_regions;
    Difficulty difficulty = Difficulty::unknown;
    Intent intent = Intent::unknown;

    /// Category strings for a dimension; one element except for
    /// reference_regions, which yields one per region in canonical order.
    std::vector<std::string> categories(Dimension d) const;

    /// Sets a dimension from a category string. For reference_regions the
    /// value replaces the set with a singleton.
    void set(Dimension d, std::string_view value,
             const LanguageTable& languages = LanguageTable::defaults());

    bool has_region(ReferenceRegion r) const { return reference_regions.contains(r); }

    friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

/// Inclusive, 1-based line range.
struct LineRange {
    int start_line = 1;
    int end_line = 1;

    int length() const noexcept { return end_line - start_line + 1; }
    bool single_line() const noexcept { return start_line == end_line; }

    friend bool operator==(const LineRange&, const LineRange&) = default;
    friend auto operator<=>(const LineRange&, const LineRange&) = default;
};

/// Editor action for one turn: select ranges, move the cursor, or neither.
struct CursorSpec {
    std::vector<LineRange> selections;
    std::optional<LineRange> cursor;

    bool empty() const noexcept { return selections.empty() && !cursor; }

    friend bool operator==(const CursorSpec&, const CursorSpec&) = default;
};

/// Cursor behavior implied by an editor snapshot.
CursorBehavior cursor_behavior_for(bool has_file, const std::vector<LineRange>& selections);

struct TurnSpec {
    CursorSpec cursor;
    std::string query;

    friend bool operator==(const TurnSpec&, const TurnSpec&) = default;
};

struct EditorSnapshot {
    std::optional<std::string> active_file;
    std::optional<int> file_lines;
    std::vector<LineRange> selections;

    friend bool operator==(const EditorSnapshot&, const EditorSnapshot&) = default;
};

/// Model-classified labels that may already accompany a logged interaction.
struct ModelLabels {
    std::set<ReferenceRegion> reference_regions;
    Difficulty difficulty = Difficulty::unknown;
    Intent intent = Intent::unknown;

    friend bool operator==(const ModelLabels&, const ModelLabels&) = default;
};

struct QaInteraction {
    std::string id;
    std::string query;
    std::string response;
    EditorSnapshot snapshot;
    TriggerMethod trigger_method = TriggerMethod::chat_view;
    std::vector<std::string> prior_turn_ids;
    Locale system_locale = Locale::en;
    std::optional<std::string> language_hint;
    std::optional<ModelLabels> labels;

    friend bool operator==(const QaInteraction&, const QaInteraction&) = default;
};

struct ChatConfiguration {
    std::string id;
    std::string repo;
    std::optional<std::string> file_path;
    std::optional<int> file_lines;
    CursorSpec cursor;
    LabelSet labels;
    std::vector<TurnSpec> turns;
    std::optional<std::string> error_payload;
    int round = 1;

    friend bool operator==(const ChatConfiguration&, const ChatConfiguration&) = default;
};

struct ChatMessage {
    std::string role;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Logical provenance. Sequence numbers stand in for wall-clock time so
/// that repeated runs stay byte-identical.
struct Provenance {
    int production_round = 1;
    std::int64_t trace_stored_seq = 0;
    std::int64_t judged_seq = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct TrainingExample {
    std::string query_id;
    ChatConfiguration configuration;
    std::vector<ChatMessage> transcript;
    std::string response;
    std::string endpoint_id;
    int final_score = 0;
    std::string rationale;
    Provenance provenance;

    friend bool operator==(const TrainingExample&, const TrainingExample&) = default;
};

struct Violation {
    std::string field;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    explicit operator bool() const noexcept { return ok(); }
};

ValidationResult validate_configuration(const ChatConfiguration& config,
                                        const LanguageTable& languages = LanguageTable::defaults());

ValidationResult validate_interaction(const QaInteraction& interaction);

/// Checks that prior-turn references across a log never form a cycle.
ValidationResult validate_prior_chains(const std::vector<QaInteraction>& interactions);

/// Problems with a set of ranges against a file of `file_lines` lines
/// (bounds are skipped when the line count is unknown).
std::vector<std::string> range_problems(const std::vector<LineRange>& ranges,
                                        std::optional<int> file_lines);

// JSON mapping. Field names are snake_case; unknown fields are ignored on
// read and optional fields are omitted on write when unset.
void to_json(json& j, const LineRange& v);
void from_json(const json& j, LineRange& v);
void to_json(json& j, const CursorSpec& v);
void from_json(const json& j, CursorSpec& v);
void to_json(json& j, const LabelSet& v);
void from_json(const json& j, LabelSet& v);
void to_json(json& j, const TurnSpec& v);
void from_json(const json& j, TurnSpec& v);
void to_json(json& j, const EditorSnapshot& v);
void from_json(const json& j, EditorSnapshot& v);
void to_json(json& j, const ModelLabels& v);
void from_json(const json& j, ModelLabels& v);
void to_json(json& j, const QaInteraction& v);
void from_json(const json& j, QaInteraction& v);
void to_json(json& j, const ChatConfiguration& v);
void from_json(const json& j, ChatConfiguration& v);
void to_json(json& j, const ChatMessage& v);
void from_json(const json& j, ChatMessage& v);
void to_json(json& j, const Provenance& v);
void from_json(const json& j, Provenance& v);
void to_json(json& j, const TrainingExample& v);
void from_json(const json& j, TrainingExample& v);
void to_json(json& j, const Violation& v);

}  // namespace qasynth
