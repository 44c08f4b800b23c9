// SPDX-License-Identifier: Apache-2.0

#include "qasynth/taxonomy.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

namespace qasynth {

namespace {

constexpr std::array<std::string_view, kDimensionCount> kDimensionNames{
    "cursor_behavior", "trigger_method", "instruction_type", "programming_language",
    "system_locale",   "dialog_turns",   "query_locale_requirement", "reference_regions",
    "difficulty",      "intent",
};

constexpr std::array<std::string_view, 6> kCursorNames{
    "no_active_file", "have_active_file", "select_block",
    "select_multiple_blocks", "select_line", "select_multiple_lines",
};
constexpr std::array<std::string_view, 2> kTriggerNames{"inline_chat", "chat_view"};
constexpr std::array<std::string_view, 3> kInstructionNames{"query", "template_plus_query",
                                                            "template_only"};
constexpr std::array<std::string_view, 2> kLocaleNames{"zh", "en"};
constexpr std::array<std::string_view, 3> kRequirementNames{"differs_from_system",
                                                            "same_as_system", "none"};
constexpr std::array<std::string_view, 6> kRegionNames{
    "historical_dialog", "selected_code", "context",
    "question",          "error_messages", "general_knowledge",
};
constexpr std::array<std::string_view, 5> kDifficultyNames{"elementary", "intermediate",
                                                           "advanced", "expert", "unknown"};
constexpr std::array<std::string_view, 7> kIntentNames{
    "code_generation", "code_editing", "code_explanation", "comment_generation",
    "code_repair",     "general_qa",   "unknown",
};

template <typename E, std::size_t N>
E parse_closed(std::string_view s, const std::array<std::string_view, N>& names,
               std::size_t valid_count, std::string_view what) {
    for (std::size_t i = 0; i < valid_count; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    throw LabelError("invalid " + std::string(what) + " label '" + std::string(s) + "'");
}

template <std::size_t N>
std::vector<std::string> names_of(const std::array<std::string_view, N>& names,
                                  std::size_t valid_count) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < valid_count; ++i) out.emplace_back(names[i]);
    return out;
}

std::optional<int> parse_turns(std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v < 1) return std::nullopt;
    return v;
}

std::string lower_ext(std::string_view path) {
    auto slash = path.find_last_of('/');
    auto name = slash == std::string_view::npos ? path : path.substr(slash + 1);
    auto dot = name.find_last_of('.');
    if (dot == std::string_view::npos || dot == 0) return {};
    std::string ext(name.substr(dot));
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

}  // namespace

std::string_view to_string(Dimension d) noexcept { return kDimensionNames[static_cast<std::size_t>(d)]; }

Dimension parse_dimension(std::string_view s) {
    return parse_closed<Dimension>(s, kDimensionNames, kDimensionNames.size(), "dimension");
}

std::string_view to_string(CursorBehavior v) noexcept { return kCursorNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(TriggerMethod v) noexcept { return kTriggerNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(InstructionType v) noexcept {
    return kInstructionNames[static_cast<std::size_t>(v)];
}
std::string_view to_string(Locale v) noexcept { return kLocaleNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(LocaleRequirement v) noexcept {
    return kRequirementNames[static_cast<std::size_t>(v)];
}
std::string_view to_string(ReferenceRegion v) noexcept { return kRegionNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Difficulty v) noexcept { return kDifficultyNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Intent v) noexcept { return kIntentNames[static_cast<std::size_t>(v)]; }

CursorBehavior parse_cursor_behavior(std::string_view s) {
    return parse_closed<CursorBehavior>(s, kCursorNames, kCursorNames.size(), "cursor_behavior");
}
TriggerMethod parse_trigger_method(std::string_view s) {
    return parse_closed<TriggerMethod>(s, kTriggerNames, kTriggerNames.size(), "trigger_method");
}
InstructionType parse_instruction_type(std::string_view s) {
    return parse_closed<InstructionType>(s, kInstructionNames, kInstructionNames.size(),
                                         "instruction_type");
}
Locale parse_locale(std::string_view s) {
    return parse_closed<Locale>(s, kLocaleNames, kLocaleNames.size(), "locale");
}
LocaleRequirement parse_locale_requirement(std::string_view s) {
    return parse_closed<LocaleRequirement>(s, kRequirementNames, kRequirementNames.size(),
                                           "query_locale_requirement");
}
ReferenceRegion parse_reference_region(std::string_view s) {
    return parse_closed<ReferenceRegion>(s, kRegionNames, kRegionNames.size(), "reference_regions");
}
// The trailing `unknown` sentinel is excluded from what parses.
Difficulty parse_difficulty(std::string_view s) {
    return parse_closed<Difficulty>(s, kDifficultyNames, kDifficultyNames.size() - 1, "difficulty");
}
Intent parse_intent(std::string_view s) {
    return parse_closed<Intent>(s, kIntentNames, kIntentNames.size() - 1, "intent");
}

// ---------------------------------------------------------------------------
// LanguageTable

const LanguageTable& LanguageTable::defaults() {
    static const LanguageTable table = [] {
        LanguageTable t;
        t.add("python", {".py", ".pyi"});
        t.add("go", {".go"});
        t.add("cpp", {".cpp", ".cc", ".cxx", ".hpp", ".hh", ".hxx"});
        t.add("java", {".java"});
        t.add("javascript", {".js", ".mjs", ".cjs", ".jsx"});
        t.add("typescript", {".ts", ".tsx"});
        t.add("rust", {".rs"});
        t.add("c", {".c", ".h"});
        t.add("csharp", {".cs"});
        t.add("shell", {".sh", ".bash"});
        return t;
    }();
    return table;
}

LanguageTable LanguageTable::from_json(const json& j) {
    LanguageTable t = defaults();
    if (j.contains("languages")) {
        for (const auto& [name, exts] : j.at("languages").items()) {
            t.add(name, exts.get<std::vector<std::string>>());
        }
    }
    return t;
}

void LanguageTable::add(const std::string& language, const std::vector<std::string>& extensions) {
    if (language.empty() || language == kUnknownLanguage) {
        throw LabelError("invalid language name '" + language + "'");
    }
    if (!contains(language)) languages_.push_back(language);
    for (const auto& e : extensions) {
        by_extension_[lower_ext("x" + (e.starts_with('.') ? e : "." + e))] = language;
    }
}

bool LanguageTable::contains(std::string_view language) const {
    return std::find(languages_.begin(), languages_.end(), language) != languages_.end();
}

std::string LanguageTable::language_for_path(std::string_view path) const {
    auto it = by_extension_.find(lower_ext(path));
    return it == by_extension_.end() ? std::string(kUnknownLanguage) : it->second;
}

std::string_view LanguageTable::fence_tag(std::string_view language) const {
    if (language == "csharp") return "cs";
    if (language == "shell") return "sh";
    if (language == kUnknownLanguage) return "";
    return language;
}

// ---------------------------------------------------------------------------
// Categories

std::vector<std::string> categories_of(Dimension d) {
    switch (d) {
        case Dimension::cursor_behavior: return names_of(kCursorNames, kCursorNames.size());
        case Dimension::trigger_method: return names_of(kTriggerNames, kTriggerNames.size());
        case Dimension::instruction_type: return names_of(kInstructionNames, kInstructionNames.size());
        case Dimension::programming_language: return LanguageTable::defaults().languages();
        case Dimension::system_locale: return names_of(kLocaleNames, kLocaleNames.size());
        case Dimension::dialog_turns: {
            std::vector<std::string> out;
            for (int t = 1; t <= kMaxPlannedTurns; ++t) out.push_back(std::to_string(t));
            return out;
        }
        case Dimension::query_locale_requirement:
            return names_of(kRequirementNames, kRequirementNames.size());
        case Dimension::reference_regions: return names_of(kRegionNames, kRegionNames.size());
        case Dimension::difficulty: return names_of(kDifficultyNames, kDifficultyNames.size() - 1);
        case Dimension::intent: return names_of(kIntentNames, kIntentNames.size() - 1);
    }
    return {};
}

bool is_valid_category(Dimension d, std::string_view value, const LanguageTable& languages) {
    try {
        CategoryLabel::parse(d, value, languages);
        return true;
    } catch (const LabelError&) {
        return false;
    }
}

CategoryLabel CategoryLabel::parse(Dimension d, std::string_view value, const LanguageTable& languages) {
    LabelSet scratch;
    scratch.set(d, value, languages);
    return CategoryLabel{d, std::string(value)};
}

std::vector<std::string> LabelSet::categories(Dimension d) const {
    switch (d) {
        case Dimension::cursor_behavior: return {std::string(to_string(cursor_behavior))};
        case Dimension::trigger_method: return {std::string(to_string(trigger_method))};
        case Dimension::instruction_type: return {std::string(to_string(instruction_type))};
        case Dimension::programming_language: return {programming_language};
        case Dimension::system_locale: return {std::string(to_string(system_locale))};
        case Dimension::dialog_turns: return {std::to_string(dialog_turns)};
        case Dimension::query_locale_requirement:
            return {std::string(to_string(query_locale_requirement))};
        case Dimension::reference_regions: {
            std::vector<std::string> out;
            for (auto r : reference_regions) out.emplace_back(to_string(r));
            return out;
        }
        case Dimension::difficulty: return {std::string(to_string(difficulty))};
        case Dimension::intent: return {std::string(to_string(intent))};
    }
    return {};
}

void LabelSet::set(Dimension d, std::string_view value, const LanguageTable& languages) {
    switch (d) {
        case Dimension::cursor_behavior: cursor_behavior = parse_cursor_behavior(value); return;
        case Dimension::trigger_method: trigger_method = parse_trigger_method(value); return;
        case Dimension::instruction_type: instruction_type = parse_instruction_type(value); return;
        case Dimension::programming_language:
            if (!languages.contains(value)) {
                throw LabelError("invalid programming_language label '" + std::string(value) + "'");
            }
            programming_language = std::string(value);
            return;
        case Dimension::system_locale: system_locale = parse_locale(value); return;
        case Dimension::dialog_turns: {
            auto t = parse_turns(value);
            if (!t) throw LabelError("invalid dialog_turns label '" + std::string(value) + "'");
            dialog_turns = *t;
            return;
        }
        case Dimension::query_locale_requirement:
            query_locale_requirement = parse_locale_requirement(value);
            return;
        case Dimension::reference_regions:
            reference_regions = {parse_reference_region(value)};
            return;
        case Dimension::difficulty: difficulty = parse_difficulty(value); return;
        case Dimension::intent: intent = parse_intent(value); return;
    }
}

CursorBehavior cursor_behavior_for(bool has_file, const std::vector<LineRange>& selections) {
    if (selections.empty()) {
        return has_file ? CursorBehavior::have_active_file : CursorBehavior::no_active_file;
    }
    bool all_single = std::all_of(selections.begin(), selections.end(),
                                  [](const LineRange& r) { return r.single_line(); });
    if (selections.size() == 1) {
        return all_single ? CursorBehavior::select_line : CursorBehavior::select_block;
    }
    return all_single ? CursorBehavior::select_multiple_lines : CursorBehavior::select_multiple_blocks;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> range_problems(const std::vector<LineRange>& ranges,
                                        std::optional<int> file_lines) {
    std::vector<std::string> out;
    for (const auto& r : ranges) {
        if (r.start_line < 1 || r.end_line < r.start_line) {
            out.push_back("malformed range " + std::to_string(r.start_line) + "-" +
                          std::to_string(r.end_line));
        } else if (file_lines && r.end_line > *file_lines) {
            out.push_back("range " + std::to_string(r.start_line) + "-" + std::to_string(r.end_line) +
                          " exceeds file length " + std::to_string(*file_lines));
        }
    }
    auto sorted = ranges;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].start_line <= sorted[i - 1].end_line) {
            out.push_back("ranges overlap at line " + std::to_string(sorted[i].start_line));
        }
    }
    return out;
}

namespace {

void check_cursor_spec(const CursorSpec& spec, std::optional<int> file_lines, bool has_file,
                       const std::string& field, std::vector<Violation>& out) {
    if (!has_file && !spec.empty()) {
        out.push_back({field, "cursor spec present without an open file"});
    }
    for (auto& p : range_problems(spec.selections, file_lines)) out.push_back({field + ".selections", p});
    if (spec.cursor) {
        for (auto& p : range_problems({*spec.cursor}, file_lines)) out.push_back({field + ".cursor", p});
    }
}

}  // namespace

ValidationResult validate_configuration(const ChatConfiguration& c, const LanguageTable& languages) {
    std::vector<Violation> v;
    const auto& l = c.labels;
    const bool has_file = c.file_path.has_value();

    if (c.id.empty()) v.push_back({"id", "configuration id is empty"});

    if (l.cursor_behavior == CursorBehavior::no_active_file) {
        if (has_file) v.push_back({"file_path", "file path present for no_active_file"});
    } else {
        if (!has_file) v.push_back({"file_path", "file path missing for " +
                                                     std::string(to_string(l.cursor_behavior))});
        if (c.repo.empty()) v.push_back({"repo", "repository missing for an open file"});
    }
    if (has_file && c.file_path->empty()) v.push_back({"file_path", "file path is empty"});
    if (has_file && (!c.file_lines || *c.file_lines < 1)) {
        v.push_back({"file_lines", "line count missing for open file"});
    }
    if (!c.file_path && c.file_lines) v.push_back({"file_lines", "line count present without a file"});

    check_cursor_spec(c.cursor, c.file_lines, has_file, "cursor", v);
    if (has_file && cursor_behavior_for(true, c.cursor.selections) != l.cursor_behavior) {
        v.push_back({"cursor", "selections realize " +
                                   std::string(to_string(cursor_behavior_for(true, c.cursor.selections))) +
                                   " but cursor_behavior is " + std::string(to_string(l.cursor_behavior))});
    }

    if (!languages.contains(l.programming_language) &&
        !(l.cursor_behavior == CursorBehavior::no_active_file &&
          l.programming_language == kUnknownLanguage)) {
        v.push_back({"labels.programming_language",
                     "unknown programming language '" + l.programming_language + "'"});
    }
    if (has_file && languages.language_for_path(*c.file_path) != l.programming_language) {
        v.push_back({"labels.programming_language", "file extension does not match language label"});
    }
    if (l.dialog_turns < 1) v.push_back({"labels.dialog_turns", "dialog_turns must be positive"});
    if (l.difficulty == Difficulty::unknown) v.push_back({"labels.difficulty", "difficulty is unknown"});
    if (l.intent == Intent::unknown) v.push_back({"labels.intent", "intent is unknown"});
    if (l.reference_regions.empty()) {
        v.push_back({"labels.reference_regions", "reference_regions must be non-empty"});
    }

    if (static_cast<int>(c.turns.size()) != l.dialog_turns) {
        v.push_back({"turns", "dialog_turns is " + std::to_string(l.dialog_turns) + " but " +
                                  std::to_string(c.turns.size()) + " turn specs are present"});
    }
    if (!c.turns.empty() && c.turns.front().cursor != c.cursor) {
        v.push_back({"turns[0].cursor", "first turn cursor differs from configuration cursor"});
    }
    bool any_selection = false;
    for (std::size_t t = 0; t < c.turns.size(); ++t) {
        const std::string field = "turns[" + std::to_string(t) + "]";
        check_cursor_spec(c.turns[t].cursor, c.file_lines, has_file, field + ".cursor", v);
        any_selection = any_selection || !c.turns[t].cursor.selections.empty();
    }
    if (l.has_region(ReferenceRegion::selected_code) && !any_selection) {
        v.push_back({"labels.reference_regions", "selected_code referenced but no turn has a selection"});
    }
    if (c.round < 1) v.push_back({"round", "round must be positive"});

    return ValidationResult{std::move(v)};
}

ValidationResult validate_interaction(const QaInteraction& in) {
    std::vector<Violation> v;
    if (in.id.empty()) v.push_back({"id", "interaction id is empty"});
    const auto& s = in.snapshot;
    if (!s.active_file && !s.selections.empty()) {
        v.push_back({"snapshot.selections", "selections present without an active file"});
    }
    for (auto& p : range_problems(s.selections, s.file_lines)) v.push_back({"snapshot.selections", p});
    std::unordered_set<std::string> seen;
    for (const auto& p : in.prior_turn_ids) {
        if (p == in.id) v.push_back({"prior_turn_ids", "interaction lists itself as a prior turn"});
        if (!seen.insert(p).second) v.push_back({"prior_turn_ids", "duplicate prior turn '" + p + "'"});
    }
    return ValidationResult{std::move(v)};
}

ValidationResult validate_prior_chains(const std::vector<QaInteraction>& interactions) {
    std::unordered_map<std::string, const QaInteraction*> by_id;
    for (const auto& i : interactions) by_id.emplace(i.id, &i);

    // 0 = unvisited, 1 = on stack, 2 = done
    std::unordered_map<std::string, int> state;
    std::vector<Violation> v;
    for (const auto& root : interactions) {
        if (state[root.id] != 0) continue;
        std::vector<std::pair<const QaInteraction*, std::size_t>> stack{{&root, 0}};
        state[root.id] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            if (next == node->prior_turn_ids.size()) {
                state[node->id] = 2;
                stack.pop_back();
                continue;
            }
            const auto& pid = node->prior_turn_ids[next++];
            auto it = by_id.find(pid);
            if (it == by_id.end()) continue;
            int& st = state[pid];
            if (st == 1) {
                v.push_back({"prior_turn_ids", "prior-turn cycle through '" + pid + "'"});
            } else if (st == 0) {
                st = 1;
                stack.emplace_back(it->second, 0);
            }
        }
    }
    return ValidationResult{std::move(v)};
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename T>
void get_opt(const json& j, const char* key, std::optional<T>& v) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) v = it->get<T>();
    else v.reset();
}

json regions_json(const std::set<ReferenceRegion>& regions) {
    json arr = json::array();
    for (auto r : regions) arr.push_back(to_string(r));
    return arr;
}

std::set<ReferenceRegion> regions_from(const json& j) {
    std::set<ReferenceRegion> out;
    for (const auto& r : j) out.insert(parse_reference_region(r.get<std::string>()));
    return out;
}

}  // namespace

void to_json(json& j, const LineRange& v) { j = json::array({v.start_line, v.end_line}); }

void from_json(const json& j, LineRange& v) {
    if (j.is_array()) {
        v.start_line = j.at(0).get<int>();
        v.end_line = j.at(1).get<int>();
    } else {
        v.start_line = j.at("start_line").get<int>();
        v.end_line = j.at("end_line").get<int>();
    }
}

void to_json(json& j, const CursorSpec& v) {
    j = json::object();
    if (!v.selections.empty()) j["selections"] = v.selections;
    put_opt(j, "cursor", v.cursor);
}

void from_json(const json& j, CursorSpec& v) {
    v.selections = j.value("selections", std::vector<LineRange>{});
    get_opt(j, "cursor", v.cursor);
}

void to_json(json& j, const LabelSet& v) {
    j = json::object();
    for (auto d : kAllDimensions) {
        if (d == Dimension::reference_regions) {
            j[std::string(to_string(d))] = regions_json(v.reference_regions);
        } else if (d == Dimension::dialog_turns) {
            j[std::string(to_string(d))] = v.dialog_turns;
        } else {
            j[std::string(to_string(d))] = v.categories(d).front();
        }
    }
}

void from_json(const json& j, LabelSet& v) {
    LabelSet out;
    for (auto d : kAllDimensions) {
        const auto& field = j.at(std::string(to_string(d)));
        if (d == Dimension::reference_regions) {
            out.reference_regions = regions_from(field);
        } else if (d == Dimension::dialog_turns) {
            out.dialog_turns = field.get<int>();
            if (out.dialog_turns < 1) throw LabelError("dialog_turns must be positive");
        } else if (d == Dimension::programming_language) {
            // Extended tables are checked by validate_configuration.
            out.programming_language = field.get<std::string>();
        } else {
            out.set(d, field.get<std::string>());
        }
    }
    v = std::move(out);
}

void to_json(json& j, const TurnSpec& v) { j = json{{"cursor", v.cursor}, {"query", v.query}}; }

void from_json(const json& j, TurnSpec& v) {
    v.cursor = j.value("cursor", CursorSpec{});
    v.query = j.value("query", std::string{});
}

void to_json(json& j, const EditorSnapshot& v) {
    j = json::object();
    put_opt(j, "active_file", v.active_file);
    put_opt(j, "file_lines", v.file_lines);
    j["selections"] = v.selections;
}

void from_json(const json& j, EditorSnapshot& v) {
    get_opt(j, "active_file", v.active_file);
    get_opt(j, "file_lines", v.file_lines);
    v.selections = j.value("selections", std::vector<LineRange>{});
}

void to_json(json& j, const ModelLabels& v) {
    j = json{{"reference_regions", regions_json(v.reference_regions)},
             {"difficulty", to_string(v.difficulty)},
             {"intent", to_string(v.intent)}};
}

void from_json(const json& j, ModelLabels& v) {
    v.reference_regions = regions_from(j.at("reference_regions"));
    auto d = j.at("difficulty").get<std::string>();
    auto i = j.at("intent").get<std::string>();
    v.difficulty = d == "unknown" ? Difficulty::unknown : parse_difficulty(d);
    v.intent = i == "unknown" ? Intent::unknown : parse_intent(i);
}

void to_json(json& j, const QaInteraction& v) {
    j = json{{"id", v.id},
             {"query", v.query},
             {"response", v.response},
             {"snapshot", v.snapshot},
             {"trigger_method", to_string(v.trigger_method)},
             {"prior_turn_ids", v.prior_turn_ids},
             {"system_locale", to_string(v.system_locale)}};
    put_opt(j, "language_hint", v.language_hint);
    put_opt(j, "labels", v.labels);
}

void from_json(const json& j, QaInteraction& v) {
    v.id = j.at("id").get<std::string>();
    v.query = j.at("query").get<std::string>();
    v.response = j.value("response", std::string{});
    v.snapshot = j.value("snapshot", EditorSnapshot{});
    v.trigger_method = parse_trigger_method(j.at("trigger_method").get<std::string>());
    v.prior_turn_ids = j.value("prior_turn_ids", std::vector<std::string>{});
    v.system_locale = parse_locale(j.at("system_locale").get<std::string>());
    get_opt(j, "language_hint", v.language_hint);
    get_opt(j, "labels", v.labels);
}

void to_json(json& j, const ChatConfiguration& v) {
    j = json{{"id", v.id}, {"repo", v.repo}};
    put_opt(j, "file_path", v.file_path);
    put_opt(j, "file_lines", v.file_lines);
    j["cursor"] = v.cursor;
    j["labels"] = v.labels;
    j["turns"] = v.turns;
    put_opt(j, "error_payload", v.error_payload);
    j["round"] = v.round;
}

void from_json(const json& j, ChatConfiguration& v) {
    v.id = j.at("id").get<std::string>();
    v.repo = j.value("repo", std::string{});
    get_opt(j, "file_path", v.file_path);
    get_opt(j, "file_lines", v.file_lines);
    v.cursor = j.value("cursor", CursorSpec{});
    v.labels = j.at("labels").get<LabelSet>();
    v.turns = j.value("turns", std::vector<TurnSpec>{});
    get_opt(j, "error_payload", v.error_payload);
    v.round = j.value("round", 1);
}

void to_json(json& j, const ChatMessage& v) { j = json{{"role", v.role}, {"content", v.content}}; }

void from_json(const json& j, ChatMessage& v) {
    v.role = j.at("role").get<std::string>();
    v.content = j.at("content").get<std::string>();
}

void to_json(json& j, const Provenance& v) {
    j = json{{"production_round", v.production_round},
             {"trace_stored_seq", v.trace_stored_seq},
             {"judged_seq", v.judged_seq}};
}

void from_json(const json& j, Provenance& v) {
    v.production_round = j.value("production_round", 1);
    v.trace_stored_seq = j.value("trace_stored_seq", std::int64_t{0});
    v.judged_seq = j.value("judged_seq", std::int64_t{0});
}

void to_json(json& j, const TrainingExample& v) {
    j = json{{"query_id", v.query_id},
             {"configuration", v.configuration},
             {"transcript", v.transcript},
             {"response", v.response},
             {"endpoint_id", v.endpoint_id},
             {"final_score", v.final_score},
             {"rationale", v.rationale},
             {"provenance", v.provenance}};
}

void from_json(const json& j, TrainingExample& v) {
    v.query_id = j.at("query_id").get<std::string>();
    v.configuration = j.at("configuration").get<ChatConfiguration>();
    v.transcript = j.at("transcript").get<std::vector<ChatMessage>>();
    v.response = j.at("response").get<std::string>();
    v.endpoint_id = j.at("endpoint_id").get<std::string>();
    v.final_score = j.at("final_score").get<int>();
    v.rationale = j.value("rationale", std::string{});
    v.provenance = j.value("provenance", Provenance{});
}

void to_json(json& j, const Violation& v) { j = json{{"field", v.field}, {"message", v.message}}; }

}  // namespace qasynth
