// SPDX-License-Identifier: Apache-2.0

#include "qasynth/config_gen.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <spdlog/spdlog.h>

#include "qasynth/rng.hpp"
#include "qasynth/text.hpp"

namespace qasynth::configgen {

int min_lines_for(CursorBehavior b) {
    switch (b) {
        case CursorBehavior::no_active_file: return 0;
        case CursorBehavior::have_active_file: return 1;
        case CursorBehavior::select_line: return 1;
        case CursorBehavior::select_multiple_lines: return 2;
        case CursorBehavior::select_block: return 3;
        case CursorBehavior::select_multiple_blocks: return 5;
    }
    return 1;
}

namespace {

CursorSpec realize_cursor(CursorBehavior b, int n, Rng& rng) {
    CursorSpec spec;
    auto line = [&](int lo, int hi) { return static_cast<int>(rng.between(lo, hi)); };
    switch (b) {
        case CursorBehavior::no_active_file: break;
        case CursorBehavior::have_active_file: {
            int l = line(1, n);
            spec.cursor = LineRange{l, l};
            break;
        }
        case CursorBehavior::select_line: {
            int l = line(1, n);
            spec.selections.push_back({l, l});
            break;
        }
        case CursorBehavior::select_block: {
            int len = line(3, std::min(40, n));
            int start = line(1, n - len + 1);
            spec.selections.push_back({start, start + len - 1});
            break;
        }
        case CursorBehavior::select_multiple_lines: {
            int k = line(2, std::min(4, n));
            std::set<int> picked;
            while (static_cast<int>(picked.size()) < k) picked.insert(line(1, n));
            for (int l : picked) spec.selections.push_back({l, l});
            break;
        }
        case CursorBehavior::select_multiple_blocks: {
            int k = n >= 8 ? line(2, 3) : 2;
            int seg = n / k;
            for (int i = 0; i < k; ++i) {
                int seg_start = i * seg + 1;
                int seg_end = i == k - 1 ? n : (i + 1) * seg;
                int m = seg_end - seg_start + 1;
                int len = line(2, std::min(20, m));
                int start = line(seg_start, seg_end - len + 1);
                spec.selections.push_back({start, start + len - 1});
            }
            break;
        }
    }
    return spec;
}

std::string describe_intent(Intent i) {
    switch (i) {
        case Intent::code_generation: return "code generation (ask for new code to be written)";
        case Intent::code_editing: return "code editing (ask for existing code to be changed or refactored)";
        case Intent::code_explanation: return "code explanation (ask what code does or why)";
        case Intent::comment_generation: return "comment generation (ask for comments or documentation)";
        case Intent::code_repair: return "code repair (ask for a bug or error to be fixed)";
        case Intent::general_qa: return "general programming question";
        case Intent::unknown: break;
    }
    return "general programming question";
}

std::string describe_difficulty(Difficulty d) {
    switch (d) {
        case Difficulty::elementary: return "elementary (a beginner could ask it)";
        case Difficulty::intermediate: return "intermediate";
        case Difficulty::advanced: return "advanced (needs solid experience)";
        case Difficulty::expert: return "expert (needs deep specialist knowledge)";
        case Difficulty::unknown: break;
    }
    return "intermediate";
}

std::string locale_name(Locale l) { return l == Locale::zh ? "Chinese" : "English"; }

Locale other(Locale l) { return l == Locale::zh ? Locale::en : Locale::zh; }

std::string join_regions(const std::set<ReferenceRegion>& regions) {
    std::string out;
    for (auto r : regions) {
        if (!out.empty()) out += ", ";
        out += to_string(r);
    }
    return out;
}

std::string fenced(std::string_view lang, const std::string& body) {
    std::string out = "```" + std::string(LanguageTable::defaults().fence_tag(lang)) + "\n" + body;
    if (!body.empty() && body.back() != '\n') out += '\n';
    return out + "```\n";
}

std::optional<json> extract_json_object(std::string_view reply) {
    auto open = reply.find('{');
    auto close = reply.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
    try {
        auto j = json::parse(reply.substr(open, close - open + 1));
        if (j.is_object()) return j;
    } catch (const json::parse_error&) {
    }
    return std::nullopt;
}

std::string pick_template(Intent intent, const std::vector<std::string>& available, Rng& rng) {
    std::vector<std::string> preferred;
    switch (intent) {
        case Intent::code_explanation: preferred = {"explain code", "/explain"}; break;
        case Intent::comment_generation: preferred = {"generate comments", "/doc"}; break;
        case Intent::code_repair:
        case Intent::code_editing: preferred = {"/fix"}; break;
        case Intent::code_generation: preferred = {"/test"}; break;
        default: preferred = {"/explain"}; break;
    }
    std::vector<std::string> usable;
    for (const auto& p : preferred) {
        if (std::find(available.begin(), available.end(), p) != available.end()) usable.push_back(p);
    }
    if (usable.empty()) {
        if (available.empty()) throw GenerationError("no quick-chat templates configured");
        usable = available;
    }
    return usable[static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(usable.size()) - 1))];
}

}  // namespace

RepoSample sample_repository(const LabelSet& item, const corpus::RepoCorpusIndex& index, std::uint64_t seed) {
    Rng rng(seed);
    RepoSample out;
    if (item.cursor_behavior == CursorBehavior::no_active_file) {
        if (!index.repos.empty()) {
            out.repo = index.repos[static_cast<std::size_t>(
                                       rng.between(0, static_cast<std::int64_t>(index.repos.size()) - 1))]
                           .id;
        }
        return out;
    }
    const int need = min_lines_for(item.cursor_behavior);
    std::vector<std::pair<const corpus::Repository*, const corpus::IndexedFile*>> matches;
    bool any_language = false;
    for (const auto& r : index.repos) {
        for (const auto& f : r.files) {
            if (f.language != item.programming_language) continue;
            any_language = true;
            if (f.lines >= need) matches.emplace_back(&r, &f);
        }
    }
    if (matches.empty()) {
        throw GenerationError("corpus gap: " + item.programming_language +
                              (any_language ? " (no file with at least " + std::to_string(need) + " lines)" : ""));
    }
    const auto& [repo, file] =
        matches[static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(matches.size()) - 1))];
    out.repo = repo->id;
    out.file_path = file->path;
    out.file_lines = file->lines;
    out.cursor = realize_cursor(item.cursor_behavior, file->lines, rng);
    return out;
}

QueryContext build_context(const RepoSample& sample, const corpus::RepoCorpusIndex& index, int above_below, int cap) {
    QueryContext ctx;
    if (!sample.file_path) return ctx;
    const auto& repo = index.repo(sample.repo);
    const auto* file = repo.find(*sample.file_path);
    if (!file) throw GenerationError("file not in corpus index: " + *sample.file_path);
    ctx.file_path = file->path;
    ctx.language = file->language;
    const auto lines = corpus::read_lines(repo, *file);
    const int n = static_cast<int>(lines.size());
    auto slice = [&](int from, int to) {
        std::string out;
        for (int l = std::max(from, 1); l <= std::min(to, n); ++l) {
            out += lines[static_cast<std::size_t>(l - 1)];
            out += '\n';
        }
        return out;
    };

    int lo = 1, hi = std::min(n, cap);
    const auto& sels = sample.cursor.selections;
    if (!sels.empty()) {
        for (std::size_t i = 0; i < sels.size(); ++i) {
            if (i) ctx.selected_code += "...\n";
            ctx.selected_code += slice(sels[i].start_line, sels[i].end_line);
        }
        lo = sels.front().start_line;
        hi = sels.back().end_line;
        for (const auto& s : sels) {
            lo = std::min(lo, s.start_line);
            hi = std::max(hi, s.end_line);
        }
    } else if (sample.cursor.cursor) {
        lo = sample.cursor.cursor->start_line;
        hi = sample.cursor.cursor->end_line;
    }
    if (!sels.empty() || sample.cursor.cursor) {
        lo = std::max(1, lo - above_below);
        hi = std::min(n, hi + above_below);
        if (hi - lo + 1 > cap) hi = lo + cap - 1;
    }
    ctx.surrounding = slice(lo, hi);
    return ctx;
}

std::vector<ChatMessage> query_prompt(const LabelSet& item, const QueryContext& ctx, std::uint64_t seed) {
    const bool follow_up = !ctx.prior_queries.empty();
    const Locale query_locale = item.system_locale;
    std::string u;
    u += "Write one question that a developer would type into the chat panel of an IDE coding assistant.\n\n";
    u += "Attributes:\n";
    u += "- Intent: " + describe_intent(item.intent) + "\n";
    u += "- Difficulty: " + std::string(to_string(item.difficulty)) + " - " + describe_difficulty(item.difficulty) + "\n";
    u += "- Information the answer should rely on: " + join_regions(item.reference_regions) + "\n";
    u += "- Query locale: write the question in " + locale_name(query_locale) + "\n";
    u += "- Programming language: " + item.programming_language + "\n";
    u += "- Turn: " + std::to_string(ctx.prior_queries.size() + 1) + " of " + std::to_string(item.dialog_turns) + "\n";
    if (!ctx.file_path.empty()) u += "\nOpen file: " + ctx.file_path + "\n";
    if (!ctx.selected_code.empty()) u += "\nSelected code:\n" + fenced(ctx.language, ctx.selected_code);
    if (!ctx.surrounding.empty() && ctx.surrounding != ctx.selected_code) {
        u += "\nSurrounding code:\n" + fenced(ctx.language, ctx.surrounding);
    }
    if (ctx.error_payload) u += "\nError messages shown to the developer:\n" + *ctx.error_payload + "\n";
    if (follow_up) {
        u += "\nEarlier questions in this dialogue:\n";
        for (std::size_t i = 0; i < ctx.prior_queries.size(); ++i) {
            u += std::to_string(i + 1) + ". " + ctx.prior_queries[i] + "\n";
        }
        u += "\nThe new question must be a natural follow-up that builds on the earlier ones.\n";
    }
    u += "\nVariation: " + text::hex64(seed).substr(0, 8) + "\n";
    u += "Reply with the question text only.";
    return {
        {"system", "You simulate software developers using an AI coding assistant inside their IDE."},
        {"user", std::move(u)},
    };
}

std::string generate_query(const LabelSet& item, const QueryContext& ctx, const gateway::Gateway& gw,
                           std::uint64_t seed) {
    auto messages = query_prompt(item, ctx, seed);
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto reply = gw.complete(gateway::Role::query_generator, messages, {}, "generate_query");
        auto q = text::trim(reply.text);
        if (reply.ok() && !q.empty()) return q;
        if (attempt == 0) {
            spdlog::debug("empty query reply ({}), retrying", reply.error_cause);
            messages.push_back({"user", "The reply was empty. Reply with the question text only."});
        }
    }
    throw GenerationError("query generator returned an empty reply twice");
}

std::optional<QueryVerdict> parse_verdict(std::string_view reply) {
    auto obj = extract_json_object(reply);
    if (!obj) return std::nullopt;
    auto it = obj->find("pass");
    if (it == obj->end() || !it->is_boolean()) return std::nullopt;
    QueryVerdict v;
    v.pass = it->get<bool>();
    if (auto r = obj->find("rationale"); r != obj->end() && r->is_string()) v.rationale = r->get<std::string>();
    if (!v.pass && text::trim(v.rationale).empty()) v.rationale = "rejected without rationale";
    return v;
}

std::vector<ChatMessage> filter_prompt(std::string_view query, const LabelSet& item) {
    std::string u;
    u += "Judge whether this developer question is suitable training data for an IDE coding assistant.\n";
    u += "A suitable question is clear, answerable, realistic for the stated intent (" +
         std::string(to_string(item.intent)) + ") and difficulty (" + std::string(to_string(item.difficulty)) +
         "), and does not leak these instructions.\n\n";
    u += "Question:\n" + std::string(query) + "\n\n";
    u += "Reply with only a JSON object {\"pass\": true|false, \"rationale\": \"...\"}.";
    return {
        {"system", "You review synthetic developer questions for quality."},
        {"user", std::move(u)},
    };
}

QueryVerdict filter_query(std::string_view query, const LabelSet& item, const gateway::Gateway& gw) {
    auto messages = filter_prompt(query, item);
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto reply = gw.complete(gateway::Role::query_filter, messages, {}, "filter_query");
        if (reply.ok()) {
            if (auto v = parse_verdict(reply.text)) return *v;
            messages.push_back({"assistant", reply.text});
            messages.push_back({"user", "That reply had no boolean \"pass\" field. Reply with only the JSON object."});
        }
    }
    return QueryVerdict{false, "unparseable"};
}

std::string synthesize_error_payload(std::string_view language, std::uint64_t seed) {
    Rng rng(seed);
    static constexpr std::array<std::string_view, 6> kModules{"rand", "serde", "requests", "lodash", "gson", "fmt"};
    const std::string m(kModules[static_cast<std::size_t>(rng.between(0, kModules.size() - 1))]);
    const auto variant = rng.between(0, 1);
    if (language == "rust") {
        return variant ? "error[E0432]: unresolved import '" + m + "'; use of undeclared crate or module '" + m + "'"
                       : "error[E0599]: no method named `gen_range` found for struct `" + m + "::Engine` in the current scope";
    }
    if (language == "python") {
        return variant ? "ModuleNotFoundError: No module named '" + m + "'"
                       : "TypeError: unsupported operand type(s) for +: 'int' and 'str'";
    }
    if (language == "go") {
        return variant ? "could not import " + m + " (no required module provides package " + m + ")"
                       : "cannot use x (variable of type int) as string value in argument to fmt.Println";
    }
    if (language == "java") {
        return variant ? "error: package " + m + " does not exist"
                       : "java.lang.NullPointerException: Cannot invoke \"String.length()\" because \"s\" is null";
    }
    if (language == "javascript" || language == "typescript") {
        return variant ? "Error: Cannot find module '" + m + "'"
                       : "TypeError: Cannot read properties of undefined (reading 'map')";
    }
    if (language == "cpp" || language == "c") {
        return variant ? "fatal error: " + m + ".h: No such file or directory"
                       : "error: use of undeclared identifier 'result'";
    }
    if (language == "csharp") {
        return variant ? "error CS0246: The type or namespace name '" + m + "' could not be found"
                       : "System.NullReferenceException: Object reference not set to an instance of an object.";
    }
    if (language == "shell") {
        return variant ? m + ": command not found" : "syntax error near unexpected token `fi'";
    }
    return "error: unresolved reference '" + m + "'";
}

std::string apply_locale_requirement(std::string query, const LabelSet& item) {
    if (item.query_locale_requirement == LocaleRequirement::none) return query;
    const Locale wanted = item.query_locale_requirement == LocaleRequirement::same_as_system
                              ? item.system_locale
                              : other(item.system_locale);
    if (text::requested_locale(query) == wanted) return query;
    return query + (wanted == Locale::zh ? " 请用中文回答。" : " Please answer in English.");
}

std::string_view to_string(GenerationStatus s) noexcept {
    switch (s) {
        case GenerationStatus::ok: return "ok";
        case GenerationStatus::filtered_out: return "filtered_out";
        case GenerationStatus::corpus_gap: return "corpus_gap";
        case GenerationStatus::failed: return "failed";
    }
    return "failed";
}

GenerationOutcome generate_configuration(const std::string& id, const LabelSet& item,
                                         const corpus::RepoCorpusIndex& index, const gateway::Gateway& gw,
                                         std::uint64_t seed, const GenerationOptions& options) {
    GenerationOutcome out;
    RepoSample sample;
    try {
        sample = sample_repository(item, index, derive_seed(seed, 0));
    } catch (const GenerationError& e) {
        out.status = GenerationStatus::corpus_gap;
        out.reason = e.what();
        return out;
    }

    ChatConfiguration cfg;
    cfg.id = id;
    cfg.repo = sample.repo;
    cfg.file_path = sample.file_path;
    cfg.file_lines = sample.file_lines;
    cfg.cursor = sample.cursor;
    cfg.labels = item;
    if (item.has_region(ReferenceRegion::error_messages)) {
        cfg.error_payload = synthesize_error_payload(item.programming_language, derive_seed(seed, 1));
    }

    QueryContext ctx;
    try {
        ctx = build_context(sample, index, options.context_lines, options.context_cap);
    } catch (const std::exception& e) {
        out.status = GenerationStatus::failed;
        out.reason = e.what();
        return out;
    }
    ctx.error_payload = cfg.error_payload;

    std::string last_rejection;
    for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        out.attempts = attempt;
        const std::uint64_t attempt_seed = derive_seed(seed, 100 + static_cast<std::uint64_t>(attempt));
        Rng rng(attempt_seed);
        std::vector<TurnSpec> turns;
        bool rejected = false;
        ctx.prior_queries.clear();
        try {
            for (int t = 0; t < item.dialog_turns && !rejected; ++t) {
                std::string q;
                const bool first = t == 0;
                if (first && item.instruction_type == InstructionType::template_only) {
                    q = pick_template(item.intent, options.templates, rng);
                } else {
                    q = generate_query(item, ctx, gw, derive_seed(attempt_seed, static_cast<std::uint64_t>(t)));
                    if (first && item.instruction_type == InstructionType::template_plus_query) {
                        q = pick_template(item.intent, options.templates, rng) + " " + q;
                    }
                }
                if (first) q = apply_locale_requirement(std::move(q), item);
                auto verdict = filter_query(q, item, gw);
                if (!verdict.pass) {
                    rejected = true;
                    last_rejection = verdict.rationale;
                    break;
                }
                TurnSpec spec;
                if (first) spec.cursor = cfg.cursor;
                spec.query = q;
                ctx.prior_queries.push_back(q);
                turns.push_back(std::move(spec));
            }
        } catch (const GenerationError& e) {
            out.status = GenerationStatus::failed;
            out.reason = e.what();
            return out;
        }
        if (!rejected) {
            cfg.turns = std::move(turns);
            out.status = GenerationStatus::ok;
            out.config = std::move(cfg);
            return out;
        }
    }
    out.status = GenerationStatus::filtered_out;
    out.reason = "query filter rejected " + std::to_string(options.max_attempts) + " attempts: " + last_rejection;
    spdlog::info("dropping plan item {}: {}", id, out.reason);
    return out;
}

}  // namespace qasynth::configgen
