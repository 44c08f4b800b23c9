// SPDX-License-Identifier: Apache-2.0
//
// Turns planned label sets into concrete chat configurations: choose a
// repository file and cursor state, generate queries with a model, and keep
// only queries that pass a model-based quality filter.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qasynth/corpus.hpp"
#include "qasynth/gateway.hpp"
#include "qasynth/taxonomy.hpp"

namespace qasynth::configgen {

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RepoSample {
    std::string repo;
    std::optional<std::string> file_path;
    std::optional<int> file_lines;
    CursorSpec cursor;

    friend bool operator==(const RepoSample&, const RepoSample&) = default;
};

/// Minimum file length able to realize a cursor behavior.
int min_lines_for(CursorBehavior behavior);

/// Picks a file of the item's language and a cursor state realizing its
/// cursor behavior. Throws GenerationError("corpus gap: <language>") when no
/// file fits.
RepoSample sample_repository(const LabelSet& item, const corpus::RepoCorpusIndex& index, std::uint64_t seed);

inline constexpr int kContextLines = 30;
inline constexpr int kContextCap = 200;

struct QueryContext {
    std::string file_path;
    std::string language;
    std::string selected_code;
    std::string surrounding;  // selection plus nearby lines, capped
    std::vector<std::string> prior_queries;
    std::optional<std::string> error_payload;
};

/// Selected text and a window of `above_below` lines around it, at most
/// `cap` lines in total.
QueryContext build_context(const RepoSample& sample, const corpus::RepoCorpusIndex& index,
                           int above_below = kContextLines, int cap = kContextCap);

std::vector<ChatMessage> query_prompt(const LabelSet& item, const QueryContext& context, std::uint64_t seed);

/// A query from the generator role. An empty reply is retried once, then
/// raises GenerationError.
std::string generate_query(const LabelSet& item, const QueryContext& context, const gateway::Gateway& gw,
                           std::uint64_t seed);

struct QueryVerdict {
    bool pass = false;
    std::string rationale;
};

/// nullopt when the reply has no boolean "pass" field.
std::optional<QueryVerdict> parse_verdict(std::string_view reply);

std::vector<ChatMessage> filter_prompt(std::string_view query, const LabelSet& item);

/// Quality verdict from the filter role. An unparseable reply is retried
/// once and then counts as a failure with rationale "unparseable".
QueryVerdict filter_query(std::string_view query, const LabelSet& item, const gateway::Gateway& gw);

/// Compiler/runtime error text for code-repair items, drawn from a bank keyed
/// by language.
std::string synthesize_error_payload(std::string_view language, std::uint64_t seed);

/// Appends an explicit answer-language directive when the label demands one
/// and the query does not already carry it.
std::string apply_locale_requirement(std::string query, const LabelSet& item);

struct GenerationOptions {
    int max_attempts = 3;
    int context_lines = kContextLines;
    int context_cap = kContextCap;
    std::vector<std::string> templates{"explain code", "generate comments", "/explain", "/doc", "/fix", "/test"};
};

enum class GenerationStatus { ok, filtered_out, corpus_gap, failed };
std::string_view to_string(GenerationStatus s) noexcept;

struct GenerationOutcome {
    GenerationStatus status = GenerationStatus::failed;
    std::optional<ChatConfiguration> config;
    std::string reason;
    int attempts = 0;
};

/// Full configuration for one planned item, including every turn's query.
GenerationOutcome generate_configuration(const std::string& id, const LabelSet& item,
                                         const corpus::RepoCorpusIndex& index, const gateway::Gateway& gw,
                                         std::uint64_t seed, const GenerationOptions& options = {});

}  // namespace qasynth::configgen
