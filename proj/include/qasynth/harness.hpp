// SPDX-License-Identifier: Apache-2.0
//
// Headless editor harness. Each session copies the target repository into a
// scratch workspace, opens the target file, and then for every dialogue turn
// applies the turn's cursor action, assembles the assistant prompt from the
// editor state and dialogue history, sends it, and records the exchange.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qasynth/corpus.hpp"
#include "qasynth/gateway.hpp"
#include "qasynth/taxonomy.hpp"

namespace qasynth::harness {

namespace fs = std::filesystem;

class SessionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by run_turn when the assistant endpoint fails.
class TurnFailed : public SessionError {
public:
    using SessionError::SessionError;
};

struct EditorState {
    std::vector<LineRange> selections;
    std::optional<LineRange> cursor;

    friend bool operator==(const EditorState&, const EditorState&) = default;
};

struct WorkspaceSession {
    std::string session_id;
    ChatConfiguration config;
    fs::path workspace;  // scratch copy of the repository
    std::optional<std::string> open_file;
    std::vector<std::string> file_lines;
    EditorState editor;
    int turn_counter = 0;
    std::int64_t next_event = 1;
    std::vector<std::pair<std::string, std::string>> history;  // (query, response)
};

struct EventSequence {
    std::int64_t cursor_applied = 0;
    std::int64_t dialogue_triggered = 0;
    std::int64_t captured = 0;
    std::int64_t stored = 0;

    bool ordered() const noexcept {
        return 0 < cursor_applied && cursor_applied < dialogue_triggered && dialogue_triggered < captured &&
               captured < stored;
    }
    friend bool operator==(const EventSequence&, const EventSequence&) = default;
};

struct TraceRecord {
    std::string session_id;
    int turn_index = 0;
    std::vector<ChatMessage> prompt;
    EditorState editor;
    TriggerMethod trigger_method = TriggerMethod::chat_view;
    std::string query;
    std::string selected_code;
    std::string response;
    std::string endpoint_id;
    EventSequence events;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// A completed multi-turn session, persisted as one JSONL line.
struct DialogueSession {
    ChatConfiguration config;
    std::vector<TraceRecord> turns;
};

struct HarnessOptions {
    fs::path work_root = fs::temp_directory_path() / "qasynth-work";
    bool keep_workspaces = false;
    int context_lines = 30;
    int context_cap = 200;
};

/// Copies the configuration's repository into a fresh scratch directory and
/// opens its target file. Errors name the missing path.
WorkspaceSession open_session(const ChatConfiguration& config, const corpus::RepoCorpusIndex& index,
                              const HarnessOptions& options = {});

/// Removes the scratch workspace.
void close_session(WorkspaceSession& session);

/// System preamble for a trigger surface.
const std::string& system_preamble(TriggerMethod trigger);

/// Instruction sentences embedded in the preambles. A response that repeats
/// one verbatim has leaked its prompt.
std::vector<std::string> prompt_sentinels();

/// Prompt for the current editor state. Layout: system message holding the
/// preamble, file context, selection, and error messages; then the dialogue
/// history as alternating user/assistant messages; then the query.
std::vector<ChatMessage> assemble_prompt(const WorkspaceSession& session, const std::string& query,
                                         const HarnessOptions& options = {});

/// Plain-text rendering of a message list.
std::string render_prompt(const std::vector<ChatMessage>& messages);

/// Selection, else cursor move, else no change.
void apply_cursor(WorkspaceSession& session, const CursorSpec& spec);

/// One dialogue turn. Throws TurnFailed if the assistant endpoint errors.
TraceRecord run_turn(WorkspaceSession& session, const TurnSpec& spec, const std::string& query,
                     const gateway::Gateway& gw, const HarnessOptions& options = {});

struct SessionOutcome {
    std::optional<DialogueSession> session;  // set on success only
    std::string failure;                     // set on failure
    int failed_turn = -1;
};

/// All turns of a configuration. A failure discards the partial session.
SessionOutcome run_session(const ChatConfiguration& config, const corpus::RepoCorpusIndex& index,
                           const gateway::Gateway& gw, const HarnessOptions& options = {});

void to_json(json& j, const EditorState& v);
void from_json(const json& j, EditorState& v);
void to_json(json& j, const EventSequence& v);
void from_json(const json& j, EventSequence& v);
void to_json(json& j, const TraceRecord& v);
void from_json(const json& j, TraceRecord& v);
void to_json(json& j, const DialogueSession& v);
void from_json(const json& j, DialogueSession& v);

}  // namespace qasynth::harness
