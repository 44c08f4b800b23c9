// SPDX-License-Identifier: Apache-2.0
//
// Stage orchestration. Each stage reads and writes files only, so stages can
// run separately and be swapped out. Every stage records its inputs, outputs
// and counts in manifest.json inside its output directory.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qasynth/behavior.hpp"
#include "qasynth/config_gen.hpp"
#include "qasynth/corpus.hpp"
#include "qasynth/gateway.hpp"
#include "qasynth/harness.hpp"
#include "qasynth/judge.hpp"
#include "qasynth/metrics.hpp"

namespace qasynth::pipeline {

namespace fs = std::filesystem;

inline constexpr int kRequeueCap = 3;

/// A configuration handed to the next production round, or dropped.
struct RequeueRecord {
    ChatConfiguration configuration;  // round already advanced for requeues
    std::string stage;
    std::string reason;
};

struct DropRecord {
    std::string id;
    std::string stage;
    std::string status;
    std::string reason;
    int round = 1;
};

struct StageRecord {
    std::string version;
    std::int64_t sequence = 0;  // order in which stages last wrote this directory
    std::uint64_t seed = 0;
    std::map<std::string, std::string> inputs;   // file name -> sha256
    std::map<std::string, std::string> outputs;  // file name -> sha256
    std::map<std::string, std::int64_t> counts;
};

struct RunManifest {
    std::string run_id;
    std::uint64_t seed = 0;
    std::map<std::string, StageRecord> stages;

    /// Conservation equalities of every recorded stage. Empty when they hold.
    std::vector<std::string> conservation_problems() const;
    /// Output files whose digest no longer matches, relative to `dir`. A file
    /// written by several stages is checked against the latest writer.
    std::vector<std::string> digest_problems(const fs::path& dir) const;

    static RunManifest load_or_empty(const fs::path& path);
    void save(const fs::path& path) const;
};

inline const char* const kManifestFile = "manifest.json";

struct AnalyzeResult {
    behavior::BehaviorProfile profile;
    std::vector<behavior::LabeledInteraction> labeled;
    std::size_t unclassified = 0;
};

/// logs.jsonl -> profile.json. Without a pool, interactions lacking hand
/// labels stay unclassified on the model dimensions.
AnalyzeResult stage_analyze(const fs::path& logs, const fs::path& out, const gateway::Gateway* gw,
                            const behavior::RuleMatcherConfig& rules = {}, int jobs = 1);

/// profile.json -> plan.json
behavior::ProductionPlan stage_plan(const fs::path& profile, int total, std::uint64_t seed, const fs::path& out);

struct ProduceOptions {
    fs::path out_dir;
    std::optional<fs::path> requeue_in;  // configurations carried over from an earlier round
    int jobs = 1;
    int requeue_cap = kRequeueCap;
    harness::HarnessOptions harness;
    configgen::GenerationOptions generation;
};

struct ProduceCounts {
    std::int64_t planned = 0;
    std::int64_t carried_over = 0;
    std::int64_t generated = 0;
    std::int64_t filtered_out = 0;
    std::int64_t corpus_gap = 0;
    std::int64_t generation_failed = 0;
    std::int64_t sessions_ok = 0;
    std::int64_t sessions_requeued = 0;
    std::int64_t sessions_dropped = 0;
};

/// plan.json + corpus + pool -> traces.jsonl, requeue.jsonl, drops.jsonl.
ProduceCounts stage_produce(const fs::path& plan, const corpus::RepoCorpusIndex& index, const gateway::Gateway& gw,
                            std::uint64_t seed, const ProduceOptions& options);

struct JudgeOptions {
    fs::path out_dir;
    int jobs = 1;
    int requeue_cap = kRequeueCap;
    std::size_t batch_size = 64;
    judge::DetectorConfig detectors;
};

struct JudgeCounts {
    std::int64_t sessions = 0;
    std::int64_t skipped_existing = 0;
    std::int64_t judged = 0;
    std::int64_t admitted = 0;
    std::int64_t requeued = 0;
    std::int64_t dropped = 0;
    std::int64_t scorecards = 0;
};

/// traces.jsonl + pool -> dataset.jsonl, scorecards.jsonl, requeue.jsonl,
/// drops.jsonl. Appends in batches; queries already settled in the output
/// directory are skipped, so a restarted run never duplicates an example.
JudgeCounts stage_judge(const fs::path& traces, const gateway::Gateway& gw, const JudgeOptions& options);

metrics::MetricsReport stage_report(const fs::path& dataset, const fs::path& scorecards, const fs::path& plan,
                                    const std::optional<fs::path>& human_pairs = std::nullopt);

void to_json(json& j, const RequeueRecord& v);
void from_json(const json& j, RequeueRecord& v);
void to_json(json& j, const DropRecord& v);
void from_json(const json& j, DropRecord& v);
void to_json(json& j, const StageRecord& v);
void from_json(const json& j, StageRecord& v);
void to_json(json& j, const RunManifest& v);
void from_json(const json& j, RunManifest& v);

}  // namespace qasynth::pipeline
