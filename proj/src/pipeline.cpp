// SPDX-License-Identifier: Apache-2.0

#include "qasynth/pipeline.hpp"

#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "qasynth/jsonl.hpp"
#include "qasynth/parallel.hpp"
#include "qasynth/rng.hpp"
#include "qasynth/text.hpp"

namespace qasynth::pipeline {

namespace {

constexpr const char* kStageVersion = "1";

std::string digest_or_empty(const fs::path& p) { return fs::exists(p) ? io::sha256_file(p) : std::string{}; }

void record_stage(const fs::path& out_dir, const std::string& name, StageRecord record) {
    const auto path = out_dir / kManifestFile;
    auto m = RunManifest::load_or_empty(path);
    if (m.run_id.empty()) m.run_id = "run-" + text::hex64(text::fnv1a64(out_dir.lexically_normal().string()));
    if (m.seed == 0) m.seed = record.seed;
    std::int64_t last = 0;
    for (const auto& [_, s] : m.stages) last = std::max(last, s.sequence);
    record.version = kStageVersion;
    record.sequence = last + 1;
    m.stages[name] = std::move(record);
    m.save(path);
}

/// Rewrites a JSONL file keeping only records from other stages, then
/// appends this stage's records.
template <typename T>
void replace_stage_records(const fs::path& path, const std::string& stage, const std::vector<T>& records) {
    std::vector<json> kept;
    if (fs::exists(path)) {
        for (auto& j : io::read_jsonl(path)) {
            if (j.value("stage", std::string{}) != stage) kept.push_back(std::move(j));
        }
    }
    for (const auto& r : records) kept.emplace_back(r);
    io::write_jsonl(path, kept);
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

std::vector<std::string> RunManifest::conservation_problems() const {
    std::vector<std::string> out;
    auto get = [](const StageRecord& s, const char* k) {
        auto it = s.counts.find(k);
        return it == s.counts.end() ? std::int64_t{0} : it->second;
    };
    if (auto it = stages.find("produce"); it != stages.end()) {
        const auto& s = it->second;
        if (get(s, "planned") != get(s, "generated") + get(s, "filtered_out") + get(s, "corpus_gap") +
                                      get(s, "generation_failed")) {
            out.push_back("produce: planned != generated + filtered_out + corpus_gap + generation_failed");
        }
        if (get(s, "generated") + get(s, "carried_over") !=
            get(s, "sessions_ok") + get(s, "sessions_requeued") + get(s, "sessions_dropped")) {
            out.push_back("produce: generated + carried_over != sessions_ok + sessions_requeued + sessions_dropped");
        }
    }
    if (auto it = stages.find("judge"); it != stages.end()) {
        const auto& s = it->second;
        if (get(s, "sessions") != get(s, "skipped_existing") + get(s, "judged")) {
            out.push_back("judge: sessions != skipped_existing + judged");
        }
        if (get(s, "judged") != get(s, "admitted") + get(s, "requeued") + get(s, "dropped")) {
            out.push_back("judge: judged != admitted + requeued + dropped");
        }
    }
    return out;
}

std::vector<std::string> RunManifest::digest_problems(const fs::path& dir) const {
    std::map<std::string, std::pair<std::int64_t, std::pair<std::string, std::string>>> latest;
    for (const auto& [name, s] : stages) {
        for (const auto& [file, digest] : s.outputs) {
            auto it = latest.find(file);
            if (it == latest.end() || it->second.first < s.sequence) latest[file] = {s.sequence, {name, digest}};
        }
    }
    std::vector<std::string> out;
    for (const auto& [file, v] : latest) {
        if (digest_or_empty(dir / file) != v.second.second) out.push_back(v.second.first + ": " + file);
    }
    return out;
}

RunManifest RunManifest::load_or_empty(const fs::path& path) {
    if (!fs::exists(path)) return {};
    return io::read_json(path).get<RunManifest>();
}

void RunManifest::save(const fs::path& path) const { io::write_json(path, *this); }

// ---------------------------------------------------------------------------
// analyze / plan

AnalyzeResult stage_analyze(const fs::path& logs, const fs::path& out, const gateway::Gateway* gw,
                            const behavior::RuleMatcherConfig& rules, int jobs) {
    const auto interactions = io::read_records<QaInteraction>(logs);
    if (interactions.empty()) throw behavior::ProfileError("no interactions in " + logs.string());
    for (const auto& in : interactions) {
        auto v = validate_interaction(in);
        if (!v.ok()) throw behavior::ProfileError("interaction " + in.id + ": " + v.violations.front().message);
    }
    if (auto v = validate_prior_chains(interactions); !v.ok()) {
        throw behavior::ProfileError(v.violations.front().message);
    }

    AnalyzeResult r;
    r.labeled = behavior::label_interactions(interactions, gw, rules, jobs);
    std::vector<LabelSet> labels;
    for (const auto& l : r.labeled) {
        labels.push_back(l.labels);
        if (!l.classified) ++r.unclassified;
    }
    r.profile = behavior::build_profile(labels);
    r.profile.validate();
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    io::write_json(out, r.profile);

    std::vector<json> lines;
    for (const auto& l : r.labeled) lines.push_back({{"id", l.id}, {"labels", l.labels}, {"classified", l.classified}});
    auto labels_path = out;
    labels_path.replace_extension(".labels.jsonl");
    io::write_jsonl(labels_path, lines);

    const auto dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
    StageRecord rec;
    rec.inputs[logs.filename().string()] = io::sha256_file(logs);
    rec.outputs[out.filename().string()] = io::sha256_file(out);
    rec.outputs[labels_path.filename().string()] = io::sha256_file(labels_path);
    rec.counts = {{"interactions", static_cast<std::int64_t>(interactions.size())},
                  {"unclassified", static_cast<std::int64_t>(r.unclassified)}};
    record_stage(dir, "analyze", std::move(rec));
    return r;
}

behavior::ProductionPlan stage_plan(const fs::path& profile_path, int total, std::uint64_t seed, const fs::path& out) {
    auto profile = io::read_json(profile_path).get<behavior::BehaviorProfile>();
    profile.validate();
    auto plan = behavior::make_production_plan(profile, total, seed);
    plan.validate();
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    io::write_json(out, plan);

    const auto dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
    StageRecord rec;
    rec.seed = seed;
    rec.inputs[profile_path.filename().string()] = io::sha256_file(profile_path);
    rec.outputs[out.filename().string()] = io::sha256_file(out);
    rec.counts = {{"total", total}, {"items", static_cast<std::int64_t>(plan.items.size())}};
    record_stage(dir, "plan", std::move(rec));
    return plan;
}

// ---------------------------------------------------------------------------
// produce

namespace {

struct ProduceSlot {
    configgen::GenerationOutcome generation;
    std::optional<ChatConfiguration> config;  // set for carried-over work
    harness::SessionOutcome session;
    bool ran = false;
};

}  // namespace

ProduceCounts stage_produce(const fs::path& plan_path, const corpus::RepoCorpusIndex& index,
                            const gateway::Gateway& gw, std::uint64_t seed, const ProduceOptions& options) {
    ProduceCounts counts;
    std::vector<std::pair<std::string, LabelSet>> planned;
    StageRecord rec;
    rec.seed = seed;
    if (!plan_path.empty()) {
        const auto plan = io::read_json(plan_path).get<behavior::ProductionPlan>();
        plan.validate();
        for (std::size_t k = 0; k < plan.items.size(); ++k) {
            for (int j = 0; j < plan.items[k].count; ++j) {
                planned.emplace_back("item" + std::to_string(k) + "-" + std::to_string(j), plan.items[k].labels);
            }
        }
        rec.inputs[plan_path.filename().string()] = io::sha256_file(plan_path);
    }
    std::vector<ChatConfiguration> carried;
    if (options.requeue_in) {
        for (auto& r : io::read_records<RequeueRecord>(*options.requeue_in)) carried.push_back(std::move(r.configuration));
        rec.inputs[options.requeue_in->filename().string()] = io::sha256_file(*options.requeue_in);
    }
    counts.planned = static_cast<std::int64_t>(planned.size());
    counts.carried_over = static_cast<std::int64_t>(carried.size());

    fs::create_directories(options.out_dir);
    fs::create_directories(options.harness.work_root);

    std::vector<ProduceSlot> slots(planned.size() + carried.size());
    parallel_for(slots.size(), options.jobs, [&](std::size_t i) {
        auto& slot = slots[i];
        if (i < planned.size()) {
            const auto& [id, labels] = planned[i];
            slot.generation =
                configgen::generate_configuration(id, labels, index, gw, derive_seed(seed, i), options.generation);
            if (slot.generation.status != configgen::GenerationStatus::ok) return;
            slot.config = *slot.generation.config;
        } else {
            slot.config = carried[i - planned.size()];
            slot.generation.status = configgen::GenerationStatus::ok;
        }
        if (auto v = validate_configuration(*slot.config); !v.ok()) {
            slot.session.failure = "invalid configuration: " + v.violations.front().field + ": " +
                                   v.violations.front().message;
            return;
        }
        slot.ran = true;
        slot.session = harness::run_session(*slot.config, index, gw, options.harness);
    });

    std::vector<json> traces;
    std::vector<RequeueRecord> requeue;
    std::vector<DropRecord> drops;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        auto& slot = slots[i];
        const bool is_planned = i < planned.size();
        if (is_planned) {
            switch (slot.generation.status) {
                case configgen::GenerationStatus::ok: ++counts.generated; break;
                case configgen::GenerationStatus::filtered_out: ++counts.filtered_out; break;
                case configgen::GenerationStatus::corpus_gap: ++counts.corpus_gap; break;
                case configgen::GenerationStatus::failed: ++counts.generation_failed; break;
            }
            if (slot.generation.status != configgen::GenerationStatus::ok) {
                drops.push_back({planned[i].first, "produce", std::string(configgen::to_string(slot.generation.status)),
                                 slot.generation.reason, 1});
                continue;
            }
        }
        if (slot.session.session) {
            ++counts.sessions_ok;
            traces.emplace_back(*slot.session.session);
            continue;
        }
        const auto& cfg = *slot.config;
        if (!slot.ran || cfg.round >= options.requeue_cap) {
            ++counts.sessions_dropped;
            drops.push_back({cfg.id, "produce", "session_failed", slot.session.failure, cfg.round});
        } else {
            ++counts.sessions_requeued;
            RequeueRecord r{cfg, "produce", slot.session.failure};
            r.configuration.round = cfg.round + 1;
            requeue.push_back(std::move(r));
        }
    }

    const auto traces_path = options.out_dir / "traces.jsonl";
    const auto requeue_path = options.out_dir / "requeue.jsonl";
    const auto drops_path = options.out_dir / "drops.jsonl";
    io::write_jsonl(traces_path, traces);
    replace_stage_records(requeue_path, "produce", requeue);
    replace_stage_records(drops_path, "produce", drops);

    rec.outputs["traces.jsonl"] = io::sha256_file(traces_path);
    rec.outputs["requeue.jsonl"] = io::sha256_file(requeue_path);
    rec.outputs["drops.jsonl"] = io::sha256_file(drops_path);
    rec.counts = {{"planned", counts.planned},
                  {"carried_over", counts.carried_over},
                  {"generated", counts.generated},
                  {"filtered_out", counts.filtered_out},
                  {"corpus_gap", counts.corpus_gap},
                  {"generation_failed", counts.generation_failed},
                  {"sessions_ok", counts.sessions_ok},
                  {"sessions_requeued", counts.sessions_requeued},
                  {"sessions_dropped", counts.sessions_dropped},
                  {"corpus_files", static_cast<std::int64_t>(index.file_count())}};
    record_stage(options.out_dir, "produce", std::move(rec));
    return counts;
}

// ---------------------------------------------------------------------------
// judge

JudgeCounts stage_judge(const fs::path& traces_path, const gateway::Gateway& gw, const JudgeOptions& options) {
    JudgeCounts counts;
    fs::create_directories(options.out_dir);
    const auto dataset_path = options.out_dir / "dataset.jsonl";
    const auto cards_path = options.out_dir / "scorecards.jsonl";
    const auto requeue_path = options.out_dir / "requeue.jsonl";
    const auto drops_path = options.out_dir / "drops.jsonl";

    // Queries settled by an earlier (possibly interrupted) run.
    std::set<std::string> admitted_ids;
    std::set<std::pair<std::string, int>> settled;
    std::int64_t dataset_size = 0;
    if (fs::exists(dataset_path)) {
        for (const auto& j : io::read_jsonl(dataset_path)) {
            admitted_ids.insert(j.at("query_id").get<std::string>());
            ++dataset_size;
        }
    }
    if (fs::exists(requeue_path)) {
        for (const auto& r : io::read_records<RequeueRecord>(requeue_path)) {
            if (r.stage == "judge") settled.emplace(r.configuration.id, r.configuration.round - 1);
        }
    }
    if (fs::exists(drops_path)) {
        for (const auto& d : io::read_records<DropRecord>(drops_path)) {
            if (d.stage == "judge") settled.emplace(d.id, d.round);
        }
    }

    const auto sessions = io::read_records<harness::DialogueSession>(traces_path);
    counts.sessions = static_cast<std::int64_t>(sessions.size());

    std::vector<const harness::DialogueSession*> pending;
    for (const auto& s : sessions) {
        if (admitted_ids.contains(s.config.id) || settled.contains({s.config.id, s.config.round})) {
            ++counts.skipped_existing;
            continue;
        }
        if (auto v = validate_configuration(s.config); !v.ok()) {
            throw std::runtime_error("trace " + s.config.id + " has an invalid configuration: " +
                                     v.violations.front().message);
        }
        pending.push_back(&s);
    }

    for (std::size_t begin = 0; begin < pending.size(); begin += options.batch_size) {
        const std::size_t end = std::min(pending.size(), begin + options.batch_size);
        std::vector<judge::Judgment> results(end - begin, judge::Judgment{{}, {}, judge::Requeue{}});
        parallel_for(end - begin, options.jobs, [&](std::size_t i) {
            results[i] = judge::judge_session(*pending[begin + i], gw, options.detectors);
        });

        std::vector<json> dataset_lines, card_lines;
        std::vector<json> requeue_lines, drop_lines;
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& session = *pending[begin + i];
            auto& res = results[i];
            ++counts.judged;
            for (const auto& c : res.cards) card_lines.emplace_back(c);
            counts.scorecards += static_cast<std::int64_t>(res.cards.size());
            if (auto* ex = std::get_if<TrainingExample>(&res.outcome)) {
                if (ex->final_score != 5) throw std::logic_error("admitted example without a 5-point score");
                ex->provenance.judged_seq = ++dataset_size;
                dataset_lines.emplace_back(*ex);
                admitted_ids.insert(ex->query_id);
                ++counts.admitted;
                continue;
            }
            const auto& reason = std::get<judge::Requeue>(res.outcome).reason;
            if (session.config.round >= options.requeue_cap) {
                ++counts.dropped;
                drop_lines.emplace_back(DropRecord{session.config.id, "judge", "dropped_after_cap",
                                                   reason + " after " + std::to_string(session.config.round) +
                                                       " rounds",
                                                   session.config.round});
            } else {
                ++counts.requeued;
                RequeueRecord r{session.config, "judge", reason};
                r.configuration.round = session.config.round + 1;
                requeue_lines.emplace_back(r);
            }
        }
        // Dataset first: a crash after this point leaves the admitted ids in
        // place, so the restarted run skips them.
        if (!dataset_lines.empty()) io::append_jsonl(dataset_path, dataset_lines);
        if (!card_lines.empty()) io::append_jsonl(cards_path, card_lines);
        if (!requeue_lines.empty()) io::append_jsonl(requeue_path, requeue_lines);
        if (!drop_lines.empty()) io::append_jsonl(drops_path, drop_lines);
        spdlog::info("judged {}/{} sessions", end, pending.size());
    }
    for (const auto& p : {dataset_path, cards_path}) {
        if (!fs::exists(p)) io::write_file_atomic(p, "");
    }

    StageRecord rec;
    rec.inputs[traces_path.filename().string()] = io::sha256_file(traces_path);
    rec.outputs["dataset.jsonl"] = io::sha256_file(dataset_path);
    rec.outputs["scorecards.jsonl"] = io::sha256_file(cards_path);
    if (fs::exists(requeue_path)) rec.outputs["requeue.jsonl"] = io::sha256_file(requeue_path);
    if (fs::exists(drops_path)) rec.outputs["drops.jsonl"] = io::sha256_file(drops_path);
    rec.counts = {{"sessions", counts.sessions},   {"skipped_existing", counts.skipped_existing},
                  {"judged", counts.judged},       {"admitted", counts.admitted},
                  {"requeued", counts.requeued},   {"dropped", counts.dropped},
                  {"scorecards", counts.scorecards}};
    record_stage(options.out_dir, "judge", std::move(rec));
    return counts;
}

// ---------------------------------------------------------------------------
// report

metrics::MetricsReport stage_report(const fs::path& dataset, const fs::path& scorecards, const fs::path& plan,
                                    const std::optional<fs::path>& human_pairs) {
    const auto examples = io::read_records<TrainingExample>(dataset);
    const auto cards = io::read_records<judge::ScoreCard>(scorecards);
    const auto p = io::read_json(plan).get<behavior::ProductionPlan>();
    std::optional<std::vector<std::pair<int, int>>> pairs;
    if (human_pairs) {
        pairs.emplace();
        for (const auto& j : io::read_jsonl(*human_pairs)) {
            pairs->emplace_back(j.at("system").get<int>(), j.at("human").get<int>());
        }
    }
    return metrics::build_report(examples, cards, p, pairs);
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const RequeueRecord& v) {
    j = json{{"configuration", v.configuration}, {"stage", v.stage}, {"reason", v.reason}};
}

void from_json(const json& j, RequeueRecord& v) {
    v.configuration = j.at("configuration").get<ChatConfiguration>();
    v.stage = j.value("stage", std::string{});
    v.reason = j.value("reason", std::string{});
}

void to_json(json& j, const DropRecord& v) {
    j = json{{"id", v.id}, {"stage", v.stage}, {"status", v.status}, {"reason", v.reason}, {"round", v.round}};
}

void from_json(const json& j, DropRecord& v) {
    v.id = j.at("id").get<std::string>();
    v.stage = j.value("stage", std::string{});
    v.status = j.value("status", std::string{});
    v.reason = j.value("reason", std::string{});
    v.round = j.value("round", 1);
}

void to_json(json& j, const StageRecord& v) {
    j = json{{"version", v.version}, {"sequence", v.sequence}, {"seed", v.seed}, {"inputs", v.inputs}, {"outputs", v.outputs},
             {"counts", v.counts}};
}

void from_json(const json& j, StageRecord& v) {
    v.version = j.value("version", std::string{});
    v.sequence = j.value("sequence", std::int64_t{0});
    v.seed = j.value("seed", std::uint64_t{0});
    v.inputs = j.value("inputs", std::map<std::string, std::string>{});
    v.outputs = j.value("outputs", std::map<std::string, std::string>{});
    v.counts = j.value("counts", std::map<std::string, std::int64_t>{});
}

void to_json(json& j, const RunManifest& v) {
    j = json{{"run_id", v.run_id}, {"seed", v.seed}, {"stages", v.stages}};
}

void from_json(const json& j, RunManifest& v) {
    v.run_id = j.value("run_id", std::string{});
    v.seed = j.value("seed", std::uint64_t{0});
    v.stages = j.value("stages", std::map<std::string, StageRecord>{});
}

}  // namespace qasynth::pipeline
