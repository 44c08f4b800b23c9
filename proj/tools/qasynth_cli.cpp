// SPDX-License-Identifier: Apache-2.0
//
// qasynth: command-line front end for the pipeline stages.

#include <unistd.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "qasynth/jsonl.hpp"
#include "qasynth/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qasynth;

namespace {

fs::path dir_of(const fs::path& p) { return p.has_parent_path() ? p.parent_path() : fs::path("."); }

fs::path default_work_root() {
    return fs::temp_directory_path() / ("qasynth-work-" + std::to_string(::getpid()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthesize IDE code question-answering SFT data"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")->capture_default_str();

    // index
    auto* index_cmd = app.add_subcommand("index", "Index a directory of repositories");
    std::string index_corpus, index_out;
    index_cmd->add_option("--corpus", index_corpus, "Directory of repositories")->required();
    index_cmd->add_option("--out", index_out, "Index JSON to write")->required();

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Label interaction logs and write a behavior profile");
    std::string logs, profile_out, analyze_pool, rules_file;
    int analyze_jobs = 1;
    analyze_cmd->add_option("--logs", logs, "Interaction log (JSONL)")->required();
    analyze_cmd->add_option("--out", profile_out, "Profile JSON to write")->required();
    analyze_cmd->add_option("--pool", analyze_pool, "Pool config; needed for interactions without hand labels");
    analyze_cmd->add_option("--rules", rules_file, "Rule matcher config (templates, languages)");
    analyze_cmd->add_option("--jobs", analyze_jobs, "Parallel classifications")->capture_default_str();

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Sample a production plan from a profile");
    std::string profile_in, plan_out;
    int total = 0;
    std::uint64_t plan_seed = 0;
    plan_cmd->add_option("--profile", profile_in, "Profile JSON")->required();
    plan_cmd->add_option("--total", total, "Number of configurations")->required()->check(CLI::NonNegativeNumber);
    plan_cmd->add_option("--seed", plan_seed, "Random seed")->required();
    plan_cmd->add_option("--out", plan_out, "Plan JSON to write (default: plan.json beside the profile)");

    // produce
    auto* produce_cmd = app.add_subcommand("produce", "Generate configurations and run editor sessions");
    std::string plan_in, corpus_in, produce_pool, produce_out, requeue_in, work_root;
    std::uint64_t produce_seed = 0;
    int produce_jobs = 1;
    bool keep_workspaces = false;
    produce_cmd->add_option("--plan", plan_in, "Plan JSON")->required();
    produce_cmd->add_option("--corpus", corpus_in, "Repository directory or index JSON")->required();
    produce_cmd->add_option("--pool", produce_pool, "Pool config JSON")->required();
    produce_cmd->add_option("--seed", produce_seed, "Random seed")->required();
    produce_cmd->add_option("--out-dir", produce_out, "Output directory (default: beside the plan)");
    produce_cmd->add_option("--requeue", requeue_in, "Requeue file from an earlier round to run again");
    produce_cmd->add_option("--jobs", produce_jobs, "Parallel sessions")->capture_default_str();
    produce_cmd->add_option("--work-root", work_root, "Scratch directory for session workspaces");
    produce_cmd->add_flag("--keep-workspaces", keep_workspaces, "Leave session workspaces on disk");

    // judge
    auto* judge_cmd = app.add_subcommand("judge", "Score candidate responses and admit 5-point answers");
    std::string traces_in, judge_pool, judge_out;
    int judge_jobs = 1;
    std::size_t batch = 64;
    judge_cmd->add_option("--traces", traces_in, "Traces JSONL")->required();
    judge_cmd->add_option("--pool", judge_pool, "Pool config JSON")->required();
    judge_cmd->add_option("--out-dir", judge_out, "Output directory (default: beside the traces)");
    judge_cmd->add_option("--jobs", judge_jobs, "Parallel sessions")->capture_default_str();
    judge_cmd->add_option("--batch", batch, "Sessions per atomic append")->capture_default_str()->check(
        CLI::PositiveNumber);

    // rules
    auto* rules_cmd = app.add_subcommand("rules", "Print the deduction rule table as JSON");
    std::string rules_out;
    rules_cmd->add_option("--out", rules_out, "Write to a file instead of stdout");

    // report
    auto* report_cmd = app.add_subcommand("report", "Compute PSR, UR, agreement and distribution distance");
    std::string dataset_in, cards_in, report_plan, human_in, report_json;
    report_cmd->add_option("--dataset", dataset_in, "Dataset JSONL")->required();
    report_cmd->add_option("--scorecards", cards_in, "Scorecards JSONL")->required();
    report_cmd->add_option("--plan", report_plan, "Plan JSON")->required();
    report_cmd->add_option("--human", human_in, "JSONL of {\"system\": n, \"human\": m} score pairs");
    report_cmd->add_option("--json", report_json, "Also write the report as JSON");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*index_cmd) {
            auto idx = corpus::index_directory(index_corpus);
            io::write_json(index_out, idx);
            std::cout << idx.repos.size() << " repositories, " << idx.file_count() << " files\n";
        } else if (*analyze_cmd) {
            std::optional<gateway::Gateway> gw;
            if (!analyze_pool.empty()) gw.emplace(gateway::PoolConfig::load(analyze_pool));
            behavior::RuleMatcherConfig rules;
            if (!rules_file.empty()) rules = behavior::RuleMatcherConfig::from_json(io::read_json(rules_file));
            auto r = pipeline::stage_analyze(logs, profile_out, gw ? &*gw : nullptr, rules, analyze_jobs);
            std::cout << r.labeled.size() << " interactions labeled, " << r.unclassified << " unclassified\n";
        } else if (*plan_cmd) {
            const fs::path out = plan_out.empty() ? dir_of(profile_in) / "plan.json" : fs::path(plan_out);
            auto plan = pipeline::stage_plan(profile_in, total, plan_seed, out);
            std::cout << plan.total << " configurations in " << plan.items.size() << " items -> " << out.string()
                      << "\n";
        } else if (*produce_cmd) {
            gateway::Gateway gw(gateway::PoolConfig::load(produce_pool));
            auto index = corpus::load_index(corpus_in);
            pipeline::ProduceOptions opts;
            opts.out_dir = produce_out.empty() ? dir_of(plan_in) : fs::path(produce_out);
            if (!requeue_in.empty()) opts.requeue_in = requeue_in;
            opts.jobs = produce_jobs;
            opts.harness.work_root = work_root.empty() ? default_work_root() : fs::path(work_root);
            opts.harness.keep_workspaces = keep_workspaces;
            auto c = pipeline::stage_produce(plan_in, index, gw, produce_seed, opts);
            std::cout << "planned " << c.planned << ", carried over " << c.carried_over << ", generated "
                      << c.generated << ", filtered out " << c.filtered_out << ", corpus gap " << c.corpus_gap
                      << ", generation failed " << c.generation_failed << "\n"
                      << "sessions ok " << c.sessions_ok << ", requeued " << c.sessions_requeued << ", dropped "
                      << c.sessions_dropped << "\n";
            if (!keep_workspaces && work_root.empty()) {
                std::error_code ec;
                fs::remove_all(opts.harness.work_root, ec);
            }
        } else if (*judge_cmd) {
            gateway::Gateway gw(gateway::PoolConfig::load(judge_pool));
            pipeline::JudgeOptions opts;
            opts.out_dir = judge_out.empty() ? dir_of(traces_in) : fs::path(judge_out);
            opts.jobs = judge_jobs;
            opts.batch_size = batch;
            auto c = pipeline::stage_judge(traces_in, gw, opts);
            std::cout << "sessions " << c.sessions << ", skipped " << c.skipped_existing << ", judged " << c.judged
                      << ", admitted " << c.admitted << ", requeued " << c.requeued << ", dropped " << c.dropped
                      << "\n";
        } else if (*rules_cmd) {
            const auto table = judge::deduction_table_json();
            if (rules_out.empty()) {
                std::cout << table.dump(2) << "\n";
            } else {
                io::write_json(rules_out, table);
            }
        } else if (*report_cmd) {
            std::optional<fs::path> human;
            if (!human_in.empty()) human = human_in;
            auto r = pipeline::stage_report(dataset_in, cards_in, report_plan, human);
            std::cout << metrics::render_text(r);
            if (!report_json.empty()) io::write_json(report_json, metrics::to_json(r));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
