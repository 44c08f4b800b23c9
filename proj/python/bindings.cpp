// SPDX-License-Identifier: Apache-2.0
//
// Python bindings. Structured values cross the boundary as JSON strings; the
// pure-Python wrapper in qasynth/__init__.py converts them to dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qasynth/pipeline.hpp"

namespace py = pybind11;
using namespace qasynth;

namespace {

std::string dump(const json& j) { return j.dump(); }

json load(const std::string& s) { return json::parse(s); }

std::string rule_labels(const std::string& interaction_json) {
    auto in = load(interaction_json).get<QaInteraction>();
    auto r = behavior::classify_rule_dims(in);
    return dump({{"cursor_behavior", to_string(r.cursor_behavior)},
                 {"trigger_method", to_string(r.trigger_method)},
                 {"instruction_type", to_string(r.instruction_type)},
                 {"programming_language", r.programming_language},
                 {"system_locale", to_string(r.system_locale)},
                 {"dialog_turns", r.dialog_turns},
                 {"query_locale_requirement", to_string(r.query_locale_requirement)}});
}

std::string profile_from_labels(const std::string& labels_json) {
    return dump(behavior::build_profile(load(labels_json).get<std::vector<LabelSet>>()));
}

std::string make_plan(const std::string& profile_json, int total, std::uint64_t seed) {
    auto profile = load(profile_json).get<behavior::BehaviorProfile>();
    profile.validate();
    return dump(behavior::make_production_plan(profile, total, seed));
}

judge::JudgeContext context_from(const json& j) {
    judge::JudgeContext c;
    c.query_id = j.value("query_id", std::string{});
    c.scene = parse_trigger_method(j.value("scene", std::string{"chat_view"}));
    c.intent = parse_intent(j.value("intent", std::string{"general_qa"}));
    c.selected_code = j.value("selected_code", std::string{});
    c.required_locale = parse_locale(j.value("required_locale", std::string{"en"}));
    c.sentinels = j.contains("sentinels") ? j.at("sentinels").get<std::vector<std::string>>()
                                          : harness::prompt_sentinels();
    return c;
}

std::string apply_deductions(const std::string& response, const std::string& finish, const std::string& context_json) {
    gateway::CandidateResponse cand;
    cand.text = response;
    cand.finish = gateway::parse_finish_reason(finish);
    return dump(judge::apply_deductions(cand, context_from(load(context_json))));
}

py::object parse_score(const std::string& reply) {
    auto s = judge::parse_score(reply);
    if (!s) return py::none();
    return py::make_tuple(s->score, s->rationale);
}

py::dict accuracy5(const std::vector<std::pair<int, int>>& pairs) {
    auto a = metrics::accuracy5(pairs);
    py::dict d;
    auto opt = [](const std::optional<double>& v) -> py::object { return v ? py::cast(*v) : py::none(); };
    d["accuracy"] = opt(a.accuracy);
    d["usable_among_misses"] = opt(a.usable_among_misses);
    d["recall"] = opt(a.recall);
    d["pred5_pos"] = a.counts.pred5_pos;
    d["pred5_neg"] = a.counts.pred5_neg;
    d["human5_total"] = a.counts.human5_total;
    return d;
}

std::string analyze(const std::string& logs, const std::string& out, const std::string& pool) {
    std::optional<gateway::Gateway> gw;
    if (!pool.empty()) gw.emplace(gateway::PoolConfig::load(pool));
    py::gil_scoped_release release;
    auto r = pipeline::stage_analyze(logs, out, gw ? &*gw : nullptr);
    return dump(r.profile);
}

std::string plan(const std::string& profile, int total, std::uint64_t seed, const std::string& out) {
    py::gil_scoped_release release;
    return dump(pipeline::stage_plan(profile, total, seed, out));
}

py::dict produce(const std::string& plan_path, const std::string& corpus, const std::string& pool, std::uint64_t seed,
                 const std::string& out_dir, const std::string& work_root, int jobs) {
    pipeline::ProduceCounts c;
    {
        py::gil_scoped_release release;
        gateway::Gateway gw(gateway::PoolConfig::load(pool));
        auto index = corpus::load_index(corpus);
        pipeline::ProduceOptions opts;
        opts.out_dir = out_dir;
        opts.jobs = jobs;
        if (!work_root.empty()) opts.harness.work_root = work_root;
        c = pipeline::stage_produce(plan_path, index, gw, seed, opts);
    }
    py::dict d;
    d["planned"] = c.planned;
    d["generated"] = c.generated;
    d["filtered_out"] = c.filtered_out;
    d["corpus_gap"] = c.corpus_gap;
    d["generation_failed"] = c.generation_failed;
    d["sessions_ok"] = c.sessions_ok;
    d["sessions_requeued"] = c.sessions_requeued;
    d["sessions_dropped"] = c.sessions_dropped;
    return d;
}

py::dict judge_traces(const std::string& traces, const std::string& pool, const std::string& out_dir, int jobs) {
    pipeline::JudgeCounts c;
    {
        py::gil_scoped_release release;
        gateway::Gateway gw(gateway::PoolConfig::load(pool));
        pipeline::JudgeOptions opts;
        opts.out_dir = out_dir;
        opts.jobs = jobs;
        c = pipeline::stage_judge(traces, gw, opts);
    }
    py::dict d;
    d["sessions"] = c.sessions;
    d["skipped_existing"] = c.skipped_existing;
    d["judged"] = c.judged;
    d["admitted"] = c.admitted;
    d["requeued"] = c.requeued;
    d["dropped"] = c.dropped;
    return d;
}

std::string report(const std::string& dataset, const std::string& scorecards, const std::string& plan_path) {
    return dump(metrics::to_json(pipeline::stage_report(dataset, scorecards, plan_path)));
}

}  // namespace

PYBIND11_MODULE(_qasynth, m) {
    m.doc() = "IDE code QA data synthesis pipeline";

    m.def("rule_labels", &rule_labels, py::arg("interaction_json"));
    m.def("profile_from_labels", &profile_from_labels, py::arg("labels_json"));
    m.def("make_plan", &make_plan, py::arg("profile_json"), py::arg("total"), py::arg("seed"));
    m.def("deduction_table", [] { return dump(judge::deduction_table_json()); });
    m.def("apply_deductions", &apply_deductions, py::arg("response"), py::arg("finish"), py::arg("context_json"));
    m.def("parse_score", &parse_score, py::arg("reply"));
    m.def("final_score", [](int base, const std::vector<int>& points) {
        std::vector<judge::FiredDeduction> fired;
        for (int p : points) fired.push_back({"", p});
        return judge::final_score(base, fired);
    }, py::arg("base"), py::arg("points"));
    m.def("psr", &metrics::psr, py::arg("scores"));
    m.def("ur", &metrics::ur, py::arg("scores"));
    m.def("accuracy5", &accuracy5, py::arg("pairs"));
    m.def("distribution_distance", &metrics::distribution_distance, py::arg("p"), py::arg("q"));

    m.def("analyze", &analyze, py::arg("logs"), py::arg("out"), py::arg("pool") = "");
    m.def("plan", &plan, py::arg("profile"), py::arg("total"), py::arg("seed"), py::arg("out"));
    m.def("produce", &produce, py::arg("plan"), py::arg("corpus"), py::arg("pool"), py::arg("seed"),
          py::arg("out_dir"), py::arg("work_root") = "", py::arg("jobs") = 1);
    m.def("judge", &judge_traces, py::arg("traces"), py::arg("pool"), py::arg("out_dir"), py::arg("jobs") = 1);
    m.def("report", &report, py::arg("dataset"), py::arg("scorecards"), py::arg("plan"));

    py::register_exception<LabelError>(m, "LabelError", PyExc_ValueError);
    py::register_exception<behavior::ProfileError>(m, "ProfileError", PyExc_RuntimeError);
    py::register_exception<behavior::PlanError>(m, "PlanError", PyExc_RuntimeError);
}
