// SPDX-License-Identifier: Apache-2.0

#include "qasynth/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace qasynth::metrics {

namespace {

double fraction_at_least(const std::vector<int>& scores, int threshold, bool exact) {
    if (scores.empty()) throw std::invalid_argument("score list is empty");
    std::size_t hits = 0;
    for (int s : scores) {
        if (exact ? s == threshold : s >= threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(scores.size());
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double psr(const std::vector<int>& final_scores) { return fraction_at_least(final_scores, 5, true); }

double ur(const std::vector<int>& final_scores) { return fraction_at_least(final_scores, 4, false); }

Accuracy5 accuracy5(const std::vector<std::pair<int, int>>& pairs) {
    Accuracy5 out;
    auto& c = out.counts;
    for (const auto& [system, human] : pairs) {
        if (human == 5) ++c.human5_total;
        if (system != 5) continue;
        if (human == 5) {
            ++c.pred5_pos;
        } else {
            ++c.pred5_neg;
            if (human >= 4) ++c.misses_usable;
        }
    }
    c.recalled5 = c.pred5_pos;
    out.accuracy = ratio(c.pred5_pos, c.pred5_pos + c.pred5_neg);
    out.usable_among_misses = ratio(c.misses_usable, c.pred5_neg);
    out.recall = ratio(c.pred5_pos, c.human5_total);
    return out;
}

double distribution_distance(const Distribution& p, const Distribution& q) {
    double sp = 0.0, sq = 0.0;
    for (const auto& [_, v] : p) sp += v;
    for (const auto& [_, v] : q) sq += v;
    if (!(sp > 0.0) || !(sq > 0.0)) throw std::invalid_argument("distribution has no mass");
    std::set<std::string> keys;
    for (const auto& [k, _] : p) keys.insert(k);
    for (const auto& [k, _] : q) keys.insert(k);
    double d = 0.0;
    for (const auto& k : keys) {
        auto ip = p.find(k);
        auto iq = q.find(k);
        const double a = ip == p.end() ? 0.0 : ip->second / sp;
        const double b = iq == q.end() ? 0.0 : iq->second / sq;
        d += std::abs(a - b);
    }
    return d;
}

std::map<Dimension, double> distribution_distances(const std::map<Dimension, Distribution>& p,
                                                   const std::map<Dimension, Distribution>& q) {
    std::map<Dimension, double> out;
    for (const auto& [d, dist] : p) {
        auto it = q.find(d);
        if (it == q.end() || dist.empty() || it->second.empty()) continue;
        out[d] = distribution_distance(dist, it->second);
    }
    return out;
}

MetricsReport build_report(const std::vector<TrainingExample>& dataset, const std::vector<judge::ScoreCard>& cards,
                           const behavior::ProductionPlan& plan,
                           const std::optional<std::vector<std::pair<int, int>>>& human_pairs) {
    MetricsReport r;
    r.admitted = dataset.size();
    r.scorecards = cards.size();

    std::vector<int> finals;
    std::map<std::string, std::vector<int>> per_endpoint;
    std::set<std::pair<std::string, int>> queries;
    for (const auto& c : cards) {
        finals.push_back(c.final_score);
        per_endpoint[c.endpoint_id].push_back(c.final_score);
        queries.emplace(c.query_id, c.round);
    }
    r.judged_queries = queries.size();
    if (!finals.empty()) {
        r.psr = psr(finals);
        r.ur = ur(finals);
    }
    for (const auto& [id, scores] : per_endpoint) r.by_endpoint[id] = {psr(scores), ur(scores)};

    std::vector<LabelSet> produced;
    for (const auto& ex : dataset) {
        produced.push_back(ex.configuration.labels);
        ++r.admitted_by_intent[std::string(to_string(ex.configuration.labels.intent))];
    }
    if (!produced.empty() && !plan.items.empty()) {
        r.plan_vs_dataset = distribution_distances(behavior::label_marginals(plan.expand()), behavior::label_marginals(produced));
    }
    if (human_pairs) r.agreement = accuracy5(*human_pairs);
    return r;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json("n/a"); }

std::string fmt(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

}  // namespace

json to_json(const MetricsReport& r) {
    json j{{"admitted", r.admitted},
           {"scorecards", r.scorecards},
           {"judged_queries", r.judged_queries},
           {"psr", opt(r.psr)},
           {"ur", opt(r.ur)}};
    json eps = json::object();
    for (const auto& [id, v] : r.by_endpoint) eps[id] = {{"psr", opt(v.first)}, {"ur", opt(v.second)}};
    j["by_endpoint"] = eps;
    j["admitted_by_intent"] = r.admitted_by_intent;
    json dist = json::object();
    for (const auto& [d, v] : r.plan_vs_dataset) dist[std::string(to_string(d))] = v;
    j["plan_vs_dataset_l1"] = dist;
    if (r.agreement) {
        const auto& a = *r.agreement;
        j["agreement"] = {{"accuracy5", opt(a.accuracy)},
                          {"usable_among_misses", opt(a.usable_among_misses)},
                          {"recall5", opt(a.recall)},
                          {"pred5_pos", a.counts.pred5_pos},
                          {"pred5_neg", a.counts.pred5_neg},
                          {"human5_total", a.counts.human5_total}};
    }
    return j;
}

std::string render_text(const MetricsReport& r) {
    std::string out;
    auto row = [&](const std::string& k, const std::string& v) {
        std::string key = k;
        key.resize(std::max<std::size_t>(key.size(), 28), ' ');
        out += key + v + "\n";
    };
    row("admitted", std::to_string(r.admitted));
    row("judged queries", std::to_string(r.judged_queries));
    row("scorecards", std::to_string(r.scorecards));
    row("PSR", fmt(r.psr));
    row("UR", fmt(r.ur));
    for (const auto& [id, v] : r.by_endpoint) row("  " + id, "PSR " + fmt(v.first) + "  UR " + fmt(v.second));
    if (!r.admitted_by_intent.empty()) {
        out += "admitted by intent\n";
        for (const auto& [k, v] : r.admitted_by_intent) row("  " + k, std::to_string(v));
    }
    if (!r.plan_vs_dataset.empty()) {
        out += "plan vs dataset (L1)\n";
        for (const auto& [d, v] : r.plan_vs_dataset) row("  " + std::string(to_string(d)), fmt(v));
    }
    if (r.agreement) {
        const auto& a = *r.agreement;
        row("Accuracy5", fmt(a.accuracy));
        row("usable among misses", fmt(a.usable_among_misses));
        row("recall of human 5s", fmt(a.recall));
    }
    return out;
}

}  // namespace qasynth::metrics
