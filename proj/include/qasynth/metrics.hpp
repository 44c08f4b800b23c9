// SPDX-License-Identifier: Apache-2.0
//
// Evaluation quantities over judged output: perfect-score and usability
// rates, agreement of system 5-point scores with human scores, and distance
// between planned and produced label distributions.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qasynth/behavior.hpp"
#include "qasynth/judge.hpp"
#include "qasynth/taxonomy.hpp"

namespace qasynth::metrics {

/// Fraction of scores equal to 5. Throws std::invalid_argument when empty.
double psr(const std::vector<int>& final_scores);

/// Fraction of scores of at least 4. Throws std::invalid_argument when empty.
double ur(const std::vector<int>& final_scores);

struct JudgeAgreementCounts {
    std::size_t pred5_pos = 0;     // system 5, human 5
    std::size_t pred5_neg = 0;     // system 5, human not 5
    std::size_t human5_total = 0;  // human 5
    std::size_t recalled5 = 0;     // both 5
    std::size_t misses_usable = 0; // system 5, human 4

    friend bool operator==(const JudgeAgreementCounts&, const JudgeAgreementCounts&) = default;
};

struct Accuracy5 {
    JudgeAgreementCounts counts;
    std::optional<double> accuracy;             // pred5_pos / (pred5_pos + pred5_neg)
    std::optional<double> usable_among_misses;  // human >= 4 among pred5_neg
    std::optional<double> recall;               // pred5_pos / human5_total
};

/// Pairs are (system score, human score). Quantities with a zero
/// denominator are left unset and reported as n/a.
Accuracy5 accuracy5(const std::vector<std::pair<int, int>>& pairs);

using Distribution = std::map<std::string, double>;

/// Σ|p_i - q_i| after normalizing both sides; in [0, 2].
double distribution_distance(const Distribution& p, const Distribution& q);

/// Per-dimension distance over the dimensions present on both sides.
std::map<Dimension, double> distribution_distances(const std::map<Dimension, Distribution>& p,
                                                   const std::map<Dimension, Distribution>& q);

struct MetricsReport {
    std::size_t admitted = 0;
    std::size_t scorecards = 0;
    std::size_t judged_queries = 0;
    std::optional<double> psr;
    std::optional<double> ur;
    std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> by_endpoint;  // psr, ur
    std::map<std::string, std::size_t> admitted_by_intent;
    std::map<Dimension, double> plan_vs_dataset;
    std::optional<Accuracy5> agreement;
};

/// PSR and UR over scorecard finals (overall and per generator endpoint),
/// plan-vs-dataset label distance, and agreement when human pairs are given.
MetricsReport build_report(const std::vector<TrainingExample>& dataset, const std::vector<judge::ScoreCard>& cards,
                           const behavior::ProductionPlan& plan,
                           const std::optional<std::vector<std::pair<int, int>>>& human_pairs = std::nullopt);

json to_json(const MetricsReport& r);
std::string render_text(const MetricsReport& r);

}  // namespace qasynth::metrics
