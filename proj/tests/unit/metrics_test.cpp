// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "qasynth/metrics.hpp"

using namespace qasynth;
using namespace qasynth::metrics;

TEST(Rates, HandCounts) {
    EXPECT_DOUBLE_EQ(psr({5, 5, 3, 4}), 0.5);
    EXPECT_DOUBLE_EQ(psr({5, 5, 5}), 1.0);
    EXPECT_DOUBLE_EQ(psr({1, 2, 3}), 0.0);
    EXPECT_DOUBLE_EQ(ur({5, 4, 3, 2}), 0.5);
    EXPECT_DOUBLE_EQ(ur({4, 4}), 1.0);
    EXPECT_DOUBLE_EQ(ur({3}), 0.0);
    EXPECT_THROW(psr({}), std::invalid_argument);
    EXPECT_THROW(ur({}), std::invalid_argument);
}

TEST(Rates, RandomAgainstCounting) {
    std::mt19937 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> s(1 + gen() % 40);
        int fives = 0, usable = 0;
        for (auto& v : s) {
            v = static_cast<int>(gen() % 6);
            fives += v == 5;
            usable += v >= 4;
        }
        EXPECT_DOUBLE_EQ(psr(s), double(fives) / s.size());
        EXPECT_DOUBLE_EQ(ur(s), double(usable) / s.size());
        EXPECT_LE(psr(s), ur(s));
    }
}

TEST(Accuracy5, HandPairs) {
    auto a = accuracy5({{5, 5}, {5, 4}, {5, 2}, {4, 5}});
    EXPECT_EQ(a.counts.pred5_pos, 1u);
    EXPECT_EQ(a.counts.pred5_neg, 2u);
    EXPECT_EQ(a.counts.human5_total, 2u);
    EXPECT_DOUBLE_EQ(*a.accuracy, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(*a.recall, 0.5);
    EXPECT_DOUBLE_EQ(*a.usable_among_misses, 0.5);
}

TEST(Accuracy5, SevenOfEight) {
    std::vector<std::pair<int, int>> pairs(7, {5, 5});
    pairs.push_back({5, 3});
    EXPECT_DOUBLE_EQ(*accuracy5(pairs).accuracy, 0.875);
    EXPECT_DOUBLE_EQ(*accuracy5(pairs).usable_among_misses, 0.0);
}

TEST(Accuracy5, AllAgree) {
    auto a = accuracy5({{5, 5}, {5, 5}});
    EXPECT_DOUBLE_EQ(*a.accuracy, 1.0);
    EXPECT_DOUBLE_EQ(*a.recall, 1.0);
    EXPECT_FALSE(a.usable_among_misses);
}

TEST(Accuracy5, NoSystemFives) {
    auto a = accuracy5({{4, 5}, {3, 3}});
    EXPECT_FALSE(a.accuracy);
    EXPECT_DOUBLE_EQ(*a.recall, 0.0);
    EXPECT_FALSE(accuracy5({}).recall);
}

TEST(Distance, Examples) {
    EXPECT_DOUBLE_EQ(distribution_distance({{"a", 0.5}, {"b", 0.5}}, {{"a", 0.5}, {"b", 0.5}}), 0.0);
    EXPECT_DOUBLE_EQ(distribution_distance({{"a", 1.0}}, {{"b", 1.0}}), 2.0);
    EXPECT_DOUBLE_EQ(distribution_distance({{"a", 0.5}, {"b", 0.5}}, {{"a", 0.75}, {"b", 0.25}}), 0.5);
    // Normalized first.
    EXPECT_DOUBLE_EQ(distribution_distance({{"a", 2.0}, {"b", 2.0}}, {{"a", 3.0}, {"b", 1.0}}), 0.5);
    EXPECT_THROW(distribution_distance({}, {{"a", 1.0}}), std::invalid_argument);
}

TEST(Distance, SymmetricAndBounded) {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Distribution p, q;
        for (int k = 0; k < 5; ++k) {
            if (gen() % 2) p[std::string(1, char('a' + k))] = u(gen) + 0.01;
            if (gen() % 2) q[std::string(1, char('a' + k))] = u(gen) + 0.01;
        }
        if (p.empty() || q.empty()) continue;
        const double d = distribution_distance(p, q);
        EXPECT_DOUBLE_EQ(d, distribution_distance(q, p));
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 2.0 + 1e-12);
    }
}

TEST(Report, BuildAndRender) {
    judge::ScoreCard c1, c2, c3;
    c1.query_id = "a"; c1.endpoint_id = "gen-a"; c1.final_score = 5;
    c2.query_id = "a"; c2.endpoint_id = "gen-b"; c2.final_score = 4;
    c3.query_id = "b"; c3.endpoint_id = "gen-b"; c3.final_score = 2;
    TrainingExample e;
    e.query_id = "a";
    e.final_score = 5;
    e.configuration.labels.intent = Intent::code_repair;
    e.configuration.labels.difficulty = Difficulty::advanced;
    e.configuration.labels.reference_regions = {ReferenceRegion::question};
    behavior::ProductionPlan plan;
    plan.total = 1;
    plan.items.push_back({1, e.configuration.labels});

    auto r = build_report({e}, {c1, c2, c3}, plan, std::vector<std::pair<int, int>>{{5, 5}});
    EXPECT_EQ(r.admitted, 1u);
    EXPECT_EQ(r.scorecards, 3u);
    EXPECT_EQ(r.judged_queries, 2u);
    EXPECT_DOUBLE_EQ(*r.psr, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(*r.ur, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(*r.by_endpoint["gen-b"].first, 0.0);
    EXPECT_DOUBLE_EQ(*r.by_endpoint["gen-b"].second, 0.5);
    EXPECT_EQ(r.admitted_by_intent["code_repair"], 1u);
    for (const auto& [d, dist] : r.plan_vs_dataset) EXPECT_DOUBLE_EQ(dist, 0.0) << to_string(d);
    ASSERT_TRUE(r.agreement);
    EXPECT_DOUBLE_EQ(*r.agreement->accuracy, 1.0);

    auto j = to_json(r);
    EXPECT_EQ(j["admitted"], 1);
    auto text = render_text(r);
    EXPECT_NE(text.find("PSR"), std::string::npos);
    EXPECT_NE(text.find("gen-b"), std::string::npos);
}

TEST(Report, EmptyInputsReportNa) {
    behavior::ProductionPlan plan;
    auto r = build_report({}, {}, plan);
    EXPECT_FALSE(r.psr);
    EXPECT_TRUE(to_json(r)["psr"].is_string());
}
