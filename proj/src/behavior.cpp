// SPDX-License-Identifier: Apache-2.0

#include "qasynth/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "qasynth/parallel.hpp"
#include "qasynth/rng.hpp"
#include "qasynth/text.hpp"

namespace qasynth::behavior {

RuleMatcherConfig RuleMatcherConfig::from_json(const json& j) {
    RuleMatcherConfig c;
    for (const auto& t : j.value("templates", std::vector<std::string>{})) {
        auto norm = text::to_lower_ascii(text::trim(t));
        if (!norm.empty() && std::find(c.templates.begin(), c.templates.end(), norm) == c.templates.end()) {
            c.templates.push_back(norm);
        }
    }
    c.languages = LanguageTable::from_json(j);
    return c;
}

// ---------------------------------------------------------------------------
// Rule matcher

InstructionType detect_instruction_type(std::string_view query, const std::vector<std::string>& templates) {
    const std::string q = text::to_lower_ascii(text::trim(query));
    std::vector<std::string> sorted = templates;
    std::sort(sorted.begin(), sorted.end(),
              [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
    for (const auto& raw : sorted) {
        const std::string t = text::to_lower_ascii(text::trim(raw));
        if (t.empty() || !q.starts_with(t)) continue;
        std::string rest = text::trim(std::string_view(q).substr(t.size()));
        // Trailing punctuation alone does not make a free-form query.
        auto meaningful = rest.find_first_not_of(".:;,!?。，：；！？ \t");
        if (rest.empty() || meaningful == std::string::npos) return InstructionType::template_only;
        const char next = q[t.size()];
        if (std::isalnum(static_cast<unsigned char>(next)) || next == '_') continue;  // "/docs" is not "/doc"
        return InstructionType::template_plus_query;
    }
    return InstructionType::query;
}

LocaleRequirement detect_locale_requirement(std::string_view query, Locale system_locale) {
    auto requested = text::requested_locale(query);
    if (!requested) return LocaleRequirement::none;
    return *requested == system_locale ? LocaleRequirement::same_as_system : LocaleRequirement::differs_from_system;
}

RuleLabels classify_rule_dims(const QaInteraction& in, const RuleMatcherConfig& config) {
    RuleLabels out;
    const auto& snap = in.snapshot;
    const bool has_file = snap.active_file.has_value();
    out.cursor_behavior = cursor_behavior_for(has_file, snap.selections);
    out.trigger_method = in.trigger_method;
    out.instruction_type = detect_instruction_type(in.query, config.templates);
    if (has_file) {
        out.programming_language = config.languages.language_for_path(*snap.active_file);
    } else if (in.language_hint && config.languages.contains(*in.language_hint)) {
        out.programming_language = *in.language_hint;
    }
    out.system_locale = in.system_locale;
    out.dialog_turns = 1 + static_cast<int>(in.prior_turn_ids.size());
    out.query_locale_requirement = detect_locale_requirement(in.query, in.system_locale);
    return out;
}

// ---------------------------------------------------------------------------
// Model classifier

namespace {

std::string join_categories(Dimension d) {
    std::string out;
    for (const auto& c : categories_of(d)) {
        if (!out.empty()) out += ", ";
        out += c;
    }
    return out;
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

}  // namespace

std::vector<ChatMessage> classifier_prompt(const QaInteraction& in) {
    std::string user;
    user += "Classify the following developer question from an IDE coding assistant.\n\n";
    user += "Active file: " + in.snapshot.active_file.value_or("(none)") + "\n";
    user += "Selected ranges: " + std::to_string(in.snapshot.selections.size()) + "\n";
    user += "Previous turns in this dialogue: " + std::to_string(in.prior_turn_ids.size()) + "\n";
    user += "Question:\n" + in.query + "\n";
    if (!in.response.empty()) user += "\nAssistant answer:\n" + in.response + "\n";
    user += "\nAllowed intent values: " + join_categories(Dimension::intent) + "\n";
    user += "Allowed difficulty values: " + join_categories(Dimension::difficulty) + "\n";
    user += "Allowed reference_regions values (one or more): " + join_categories(Dimension::reference_regions) + "\n";
    user += "\nReply with only a JSON object of the form "
            "{\"intent\": \"...\", \"difficulty\": \"...\", \"reference_regions\": [\"...\"]}.";
    return {
        {"system", "You label developer questions asked to an IDE coding assistant along fixed behavioral "
                   "categories. Use only the allowed values."},
        {"user", std::move(user)},
    };
}

ModelLabelParse parse_model_labels(std::string_view reply) {
    ModelLabelParse out;
    auto obj = extract_json_object(reply);
    if (!obj) {
        out.problems.push_back("reply contains no JSON object");
        return out;
    }
    const auto& j = *obj;
    if (auto it = j.find("intent"); it != j.end() && it->is_string()) {
        try {
            out.labels.intent = parse_intent(it->get<std::string>());
        } catch (const LabelError& e) {
            out.problems.emplace_back(e.what());
        }
    } else {
        out.problems.push_back("missing intent");
    }
    if (auto it = j.find("difficulty"); it != j.end() && it->is_string()) {
        try {
            out.labels.difficulty = parse_difficulty(it->get<std::string>());
        } catch (const LabelError& e) {
            out.problems.emplace_back(e.what());
        }
    } else {
        out.problems.push_back("missing difficulty");
    }
    if (auto it = j.find("reference_regions"); it != j.end() && it->is_array() && !it->empty()) {
        std::set<ReferenceRegion> regions;
        bool bad = false;
        for (const auto& r : *it) {
            try {
                regions.insert(parse_reference_region(r.is_string() ? r.get<std::string>() : r.dump()));
            } catch (const LabelError& e) {
                out.problems.emplace_back(e.what());
                bad = true;
            }
        }
        if (!bad) out.labels.reference_regions = std::move(regions);
    } else {
        out.problems.push_back("missing or empty reference_regions");
    }
    return out;
}

ModelClassification classify_model_dims(const QaInteraction& in, const gateway::Gateway& gw) {
    ModelClassification out;
    auto messages = classifier_prompt(in);
    auto first = gw.complete(gateway::Role::classifier, messages, {}, "classify");
    ++out.attempts;
    if (!first.ok()) {
        out.error = first.error_cause;
        return out;
    }
    auto parsed = parse_model_labels(first.text);
    if (parsed.ok()) {
        out.labels = parsed.labels;
        out.classified = true;
        return out;
    }

    messages.push_back({"assistant", first.text});
    std::string repair = "Your previous reply could not be used (";
    for (std::size_t i = 0; i < parsed.problems.size(); ++i) {
        if (i) repair += "; ";
        repair += parsed.problems[i];
    }
    repair += "). Reply again with only the JSON object, using the allowed values exactly.";
    messages.push_back({"user", std::move(repair)});
    auto second = gw.complete(gateway::Role::classifier, messages, {}, "classify");
    ++out.attempts;
    if (!second.ok()) {
        out.error = second.error_cause;
        return out;
    }
    auto retry = parse_model_labels(second.text);
    // Fields valid in either reply are kept; the rest stay unknown.
    out.labels = retry.labels;
    if (out.labels.intent == Intent::unknown) out.labels.intent = parsed.labels.intent;
    if (out.labels.difficulty == Difficulty::unknown) out.labels.difficulty = parsed.labels.difficulty;
    if (out.labels.reference_regions.empty()) out.labels.reference_regions = parsed.labels.reference_regions;
    out.classified = true;
    return out;
}

LabelSet merge_labels(const RuleLabels& r, const ModelLabels& m) {
    LabelSet l;
    l.cursor_behavior = r.cursor_behavior;
    l.trigger_method = r.trigger_method;
    l.instruction_type = r.instruction_type;
    l.programming_language = r.programming_language;
    l.system_locale = r.system_locale;
    l.dialog_turns = r.dialog_turns;
    l.query_locale_requirement = r.query_locale_requirement;
    l.reference_regions = m.reference_regions;
    l.difficulty = m.difficulty;
    l.intent = m.intent;
    return l;
}

std::vector<LabeledInteraction> label_interactions(const std::vector<QaInteraction>& interactions,
                                                   const gateway::Gateway* gw, const RuleMatcherConfig& config,
                                                   int jobs) {
    std::vector<LabeledInteraction> out(interactions.size());
    parallel_for(interactions.size(), jobs, [&](std::size_t i) {
        const auto& in = interactions[i];
        auto rules = classify_rule_dims(in, config);
        out[i].id = in.id;
        if (in.labels) {
            out[i].labels = merge_labels(rules, *in.labels);
            return;
        }
        if (!gw) {
            out[i].labels = merge_labels(rules, {});
            out[i].classified = false;
            return;
        }
        auto model = classify_model_dims(in, *gw);
        out[i].labels = merge_labels(rules, model.labels);
        out[i].classified = model.classified;
        if (!model.classified) spdlog::warn("interaction {} unclassified: {}", in.id, model.error);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Profile

std::map<Dimension, std::map<std::string, double>> label_marginals(const std::vector<LabelSet>& labels) {
    std::map<Dimension, std::map<std::string, double>> out;
    for (auto d : kAllDimensions) {
        std::map<std::string, double> counts;
        double total = 0.0;
        for (const auto& l : labels) {
            for (const auto& c : l.categories(d)) {
                if (c == "unknown") continue;
                counts[c] += 1.0;
                total += 1.0;
            }
        }
        if (total > 0.0) {
            for (auto& [c, v] : counts) v /= total;
        }
        out[d] = std::move(counts);
    }
    return out;
}

BehaviorProfile build_profile(const std::vector<LabelSet>& labeled) {
    if (labeled.empty()) throw ProfileError("no interactions");
    BehaviorProfile p;
    p.distributions = label_marginals(labeled);
    p.sample_count = labeled.size();
    for (auto d : kAllDimensions) {
        if (p.distributions[d].empty()) {
            throw ProfileError("no known labels for dimension " + std::string(to_string(d)));
        }
    }
    return p;
}

void BehaviorProfile::validate() const {
    if (sample_count == 0) throw ProfileError("profile sample count is zero");
    for (auto d : kAllDimensions) {
        auto it = distributions.find(d);
        if (it == distributions.end() || it->second.empty()) {
            throw ProfileError("profile lacks dimension " + std::string(to_string(d)));
        }
        double sum = 0.0;
        for (const auto& [c, pr] : it->second) {
            if (!(pr >= 0.0)) throw ProfileError("negative probability for " + c);
            if (d != Dimension::programming_language && !is_valid_category(d, c)) {
                throw ProfileError("invalid category '" + c + "' for " + std::string(to_string(d)));
            }
            sum += pr;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ProfileError("probabilities for " + std::string(to_string(d)) + " sum to " + std::to_string(sum));
        }
    }
}

double BehaviorProfile::probability(Dimension d, const std::string& category) const {
    auto it = distributions.find(d);
    if (it == distributions.end()) return 0.0;
    auto c = it->second.find(category);
    return c == it->second.end() ? 0.0 : c->second;
}

// ---------------------------------------------------------------------------
// Planner

std::vector<PlanConstraint> default_constraints() {
    return {
        {"selected_code requires a selection",
         {Dimension::cursor_behavior, Dimension::reference_regions},
         [](const LabelSet& l) {
             return l.has_region(ReferenceRegion::selected_code) &&
                    (l.cursor_behavior == CursorBehavior::no_active_file ||
                     l.cursor_behavior == CursorBehavior::have_active_file);
         }},
        {"quick-chat templates require a selection",
         {Dimension::cursor_behavior, Dimension::instruction_type},
         [](const LabelSet& l) {
             return l.instruction_type != InstructionType::query &&
                    (l.cursor_behavior == CursorBehavior::no_active_file ||
                     l.cursor_behavior == CursorBehavior::have_active_file);
         }},
        {"inline_chat requires an active file",
         {Dimension::cursor_behavior, Dimension::trigger_method},
         [](const LabelSet& l) {
             return l.trigger_method == TriggerMethod::inline_chat && l.cursor_behavior == CursorBehavior::no_active_file;
         }},
    };
}

namespace {

void assign(LabelSet& l, Dimension d, const std::string& value) {
    if (d == Dimension::programming_language) {
        l.programming_language = value;
    } else {
        l.set(d, value);
    }
}

std::string first_category(const LabelSet& l, Dimension d) {
    auto cats = l.categories(d);
    return cats.empty() ? std::string{} : cats.front();
}

struct Support {
    std::vector<std::string> categories;
    std::vector<double> target;
    std::vector<double> weight;
};

std::map<Dimension, Support> supports_from(const BehaviorProfile& profile) {
    std::map<Dimension, Support> out;
    for (auto d : kAllDimensions) {
        auto it = profile.distributions.find(d);
        if (it == profile.distributions.end()) throw PlanError("profile lacks dimension " + std::string(to_string(d)));
        std::map<std::string, double> dist;
        if (d == Dimension::dialog_turns) {
            for (const auto& [c, p] : it->second) {
                int t = std::stoi(c);
                dist[std::to_string(std::min(t, kMaxPlannedTurns))] += p;
            }
        } else {
            dist = it->second;
        }
        Support s;
        double total = 0.0;
        for (const auto& [c, p] : dist) {
            if (p <= 0.0) continue;
            LabelSet probe;
            try {
                assign(probe, d, c);
            } catch (const LabelError& e) {
                throw PlanError(std::string("profile: ") + e.what());
            }
            s.categories.push_back(c);
            s.target.push_back(p);
            total += p;
        }
        if (s.categories.empty()) throw PlanError("profile has no mass on dimension " + std::string(to_string(d)));
        for (auto& t : s.target) t /= total;
        s.weight = s.target;
        out[d] = std::move(s);
    }
    return out;
}

const PlanConstraint* first_violated(const LabelSet& l, const std::vector<PlanConstraint>& constraints) {
    for (const auto& c : constraints) {
        if (c.violated(l)) return &c;
    }
    return nullptr;
}

/// Joint of the constrained dimensions, used to calibrate proposal weights.
struct ConstrainedJoint {
    std::vector<Dimension> dims;
    std::vector<std::vector<std::size_t>> combos;  // index into each dim's support
    std::vector<bool> accepted;
    std::vector<std::vector<std::size_t>> violated;  // constraint indices
};

ConstrainedJoint enumerate_joint(std::map<Dimension, Support>& supports,
                                 const std::vector<PlanConstraint>& constraints) {
    ConstrainedJoint j;
    for (auto d : kAllDimensions) {
        for (const auto& c : constraints) {
            if (std::find(c.dimensions.begin(), c.dimensions.end(), d) != c.dimensions.end()) {
                j.dims.push_back(d);
                break;
            }
        }
    }
    std::vector<std::size_t> idx(j.dims.size(), 0);
    for (;;) {
        LabelSet l;
        for (std::size_t k = 0; k < j.dims.size(); ++k) assign(l, j.dims[k], supports[j.dims[k]].categories[idx[k]]);
        std::vector<std::size_t> v;
        for (std::size_t c = 0; c < constraints.size(); ++c) {
            if (constraints[c].violated(l)) v.push_back(c);
        }
        j.combos.push_back(idx);
        j.accepted.push_back(v.empty());
        j.violated.push_back(std::move(v));
        std::size_t k = 0;
        for (; k < j.dims.size(); ++k) {
            if (++idx[k] < supports[j.dims[k]].categories.size()) break;
            idx[k] = 0;
        }
        if (k == j.dims.size()) break;
    }
    return j;
}

std::string most_violated(const ConstrainedJoint& j, const std::vector<PlanConstraint>& constraints,
                          std::optional<std::pair<std::size_t, std::size_t>> restrict = std::nullopt) {
    std::vector<std::size_t> hits(constraints.size(), 0);
    for (std::size_t i = 0; i < j.combos.size(); ++i) {
        if (restrict && j.combos[i][restrict->first] != restrict->second) continue;
        for (auto c : j.violated[i]) ++hits[c];
    }
    auto best = std::max_element(hits.begin(), hits.end()) - hits.begin();
    return constraints.empty() ? std::string("(none)") : constraints[static_cast<std::size_t>(best)].name;
}

/// Iterative proportional fitting of the proposal weights so that the
/// distribution of accepted combinations has the profile's marginals.
void calibrate(std::map<Dimension, Support>& supports, const ConstrainedJoint& j) {
    constexpr int kMaxIterations = 2000;
    constexpr double kTolerance = 1e-12;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        double worst = 0.0;
        for (std::size_t k = 0; k < j.dims.size(); ++k) {
            auto& sk = supports[j.dims[k]];
            std::vector<double> mass(sk.categories.size(), 0.0);
            double z = 0.0;
            for (std::size_t i = 0; i < j.combos.size(); ++i) {
                if (!j.accepted[i]) continue;
                double w = 1.0;
                for (std::size_t m = 0; m < j.dims.size(); ++m) w *= supports[j.dims[m]].weight[j.combos[i][m]];
                mass[j.combos[i][k]] += w;
                z += w;
            }
            if (z <= 0.0) return;
            for (std::size_t c = 0; c < mass.size(); ++c) {
                double achieved = mass[c] / z;
                worst = std::max(worst, std::abs(achieved - sk.target[c]));
                if (achieved > 0.0) sk.weight[c] *= sk.target[c] / achieved;
            }
            double norm = 0.0;
            for (double w : sk.weight) norm += w;
            for (double& w : sk.weight) w /= norm;
        }
        if (worst < kTolerance) return;
    }
}

/// Accepted combinations of the constrained dimensions with their calibrated
/// proposal weights. Drawing from this is the same as proposing from the
/// weights and rejecting violations, without the rejection loop.
std::vector<double> accepted_weights(const std::map<Dimension, Support>& supports, const ConstrainedJoint& j) {
    std::vector<double> w(j.combos.size(), 0.0);
    for (std::size_t i = 0; i < j.combos.size(); ++i) {
        if (!j.accepted[i]) continue;
        w[i] = 1.0;
        for (std::size_t m = 0; m < j.dims.size(); ++m) w[i] *= supports.at(j.dims[m]).weight[j.combos[i][m]];
    }
    return w;
}

LabelSet draw(Rng& rng, const std::map<Dimension, Support>& supports, const ConstrainedJoint& j,
              const std::vector<double>& joint_weights) {
    LabelSet l;
    for (auto d : kAllDimensions) {
        if (std::find(j.dims.begin(), j.dims.end(), d) != j.dims.end()) continue;
        const auto& s = supports.at(d);
        assign(l, d, s.categories[rng.categorical(s.weight)]);
    }
    if (!j.dims.empty()) {
        const auto& combo = j.combos[rng.categorical(joint_weights)];
        for (std::size_t m = 0; m < j.dims.size(); ++m) {
            assign(l, j.dims[m], supports.at(j.dims[m]).categories[combo[m]]);
        }
    }
    return l;
}

}  // namespace

ProductionPlan make_production_plan(const BehaviorProfile& profile, int total, std::uint64_t seed,
                                    const std::vector<PlanConstraint>& constraints) {
    if (total < 1) throw PlanError("plan total must be at least 1");
    auto supports = supports_from(profile);
    auto joint = enumerate_joint(supports, constraints);
    if (std::none_of(joint.accepted.begin(), joint.accepted.end(), [](bool a) { return a; })) {
        throw PlanError("constraints unsatisfiable: '" + most_violated(joint, constraints) +
                        "' rejects every combination the profile allows");
    }
    const bool floor = total >= kDiversityFloorMinTotal;
    if (floor) {
        for (std::size_t k = 0; k < joint.dims.size(); ++k) {
            const auto& sk = supports[joint.dims[k]];
            for (std::size_t c = 0; c < sk.categories.size(); ++c) {
                bool reachable = false;
                for (std::size_t i = 0; i < joint.combos.size() && !reachable; ++i) {
                    reachable = joint.accepted[i] && joint.combos[i][k] == c;
                }
                if (!reachable) {
                    throw PlanError("constraints unsatisfiable: '" +
                                    most_violated(joint, constraints, std::make_pair(k, c)) +
                                    "' leaves no compatible combination for " +
                                    std::string(to_string(joint.dims[k])) + "=" + sk.categories[c]);
                }
            }
        }
    }
    calibrate(supports, joint);

    const auto joint_weights = accepted_weights(supports, joint);
    if (!joint.dims.empty() && std::none_of(joint_weights.begin(), joint_weights.end(), [](double w) { return w > 0; })) {
        throw PlanError("constraints unsatisfiable: '" + most_violated(joint, constraints) +
                        "' rejects every combination with nonzero mass");
    }
    Rng rng(seed);
    std::vector<LabelSet> drawn;
    drawn.reserve(static_cast<std::size_t>(total));
    for (int n = 0; n < total; ++n) drawn.push_back(draw(rng, supports, joint, joint_weights));

    if (floor) {
        std::map<Dimension, std::map<std::string, int>> counts;
        for (const auto& l : drawn) {
            for (auto d : kAllDimensions) ++counts[d][first_category(l, d)];
        }
        auto constrained = [&](Dimension d) {
            return std::find(joint.dims.begin(), joint.dims.end(), d) != joint.dims.end();
        };
        for (auto d : kAllDimensions) {
            for (const auto& cat : supports[d].categories) {
                if (counts[d][cat] > 0) continue;
                bool placed = false;
                std::string blocker;
                for (std::size_t idx = drawn.size(); idx-- > 0 && !placed;) {
                    const auto old = first_category(drawn[idx], d);
                    if (counts[d][old] < 2) continue;
                    LabelSet cand = drawn[idx];
                    assign(cand, d, cat);
                    if (auto v = first_violated(cand, constraints); !v) {
                        placed = true;
                    } else if (constrained(d)) {
                        blocker = v->name;
                        for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
                            LabelSet trial = cand;
                            bool ok = true;
                            for (auto e : joint.dims) {
                                if (e == d) continue;
                                const auto& se = supports[e];
                                assign(trial, e, se.categories[rng.categorical(se.weight)]);
                                auto before = first_category(drawn[idx], e);
                                if (first_category(trial, e) != before && counts[e][before] < 2) ok = false;
                            }
                            if (ok && !first_violated(trial, constraints)) {
                                cand = std::move(trial);
                                placed = true;
                            }
                        }
                    }
                    if (placed) {
                        for (auto e : kAllDimensions) {
                            --counts[e][first_category(drawn[idx], e)];
                            ++counts[e][first_category(cand, e)];
                        }
                        drawn[idx] = std::move(cand);
                    }
                }
                if (!placed) {
                    throw PlanError("diversity floor: cannot place " + std::string(to_string(d)) + "=" + cat +
                                    (blocker.empty() ? std::string{} : " without violating '" + blocker + "'"));
                }
            }
        }
    }

    ProductionPlan plan;
    plan.total = total;
    plan.seed = seed;
    std::unordered_map<std::string, std::size_t> index;
    for (auto& l : drawn) {
        auto key = json(l).dump();
        auto [it, inserted] = index.emplace(std::move(key), plan.items.size());
        if (inserted) plan.items.push_back({0, std::move(l)});
        ++plan.items[it->second].count;
    }
    return plan;
}

void ProductionPlan::validate(const std::vector<PlanConstraint>& constraints) const {
    long long sum = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        if (item.count < 1) throw PlanError("plan item " + std::to_string(i) + " has non-positive count");
        if (auto v = first_violated(item.labels, constraints)) {
            throw PlanError("plan item " + std::to_string(i) + " violates '" + v->name + "'");
        }
        if (item.labels.reference_regions.empty() || item.labels.intent == Intent::unknown ||
            item.labels.difficulty == Difficulty::unknown || item.labels.dialog_turns < 1) {
            throw PlanError("plan item " + std::to_string(i) + " has incomplete labels");
        }
        sum += item.count;
    }
    if (sum != total) throw PlanError("plan item counts sum to " + std::to_string(sum) + ", expected " + std::to_string(total));
}

std::vector<LabelSet> ProductionPlan::expand() const {
    std::vector<LabelSet> out;
    out.reserve(static_cast<std::size_t>(std::max(total, 0)));
    for (const auto& item : items) {
        for (int i = 0; i < item.count; ++i) out.push_back(item.labels);
    }
    return out;
}

void to_json(json& j, const BehaviorProfile& p) {
    json dists = json::object();
    for (const auto& [d, dist] : p.distributions) dists[std::string(to_string(d))] = dist;
    j = json{{"sample_count", p.sample_count}, {"distributions", dists}};
}

void from_json(const json& j, BehaviorProfile& p) {
    p.sample_count = j.at("sample_count").get<std::size_t>();
    p.distributions.clear();
    for (const auto& [name, dist] : j.at("distributions").items()) {
        p.distributions[parse_dimension(name)] = dist.get<std::map<std::string, double>>();
    }
}

void to_json(json& j, const ProductionPlan& p) {
    json items = json::array();
    for (const auto& item : p.items) items.push_back(json{{"count", item.count}, {"labels", item.labels}});
    j = json{{"total", p.total}, {"seed", p.seed}, {"items", items}};
}

void from_json(const json& j, ProductionPlan& p) {
    p.total = j.at("total").get<int>();
    p.seed = j.value("seed", std::uint64_t{0});
    p.items.clear();
    for (const auto& ij : j.at("items")) {
        p.items.push_back({ij.at("count").get<int>(), ij.at("labels").get<LabelSet>()});
    }
}

void to_json(json& j, const RuleLabels& r) {
    j = json{{"cursor_behavior", to_string(r.cursor_behavior)},
             {"trigger_method", to_string(r.trigger_method)},
             {"instruction_type", to_string(r.instruction_type)},
             {"programming_language", r.programming_language},
             {"system_locale", to_string(r.system_locale)},
             {"dialog_turns", r.dialog_turns},
             {"query_locale_requirement", to_string(r.query_locale_requirement)}};
}

}  // namespace qasynth::behavior
