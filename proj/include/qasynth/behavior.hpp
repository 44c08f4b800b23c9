// SPDX-License-Identifier: Apache-2.0
//
// Developer-behavior analysis: label logged interactions on all ten
// dimensions, aggregate them into a profile, and plan a production run whose
// label marginals follow that profile.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qasynth/gateway.hpp"
#include "qasynth/taxonomy.hpp"

namespace qasynth::behavior {

/// Quick-chat templates and language table used by the rule matcher.
struct RuleMatcherConfig {
    std::vector<std::string> templates{"explain code", "generate comments", "/explain",
                                       "/doc",         "/fix",              "/test"};
    LanguageTable languages = LanguageTable::defaults();

    /// `{"templates": [...], "languages": {...}}`; templates extend the defaults.
    static RuleMatcherConfig from_json(const json& j);
};

struct RuleLabels {
    CursorBehavior cursor_behavior = CursorBehavior::no_active_file;
    TriggerMethod trigger_method = TriggerMethod::chat_view;
    InstructionType instruction_type = InstructionType::query;
    std::string programming_language{kUnknownLanguage};
    Locale system_locale = Locale::en;
    int dialog_turns = 1;
    LocaleRequirement query_locale_requirement = LocaleRequirement::none;

    friend bool operator==(const RuleLabels&, const RuleLabels&) = default;
};

InstructionType detect_instruction_type(std::string_view query, const std::vector<std::string>& templates);

LocaleRequirement detect_locale_requirement(std::string_view query, Locale system_locale);

/// Deterministic labels for the seven rule dimensions.
RuleLabels classify_rule_dims(const QaInteraction& interaction, const RuleMatcherConfig& config = {});

/// Outcome of parsing one classifier reply. Invalid fields stay `unknown`.
struct ModelLabelParse {
    ModelLabels labels;
    std::vector<std::string> problems;
    bool ok() const noexcept { return problems.empty(); }
};

ModelLabelParse parse_model_labels(std::string_view reply);

struct ModelClassification {
    ModelLabels labels;
    bool classified = false;  // false when the endpoint failed
    int attempts = 0;
    std::string error;
};

std::vector<ChatMessage> classifier_prompt(const QaInteraction& interaction);

/// Model-classified labels (reference regions, difficulty, intent) with one
/// repair retry on unusable replies.
ModelClassification classify_model_dims(const QaInteraction& interaction, const gateway::Gateway& gw);

LabelSet merge_labels(const RuleLabels& rules, const ModelLabels& model);

struct LabeledInteraction {
    std::string id;
    LabelSet labels;
    bool classified = true;
};

/// Labels a log. Interactions carrying hand labels skip the model call;
/// without a gateway the remaining ones are left unclassified.
std::vector<LabeledInteraction> label_interactions(const std::vector<QaInteraction>& interactions,
                                                   const gateway::Gateway* gw,
                                                   const RuleMatcherConfig& config = {}, int jobs = 1);

class ProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BehaviorProfile {
    std::map<Dimension, std::map<std::string, double>> distributions;
    std::size_t sample_count = 0;

    /// Throws ProfileError when an invariant does not hold.
    void validate() const;
    double probability(Dimension d, const std::string& category) const;
};

/// Relative frequencies per dimension. reference_regions is counted per
/// occurrence, then normalized. Unknown sentinels are left out.
BehaviorProfile build_profile(const std::vector<LabelSet>& labeled);

class PlanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A hard compatibility rule over a label set; `violated` returns true when
/// the combination cannot occur.
struct PlanConstraint {
    std::string name;
    std::vector<Dimension> dimensions;
    std::function<bool(const LabelSet&)> violated;
};

std::vector<PlanConstraint> default_constraints();

struct PlanItem {
    int count = 0;
    LabelSet labels;
};

struct ProductionPlan {
    std::vector<PlanItem> items;
    int total = 0;
    std::uint64_t seed = 0;

    void validate(const std::vector<PlanConstraint>& constraints = default_constraints()) const;
    /// One label set per planned configuration, in item order.
    std::vector<LabelSet> expand() const;
};

inline constexpr int kDiversityFloorMinTotal = 40;

/// Samples `total` label sets from the profile marginals with constraint
/// rejection. Proposal weights on the constrained dimensions are calibrated
/// so that accepted marginals match the profile. For total >= 40 every
/// category with nonzero mass appears at least once.
ProductionPlan make_production_plan(const BehaviorProfile& profile, int total, std::uint64_t seed,
                                    const std::vector<PlanConstraint>& constraints = default_constraints());

/// Per-dimension category frequencies of a set of label sets.
std::map<Dimension, std::map<std::string, double>> label_marginals(const std::vector<LabelSet>& labels);

void to_json(json& j, const BehaviorProfile& p);
void from_json(const json& j, BehaviorProfile& p);
void to_json(json& j, const ProductionPlan& p);
void from_json(const json& j, ProductionPlan& p);
void to_json(json& j, const RuleLabels& r);

}  // namespace qasynth::behavior
