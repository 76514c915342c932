#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "hatebench/error.hpp"

namespace hatebench {

using Clock = std::chrono::steady_clock;
using Micros = std::chrono::microseconds;

// ---------------------------------------------------------------- labels

enum class Label { hate, non_hate, na, unlabeled };

inline std::string to_string(Label l) {
    switch (l) {
        case Label::hate: return "hate";
        case Label::non_hate: return "non_hate";
        case Label::na: return "na";
        case Label::unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

inline Label label_from_string(std::string_view s) {
    if (s == "hate") return Label::hate;
    if (s == "non_hate") return Label::non_hate;
    if (s == "na") return Label::na;
    if (s == "unlabeled") return Label::unlabeled;
    throw InvalidInput("unknown label: " + std::string(s));
}

// ---------------------------------------------------------------- source

enum class SourceKind { gpt35, gpt4, vicuna, baichuan2, dolly2, opt, human, other };

// A known LLM, "human", or an arbitrary named source. Unknown tokens
// round-trip verbatim through `other`.
struct Source {
    SourceKind kind = SourceKind::other;
    std::string other_name; // set only when kind == other

    static Source human() { return {SourceKind::human, {}}; }

    static Source from_string(std::string_view s) {
        if (s == "gpt35") return {SourceKind::gpt35, {}};
        if (s == "gpt4") return {SourceKind::gpt4, {}};
        if (s == "vicuna") return {SourceKind::vicuna, {}};
        if (s == "baichuan2") return {SourceKind::baichuan2, {}};
        if (s == "dolly2") return {SourceKind::dolly2, {}};
        if (s == "opt") return {SourceKind::opt, {}};
        if (s == "human") return {SourceKind::human, {}};
        return {SourceKind::other, std::string(s)};
    }

    std::string str() const {
        switch (kind) {
            case SourceKind::gpt35: return "gpt35";
            case SourceKind::gpt4: return "gpt4";
            case SourceKind::vicuna: return "vicuna";
            case SourceKind::baichuan2: return "baichuan2";
            case SourceKind::dolly2: return "dolly2";
            case SourceKind::opt: return "opt";
            case SourceKind::human: return "human";
            case SourceKind::other: return other_name;
        }
        return other_name;
    }

    bool operator==(const Source& o) const { return kind == o.kind && other_name == o.other_name; }
};

// ---------------------------------------------------------------- prompt kind

enum class PromptPolarity { negative, positive_neutral, custom };

struct PromptKind {
    PromptPolarity polarity = PromptPolarity::custom;
    std::string custom_name; // set only when polarity == custom

    static PromptKind from_string(std::string_view s) {
        if (s == "negative") return {PromptPolarity::negative, {}};
        if (s == "positive_neutral") return {PromptPolarity::positive_neutral, {}};
        return {PromptPolarity::custom, std::string(s)};
    }

    std::string str() const {
        switch (polarity) {
            case PromptPolarity::negative: return "negative";
            case PromptPolarity::positive_neutral: return "positive_neutral";
            case PromptPolarity::custom: return custom_name;
        }
        return custom_name;
    }

    bool operator==(const PromptKind& o) const {
        return polarity == o.polarity && custom_name == o.custom_name;
    }
};

// ---------------------------------------------------------------- llm status

enum class LlmStatus { original, jailbreak_1, jailbreak_2, not_applicable };

inline std::string to_string(LlmStatus s) {
    switch (s) {
        case LlmStatus::original: return "original";
        case LlmStatus::jailbreak_1: return "jailbreak_1";
        case LlmStatus::jailbreak_2: return "jailbreak_2";
        case LlmStatus::not_applicable: return "not_applicable";
    }
    return "not_applicable";
}

inline LlmStatus llm_status_from_string(std::string_view s) {
    if (s == "original") return LlmStatus::original;
    if (s == "jailbreak_1") return LlmStatus::jailbreak_1;
    if (s == "jailbreak_2") return LlmStatus::jailbreak_2;
    if (s == "not_applicable") return LlmStatus::not_applicable;
    throw InvalidInput("unknown llm_status: " + std::string(s));
}

// ---------------------------------------------------------------- identity groups

enum class IdentityCategory { race, religion, citizenship, gender, sexual_orientation, disability };

inline std::string to_string(IdentityCategory c) {
    switch (c) {
        case IdentityCategory::race: return "race";
        case IdentityCategory::religion: return "religion";
        case IdentityCategory::citizenship: return "citizenship";
        case IdentityCategory::gender: return "gender";
        case IdentityCategory::sexual_orientation: return "sexual_orientation";
        case IdentityCategory::disability: return "disability";
    }
    return "race";
}

inline IdentityCategory identity_category_from_string(std::string_view s) {
    if (s == "race") return IdentityCategory::race;
    if (s == "religion") return IdentityCategory::religion;
    if (s == "citizenship") return IdentityCategory::citizenship;
    if (s == "gender") return IdentityCategory::gender;
    if (s == "sexual_orientation") return IdentityCategory::sexual_orientation;
    if (s == "disability") return IdentityCategory::disability;
    throw InvalidInput("unknown identity_category: " + std::string(s));
}

// The 34 benchmark identity groups, plus `unspecified` for external
// corpora that carry no group annotation.
enum class IdentityGroup {
    // race or ethnicity
    asian,
    black_or_african_american,
    latino_or_non_white_hispanic,
    middle_eastern,
    native_american_or_alaska_native,
    pacific_islander,
    non_hispanic_white,
    // religion
    atheists,
    buddhists,
    christians,
    hindus,
    jews,
    mormons,
    muslims,
    // citizenship status
    immigrants,
    migrant_workers,
    people_from_a_specific_country,
    undocumented_people,
    refugees,
    // gender identity
    men,
    non_binary_or_third_gender,
    transgender_men,
    transgender_unspecified,
    transgender_women,
    women,
    // sexual orientation
    bisexual,
    gay,
    lesbian,
    heterosexual,
    // disability status
    physical_disabilities,
    cognitive_disorders_or_learning_disability,
    mental_health_problems,
    visually_impaired,
    hearing_impaired,

    unspecified,
};

inline constexpr std::size_t kIdentityGroupCount = 34;

struct IdentityGroupInfo {
    IdentityGroup group;
    IdentityCategory category;
    std::string_view token;        // stable serialization token
    std::string_view display_name; // name substituted into prompts
};

inline const std::array<IdentityGroupInfo, kIdentityGroupCount>& identity_groups() {
    static const std::array<IdentityGroupInfo, kIdentityGroupCount> table = {{
        {IdentityGroup::asian, IdentityCategory::race, "asian", "Asian"},
        {IdentityGroup::black_or_african_american, IdentityCategory::race,
         "black_or_african_american", "Black or African American"},
        {IdentityGroup::latino_or_non_white_hispanic, IdentityCategory::race,
         "latino_or_non_white_hispanic", "Latino or Non-White Hispanic"},
        {IdentityGroup::middle_eastern, IdentityCategory::race, "middle_eastern", "Middle Eastern"},
        {IdentityGroup::native_american_or_alaska_native, IdentityCategory::race,
         "native_american_or_alaska_native", "Native American or Alaska Native"},
        {IdentityGroup::pacific_islander, IdentityCategory::race, "pacific_islander",
         "Pacific Islander"},
        {IdentityGroup::non_hispanic_white, IdentityCategory::race, "non_hispanic_white",
         "Non-Hispanic White"},
        {IdentityGroup::atheists, IdentityCategory::religion, "atheists", "Atheists"},
        {IdentityGroup::buddhists, IdentityCategory::religion, "buddhists", "Buddhists"},
        {IdentityGroup::christians, IdentityCategory::religion, "christians", "Christians"},
        {IdentityGroup::hindus, IdentityCategory::religion, "hindus", "Hindus"},
        {IdentityGroup::jews, IdentityCategory::religion, "jews", "Jews"},
        {IdentityGroup::mormons, IdentityCategory::religion, "mormons", "Mormons"},
        {IdentityGroup::muslims, IdentityCategory::religion, "muslims", "Muslims"},
        {IdentityGroup::immigrants, IdentityCategory::citizenship, "immigrants", "Immigrants"},
        {IdentityGroup::migrant_workers, IdentityCategory::citizenship, "migrant_workers",
         "Migrant Workers"},
        {IdentityGroup::people_from_a_specific_country, IdentityCategory::citizenship,
         "people_from_a_specific_country", "People Originated From a Specific Country"},
        {IdentityGroup::undocumented_people, IdentityCategory::citizenship, "undocumented_people",
         "Undocumented People"},
        {IdentityGroup::refugees, IdentityCategory::citizenship, "refugees", "Refugees"},
        {IdentityGroup::men, IdentityCategory::gender, "men", "Men"},
        {IdentityGroup::non_binary_or_third_gender, IdentityCategory::gender,
         "non_binary_or_third_gender", "Non-Binary or Third Gender Identity"},
        {IdentityGroup::transgender_men, IdentityCategory::gender, "transgender_men",
         "Transgender Men"},
        {IdentityGroup::transgender_unspecified, IdentityCategory::gender,
         "transgender_unspecified", "Transgender (Unspecified)"},
        {IdentityGroup::transgender_women, IdentityCategory::gender, "transgender_women",
         "Transgender Women"},
        {IdentityGroup::women, IdentityCategory::gender, "women", "Women"},
        {IdentityGroup::bisexual, IdentityCategory::sexual_orientation, "bisexual", "Bisexual"},
        {IdentityGroup::gay, IdentityCategory::sexual_orientation, "gay", "Gay"},
        {IdentityGroup::lesbian, IdentityCategory::sexual_orientation, "lesbian", "Lesbian"},
        {IdentityGroup::heterosexual, IdentityCategory::sexual_orientation, "heterosexual",
         "Heterosexual"},
        {IdentityGroup::physical_disabilities, IdentityCategory::disability,
         "physical_disabilities", "People With Physical Disabilities"},
        {IdentityGroup::cognitive_disorders_or_learning_disability, IdentityCategory::disability,
         "cognitive_disorders_or_learning_disability",
         "People With Cognitive Disorders or Learning Disability Status"},
        {IdentityGroup::mental_health_problems, IdentityCategory::disability,
         "mental_health_problems", "People With Mental Health Problems"},
        {IdentityGroup::visually_impaired, IdentityCategory::disability, "visually_impaired",
         "Visually Impaired People"},
        {IdentityGroup::hearing_impaired, IdentityCategory::disability, "hearing_impaired",
         "Hearing Impaired People"},
    }};
    return table;
}

inline const IdentityGroupInfo& identity_group_info(IdentityGroup g) {
    for (const auto& info : identity_groups()) {
        if (info.group == g) return info;
    }
    throw InvalidInput("identity group has no table entry");
}

inline std::string to_string(IdentityGroup g) {
    if (g == IdentityGroup::unspecified) return "unspecified";
    return std::string(identity_group_info(g).token);
}

inline IdentityGroup identity_group_from_string(std::string_view s) {
    if (s == "unspecified") return IdentityGroup::unspecified;
    for (const auto& info : identity_groups()) {
        if (info.token == s) return info.group;
    }
    throw InvalidInput("unknown identity_group: " + std::string(s));
}

inline IdentityCategory category_of(IdentityGroup g) {
    return identity_group_info(g).category;
}

// ---------------------------------------------------------------- sample

struct Sample {
    std::string id;
    std::string text;
    Source source;
    IdentityGroup identity_group = IdentityGroup::unspecified;
    IdentityCategory identity_category = IdentityCategory::race;
    PromptKind prompt_kind;
    LlmStatus llm_status = LlmStatus::not_applicable;
    Label label = Label::unlabeled;
    std::optional<std::string> split; // preserved official split, when any

    // source=human forces llm_status=not_applicable.
    void validate() const {
        if (id.empty()) throw InvalidInput("sample id must be non-empty");
        if (source.kind == SourceKind::human && llm_status != LlmStatus::not_applicable)
            throw InvalidInput("human sample must have llm_status=not_applicable: " + id);
    }
};

struct Annotation {
    std::string sample_id;
    std::string annotator_id;
    Label label = Label::na; // hate | non_hate | na only

    void validate() const {
        if (sample_id.empty() || annotator_id.empty())
            throw InvalidInput("annotation requires sample_id and annotator_id");
        if (label != Label::hate && label != Label::non_hate && label != Label::na)
            throw InvalidInput("annotation label must be hate, non_hate or na");
    }
};

} // namespace hatebench
