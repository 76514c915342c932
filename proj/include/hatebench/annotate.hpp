#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hatebench/error.hpp"
#include "hatebench/store.hpp"
#include "hatebench/types.hpp"

namespace hatebench {

// Majority-vote outcome for one sample. `needs_third` is the normal
// two-annotator disagreement path; `unresolvable` is a full three-way
// split and must be surfaced for manual adjudication, never dropped.
enum class MajorityOutcome { hate, non_hate, na, needs_third, unresolvable };

inline std::string to_string(MajorityOutcome o) {
    switch (o) {
        case MajorityOutcome::hate: return "hate";
        case MajorityOutcome::non_hate: return "non_hate";
        case MajorityOutcome::na: return "na";
        case MajorityOutcome::needs_third: return "needs_third";
        case MajorityOutcome::unresolvable: return "unresolvable";
    }
    return "unresolvable";
}

// Permutation-invariant: only vote counts matter.
inline MajorityOutcome majority_label(const std::vector<Annotation>& annotations) {
    std::set<std::string> annotators;
    for (const auto& a : annotations) annotators.insert(a.annotator_id);
    if (annotators.size() < 2)
        throw InsufficientAnnotations("majority vote needs >= 2 annotations from distinct annotators, got " +
                                      std::to_string(annotators.size()));
    if (annotators.size() != annotations.size())
        throw InvalidInput("multiple annotations from one annotator for one sample");

    std::map<Label, std::size_t> votes;
    for (const auto& a : annotations) ++votes[a.label];

    if (annotations.size() == 2) {
        if (votes.size() == 1) {
            switch (annotations.front().label) {
                case Label::hate: return MajorityOutcome::hate;
                case Label::non_hate: return MajorityOutcome::non_hate;
                default: return MajorityOutcome::na;
            }
        }
        return MajorityOutcome::needs_third;
    }

    for (const auto& [label, count] : votes) {
        if (count * 2 > annotations.size()) {
            switch (label) {
                case Label::hate: return MajorityOutcome::hate;
                case Label::non_hate: return MajorityOutcome::non_hate;
                default: return MajorityOutcome::na;
            }
        }
    }
    return MajorityOutcome::unresolvable;
}

// Nominal-metric Krippendorff's alpha over units with >= 2 annotations,
// via the coincidence/marginal closed form:
//   D_o = (1/n) * sum_u (m_u^2 - sum_c m_uc^2) / (m_u - 1)
//   D_e = (n^2 - sum_c n_c^2) / (n * (n - 1))
//   alpha = 1 - D_o / D_e        (no clamping)
inline double krippendorff_alpha(
    const std::unordered_map<std::string, std::vector<Annotation>>& by_sample) {
    std::size_t n = 0;
    double observed = 0.0;
    std::map<Label, std::size_t> totals;
    std::size_t pairable_units = 0;

    for (const auto& [sample_id, anns] : by_sample) {
        const std::size_t m = anns.size();
        if (m < 2) continue; // single-annotated units carry no pair information
        ++pairable_units;
        std::map<Label, std::size_t> counts;
        for (const auto& a : anns) ++counts[a.label];
        std::size_t same = 0;
        for (const auto& [label, c] : counts) {
            same += c * c;
            totals[label] += c;
        }
        n += m;
        observed += static_cast<double>(m * m - same) / static_cast<double>(m - 1);
    }

    if (pairable_units == 0)
        throw UndefinedAlpha("alpha is undefined: every sample has fewer than 2 annotations");

    const double dn = static_cast<double>(n);
    double sum_sq = 0.0;
    for (const auto& [label, c] : totals) sum_sq += static_cast<double>(c) * static_cast<double>(c);

    const double d_o = observed / dn;
    const double d_e = (dn * dn - sum_sq) / (dn * (dn - 1.0));
    if (d_e == 0.0) return 1.0; // all values identical: perfect agreement
    return 1.0 - d_o / d_e;
}

inline double krippendorff_alpha(const AnnotationStore& annotations) {
    return krippendorff_alpha(annotations.grouped());
}

// Applies majority vote to every annotated sample in the store.
struct ResolutionReport {
    std::size_t resolved = 0;
    std::vector<std::string> needs_third;
    std::vector<std::string> unresolvable;
    std::vector<std::string> insufficient;
};

inline ResolutionReport resolve_labels(SampleStore& store, const AnnotationStore& annotations) {
    ResolutionReport report;
    for (const auto& [sample_id, anns] : annotations.grouped()) {
        if (!store.contains(sample_id)) continue;
        MajorityOutcome outcome;
        try {
            outcome = majority_label(anns);
        } catch (const InsufficientAnnotations&) {
            report.insufficient.push_back(sample_id);
            continue;
        }
        switch (outcome) {
            case MajorityOutcome::hate: store.set_label(sample_id, Label::hate); ++report.resolved; break;
            case MajorityOutcome::non_hate: store.set_label(sample_id, Label::non_hate); ++report.resolved; break;
            case MajorityOutcome::na: store.set_label(sample_id, Label::na); ++report.resolved; break;
            case MajorityOutcome::needs_third: report.needs_third.push_back(sample_id); break;
            case MajorityOutcome::unresolvable: report.unresolvable.push_back(sample_id); break;
        }
    }
    return report;
}

} // namespace hatebench
