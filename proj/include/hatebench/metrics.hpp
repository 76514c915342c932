#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hatebench/error.hpp"
#include "hatebench/types.hpp"

namespace hatebench {

// Hate is the positive class throughout.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
};

enum class GroupBy { llm, status, identity_group, dataset };

inline std::string to_string(GroupBy g) {
    switch (g) {
        case GroupBy::llm: return "llm";
        case GroupBy::status: return "status";
        case GroupBy::identity_group: return "identity_group";
        case GroupBy::dataset: return "dataset";
    }
    return "llm";
}

struct MetricsReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    double precision = 0.0; // for the hate class
    double recall = 0.0;    // for the hate class
    double macro_f1 = 0.0;  // mean of per-class F1 over {hate, non_hate}

    std::optional<double> f1_hate;     // unset when the class is absent
    std::optional<double> f1_non_hate; //

    bool degenerate = false;   // some 0/0 precision or recall was defined as 0
    bool single_class = false; // the sample set lacks one ground-truth class

    std::optional<std::string> group_key;
};

namespace detail {

inline double safe_div(std::size_t num, std::size_t den, bool& degenerate) {
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace detail

inline MetricsReport metrics_from_confusion(const ConfusionMatrix& c) {
    MetricsReport r;
    r.confusion = c;
    if (c.total() == 0) throw InvalidInput("cannot compute metrics over zero samples");

    r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    r.precision = detail::safe_div(c.tp, c.tp + c.fp, r.degenerate);
    r.recall = detail::safe_div(c.tp, c.tp + c.fn, r.degenerate);

    const bool hate_present = (c.tp + c.fn) > 0;
    const bool non_hate_present = (c.tn + c.fp) > 0;
    r.single_class = !(hate_present && non_hate_present);

    // Per-class F1; a class absent from the ground truth has undefined F1
    // and is excluded from the macro average.
    if (hate_present) {
        const double p = r.precision;
        const double q = r.recall;
        r.f1_hate = (p + q) > 0.0 ? 2.0 * p * q / (p + q) : 0.0;
        if ((p + q) == 0.0) r.degenerate = true;
    }
    if (non_hate_present) {
        bool deg = false;
        const double p = detail::safe_div(c.tn, c.tn + c.fn, deg);
        const double q = detail::safe_div(c.tn, c.tn + c.fp, deg);
        r.f1_non_hate = (p + q) > 0.0 ? 2.0 * p * q / (p + q) : 0.0;
        if (deg || (p + q) == 0.0) r.degenerate = true;
    }

    double f1_sum = 0.0;
    std::size_t f1_n = 0;
    if (r.f1_hate) {
        f1_sum += *r.f1_hate;
        ++f1_n;
    }
    if (r.f1_non_hate) {
        f1_sum += *r.f1_non_hate;
        ++f1_n;
    }
    r.macro_f1 = f1_n > 0 ? f1_sum / static_cast<double>(f1_n) : 0.0;
    return r;
}

// Verdict labels keyed by sample id. Every sample must be labeled hate or
// non_hate and have a verdict.
inline MetricsReport evaluate(const std::vector<Sample>& samples,
                              const std::unordered_map<std::string, Label>& verdicts) {
    if (samples.empty()) throw InvalidInput("evaluate requires a non-empty sample set");
    ConfusionMatrix c;
    for (const auto& s : samples) {
        if (s.label != Label::hate && s.label != Label::non_hate)
            throw InvalidInput("sample " + s.id + " is not labeled hate/non_hate; filter na first");
        const auto it = verdicts.find(s.id);
        if (it == verdicts.end()) throw MissingVerdict(s.id);
        const bool truth_hate = s.label == Label::hate;
        const bool pred_hate = it->second == Label::hate;
        if (truth_hate && pred_hate) ++c.tp;
        else if (!truth_hate && pred_hate) ++c.fp;
        else if (truth_hate && !pred_hate) ++c.fn;
        else ++c.tn;
    }
    return metrics_from_confusion(c);
}

inline std::vector<MetricsReport> evaluate_grouped(
    const std::vector<Sample>& samples,
    const std::unordered_map<std::string, Label>& verdicts, GroupBy group_by) {
    std::map<std::string, std::vector<Sample>> groups;
    for (const auto& s : samples) {
        std::string key;
        switch (group_by) {
            case GroupBy::llm: key = s.source.str(); break;
            case GroupBy::status: key = to_string(s.llm_status); break;
            case GroupBy::identity_group: key = to_string(s.identity_group); break;
            case GroupBy::dataset: key = s.split.value_or("all"); break;
        }
        groups[key].push_back(s);
    }
    std::vector<MetricsReport> reports;
    reports.reserve(groups.size());
    for (const auto& [key, members] : groups) {
        MetricsReport r = evaluate(members, verdicts);
        r.group_key = key;
        reports.push_back(std::move(r));
    }
    return reports;
}

} // namespace hatebench
