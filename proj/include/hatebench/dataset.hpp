#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hatebench/error.hpp"
#include "hatebench/rng.hpp"
#include "hatebench/store.hpp"

namespace hatebench {

struct DatasetSplit {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::vector<std::string> val_ids;
    std::uint64_t seed = 0;
    std::vector<double> fractions; // train, test[, val]
};

// Deterministic given (seed, fractions, ordered id list). Sizes are
// floor(fraction * n); the remainder goes to the training split.
inline DatasetSplit make_split(const std::vector<std::string>& ordered_ids,
                               std::uint64_t seed, std::vector<double> fractions) {
    if (fractions.size() < 2 || fractions.size() > 3)
        throw InvalidInput("make_split expects 2 or 3 fractions");
    double sum = 0.0;
    for (double f : fractions) {
        if (f < 0.0 || f > 1.0) throw InvalidInput("split fraction out of [0,1]");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("split fractions must sum to 1");

    std::vector<std::string> ids = ordered_ids;
    Rng rng = Rng(seed).derive("dataset-split");
    rng.shuffle(ids);

    const std::size_t n = ids.size();
    std::size_t n_test = static_cast<std::size_t>(fractions[1] * static_cast<double>(n));
    std::size_t n_val =
        fractions.size() == 3 ? static_cast<std::size_t>(fractions[2] * static_cast<double>(n)) : 0;

    DatasetSplit split;
    split.seed = seed;
    split.fractions = std::move(fractions);
    std::size_t i = 0;
    for (; i < n - n_test - n_val; ++i) split.train_ids.push_back(ids[i]);
    for (; i < n - n_val; ++i) split.test_ids.push_back(ids[i]);
    for (; i < n; ++i) split.val_ids.push_back(ids[i]);
    return split;
}

// Downsamples the larger of {hate, non_hate} uniformly at random to the
// smaller class size. Output preserves store order; output is a subset
// of the input and identical across runs with the same seed.
inline std::vector<std::string> balance_dataset(const SampleStore& store, std::uint64_t seed) {
    std::vector<std::string> hate_ids, non_hate_ids;
    std::vector<std::string> order;
    for (const auto& s : store.all()) {
        if (s.label == Label::hate) hate_ids.push_back(s.id);
        else if (s.label == Label::non_hate) non_hate_ids.push_back(s.id);
    }
    if (hate_ids.empty() || non_hate_ids.empty())
        throw EmptyClass("balance_dataset requires both classes non-empty");

    auto& larger = hate_ids.size() >= non_hate_ids.size() ? hate_ids : non_hate_ids;
    const std::size_t target = std::min(hate_ids.size(), non_hate_ids.size());

    Rng rng = Rng(seed).derive("balance-dataset");
    rng.shuffle(larger);
    larger.resize(target);

    std::unordered_set<std::string> keep(hate_ids.begin(), hate_ids.end());
    keep.insert(non_hate_ids.begin(), non_hate_ids.end());

    std::vector<std::string> out;
    out.reserve(keep.size());
    for (const auto& s : store.all())
        if (keep.count(s.id)) out.push_back(s.id);
    return out;
}

} // namespace hatebench
