#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace hatebench {

inline constexpr std::uint64_t kDefaultSeed = 20240917ULL;

// HATEBENCH_SEED overrides the built-in default.
inline std::uint64_t default_seed() {
    if (const char* env = std::getenv("HATEBENCH_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env) return static_cast<std::uint64_t>(v);
    }
    return kDefaultSeed;
}

// FNV-1a, used to derive stream-specific seeds from a master seed.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    // Independent sub-stream named after its purpose, so adding one
    // consumer does not shift the draws of another.
    Rng derive(std::string_view stream) const { return Rng(fnv1a(stream, seed_ * 2654435761ULL + 1)); }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next() { return engine_(); }

    std::size_t uniform_index(std::size_t n) {
        std::uniform_int_distribution<std::size_t> d(0, n - 1);
        return d(engine_);
    }

    double uniform01() {
        std::uniform_real_distribution<double> d(0.0, 1.0);
        return d(engine_);
    }

    double normal(double mean, double stddev) {
        std::normal_distribution<double> d(mean, stddev);
        return d(engine_);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        std::shuffle(v.begin(), v.end(), engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace hatebench
