#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace msf {

// Derives an independent substream seed from (experiment seed, stream label)
// so that every noise source in a twin experiment is reproducible and
// uncorrelated with the others.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    // FNV-1a over the label, folded into the seed via splitmix64 finalization.
    std::uint64_t h = 14695981039346656037ull;
    for (char c : label) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ull;
    }
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull + h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label)
        : engine_(derive_seed(seed, label)) {}
    explicit RngStream(std::uint64_t raw_seed) : engine_(raw_seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace msf
