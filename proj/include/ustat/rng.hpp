#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace ustat {

// SplitMix64 finalizer (Steele, Lea & Flood constants).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Seed for stream `index` under master `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed + kGoldenGamma) ^ (index * 0xd1b54a32d192ed03ULL + kGoldenGamma));
}

// Counter-based generator: output k is mix64(key + (k + 1) * golden gamma).
// Any element of the stream can be computed directly from (key, k).
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return at(counter_++); }
    result_type at(std::uint64_t k) const { return mix64(key_ + (k + 1) * kGoldenGamma); }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// uniform on [0, bound) without modulo bias (Lemire)
std::uint64_t uniform_below(CounterRng& rng, std::uint64_t bound);
// Fisher-Yates
void shuffle_indices(std::vector<int>& idx, CounterRng& rng);
std::vector<int> random_permutation(int n, CounterRng& rng);

// 64 bits from the operating system's entropy source
std::uint64_t entropy_seed();

}  // namespace ustat
