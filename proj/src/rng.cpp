#include "ustat/rng.hpp"

#include <numeric>
#include <random>
#include <utility>

namespace ustat {

std::uint64_t uniform_below(CounterRng& rng, std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(rng()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

void shuffle_indices(std::vector<int>& idx, CounterRng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        auto k = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(idx[i - 1], idx[k]);
    }
}

std::vector<int> random_permutation(int n, CounterRng& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle_indices(idx, rng);
    return idx;
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace ustat
