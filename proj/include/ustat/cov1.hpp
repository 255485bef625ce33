#pragma once

#include "ustat/matrix.hpp"
#include "ustat/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ustat {

// How the unknown mean is handled by the finite-order statistics.
//  KnownZero:    the c = 0 leading term only, for data with known zero mean.
//  Unknown:      exact closed forms for a = 1, 2; centered statistic for a >= 3.
//  UnknownExact: the full unbiased statistic for any a <= 6 (needs n >= 2a).
enum class MeanMode { KnownZero, Unknown, UnknownExact };
enum class MaxVariant { MStar, MDagger };

struct CovStatSpec {
    int order = 1;  // kInfOrder for the maximum
    MeanMode mean_mode = MeanMode::Unknown;
    MaxVariant max_variant = MaxVariant::MStar;
};

// Off-diagonal covariance statistics for several finite orders at once,
// sharing the per-pair work. Results follow `orders`.
std::vector<UStatResult> cov1_u_stats(const DataMatrix& m, std::span<const int> orders,
                                      MeanMode mode = MeanMode::Unknown, int threads = 1);

UStatResult u_stat(const DataMatrix& m, const CovStatSpec& spec, int threads = 1);

// 2 a! (P^n_a)^{-2} sum_{j1 != j2} U^{1_a}(s), s = centered x_{j1}^2 x_{j2}^2 products
double variance_estimator(const DataMatrix& m, int a, int threads = 1);

UStatResult max_stat(const DataMatrix& m, MaxVariant variant);

// Maximum recomputed after permuting every column independently, `count`
// times; draw b uses the stream derive_seed(seed, b).
std::vector<double> max_permutation_draws(const DataMatrix& m, MaxVariant variant, int count,
                                          std::uint64_t seed, int threads = 1);

// Literal evaluation of the unbiased statistic over distinct index tuples.
// Limited to n <= 8, p <= 4, 1 <= a <= 3 (SizeGuard / InvalidArgument).
double brute_force_u(const DataMatrix& m, int a);

}  // namespace ustat
