#pragma once

#include "ustat/matrix.hpp"
#include "ustat/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ustat {

// Leading-term statistic for H0: Sigma_x = Sigma_y. With centered products
// s^x (per group, own means), for each (j1, j2) including the diagonal:
//   sum_c (-1)^{a-c} C(a,c) U_x^{1_c}/P^{nx}_c * U_y^{1_{a-c}}/P^{ny}_{a-c}.
// Only `value` is filled; the variance comes from a calibration step.
std::vector<UStatResult> cov2_u_stats(const GroupedSample& g, std::span<const int> orders, int threads = 1);
UStatResult u_stat_leading(const GroupedSample& g, int a);

struct PermutationNull {
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> draws;  // sorted ascending
};

// Null distributions of every requested order from `count` random
// relabelings of the pooled rows (draw b uses derive_seed(seed, b)).
// throws InvalidArgument when count < 100
std::vector<PermutationNull> cov2_permutation_null(const GroupedSample& g, std::span<const int> orders,
                                                   int count, std::uint64_t seed, int threads = 1);
PermutationNull permutation_null(const GroupedSample& g, int a, int count, std::uint64_t seed);

// Elliptical approximation
//   var = a! C_{kappa,a} (sum_{j1,j2} sigma^a)^2,
//   C_{kappa,a} = ((kx-1)/nx + (ky-1)/ny)^a + 2 (kx/nx + ky/ny)^a,
// with the pooled sigma^a total. Fills variance and z in place.
void cov2_elliptical_variance(const GroupedSample& g, std::vector<UStatResult>& results, double kappa_x,
                              double kappa_y, int threads = 1);

// Experimental: max_{j1<=j2} (sx - sy)^2 / (theta_x/nx + theta_y/ny), theta the
// variance of the centered product. Calibrate by permutation only.
UStatResult cov2_max_stat(const GroupedSample& g);

}  // namespace ustat
