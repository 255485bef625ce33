#pragma once

#include "ustat/matrix.hpp"
#include "ustat/types.hpp"

#include <span>
#include <vector>

namespace ustat {

// sum_j (P^n_a)^{-1} U^{1_a}(x_j - mu0_j) for each requested finite order.
// Variance: a!/P^n_a times the sum over all (j1, j2) of an unbiased
// distinct-index estimate of sigma_{j1 j2}^a.
std::vector<UStatResult> one_sample_u_stats(const DataMatrix& m, const Eigen::VectorXd& mu0,
                                            std::span<const int> orders, int threads = 1);
UStatResult one_sample_u(const DataMatrix& m, const Eigen::VectorXd& mu0, int a);
// max_j (xbar_j - mu0_j)^2 / sigma_jj
UStatResult one_sample_max(const DataMatrix& m, const Eigen::VectorXd& mu0);

std::vector<UStatResult> two_sample_u_stats(const GroupedSample& g, std::span<const int> orders,
                                            int threads = 1);
UStatResult two_sample_u(const GroupedSample& g, int a);
// max_j (xbar_j - ybar_j)^2 / pooled sigma_jj
UStatResult two_sample_max(const GroupedSample& g);

// Estimates of sum_{j1,j2} sigma_{j1 j2}^a for a = 0..amax (entry 0 is p^2):
// distinct-index sums of centered products divided by P^n_a.
std::vector<double> sigma_power_totals(const Eigen::MatrixXd& x, int amax, int threads = 1);

}  // namespace ustat
