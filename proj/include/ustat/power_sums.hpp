#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ustat {

// Highest power the raw kernels accept.
inline constexpr int kMaxPower = 24;

// P^n_k = n!/(n-k)!
double perm_count(double n, int k);
double factorial(int k);
double binomial(int a, int c);

// Tree summation with a short sequential base case.
double pairwise_sum(const double* x, std::size_t n);

// out[k] = sum_i s_i^k for k = 1..kmax and out[0] = n.
void power_sums_raw(const double* s, std::size_t n, int kmax, double* out);

// u[0] = 1 and u[r] = sum over ordered distinct r-tuples of the product, r = 1..a,
// from the power sums v[1..a].
void distinct_sums_raw(const double* v, int a, double* u);

struct PowerSumTable {
    std::size_t n = 0;
    int a_max = 0;
    std::vector<double> v;  // v[k] for k = 0..a_max, v[0] = n
};

struct DistinctSumCache {
    std::vector<double> u;  // u[r] for r = 0..a_max, u[0] = 1
};

// throws EmptySeries, InvalidArgument (a_max outside 1..kMaxPower)
PowerSumTable power_sums(std::span<const double> s, int a_max);
// throws OrderExceedsSampleSize when a_max > n
DistinctSumCache distinct_index_sums(const PowerSumTable& t);
// Hardcoded expansions for a <= 6. throws UnsupportedOrder, OrderExceedsSampleSize
double closed_form_distinct_sum(const PowerSumTable& t, int a);
// Literal enumeration, limited to n <= 12 and a <= 6 (SizeGuard).
double brute_force_distinct_sum(std::span<const double> s, int a);

}  // namespace ustat
