#include "ustat/power_sums.hpp"

#include "ustat/error.hpp"

#include <cmath>
#include <string>

namespace ustat {

double perm_count(double n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= (n - i);
    return r;
}

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

double binomial(int a, int c) {
    if (c < 0 || c > a) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= c; ++i) r = r * (a - c + i) / i;
    return std::round(r);
}

namespace {

constexpr std::size_t kBlock = 128;

double block_sum(const double* x, std::size_t n) {
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 += x[i];
        a1 += x[i + 1];
        a2 += x[i + 2];
        a3 += x[i + 3];
    }
    for (; i < n; ++i) a0 += x[i];
    return (a0 + a1) + (a2 + a3);
}

void block_power_sums(const double* s, std::size_t n, int kmax, double* out) {
    double pw[kBlock];
    for (std::size_t i = 0; i < n; ++i) pw[i] = s[i];
    for (int k = 1; k <= kmax; ++k) {
        out[k] = block_sum(pw, n);
        if (k < kmax)
            for (std::size_t i = 0; i < n; ++i) pw[i] *= s[i];
    }
}

void tree_power_sums(const double* s, std::size_t n, int kmax, double* out) {
    if (n <= kBlock) {
        block_power_sums(s, n, kmax, out);
        return;
    }
    std::size_t half = (n / 2 + kBlock - 1) / kBlock * kBlock;
    double right[kMaxPower + 1];
    tree_power_sums(s, half, kmax, out);
    tree_power_sums(s + half, n - half, kmax, right);
    for (int k = 1; k <= kmax; ++k) out[k] += right[k];
}

}  // namespace

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= kBlock) return block_sum(x, n);
    std::size_t half = (n / 2 + kBlock - 1) / kBlock * kBlock;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

void power_sums_raw(const double* s, std::size_t n, int kmax, double* out) {
    out[0] = static_cast<double>(n);
    if (n == 0) {
        for (int k = 1; k <= kmax; ++k) out[k] = 0.0;
        return;
    }
    tree_power_sums(s, n, kmax, out);
}

void distinct_sums_raw(const double* v, int a, double* u) {
    u[0] = 1.0;
    for (int r = 1; r <= a; ++r) {
        // T runs through U^{(k, 1_{r-k})} for k = r down to 1
        double t = v[r];
        for (int k = r - 1; k >= 1; --k) t = v[k] * u[r - k] - (r - k) * t;
        u[r] = t;
    }
}

PowerSumTable power_sums(std::span<const double> s, int a_max) {
    if (s.empty()) fail(ErrorCode::EmptySeries, "power sums of an empty series");
    if (a_max < 1 || a_max > kMaxPower)
        fail(ErrorCode::InvalidArgument, "a_max must be in 1.." + std::to_string(kMaxPower));
    PowerSumTable t;
    t.n = s.size();
    t.a_max = a_max;
    t.v.assign(a_max + 1, 0.0);
    power_sums_raw(s.data(), s.size(), a_max, t.v.data());
    return t;
}

DistinctSumCache distinct_index_sums(const PowerSumTable& t) {
    if (static_cast<std::size_t>(t.a_max) > t.n)
        fail(ErrorCode::OrderExceedsSampleSize,
             "order " + std::to_string(t.a_max) + " exceeds series length " + std::to_string(t.n));
    DistinctSumCache c;
    c.u.assign(t.a_max + 1, 0.0);
    distinct_sums_raw(t.v.data(), t.a_max, c.u.data());
    return c;
}

double closed_form_distinct_sum(const PowerSumTable& t, int a) {
    if (a < 1 || a > 6) fail(ErrorCode::UnsupportedOrder, "closed forms exist for orders 1..6 only");
    if (a > t.a_max) fail(ErrorCode::InvalidArgument, "power-sum table too short for this order");
    if (static_cast<std::size_t>(a) > t.n)
        fail(ErrorCode::OrderExceedsSampleSize, "order exceeds series length");
    const auto& v = t.v;
    const double v1 = v[1];
    switch (a) {
    case 1:
        return v1;
    case 2:
        return v1 * v1 - v[2];
    case 3:
        return std::pow(v1, 3) - 3 * v[2] * v1 + 2 * v[3];
    case 4:
        return std::pow(v1, 4) - 6 * v[2] * v1 * v1 + 8 * v[3] * v1 + 3 * v[2] * v[2] - 6 * v[4];
    case 5:
        return std::pow(v1, 5) - 10 * v[2] * std::pow(v1, 3) + 20 * v[3] * v1 * v1 +
               15 * v[2] * v[2] * v1 - 30 * v[4] * v1 - 20 * v[2] * v[3] + 24 * v[5];
    default:
        return std::pow(v1, 6) - 15 * std::pow(v1, 4) * v[2] + 40 * v[3] * std::pow(v1, 3) +
               45 * v1 * v1 * v[2] * v[2] - 90 * v1 * v1 * v[4] - 120 * v1 * v[2] * v[3] +
               144 * v1 * v[5] - 15 * std::pow(v[2], 3) + 90 * v[2] * v[4] + 40 * v[3] * v[3] -
               120 * v[6];
    }
}

namespace {

double enumerate(std::span<const double> s, int depth, unsigned used, double prod) {
    if (depth == 0) return prod;
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (used & (1u << i)) continue;
        total += enumerate(s, depth - 1, used | (1u << i), prod * s[i]);
    }
    return total;
}

}  // namespace

double brute_force_distinct_sum(std::span<const double> s, int a) {
    if (s.size() > 12 || a > 6)
        fail(ErrorCode::SizeGuard, "brute force limited to n <= 12 and a <= 6");
    if (a < 0) fail(ErrorCode::InvalidArgument, "negative order");
    if (static_cast<std::size_t>(a) > s.size()) return 0.0;
    return enumerate(s, a, 0u, 1.0);
}

}  // namespace ustat
