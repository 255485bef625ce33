#include "ustat/cov1.hpp"

#include "ustat/error.hpp"
#include "ustat/mixed_sums.hpp"
#include "ustat/parallel.hpp"
#include "ustat/power_sums.hpp"
#include "ustat/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>

namespace ustat {

namespace {

// Polynomials for the full unknown-mean statistic of order a, one per c.
struct ExactPlan {
    std::vector<MixedSumPoly> by_c;
};

const ExactPlan& exact_plan(int a, int max_exponent) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, ExactPlan> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_pair(a, max_exponent);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    ExactPlan plan;
    for (int c = 0; c <= a; ++c) {
        std::vector<Monomial> items;
        for (int k = 0; k < a - c; ++k) items.push_back({1, 1});
        for (int k = 0; k < c; ++k) items.push_back({1, 0});
        for (int k = 0; k < c; ++k) items.push_back({0, 1});
        plan.by_c.push_back(compile_mixed_sum(items, max_exponent));
    }
    return cache.emplace(key, std::move(plan)).first->second;
}

void check_orders(std::span<const int> orders, Eigen::Index n, MeanMode mode) {
    if (orders.empty()) fail(ErrorCode::EmptySet, "no orders requested");
    for (int a : orders) {
        if (a < 1) fail(ErrorCode::InvalidArgument, "finite orders start at 1");
        if (a > kMaxPower / 2) fail(ErrorCode::UnsupportedOrder, "order " + std::to_string(a) + " is too large");
        if (a > n)
            fail(ErrorCode::OrderExceedsSampleSize,
                 "order " + std::to_string(a) + " exceeds n=" + std::to_string(n));
        if (mode == MeanMode::UnknownExact) {
            if (a > 6) fail(ErrorCode::UnsupportedOrder, "exact unknown-mean statistic supports a <= 6");
            if (2 * a > n)
                fail(ErrorCode::OrderExceedsSampleSize, "exact unknown-mean statistic of order " +
                                                            std::to_string(a) + " needs n >= " +
                                                            std::to_string(2 * a));
        }
    }
}

std::vector<std::string> constant_column_warnings(const Eigen::MatrixXd& xc) {
    std::vector<std::string> w;
    for (Eigen::Index j = 0; j < xc.cols(); ++j)
        if (xc.col(j).isZero(0.0)) w.push_back("DegenerateColumn: column " + std::to_string(j + 1) + " is constant");
    return w;
}

}  // namespace

std::vector<UStatResult> cov1_u_stats(const DataMatrix& m, std::span<const int> orders, MeanMode mode,
                                      int threads) {
    const Eigen::Index n = m.n(), p = m.p();
    check_orders(orders, n, mode);
    const int amax = *std::max_element(orders.begin(), orders.end());
    const int kv = std::max(amax, 2);
    const int no = static_cast<int>(orders.size());
    const Eigen::MatrixXd xc = centered(m.values());
    const Eigen::MatrixXd& xs = mode == MeanMode::KnownZero ? m.values() : xc;
    const double nd = static_cast<double>(n);

    Eigen::VectorXd colsum = xc.colwise().sum().transpose();
    Eigen::VectorXd colsq = xc.array().square().colwise().sum().transpose();

    std::vector<const ExactPlan*> plans(amax + 1, nullptr);
    if (mode == MeanMode::UnknownExact)
        for (int a : orders) plans[a] = &exact_plan(a, amax);
    const int stride = amax + 1;

    // per-j1 partial sums, laid out [j1][order] for values then variances
    std::vector<double> part_val(static_cast<std::size_t>(p) * no, 0.0);
    std::vector<double> part_var(static_cast<std::size_t>(p) * no, 0.0);

    parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t j1u) {
        const auto j1 = static_cast<Eigen::Index>(j1u);
        std::vector<double> s(n), w(n), sc(n);
        double vs[kMaxPower + 1], us[kMaxPower + 1], vw[kMaxPower + 1], uw[kMaxPower + 1];
        std::vector<double> acc_val(no, 0.0), acc_var(no, 0.0);
        std::vector<double> moments, pr, pq;
        if (mode == MeanMode::UnknownExact) {
            moments.assign(static_cast<std::size_t>(stride) * stride, 0.0);
            pr.resize(n);
            pq.resize(n);
        }
        const double* c1 = xc.col(j1).data();
        const double* r1 = xs.col(j1).data();
        for (Eigen::Index j2 = j1 + 1; j2 < p; ++j2) {
            const double* c2 = xc.col(j2).data();
            const double* r2 = xs.col(j2).data();
            for (Eigen::Index i = 0; i < n; ++i) {
                sc[i] = c1[i] * c2[i];
                w[i] = sc[i] * sc[i];
            }
            const double* sp = sc.data();
            if (mode == MeanMode::KnownZero) {
                for (Eigen::Index i = 0; i < n; ++i) s[i] = r1[i] * r2[i];
                sp = s.data();
            }
            power_sums_raw(sp, n, kv, vs);
            distinct_sums_raw(vs, amax, us);
            power_sums_raw(w.data(), n, amax, vw);
            distinct_sums_raw(vw, amax, uw);

            double c21 = 0, c12 = 0;
            if (mode == MeanMode::Unknown && amax >= 2) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    s[i] = sc[i] * c1[i];
                    w[i] = sc[i] * c2[i];
                }
                c21 = pairwise_sum(s.data(), n);
                c12 = pairwise_sum(w.data(), n);
            }
            if (mode == MeanMode::UnknownExact) {
                for (Eigen::Index i = 0; i < n; ++i) pr[i] = 1.0;
                for (int r = 0; r <= amax; ++r) {
                    for (Eigen::Index i = 0; i < n; ++i) pq[i] = pr[i];
                    for (int q = 0; q <= amax; ++q) {
                        moments[r * stride + q] = pairwise_sum(pq.data(), n);
                        for (Eigen::Index i = 0; i < n; ++i) pq[i] *= c2[i];
                    }
                    for (Eigen::Index i = 0; i < n; ++i) pr[i] *= c1[i];
                }
            }

            for (int o = 0; o < no; ++o) {
                const int a = orders[o];
                double val;
                if (mode == MeanMode::Unknown && a == 1) {
                    const double A = colsum[j1], B = colsum[j2], C = vs[1];
                    val = C / nd - (A * B - C) / perm_count(nd, 2);
                } else if (mode == MeanMode::Unknown && a == 2) {
                    const double A = colsum[j1], B = colsum[j2], A2 = colsq[j1], B2 = colsq[j2];
                    const double C = vs[1], C22 = vs[2];
                    const double u1 = C * C - C22;
                    const double u2 = C * (A * B - C) - (c21 * B - C22) - (c12 * A - C22);
                    const double u3 = (A * A - A2) * (B * B - B2) - 4.0 * u2 - 2.0 * u1;
                    val = u1 / perm_count(nd, 2) - 2.0 * u2 / perm_count(nd, 3) + u3 / perm_count(nd, 4);
                } else if (mode == MeanMode::UnknownExact) {
                    val = 0.0;
                    double sign = 1.0;
                    for (int c = 0; c <= a; ++c) {
                        val += sign * binomial(a, c) / perm_count(nd, a + c) *
                               plans[a]->by_c[c].eval(moments.data());
                        sign = -sign;
                    }
                } else {
                    val = us[a] / perm_count(nd, a);
                }
                acc_val[o] += val;
                acc_var[o] += uw[a];
            }
        }
        for (int o = 0; o < no; ++o) {
            part_val[j1u * no + o] = acc_val[o];
            part_var[j1u * no + o] = acc_var[o];
        }
    });

    std::vector<UStatResult> out;
    auto warnings = constant_column_warnings(xc);
    std::vector<double> col(p);
    for (int o = 0; o < no; ++o) {
        const int a = orders[o];
        UStatResult r;
        r.order = a;
        r.n = n;
        r.p = p;
        for (Eigen::Index j = 0; j < p; ++j) col[j] = part_val[j * no + o];
        r.value = 2.0 * pairwise_sum(col.data(), p);
        for (Eigen::Index j = 0; j < p; ++j) col[j] = part_var[j * no + o];
        const double pa = perm_count(nd, a);
        r.variance = 4.0 * factorial(a) / (pa * pa) * pairwise_sum(col.data(), p);
        standardize(r);
        r.warnings = warnings;
        if (mode == MeanMode::Unknown && a >= 3) {
            const double limit = (a % 2 == 0) ? std::pow(nd, a / 2.0) : std::pow(nd, 1.0 + a / 2.0);
            if (static_cast<double>(p) >= limit)
                r.warnings.push_back("order " + std::to_string(a) +
                                     ": p is large relative to n; the centered statistic may be biased");
        }
        out.push_back(std::move(r));
    }
    return out;
}

double variance_estimator(const DataMatrix& m, int a, int threads) {
    int ord[1] = {a};
    return cov1_u_stats(m, ord, MeanMode::Unknown, threads).front().variance;
}

namespace {

struct MaxPrep {
    Eigen::MatrixXd z;                  // standardized nonconstant columns
    std::vector<Eigen::Index> columns;  // original index of each column of z
    std::vector<std::string> warnings;
};

MaxPrep prepare_max(const DataMatrix& m) {
    MaxPrep prep;
    Eigen::MatrixXd xc = centered(m.values());
    const double nd = static_cast<double>(m.n());
    for (Eigen::Index j = 0; j < m.p(); ++j) {
        double var = xc.col(j).squaredNorm() / nd;
        if (var > 0.0) prep.columns.push_back(j);
        else prep.warnings.push_back("DegenerateColumn: column " + std::to_string(j + 1) +
                                     " is constant and was excluded from the maximum");
    }
    if (prep.columns.size() < 2)
        fail(ErrorCode::DegenerateColumn, "fewer than two nonconstant columns for the maximum statistic");
    prep.z.resize(m.n(), static_cast<Eigen::Index>(prep.columns.size()));
    for (std::size_t k = 0; k < prep.columns.size(); ++k) {
        auto col = xc.col(prep.columns[k]);
        prep.z.col(static_cast<Eigen::Index>(k)) = col / std::sqrt(col.squaredNorm() / nd);
    }
    return prep;
}

struct MaxValue {
    double value = 0.0;
    Eigen::Index a = -1, b = -1;
};

MaxValue max_on_standardized(const Eigen::MatrixXd& z, MaxVariant variant) {
    const Eigen::Index q = z.cols();
    const double nd = static_cast<double>(z.rows());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(q, q);
    s.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), 1.0 / nd);
    MaxValue best;
    if (variant == MaxVariant::MStar) {
        for (Eigen::Index j2 = 0; j2 < q; ++j2)
            for (Eigen::Index j1 = j2 + 1; j1 < q; ++j1) {
                double v = std::fabs(s(j1, j2));
                if (v > best.value || best.a < 0) best = {v, j2, j1};
            }
        return best;
    }
    Eigen::MatrixXd z2 = z.array().square().matrix();
    Eigen::MatrixXd qm = Eigen::MatrixXd::Zero(q, q);
    qm.selfadjointView<Eigen::Lower>().rankUpdate(z2.transpose(), 1.0 / nd);
    for (Eigen::Index j2 = 0; j2 < q; ++j2)
        for (Eigen::Index j1 = j2 + 1; j1 < q; ++j1) {
            double theta = qm(j1, j2) - s(j1, j2) * s(j1, j2);
            if (!(theta > 1e-12 * qm(j1, j2))) continue;
            double v = std::fabs(s(j1, j2)) / std::sqrt(theta);
            if (v > best.value || best.a < 0) best = {v, j2, j1};
        }
    if (best.a < 0) fail(ErrorCode::DegenerateColumn, "no column pair has a positive variance estimate");
    return best;
}

}  // namespace

UStatResult max_stat(const DataMatrix& m, MaxVariant variant) {
    MaxPrep prep = prepare_max(m);
    MaxValue mv = max_on_standardized(prep.z, variant);
    UStatResult r;
    r.order = kInfOrder;
    r.n = m.n();
    r.p = m.p();
    r.value = mv.value;
    r.arg1 = prep.columns[mv.a];
    r.arg2 = prep.columns[mv.b];
    r.warnings = std::move(prep.warnings);
    return r;
}

std::vector<double> max_permutation_draws(const DataMatrix& m, MaxVariant variant, int count,
                                          std::uint64_t seed, int threads) {
    if (count < 1) fail(ErrorCode::InvalidArgument, "permutation count must be positive");
    MaxPrep prep = prepare_max(m);
    std::vector<double> draws(count);
    const Eigen::Index n = prep.z.rows(), q = prep.z.cols();
    parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t b) {
        CounterRng rng(derive_seed(seed, b));
        Eigen::MatrixXd zp(n, q);
        zp.col(0) = prep.z.col(0);
        for (Eigen::Index j = 1; j < q; ++j) {
            auto perm = random_permutation(static_cast<int>(n), rng);
            for (Eigen::Index i = 0; i < n; ++i) zp(i, j) = prep.z(perm[i], j);
        }
        draws[b] = max_on_standardized(zp, variant).value;
    });
    return draws;
}

UStatResult u_stat(const DataMatrix& m, const CovStatSpec& spec, int threads) {
    if (spec.order == kInfOrder) return max_stat(m, spec.max_variant);
    int ord[1] = {spec.order};
    return cov1_u_stats(m, ord, spec.mean_mode, threads).front();
}

namespace {

// calls f(idx) for every ordered tuple of `len` distinct indices in [0, n)
void for_each_distinct_tuple(int n, int len, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> idx(len);
    std::vector<char> used(n, 0);
    std::function<void(int)> rec = [&](int d) {
        if (d == len) {
            f(idx);
            return;
        }
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            used[i] = 1;
            idx[d] = i;
            rec(d + 1);
            used[i] = 0;
        }
    };
    rec(0);
}

}  // namespace

double brute_force_u(const DataMatrix& m, int a) {
    if (a < 1) fail(ErrorCode::InvalidArgument, "order must be >= 1");
    if (m.n() > 8 || m.p() > 4 || a > 3) fail(ErrorCode::SizeGuard, "brute force limited to n <= 8, p <= 4, a <= 3");
    const int n = static_cast<int>(m.n());
    if (2 * a > n) fail(ErrorCode::SizeGuard, "brute force needs n >= 2a");
    double total = 0.0;
    for (Eigen::Index j1 = 0; j1 < m.p(); ++j1)
        for (Eigen::Index j2 = 0; j2 < m.p(); ++j2) {
            if (j1 == j2) continue;
            double sign = 1.0;
            for (int c = 0; c <= a; ++c) {
                double inner = 0.0;
                for_each_distinct_tuple(n, a + c, [&](const std::vector<int>& t) {
                    double prod = 1.0;
                    for (int k = 0; k < a - c; ++k) prod *= m(t[k], j1) * m(t[k], j2);
                    for (int k = a - c; k < a; ++k) prod *= m(t[k], j1);
                    for (int k = a; k < a + c; ++k) prod *= m(t[k], j2);
                    inner += prod;
                });
                total += sign * binomial(a, c) / perm_count(n, a + c) * inner;
                sign = -sign;
            }
        }
    return total;
}

}  // namespace ustat
