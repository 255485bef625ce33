#include "ustat/cov2.hpp"

#include "detail.hpp"
#include "ustat/error.hpp"
#include "ustat/mean.hpp"
#include "ustat/parallel.hpp"
#include "ustat/power_sums.hpp"
#include "ustat/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ustat {

namespace {

// values for each order, xc and yc already centered per group
std::vector<double> leading_values(const Eigen::MatrixXd& xc, const Eigen::MatrixXd& yc, std::span<const int> orders,
                                   int amax, int threads) {
    const Eigen::Index nx = xc.rows(), ny = yc.rows(), p = xc.cols();
    const double nxd = static_cast<double>(nx), nyd = static_cast<double>(ny);
    const int no = static_cast<int>(orders.size());
    // coefficient table coef[a][c] = (-1)^{a-c} C(a,c) / (P^{nx}_c P^{ny}_{a-c})
    std::vector<double> coef(static_cast<std::size_t>(amax + 1) * (amax + 1), 0.0);
    for (int a = 1; a <= amax; ++a)
        for (int c = 0; c <= a; ++c)
            coef[a * (amax + 1) + c] = (((a - c) % 2 == 0) ? 1.0 : -1.0) * binomial(a, c) /
                                       (perm_count(nxd, c) * perm_count(nyd, a - c));
    std::vector<double> part(static_cast<std::size_t>(p) * no, 0.0);
    parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t j1u) {
        const auto j1 = static_cast<Eigen::Index>(j1u);
        std::vector<double> sx(nx), sy(ny);
        double v[kMaxPower + 1], ux[kMaxPower + 1], uy[kMaxPower + 1];
        std::vector<double> acc(no, 0.0);
        const double* x1 = xc.col(j1).data();
        const double* y1 = yc.col(j1).data();
        for (Eigen::Index j2 = j1; j2 < p; ++j2) {
            const double* x2 = xc.col(j2).data();
            const double* y2 = yc.col(j2).data();
            for (Eigen::Index i = 0; i < nx; ++i) sx[i] = x1[i] * x2[i];
            for (Eigen::Index i = 0; i < ny; ++i) sy[i] = y1[i] * y2[i];
            power_sums_raw(sx.data(), nx, amax, v);
            distinct_sums_raw(v, amax, ux);
            power_sums_raw(sy.data(), ny, amax, v);
            distinct_sums_raw(v, amax, uy);
            const double w = j1 == j2 ? 1.0 : 2.0;
            for (int o = 0; o < no; ++o) {
                const int a = orders[o];
                const double* cf = &coef[a * (amax + 1)];
                double t = 0.0;
                for (int c = 0; c <= a; ++c) t += cf[c] * ux[c] * uy[a - c];
                acc[o] += w * t;
            }
        }
        for (int o = 0; o < no; ++o) part[j1u * no + o] = acc[o];
    });
    std::vector<double> out(no), col(p);
    for (int o = 0; o < no; ++o) {
        for (Eigen::Index j = 0; j < p; ++j) col[j] = part[j * no + o];
        out[o] = pairwise_sum(col.data(), p);
    }
    return out;
}

int check_cov2_orders(const GroupedSample& g, std::span<const int> orders) {
    return detail::check_finite_orders(orders, std::min(g.x.n(), g.y.n()));
}

}  // namespace

std::vector<UStatResult> cov2_u_stats(const GroupedSample& g, std::span<const int> orders, int threads) {
    const int amax = check_cov2_orders(g, orders);
    auto vals = leading_values(centered(g.x.values()), centered(g.y.values()), orders, amax, threads);
    std::vector<UStatResult> out;
    for (std::size_t o = 0; o < orders.size(); ++o) {
        UStatResult r;
        r.order = orders[o];
        r.n = g.x.n() + g.y.n();
        r.p = g.x.p();
        r.value = vals[o];
        out.push_back(std::move(r));
    }
    return out;
}

UStatResult u_stat_leading(const GroupedSample& g, int a) {
    int ord[1] = {a};
    return cov2_u_stats(g, ord).front();
}

std::vector<PermutationNull> cov2_permutation_null(const GroupedSample& g, std::span<const int> orders, int count,
                                                   std::uint64_t seed, int threads) {
    if (count < 100) fail(ErrorCode::InvalidArgument, "permutation count must be at least 100");
    const int amax = check_cov2_orders(g, orders);
    const Eigen::Index nx = g.x.n(), ny = g.y.n(), p = g.x.p();
    Eigen::MatrixXd pooled(nx + ny, p);
    pooled << g.x.values(), g.y.values();
    const int no = static_cast<int>(orders.size());
    std::vector<double> draws(static_cast<std::size_t>(count) * no);
    parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t b) {
        CounterRng rng(derive_seed(seed, b));
        auto perm = random_permutation(static_cast<int>(nx + ny), rng);
        Eigen::MatrixXd xb(nx, p), yb(ny, p);
        for (Eigen::Index i = 0; i < nx; ++i) xb.row(i) = pooled.row(perm[i]);
        for (Eigen::Index i = 0; i < ny; ++i) yb.row(i) = pooled.row(perm[nx + i]);
        auto vals = leading_values(centered(xb), centered(yb), orders, amax, 1);
        for (int o = 0; o < no; ++o) draws[b * no + o] = vals[o];
    });
    std::vector<PermutationNull> out(no);
    for (int o = 0; o < no; ++o) {
        auto& nl = out[o];
        nl.draws.resize(count);
        for (int b = 0; b < count; ++b) nl.draws[b] = draws[static_cast<std::size_t>(b) * no + o];
        nl.mean = pairwise_sum(nl.draws.data(), nl.draws.size()) / count;
        double ss = 0.0;
        for (double d : nl.draws) ss += (d - nl.mean) * (d - nl.mean);
        nl.sd = std::sqrt(ss / (count - 1));
        std::sort(nl.draws.begin(), nl.draws.end());
    }
    return out;
}

PermutationNull permutation_null(const GroupedSample& g, int a, int count, std::uint64_t seed) {
    int ord[1] = {a};
    return cov2_permutation_null(g, ord, count, seed).front();
}

void cov2_elliptical_variance(const GroupedSample& g, std::vector<UStatResult>& results, double kappa_x,
                              double kappa_y, int threads) {
    if (!(kappa_x > 0.0) || !(kappa_y > 0.0)) fail(ErrorCode::InvalidArgument, "kurtosis parameters must be positive");
    if (results.empty()) return;
    int amax = 0;
    for (const auto& r : results) amax = std::max(amax, r.order);
    const double nx = static_cast<double>(g.x.n()), ny = static_cast<double>(g.y.n());
    auto tx = sigma_power_totals(g.x.values(), amax, threads);
    auto ty = sigma_power_totals(g.y.values(), amax, threads);
    for (auto& r : results) {
        const int a = r.order;
        const double total = (nx * tx[a] + ny * ty[a]) / (nx + ny);
        const double ck = std::pow((kappa_x - 1.0) / nx + (kappa_y - 1.0) / ny, a) +
                          2.0 * std::pow(kappa_x / nx + kappa_y / ny, a);
        r.variance = factorial(a) * ck * total * total;
        standardize(r);
    }
}

UStatResult cov2_max_stat(const GroupedSample& g) {
    const Eigen::MatrixXd xc = centered(g.x.values()), yc = centered(g.y.values());
    const double nx = static_cast<double>(xc.rows()), ny = static_cast<double>(yc.rows());
    const Eigen::MatrixXd sx = xc.transpose() * xc / nx, sy = yc.transpose() * yc / ny;
    const Eigen::MatrixXd x2 = xc.array().square().matrix(), y2 = yc.array().square().matrix();
    const Eigen::MatrixXd qx = x2.transpose() * x2 / nx, qy = y2.transpose() * y2 / ny;
    UStatResult r;
    r.order = kInfOrder;
    r.n = xc.rows() + yc.rows();
    r.p = xc.cols();
    bool any = false;
    for (Eigen::Index j2 = 0; j2 < r.p; ++j2)
        for (Eigen::Index j1 = 0; j1 <= j2; ++j1) {
            const double tx = qx(j1, j2) - sx(j1, j2) * sx(j1, j2);
            const double ty = qy(j1, j2) - sy(j1, j2) * sy(j1, j2);
            const double den = tx / nx + ty / ny;
            if (!(den > 0.0)) continue;
            const double d = sx(j1, j2) - sy(j1, j2);
            const double v = d * d / den;
            if (!any || v > r.value) {
                r.value = v;
                r.arg1 = j1;
                r.arg2 = j2;
                any = true;
            }
        }
    if (!any) fail(ErrorCode::DegenerateColumn, "no entry has a positive variance estimate");
    return r;
}

}  // namespace ustat
