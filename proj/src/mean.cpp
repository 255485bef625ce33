#include "ustat/mean.hpp"

#include "detail.hpp"
#include "ustat/error.hpp"
#include "ustat/parallel.hpp"
#include "ustat/power_sums.hpp"

#include <cmath>

namespace ustat {

namespace {

// per-pair (j1 <= j2) estimates of sigma^c for c = 0..amax, handed to f
template <class F>
void for_each_pair_powers(const Eigen::MatrixXd& xc, int amax, int threads, F&& f) {
    const Eigen::Index n = xc.rows(), p = xc.cols();
    const double nd = static_cast<double>(n);
    parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t j1u) {
        const auto j1 = static_cast<Eigen::Index>(j1u);
        std::vector<double> s(n);
        double v[kMaxPower + 1], u[kMaxPower + 1], est[kMaxPower + 1];
        const double* c1 = xc.col(j1).data();
        for (Eigen::Index j2 = j1; j2 < p; ++j2) {
            const double* c2 = xc.col(j2).data();
            for (Eigen::Index i = 0; i < n; ++i) s[i] = c1[i] * c2[i];
            power_sums_raw(s.data(), n, amax, v);
            distinct_sums_raw(v, amax, u);
            for (int a = 0; a <= amax; ++a) est[a] = u[a] / perm_count(nd, a);
            f(j1u, j1, j2, est);
        }
    });
}

std::vector<double> reduce_rows(const std::vector<double>& part, Eigen::Index p, int width) {
    std::vector<double> out(width), col(p);
    for (int k = 0; k < width; ++k) {
        for (Eigen::Index j = 0; j < p; ++j) col[j] = part[j * width + k];
        out[k] = pairwise_sum(col.data(), p);
    }
    return out;
}

// plug-in sum_{j1,j2} sigmahat^a, the fallback when the distinct-index total is not positive
double plugin_total(const Eigen::MatrixXd& xc, int a) {
    Eigen::MatrixXd s = xc.transpose() * xc / static_cast<double>(xc.rows());
    return s.array().pow(a).sum();
}

void check_mu0(const DataMatrix& m, const Eigen::VectorXd& mu0) {
    if (mu0.size() != m.p())
        fail(ErrorCode::DimensionMismatch, "mu0 has length " + std::to_string(mu0.size()) +
                                               " but the data have p=" + std::to_string(m.p()));
    if (!mu0.allFinite()) fail(ErrorCode::InvalidArgument, "mu0 contains NaN or Inf");
}

}  // namespace

std::vector<double> sigma_power_totals(const Eigen::MatrixXd& x, int amax, int threads) {
    const Eigen::MatrixXd xc = centered(x);
    const Eigen::Index p = xc.cols();
    const int width = amax + 1;
    std::vector<double> part(static_cast<std::size_t>(p) * width, 0.0);
    for_each_pair_powers(xc, amax, threads, [&](std::size_t row, Eigen::Index j1, Eigen::Index j2, const double* est) {
        const double w = j1 == j2 ? 1.0 : 2.0;
        for (int a = 0; a <= amax; ++a) part[row * width + a] += w * est[a];
    });
    return reduce_rows(part, p, width);
}

std::vector<UStatResult> one_sample_u_stats(const DataMatrix& m, const Eigen::VectorXd& mu0,
                                            std::span<const int> orders, int threads) {
    check_mu0(m, mu0);
    const int amax = detail::check_finite_orders(orders, m.n());
    const Eigen::Index n = m.n(), p = m.p();
    const double nd = static_cast<double>(n);
    const int no = static_cast<int>(orders.size());

    std::vector<double> part(static_cast<std::size_t>(p) * (amax + 1), 0.0);
    parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t j) {
        std::vector<double> s(n);
        double v[kMaxPower + 1], u[kMaxPower + 1];
        for (Eigen::Index i = 0; i < n; ++i) s[i] = m(i, j) - mu0[j];
        power_sums_raw(s.data(), n, amax, v);
        distinct_sums_raw(v, amax, u);
        for (int a = 0; a <= amax; ++a) part[j * (amax + 1) + a] = u[a];
    });
    auto colsums = reduce_rows(part, p, amax + 1);
    auto totals = sigma_power_totals(m.values(), amax, threads);

    std::vector<UStatResult> out;
    for (int o = 0; o < no; ++o) {
        const int a = orders[o];
        UStatResult r;
        r.order = a;
        r.n = n;
        r.p = p;
        const double pa = perm_count(nd, a);
        r.value = colsums[a] / pa;
        double total = totals[a];
        if (!(total > 0.0)) {
            total = plugin_total(centered(m.values()), a);
            r.warnings.push_back("order " + std::to_string(a) +
                                 ": distinct-index variance estimate not positive, used plug-in covariance powers");
        }
        r.variance = factorial(a) / pa * total;
        standardize(r);
        out.push_back(std::move(r));
    }
    return out;
}

UStatResult one_sample_u(const DataMatrix& m, const Eigen::VectorXd& mu0, int a) {
    int ord[1] = {a};
    return one_sample_u_stats(m, mu0, ord).front();
}

namespace {

UStatResult standardized_max(const Eigen::VectorXd& diff, const Eigen::VectorXd& var, Eigen::Index n,
                             Eigen::Index p) {
    UStatResult r;
    r.order = kInfOrder;
    r.n = n;
    r.p = p;
    bool any = false;
    for (Eigen::Index j = 0; j < diff.size(); ++j) {
        if (!(var[j] > 0.0)) {
            r.warnings.push_back("DegenerateColumn: column " + std::to_string(j + 1) +
                                 " has zero variance and was excluded from the maximum");
            continue;
        }
        double v = diff[j] * diff[j] / var[j];
        if (!any || v > r.value) {
            r.value = v;
            r.arg1 = j;
            any = true;
        }
    }
    if (!any) fail(ErrorCode::DegenerateColumn, "every column has zero variance");
    return r;
}

}  // namespace

UStatResult one_sample_max(const DataMatrix& m, const Eigen::VectorXd& mu0) {
    check_mu0(m, mu0);
    auto st = column_stats(m);
    return standardized_max(st.means - mu0, st.variances, m.n(), m.p());
}

std::vector<UStatResult> two_sample_u_stats(const GroupedSample& g, std::span<const int> orders, int threads) {
    const Eigen::Index nx = g.x.n(), ny = g.y.n(), p = g.x.p();
    const int amax = detail::check_finite_orders(orders, std::min(nx, ny));
    const double nxd = static_cast<double>(nx), nyd = static_cast<double>(ny);
    const int no = static_cast<int>(orders.size());

    // the statistic is invariant to a common shift; remove the pooled mean first
    Eigen::RowVectorXd shift = (g.x.values().colwise().sum() + g.y.values().colwise().sum()) / (nxd + nyd);
    Eigen::MatrixXd xs = g.x.values().rowwise() - shift;
    Eigen::MatrixXd ys = g.y.values().rowwise() - shift;

    std::vector<double> part(static_cast<std::size_t>(p) * no, 0.0);
    parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t j) {
        double v[kMaxPower + 1], ux[kMaxPower + 1], uy[kMaxPower + 1];
        power_sums_raw(xs.col(j).data(), nx, amax, v);
        distinct_sums_raw(v, amax, ux);
        power_sums_raw(ys.col(j).data(), ny, amax, v);
        distinct_sums_raw(v, amax, uy);
        for (int o = 0; o < no; ++o) {
            const int a = orders[o];
            double val = 0.0;
            for (int c = 0; c <= a; ++c) {
                const double sign = ((a - c) % 2 == 0) ? 1.0 : -1.0;
                val += sign * binomial(a, c) * ux[c] / perm_count(nxd, c) * uy[a - c] / perm_count(nyd, a - c);
            }
            part[j * no + o] = val;
        }
    });
    auto values = reduce_rows(part, p, no);

    // variance: a! sum_{j1,j2} sum_c C(a,c) sx^c sy^{a-c} / (P^{nx}_c P^{ny}_{a-c})
    const Eigen::MatrixXd xc = centered(g.x.values());
    const Eigen::MatrixXd yc = centered(g.y.values());
    std::vector<double> vpart(static_cast<std::size_t>(p) * no, 0.0);
    parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t j1u) {
        const auto j1 = static_cast<Eigen::Index>(j1u);
        std::vector<double> sx(nx), sy(ny);
        double v[kMaxPower + 1], ux[kMaxPower + 1], uy[kMaxPower + 1];
        for (Eigen::Index j2 = j1; j2 < p; ++j2) {
            for (Eigen::Index i = 0; i < nx; ++i) sx[i] = xc(i, j1) * xc(i, j2);
            for (Eigen::Index i = 0; i < ny; ++i) sy[i] = yc(i, j1) * yc(i, j2);
            power_sums_raw(sx.data(), nx, amax, v);
            distinct_sums_raw(v, amax, ux);
            power_sums_raw(sy.data(), ny, amax, v);
            distinct_sums_raw(v, amax, uy);
            const double w = j1 == j2 ? 1.0 : 2.0;
            for (int o = 0; o < no; ++o) {
                const int a = orders[o];
                double t = 0.0;
                for (int c = 0; c <= a; ++c) {
                    // estimates of sx^c and sy^{a-c}, each divided by its P once more
                    const double ex = ux[c] / perm_count(nxd, c), ey = uy[a - c] / perm_count(nyd, a - c);
                    t += binomial(a, c) * ex * ey / (perm_count(nxd, c) * perm_count(nyd, a - c));
                }
                vpart[j1u * no + o] += w * t;
            }
        }
    });
    auto vtotals = reduce_rows(vpart, p, no);

    std::vector<UStatResult> out;
    for (int o = 0; o < no; ++o) {
        UStatResult r;
        r.order = orders[o];
        r.n = nx + ny;
        r.p = p;
        r.value = values[o];
        double total = vtotals[o];
        if (!(total > 0.0)) {
            const int a = orders[o];
            Eigen::MatrixXd sx = xc.transpose() * xc / nxd, sy = yc.transpose() * yc / nyd;
            total = (sx / nxd + sy / nyd).array().pow(a).sum();
            r.warnings.push_back("order " + std::to_string(a) +
                                 ": distinct-index variance estimate not positive, used plug-in covariance powers");
        }
        r.variance = factorial(orders[o]) * total;
        standardize(r);
        out.push_back(std::move(r));
    }
    return out;
}

UStatResult two_sample_u(const GroupedSample& g, int a) {
    int ord[1] = {a};
    return two_sample_u_stats(g, ord).front();
}

UStatResult two_sample_max(const GroupedSample& g) {
    auto sx = column_stats(g.x), sy = column_stats(g.y);
    const double nx = static_cast<double>(g.x.n()), ny = static_cast<double>(g.y.n());
    Eigen::VectorXd pooled = (nx * sx.variances + ny * sy.variances) / (nx + ny);
    return standardized_max(sx.means - sy.means, pooled, g.x.n() + g.y.n(), g.x.p());
}

}  // namespace ustat
