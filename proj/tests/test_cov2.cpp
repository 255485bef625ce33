#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "check.hpp"
#include "oracles.hpp"
#include "ustat/cov2.hpp"
#include "ustat/inference.hpp"
#include "ustat/rng.hpp"

#include <algorithm>

using namespace ustat;

static GroupedSample group(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return GroupedSample{DataMatrix(x), DataMatrix(y)};
}

TEST_CASE("leading term matches the tuple enumeration") {
    std::mt19937_64 g(1);
    for (int rep = 0; rep < 30; ++rep) {
        int nx = 4 + static_cast<int>(g() % 3), ny = 4 + static_cast<int>(g() % 3), p = 2 + static_cast<int>(g() % 2);
        auto x = oracle::random_matrix(g, nx, p), y = oracle::random_matrix(g, ny, p);
        y *= 1.3;
        auto gs = group(x, y);
        for (int a = 1; a <= 2; ++a)
            CHECK(oracle::rel_err(u_stat_leading(gs, a).value, oracle::cov2_leading(x, y, a)) < 1e-9);
    }
}

TEST_CASE("order 1 is the summed covariance difference") {
    Eigen::MatrixXd x(4, 2), y(4, 2);
    x << 1, 2, 0, -1, 3, 0.5, -2, 1;
    y << 0.5, 0.5, 1, 2, -1, 0, 2, -3;
    auto cx = oracle::center(x), cy = oracle::center(y);
    Eigen::MatrixXd d = cx.transpose() * cx / 4.0 - cy.transpose() * cy / 4.0;
    CHECK(u_stat_leading(group(x, y), 1).value == doctest::Approx(d.sum()).epsilon(1e-12));
}

TEST_CASE("n=5 order 2 example") {
    Eigen::MatrixXd x(5, 2), y(5, 2);
    x << 0.1, 1.2, -0.7, 0.4, 1.9, -1.1, 0.3, 0.0, -1.4, 2.2;
    y << 1.0, -0.5, 0.2, 0.8, -0.6, 1.7, 2.4, -0.2, 0.9, 0.1;
    CHECK(oracle::rel_err(u_stat_leading(group(x, y), 2).value, oracle::cov2_leading(x, y, 2)) < 1e-9);
}

TEST_CASE("identical groups give zero at odd orders") {
    std::mt19937_64 g(2);
    auto x = oracle::random_matrix(g, 9, 3);
    auto gs = group(x, x);
    CHECK(std::fabs(u_stat_leading(gs, 1).value) < 1e-12);
    CHECK(std::fabs(u_stat_leading(gs, 3).value) < 1e-10);
}

TEST_CASE("several orders at once agree with single calls") {
    std::mt19937_64 g(3);
    auto gs = group(oracle::random_matrix(g, 12, 4), oracle::random_matrix(g, 10, 4));
    int ord[3] = {1, 4, 6};
    auto all = cov2_u_stats(gs, ord, 2);
    for (int i = 0; i < 3; ++i) CHECK(all[i].value == doctest::Approx(u_stat_leading(gs, ord[i]).value).epsilon(1e-12));
}

TEST_CASE("permutation null") {
    std::mt19937_64 g(4);
    auto gs = group(oracle::random_matrix(g, 15, 4), oracle::random_matrix(g, 12, 4));
    auto a = permutation_null(gs, 2, 120, 5);
    auto b = permutation_null(gs, 2, 120, 5);
    CHECK(a.draws == b.draws);
    CHECK(a.draws.size() == 120);
    CHECK(std::is_sorted(a.draws.begin(), a.draws.end()));
    CHECK(a.sd > 0.0);
    CHECK(a.draws != permutation_null(gs, 2, 120, 6).draws);
    CHECK_CODE(permutation_null(gs, 2, 0, 5), ErrorCode::InvalidArgument);
    CHECK_CODE(permutation_null(gs, 2, 99, 5), ErrorCode::InvalidArgument);
    int ord[2] = {1, 2};
    auto t1 = cov2_permutation_null(gs, ord, 100, 5, 1);
    auto t3 = cov2_permutation_null(gs, ord, 100, 5, 3);
    CHECK(t1[1].draws == t3[1].draws);
}

TEST_CASE("relabeling mean is near zero for a copied sample") {
    std::mt19937_64 g(5);
    auto x = oracle::random_matrix(g, 20, 3);
    auto nl = permutation_null(group(x, x), 1, 400, 9);
    CHECK(std::fabs(nl.mean) < 3.0 * nl.sd / std::sqrt(400.0));
}

TEST_CASE("permutation p-values are uniform on their grid under exchangeable data") {
    std::mt19937_64 g(6);
    const int outer = 1000, count = 100;
    std::vector<double> ps;
    for (int r = 0; r < outer; ++r) {
        auto gs = group(oracle::random_matrix(g, 12, 3), oracle::random_matrix(g, 12, 3));
        double obs = u_stat_leading(gs, 2).value;
        auto nl = permutation_null(gs, 2, count, derive_seed(77, r));
        std::vector<double> dev(nl.draws.size());
        for (std::size_t i = 0; i < dev.size(); ++i) dev[i] = nl.draws[i] - nl.mean;
        ps.push_back(permutation_pvalue(obs - nl.mean, dev, Sided::Two).value);
    }
    // KS distance against the discrete uniform law on {1/(count+1), ..., 1}
    double ks = 0.0;
    for (int k = 1; k <= count + 1; ++k) {
        const double t = double(k) / (count + 1);
        double f = 0.0;
        for (double p : ps) f += p <= t + 1e-12;
        ks = std::max(ks, std::fabs(f / outer - t));
    }
    CHECK(ks < 0.1);
}

TEST_CASE("elliptical variance") {
    std::mt19937_64 g(7);
    auto x = oracle::random_matrix(g, 10, 3), y = oracle::random_matrix(g, 8, 3);
    auto gs = group(x, y);
    int ord[2] = {1, 2};
    auto res = cov2_u_stats(gs, ord);
    cov2_elliptical_variance(gs, res, 1.0, 1.5);
    for (int k = 0; k < 2; ++k) {
        int a = ord[k];
        double tx = oracle::mean1_variance(x, a) * oracle::falling(10, a) / oracle::fact(a);
        double ty = oracle::mean1_variance(y, a) * oracle::falling(8, a) / oracle::fact(a);
        double total = (10 * tx + 8 * ty) / 18.0;
        double ck = std::pow(0.0 / 10 + 0.5 / 8, a) + 2 * std::pow(1.0 / 10 + 1.5 / 8, a);
        CHECK(oracle::rel_err(res[k].variance, oracle::fact(a) * ck * total * total) < 1e-9);
        CHECK(res[k].z == doctest::Approx(res[k].value / std::sqrt(res[k].variance)));
    }
    CHECK_CODE(cov2_elliptical_variance(gs, res, 0.0, 1.0), ErrorCode::InvalidArgument);
}

TEST_CASE("maximum of standardized differences") {
    Eigen::MatrixXd x(4, 2), y(4, 2);
    x << 1, 0, -1, 0, 2, 1, -2, -1;
    y << 1, 1, -1, -1, 1, 0, -1, 0;
    auto r = cov2_max_stat(group(x, y));
    CHECK(r.value >= 0.0);
    CHECK(r.arg1 <= r.arg2);
    // recompute by hand over j1 <= j2
    auto cx = oracle::center(x), cy = oracle::center(y);
    double best = 0.0;
    for (int j2 = 0; j2 < 2; ++j2)
        for (int j1 = 0; j1 <= j2; ++j1) {
            auto px = oracle::col_product(cx, j1, j2), py = oracle::col_product(cy, j1, j2);
            double mx = 0, my = 0, vx = 0, vy = 0;
            for (double v : px) mx += v / 4;
            for (double v : py) my += v / 4;
            for (double v : px) vx += (v - mx) * (v - mx) / 4;
            for (double v : py) vy += (v - my) * (v - my) / 4;
            best = std::max(best, (mx - my) * (mx - my) / (vx / 4 + vy / 4));
        }
    CHECK(r.value == doctest::Approx(best));
}

TEST_CASE("order above group size") {
    std::mt19937_64 g(8);
    auto gs = group(oracle::random_matrix(g, 3, 2), oracle::random_matrix(g, 5, 2));
    CHECK_CODE(u_stat_leading(gs, 4), ErrorCode::OrderExceedsSampleSize);
}
